"""Low-level tensor operations on multi-qudit vectors and matrices.

All routines index atoms 0-based and assume the lexicographic basis with
atom 0 as the most significant digit, i.e. basis index = sum_m level_m *
d**(M-1-m) for levels (level_0, ..., level_{M-1}).
"""

import numpy as np


def basis_index(levels, d: int) -> int:
    """Flat basis index of a product ket given per-atom level indices."""
    idx = 0
    for lev in levels:
        idx = idx * d + lev
    return idx


def apply_site_vec(op: np.ndarray, psi: np.ndarray, site: int, M: int, d: int) -> np.ndarray:
    """Apply a one-atom operator to `site` of a d**M state vector."""
    pre = d**site
    t = psi.reshape(pre, d, -1)
    return np.matmul(op, t).reshape(-1)


def apply_gate_vec(matrix: np.ndarray, psi: np.ndarray, sites, M: int, d: int) -> np.ndarray:
    """Apply a multi-atom unitary to the ordered `sites` of a state vector."""
    k = len(sites)
    t = psi.reshape([d] * M)
    t = np.moveaxis(t, sites, range(k))
    shape = t.shape
    t = (matrix @ t.reshape(d**k, -1)).reshape(shape)
    t = np.moveaxis(t, range(k), sites)
    return t.reshape(-1)


def left_apply_site(op: np.ndarray, rho: np.ndarray, site: int, M: int, d: int) -> np.ndarray:
    """(op embedded at site) @ rho for a d**M x d**M matrix rho."""
    D = d**M
    pre = d**site
    t = rho.reshape(pre, d, -1)
    return np.matmul(op, t).reshape(D, D)


def embed_sites(site_ops: dict, M: int, d: int) -> np.ndarray:
    """Dense d**M operator with the given per-site d x d factors, identity
    elsewhere. `site_ops` maps 0-based site index to matrix."""
    out = np.array([[1.0 + 0.0j]])
    eye = np.eye(d, dtype=complex)
    for m in range(M):
        out = np.kron(out, site_ops.get(m, eye))
    return out


def vec_col(mat: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return mat.reshape(-1, order="F")


def unvec_col(v: np.ndarray, D: int) -> np.ndarray:
    """Inverse of :func:`vec_col`."""
    return v.reshape(D, D, order="F")
