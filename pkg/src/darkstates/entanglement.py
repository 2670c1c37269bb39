"""Entanglement diagnostics for the collective dark states.

Negativity here means the sum of the absolute values of the negative
eigenvalues of the partially transposed density matrix (not the
logarithmic variant), so the two-qubit singlet has negativity 1/2.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._tensor import apply_site_vec
from .states import (
    DensityMatrix,
    PureState,
    _density_entries,
    antisymmetric_dark_state,
    partial_trace,
)


@dataclass(frozen=True, eq=False)
class ProductAnsatz:
    """Product-state maximizer candidate from the overlap optimization.

    ``overlap`` is the squared modulus of the inner product with the target
    state; ``converged`` is False when the iteration cap was hit before the
    overlap settled.
    """

    vectors: tuple
    overlap: float
    converged: bool


def _contract_except(tensor: np.ndarray, vectors, skip: int) -> np.ndarray:
    """Contract conj(vectors) into all tensor axes except `skip`."""
    cur = tensor
    axes_alive = list(range(tensor.ndim))
    for m, vec in enumerate(vectors):
        if m == skip:
            continue
        ax = axes_alive.index(m)
        cur = np.tensordot(np.conj(vec), cur, axes=([0], [ax]))
        axes_alive.remove(m)
    return cur


def geometric_measure(
    psi: PureState,
    restarts: int = 20,
    iter_tol: float = 1e-12,
    max_iter: int = 500,
    seed: int = 7,
):
    """Geometric measure of entanglement by alternating rank-one optimization.

    Each site vector is updated in turn to the normalized contraction of the
    state with the other sites, which monotonically increases the product
    overlap; random restarts guard against local maxima. Returns
    ``(E_g, ProductAnsatz)`` with E_g = 1 - max |<a_1,...,a_M|psi>|^2.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    M, d = psi.M, psi.d
    tensor = psi.amplitudes.reshape([d] * M)
    best_overlap = -1.0
    best_vectors = None
    best_converged = False
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        vectors = []
        for _ in range(M):
            v = rng.normal(size=d) + 1j * rng.normal(size=d)
            vectors.append(v / np.linalg.norm(v))
        overlap = 0.0
        converged = False
        for _ in range(max_iter):
            for m in range(M):
                contracted = _contract_except(tensor, vectors, m)
                norm = np.linalg.norm(contracted)
                if norm == 0.0:
                    continue
                vectors[m] = contracted / norm
            new_overlap = float(norm)
            if abs(new_overlap - overlap) < iter_tol:
                overlap = new_overlap
                converged = True
                break
            overlap = new_overlap
        if overlap > best_overlap:
            best_overlap = overlap
            best_vectors = tuple(np.array(v) for v in vectors)
            best_converged = converged
    ansatz = ProductAnsatz(
        vectors=best_vectors, overlap=best_overlap**2, converged=best_converged
    )
    return 1.0 - best_overlap**2, ansatz


def witness_expectation(rho, N: int) -> float:
    """Expectation of the dark-state witness 1/N! - |psi_d><psi_d|.

    Non-negative on every separable state; a negative value certifies
    entanglement.
    """
    mat = _density_entries(rho)
    reference = antisymmetric_dark_state(N)
    if mat.shape[0] != reference.amplitudes.shape[0]:
        raise ValueError(f"density matrix does not describe {N} atoms with {N} levels")
    overlap = float(np.real(np.vdot(reference.amplitudes, mat @ reference.amplitudes)))
    return float(np.real(np.trace(mat))) / math.factorial(N) - overlap


def partial_transpose(rho, subset, M: int | None = None, d: int | None = None) -> np.ndarray:
    """Transpose the given atoms (1-based) of a density matrix."""
    mat = _density_entries(rho)
    if isinstance(rho, DensityMatrix):
        M, d = rho.M, rho.d
    if M is None or d is None:
        raise ValueError("M and d are required for raw matrices")
    subset = sorted(set(int(a) for a in subset))
    if subset and (subset[0] < 1 or subset[-1] > M):
        raise ValueError(f"atoms must lie in 1..{M}")
    tensor = mat.reshape([d] * (2 * M))
    axes = list(range(2 * M))
    for a in subset:
        i = a - 1
        axes[i], axes[M + i] = axes[M + i], axes[i]
    out = np.transpose(tensor, axes)
    return out.reshape(mat.shape)


def negativity(rho, bipartition) -> float:
    """Sum of |negative eigenvalues| of the partial transpose over the
    given atom subset (1-based); positive value certifies entanglement
    across the cut."""
    if isinstance(rho, DensityMatrix):
        M = rho.M
    else:
        raise ValueError("negativity expects a DensityMatrix")
    subset = set(int(a) for a in bipartition)
    if not subset or subset == set(range(1, M + 1)):
        raise ValueError("bipartition must be a nonempty proper atom subset")
    pt = partial_transpose(rho, subset)
    eigs = np.linalg.eigvalsh(pt)
    return float(-eigs[eigs < 0].sum())


def gl_invariance_check(psi: PureState, S: np.ndarray, tol: float = 1e-9):
    """Test |psi> proportional to S x S x ... x S |psi| for invertible S.

    Returns ``(proportional, factor)`` where the factor is fitted at the
    largest-magnitude amplitude of psi; for the totally antisymmetric state
    it equals det(S) by multilinearity.
    """
    S = np.asarray(S, dtype=complex)
    if S.shape != (psi.d, psi.d):
        raise ValueError(f"S must be {psi.d} x {psi.d}")
    if np.linalg.cond(S) > 1e8:
        raise ValueError("S is singular or too ill-conditioned")
    vec = psi.amplitudes
    out = vec.copy()
    for m in range(psi.M):
        out = apply_site_vec(S, out, m, psi.M, psi.d)
    anchor = int(np.argmax(np.abs(vec)))
    factor = complex(out[anchor] / vec[anchor])
    residual = float(np.linalg.norm(out - factor * vec))
    proportional = residual <= tol * max(1.0, float(np.linalg.norm(out)))
    return proportional, factor


@dataclass(frozen=True, eq=False)
class LossCertificate:
    """Entanglement surviving after tracing out atoms.

    ``negativities`` maps each bipartition of the remaining (renumbered)
    atoms, given as the subset containing atom 1, to its negativity.
    """

    lost: tuple
    kept: tuple
    negativities: dict
    entangled: bool


def persistence_under_loss(psi: PureState, lost, threshold: float = 1e-10) -> LossCertificate:
    """Trace out the given atoms and certify entanglement of the remainder
    by evaluating the negativity across every bipartition."""
    lost = tuple(sorted(set(int(a) for a in lost)))
    if lost and (lost[0] < 1 or lost[-1] > psi.M):
        raise ValueError(f"lost atoms must lie in 1..{psi.M}")
    kept = tuple(a for a in range(1, psi.M + 1) if a not in lost)
    if len(kept) < 2:
        raise ValueError("at least two atoms must remain")
    reduced = partial_trace(psi.density_matrix(), kept)
    R = len(kept)
    negs = {}
    rest = list(range(2, R + 1))
    for size in range(0, R - 1):
        for extra in itertools.combinations(rest, size):
            subset = (1,) + extra
            negs[subset] = negativity(reduced, subset)
    return LossCertificate(
        lost=lost,
        kept=kept,
        negativities=negs,
        entangled=any(v > threshold for v in negs.values()),
    )
