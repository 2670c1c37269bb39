"""Mutual decay rates, exchange shifts and effective transition frequencies.

A :class:`CouplingSet` carries, per radiative transition j, the real
symmetric M x M mutual-decay matrix (diagonal = single-atom rates), the
real symmetric exchange-shift matrix with zero diagonal (single-atom shifts
are absorbed into the effective frequencies), and one effective transition
frequency per atom. Rates are expressed in multiples of a reference rate;
all frequencies share that unit.

Cross-transition dissipative couplings (photon exchange between different
transitions) are not modeled: photons emitted on distinct transitions are
treated as distinguishable.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPhysicsError
from .states import LevelScheme

SYM_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Geometry:
    """Fixed classical atom positions, in units of the transition
    wavelength."""

    positions: np.ndarray

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError("positions must be an (M, 3) array")
        if pos.shape[0] < 1:
            raise ValueError("geometry needs at least one atom")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def M(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True, eq=False)
class CouplingSet:
    """Validated per-transition coupling data for M atoms.

    gamma / omega map transition id to an M x M matrix; omega_bar maps
    transition id to a length-M vector of effective transition frequencies.
    """

    M: int
    transition_ids: tuple
    gamma: dict
    omega: dict
    omega_bar: dict

    def __post_init__(self):
        gamma, omega, omega_bar = {}, {}, {}
        for j in self.transition_ids:
            g = np.array(self.gamma[j], dtype=float)
            o = np.array(self.omega[j], dtype=float)
            w = np.array(self.omega_bar[j], dtype=float)
            if g.shape != (self.M, self.M) or o.shape != (self.M, self.M):
                raise ValueError(f"transition {j}: matrices must be {self.M} x {self.M}")
            if w.shape != (self.M,):
                raise ValueError(f"transition {j}: omega_bar must have length {self.M}")
            if np.max(np.abs(g - g.T)) > SYM_TOL * max(1.0, np.max(np.abs(g))):
                raise ValueError(f"transition {j}: decay matrix not symmetric")
            if np.max(np.abs(o - o.T)) > SYM_TOL * max(1.0, np.max(np.abs(o))):
                raise ValueError(f"transition {j}: shift matrix not symmetric")
            if np.any(np.diag(o) != 0.0):
                raise ValueError(
                    f"transition {j}: shift matrix must have zero diagonal "
                    "(self-shifts belong in omega_bar)"
                )
            if np.any(np.diag(g) <= 0.0):
                raise InvalidPhysicsError(
                    f"transition {j}: single-atom decay rates must be positive"
                )
            min_eig = float(np.linalg.eigvalsh(g).min())
            if min_eig < -PSD_TOL:
                raise InvalidPhysicsError(
                    f"transition {j}: decay matrix is not positive semidefinite "
                    f"(eigenvalue {min_eig:.3e}); the dissipator would not be "
                    "of Lindblad form"
                )
            for arr in (g, o, w):
                arr.setflags(write=False)
            gamma[j], omega[j], omega_bar[j] = g, o, w
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "omega_bar", omega_bar)

    def is_uniform(self, transition_id: int, rtol: float = 1e-12) -> bool:
        """True if every entry of the decay matrix is (numerically) equal,
        i.e. the transition is in the equal-coupling collective regime."""
        g = self.gamma[transition_id]
        return float(np.ptp(g)) <= rtol * max(1.0, float(np.max(np.abs(g))))


def _per_transition(value, transition_ids, name: str) -> dict:
    """Normalize scalar / sequence / mapping input to {transition id: float}."""
    if isinstance(value, dict):
        missing = [j for j in transition_ids if j not in value]
        if missing:
            raise ValueError(f"{name}: missing transitions {missing}")
        return {j: float(value[j]) for j in transition_ids}
    if np.ndim(value) == 0:
        return {j: float(value) for j in transition_ids}
    seq = list(value)
    if len(seq) != len(transition_ids):
        raise ValueError(f"{name}: expected one value per transition ({len(transition_ids)})")
    return {j: float(v) for j, v in zip(transition_ids, seq)}


def dicke_couplings(M: int, scheme: LevelScheme, gamma, omega=0.0, omega_bar=0.0) -> CouplingSet:
    """Equal couplings for atoms much closer than the wavelength.

    Every mutual decay rate equals the single-atom rate gamma_j and every
    exchange shift the common omega_j; effective frequencies are uniform.
    gamma / omega / omega_bar accept a scalar, a per-transition sequence, or
    a mapping keyed by transition id.
    """
    if M < 1:
        raise ValueError("need at least one atom")
    ids = scheme.transition_ids
    g = _per_transition(gamma, ids, "gamma")
    o = _per_transition(omega, ids, "omega")
    w = _per_transition(omega_bar, ids, "omega_bar")
    if any(v <= 0 for v in g.values()):
        raise ValueError("decay rates must be positive")
    ones = np.ones((M, M))
    hollow = ones - np.eye(M)
    return CouplingSet(
        M,
        ids,
        gamma={j: g[j] * ones for j in ids},
        omega={j: o[j] * hollow for j in ids},
        omega_bar={j: np.full(M, w[j]) for j in ids},
    )


def explicit_couplings(gamma_matrices, omega_matrices=None, omega_bar=None) -> CouplingSet:
    """Build a coupling set from user matrices, one per transition.

    Inputs may be sequences (assigned transition ids 1, 2, ...) or mappings
    keyed by transition id. Validation rejects asymmetric input and decay
    matrices with an eigenvalue below -1e-10.
    """
    if isinstance(gamma_matrices, dict):
        ids = tuple(sorted(gamma_matrices))
        gmats = {j: np.asarray(gamma_matrices[j], dtype=float) for j in ids}
    else:
        mats = [np.asarray(m, dtype=float) for m in gamma_matrices]
        ids = tuple(range(1, len(mats) + 1))
        gmats = dict(zip(ids, mats))
    if not ids:
        raise ValueError("need at least one transition")
    M = gmats[ids[0]].shape[0]
    for j in ids:
        if gmats[j].shape != (M, M):
            raise ValueError("all decay matrices must be square and equally sized")

    def _as_matrices(value, name):
        if value is None:
            return {j: np.zeros((M, M)) for j in ids}
        if isinstance(value, dict):
            return {j: np.asarray(value[j], dtype=float) for j in ids}
        mats = [np.asarray(m, dtype=float) for m in value]
        if len(mats) != len(ids):
            raise ValueError(f"{name}: expected one matrix per transition")
        return dict(zip(ids, mats))

    omats = _as_matrices(omega_matrices, "omega_matrices")
    if omega_bar is None:
        wvecs = {j: np.zeros(M) for j in ids}
    elif isinstance(omega_bar, dict):
        wvecs = {j: np.asarray(omega_bar[j], dtype=float) for j in ids}
    else:
        arr = np.asarray(omega_bar, dtype=float)
        if arr.ndim == 1 and arr.shape == (M,):
            wvecs = {j: arr.copy() for j in ids}
        else:
            wvecs = {j: np.asarray(v, dtype=float) for j, v in zip(ids, arr)}
    return CouplingSet(M, ids, gamma=gmats, omega=omats, omega_bar=wvecs)


def scalar_kernel_couplings(geometry: Geometry, gamma, n_transitions: int | None = None) -> CouplingSet:
    """Distance-dependent couplings from an isotropic scalar kernel.

    With x = 2 pi |r_i - r_k| (positions in wavelength units) the mutual
    rates are gamma_j * sin(x)/x and the exchange shifts
    -(gamma_j/2) * cos(x)/x; diagonals are gamma_j and 0. The sinc kernel
    is positive semidefinite for any geometry, so validation passes up to
    floating-point noise. Polarization and level degeneracies are not
    modeled; use :func:`explicit_couplings` for anisotropic data.
    """
    if isinstance(gamma, dict):
        ids = tuple(sorted(gamma))
    elif np.ndim(gamma) == 0:
        ids = tuple(range(1, (n_transitions or 1) + 1))
    else:
        ids = tuple(range(1, len(list(gamma)) + 1))
    g = _per_transition(gamma, ids, "gamma")
    if any(v <= 0 for v in g.values()):
        raise ValueError("decay rates must be positive")

    pos = geometry.positions
    M = geometry.M
    dist = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
    off = ~np.eye(M, dtype=bool)
    if np.any(dist[off] == 0.0):
        raise ValueError("coincident atom positions are not allowed")
    x = 2.0 * np.pi * dist
    decay = np.ones((M, M))
    shift = np.zeros((M, M))
    decay[off] = np.sin(x[off]) / x[off]
    shift[off] = -0.5 * np.cos(x[off]) / x[off]
    return CouplingSet(
        M,
        ids,
        gamma={j: g[j] * decay for j in ids},
        omega={j: g[j] * shift for j in ids},
        omega_bar={j: np.zeros(M) for j in ids},
    )
