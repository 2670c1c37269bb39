"""Hamiltonian, master-equation generator, integration and stationarity.

The equation of motion integrated here is

    drho/dt = i [rho, H] + (1/2) sum_{i,k} sum_j Gamma_j^{ik}
              (2 s_j^{i-} rho s_j^{k+} - s_j^{i+} s_j^{k-} rho
               - rho s_j^{i+} s_j^{k-})

with the dipole-coupled Hamiltonian

    H = sum_{i,j} (-wbar_j^i) s_j^{i-} s_j^{i+}
        + sum_{i != k} sum_j Omega_j^{ik} s_j^{i+} s_j^{k-},

where s_j^{i-} lowers atom i on transition j. The dissipator is evaluated
in this pairwise form for arbitrary mutual-decay matrices; the collective
jump operators S_j^- = sum_i s_j^{i-} reproduce it exactly only when all
Gamma_j^{ik} are equal, which is also the regime in which the pure-state
stationarity criterion below applies.

Both maps are trace-free and Hermiticity-preserving for *every* input
matrix by construction, so traces and Hermiticity survive explicit
Runge-Kutta stepping to floating-point accuracy at any tolerance.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm, null_space
from scipy.sparse.linalg import expm_multiply

from ._tensor import embed_sites, left_apply_site, unvec_col, vec_col
from .couplings import CouplingSet
from .errors import (
    DimensionCapError,
    NumericalError,
    PositivityError,
    UnsupportedRegimeError,
)
from .states import (
    DensityMatrix,
    LevelScheme,
    PureState,
    _density_entries,
    antisymmetric_dark_state,
    v_system_dark_state,
)

POSITIVITY_ABORT = 1e-6
DEFAULT_STATIONARITY_TOL = 1e-9


def _check_dims(couplings: CouplingSet, scheme: LevelScheme):
    if tuple(couplings.transition_ids) != tuple(scheme.transition_ids):
        raise ValueError(
            f"coupling transitions {couplings.transition_ids} do not match "
            f"scheme transitions {scheme.transition_ids}"
        )


def collective_jump_operators(M: int, scheme: LevelScheme) -> list:
    """Dense collective lowering operators S_j^- = sum_i s_j^{i-}, one per
    transition (in transition-id order). Each is nilpotent of order <= M+1."""
    if M < 1:
        raise ValueError("need at least one atom")
    ops = []
    for j in scheme.transition_ids:
        low = scheme.lowering_matrix(j)
        S = np.zeros((scheme.d**M, scheme.d**M), dtype=complex)
        for i in range(M):
            S += embed_sites({i: low}, M, scheme.d)
        ops.append(S)
    return ops


def build_hamiltonian(couplings: CouplingSet, scheme: LevelScheme) -> np.ndarray:
    """Dense dipole-coupled Hamiltonian for the given couplings."""
    _check_dims(couplings, scheme)
    M, d = couplings.M, scheme.d
    D = d**M
    H = np.zeros((D, D), dtype=complex)
    for j in scheme.transition_ids:
        low = scheme.lowering_matrix(j)
        raise_ = low.conj().T
        # s^- s^+ projects onto the transition's lower level
        lower_proj = low @ raise_
        wbar = couplings.omega_bar[j]
        for i in range(M):
            if wbar[i] != 0.0:
                H -= wbar[i] * embed_sites({i: lower_proj}, M, d)
        Om = couplings.omega[j]
        for i in range(M):
            for k in range(M):
                if i != k and Om[i, k] != 0.0:
                    H += Om[i, k] * embed_sites({i: raise_, k: low}, M, d)
    return H


class MasterEquation:
    """Precomputed right-hand side of the master equation.

    ``apply`` evaluates drho/dt for an arbitrary (not necessarily physical)
    matrix; it is linear over the complex numbers.
    """

    def __init__(self, couplings: CouplingSet, scheme: LevelScheme):
        _check_dims(couplings, scheme)
        self.couplings = couplings
        self.scheme = scheme
        self.M, self.d = couplings.M, scheme.d
        self.dim = self.d**self.M
        self.hamiltonian = build_hamiltonian(couplings, scheme)
        anticomm = np.zeros((self.dim, self.dim), dtype=complex)
        for j in scheme.transition_ids:
            low = scheme.lowering_matrix(j)
            raise_ = low.conj().T
            upper_proj = raise_ @ low
            Gm = couplings.gamma[j]
            for i in range(self.M):
                for k in range(self.M):
                    if i == k:
                        anticomm += Gm[i, i] * embed_sites({i: upper_proj}, self.M, self.d)
                    else:
                        anticomm += Gm[i, k] * embed_sites(
                            {i: raise_, k: low}, self.M, self.d
                        )
        # i[rho, H] - (1/2){A, rho} == -K rho - rho K^dag with K = iH + A/2
        self._damping = 1j * self.hamiltonian + 0.5 * anticomm
        self._damping_h = self._damping.conj().T.copy()
        self._lowering = {j: scheme.lowering_matrix(j) for j in scheme.transition_ids}
        self._levels = {j: (up, lo) for (up, lo, j) in scheme.transitions}

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Evaluate drho/dt. The sandwich terms exploit that every ladder
        operator has a single unit entry: s_j^{i-} rho s_j^{k+} is one slab
        of rho moved from the upper-level row/column blocks of atoms (i, k)
        to their lower-level blocks."""
        M, d = self.M, self.d
        out = -(self._damping @ rho) - (rho @ self._damping_h)
        for j in self.scheme.transition_ids:
            up, lo = self._levels[j]
            Gm = self.couplings.gamma[j]
            for i in range(M):
                row_shape = (d**i, d, d ** (M - 1 - i))
                for k in range(M):
                    shape = row_shape + (d**k, d, d ** (M - 1 - k))
                    out.reshape(shape)[:, lo, :, :, lo, :] += Gm[i, k] * rho.reshape(shape)[
                        :, up, :, :, up, :
                    ]
        return out


def liouvillian_apply(rho, couplings: CouplingSet, scheme: LevelScheme) -> np.ndarray:
    """Full master-equation right-hand side drho/dt for one input matrix.

    Accepts a DensityMatrix or a raw complex matrix. For repeated
    evaluation construct a :class:`MasterEquation` once instead.
    """
    mat = _density_entries(rho)
    me = MasterEquation(couplings, scheme)
    if mat.shape != (me.dim, me.dim):
        raise ValueError(f"matrix must be {me.dim} x {me.dim}, got {mat.shape}")
    return me.apply(mat)


def vectorized_generator(couplings: CouplingSet, scheme: LevelScheme) -> np.ndarray:
    """Dense superoperator of the master equation, column-stacking
    convention: vec(A rho B) = (B^T kron A) vec(rho)."""
    me = MasterEquation(couplings, scheme)
    D = me.dim
    eye = np.eye(D)
    L = -np.kron(eye, me._damping) - np.kron(me._damping.conj(), eye)
    for j in scheme.transition_ids:
        low = me._lowering[j]
        raise_ = low.conj().T
        Gm = couplings.gamma[j]
        for i in range(me.M):
            A = embed_sites({i: low}, me.M, me.d)
            for k in range(me.M):
                if Gm[i, k] == 0.0:
                    continue
                B = embed_sites({k: raise_}, me.M, me.d)
                L += Gm[i, k] * np.kron(B.T, A)
    return L


def _sparse_generator(couplings: CouplingSet, scheme: LevelScheme):
    """Sparse-assembled superoperator, same convention as
    :func:`vectorized_generator`; the ladder operators have one entry per
    basis column, so the result has O(D^2) nonzeros."""
    from scipy import sparse

    me = MasterEquation(couplings, scheme)
    D = me.dim
    eye = sparse.identity(D, dtype=complex, format="csr")
    damping = sparse.csr_matrix(me._damping)
    L = -sparse.kron(eye, damping) - sparse.kron(damping.conj(), eye)
    for j in scheme.transition_ids:
        Gm = couplings.gamma[j]
        for i in range(me.M):
            A = sparse.csr_matrix(embed_sites({i: me._lowering[j]}, me.M, me.d))
            for k in range(me.M):
                if Gm[i, k] == 0.0:
                    continue
                B = sparse.csr_matrix(
                    embed_sites({k: me._lowering[j].conj().T}, me.M, me.d)
                )
                L = L + Gm[i, k] * sparse.kron(B.T, A)
    return L.tocsr()


def propagate_exact(rho0, couplings: CouplingSet, scheme: LevelScheme, times) -> np.ndarray:
    """Evolution snapshots by exponentiating the vectorized generator.

    Independent of the adaptive integrator; used as its oracle. Steps from
    grid time to grid time with a dense matrix exponential (cached per
    distinct step size) for small registers and with on-the-fly
    exponential-times-vector products otherwise. Returns an array of shape
    (len(times), D, D).
    """
    times = np.asarray(times, dtype=float)
    mat = _density_entries(rho0)
    D = mat.shape[0]
    L = vectorized_generator(couplings, scheme) if D <= 32 else _sparse_generator(couplings, scheme)
    out = np.empty((len(times), D, D), dtype=complex)
    v = vec_col(mat).astype(complex)
    prev = times[0]
    if times[0] != 0.0:
        v = expm(L * times[0]) @ v if D <= 32 else expm_multiply(L * times[0], v)
    out[0] = unvec_col(v, D)
    steppers = {}
    for n, t in enumerate(times[1:], start=1):
        dt = t - prev
        if D <= 32:
            key = round(dt, 15)
            if key not in steppers:
                steppers[key] = expm(L * dt)
            v = steppers[key] @ v
        else:
            v = expm_multiply(L * dt, v)
        out[n] = unvec_col(v, D)
        prev = t
    return out


# ---------------------------------------------------------------------------
# observables


def _atom_count(rho, mat: np.ndarray, d: int) -> int:
    if isinstance(rho, DensityMatrix):
        return rho.M
    M = round(np.log(mat.shape[0]) / np.log(d))
    if d**M != mat.shape[0]:
        raise ValueError(f"matrix dimension {mat.shape[0]} is not a power of d = {d}")
    return M


def excited_population(rho, scheme: LevelScheme):
    """Per-atom excited populations and their sum for a density matrix."""
    mat = _density_entries(rho)
    d = scheme.d
    M = _atom_count(rho, mat, d)
    proj = scheme.excited_projector()
    per_atom = np.empty(M)
    for i in range(M):
        per_atom[i] = float(np.real(np.trace(left_apply_site(proj, mat, i, M, d))))
    return per_atom, float(per_atom.sum())


def ground_populations(rho, scheme: LevelScheme) -> dict:
    """Total population of each non-excited level, keyed by level label."""
    mat = _density_entries(rho)
    d = scheme.d
    M = _atom_count(rho, mat, d)
    out = {}
    for level in scheme.ground_indices:
        proj = scheme.level_projector(level)
        total = 0.0
        for i in range(M):
            total += float(np.real(np.trace(left_apply_site(proj, mat, i, M, d))))
        out[scheme.labels[level]] = total
    return out


def dark_fraction(rho, reference: PureState) -> float:
    """<reference| rho |reference>."""
    mat = _density_entries(rho)
    if mat.shape[0] != reference.amplitudes.shape[0]:
        raise ValueError("dimension mismatch between state and reference")
    return float(np.real(np.vdot(reference.amplitudes, mat @ reference.amplitudes)))


def total_dipole(rho, scheme: LevelScheme, transition_id: int) -> complex:
    """Expectation of the collective lowering operator on one transition."""
    mat = _density_entries(rho)
    d = scheme.d
    M = _atom_count(rho, mat, d)
    low = scheme.lowering_matrix(transition_id)
    val = 0.0 + 0.0j
    for i in range(M):
        val += np.trace(left_apply_site(low, mat, i, M, d))
    return complex(val)


# ---------------------------------------------------------------------------
# time evolution


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Density-matrix snapshots plus derived observables on a time grid.

    Times are in units of the inverse reference decay rate. dark_fraction
    is NaN when no reference dark state exists (M != d for the scheme and
    none was supplied).
    """

    times: np.ndarray
    states: tuple
    pop_e_atom: np.ndarray
    pop_e_total: np.ndarray
    pop_g: dict
    dark_fraction: np.ndarray
    trace: np.ndarray
    purity: np.ndarray
    scheme: LevelScheme

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.max(np.abs(self.trace - 1.0)) > 1e-9:
            raise ValueError("trajectory trace drifted beyond 1e-9")


def default_dark_reference(M: int, scheme: LevelScheme):
    """Canonical dark reference state, if one exists for this register."""
    if M != scheme.d:
        return None
    if scheme.kind == "lambda":
        return antisymmetric_dark_state(M)
    if scheme.kind == "v":
        return v_system_dark_state(M)
    return None


def evolve(
    rho0: DensityMatrix,
    couplings: CouplingSet,
    scheme: LevelScheme,
    t_grid,
    tol: float = 1e-8,
    max_step: float = 0.25,
    dark_reference: PureState | None = None,
) -> Trajectory:
    """Integrate the master equation and sample it on the requested grid.

    Uses an embedded adaptive Runge-Kutta pair (DOP853) with relative
    tolerance ``tol``; snapshots are produced at exactly the grid times via
    the integrator's dense output, with ``max_step`` capping the step size
    so that interpolation error stays far below ``tol``. Aborts with
    :class:`PositivityError` if any snapshot acquires an eigenvalue below
    -1e-6, which signals an invalid coupling set or too loose a tolerance.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2:
        raise ValueError("t_grid must contain at least two times")
    if t_grid[0] != 0.0:
        raise ValueError("t_grid must start at 0")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if not (1e-12 <= tol <= 1e-3):
        raise ValueError("tol must lie in [1e-12, 1e-3]")

    me = MasterEquation(couplings, scheme)
    D = me.dim
    mat0 = _density_entries(rho0)
    if mat0.shape != (D, D):
        raise ValueError(f"initial state must be {D} x {D}")

    def rhs(_t, y):
        return me.apply(y.reshape(D, D)).reshape(-1)

    sol = solve_ivp(
        rhs,
        (t_grid[0], t_grid[-1]),
        mat0.reshape(-1).astype(complex),
        method="DOP853",
        t_eval=t_grid,
        rtol=tol,
        atol=tol * 1e-2,
        max_step=max_step,
    )
    if not sol.success:
        raise NumericalError(f"integrator failed: {sol.message}")

    if dark_reference is None:
        dark_reference = default_dark_reference(me.M, scheme)

    snapshots = sol.y.T.reshape(len(t_grid), D, D)
    states = []
    n_grid = len(t_grid)
    pop_e_atom = np.empty((n_grid, me.M))
    pop_e_total = np.empty(n_grid)
    ground_labels = [scheme.labels[l] for l in scheme.ground_indices]
    pop_g = {label: np.empty(n_grid) for label in ground_labels}
    dark = np.full(n_grid, np.nan)
    trace = np.empty(n_grid)
    purity = np.empty(n_grid)
    for n, mat in enumerate(snapshots):
        min_eig = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2).min())
        if min_eig < -POSITIVITY_ABORT:
            raise PositivityError(
                f"state positivity violated at t = {t_grid[n]:g} "
                f"(eigenvalue {min_eig:.3e}); check the coupling set and tol"
            )
        dm = DensityMatrix(me.M, me.d, mat, eig_tol=POSITIVITY_ABORT)
        states.append(dm)
        per_atom, total = excited_population(dm, scheme)
        pop_e_atom[n] = per_atom
        pop_e_total[n] = total
        for label, value in ground_populations(dm, scheme).items():
            pop_g[label][n] = value
        if dark_reference is not None:
            dark[n] = dark_fraction(dm, dark_reference)
        trace[n] = float(np.real(np.trace(mat)))
        purity[n] = dm.purity()

    return Trajectory(
        times=t_grid,
        states=tuple(states),
        pop_e_atom=pop_e_atom,
        pop_e_total=pop_e_total,
        pop_g=pop_g,
        dark_fraction=dark,
        trace=trace,
        purity=purity,
        scheme=scheme,
    )


# ---------------------------------------------------------------------------
# stationarity


@dataclass(frozen=True, eq=False)
class StationarityReport:
    """Outcome of the pure-state stationarity test.

    lam is the eigenvalue fitted to Q^dag |phi> with Q built from the jump
    operators and the Hamiltonian; jump_residuals holds ||S_j^- phi|| per
    transition (nilpotency of the collective lowering operators forces the
    jump eigenvalues to vanish, so stationarity requires annihilation).
    """

    is_stationary: bool
    lam: complex
    jump_residuals: dict
    eigenvector_residual: float
    liouvillian_residual: float
    tol: float


def check_pure_stationary(
    phi: PureState,
    couplings: CouplingSet,
    scheme: LevelScheme,
    tol: float = DEFAULT_STATIONARITY_TOL,
) -> StationarityReport:
    """Test whether a pure state is stationary under the collective decay.

    Requires every transition to be in the equal-coupling regime, where the
    dissipator reduces to the collective jump operators; otherwise raises
    :class:`UnsupportedRegimeError` (evaluate ``liouvillian_apply`` on the
    projector directly in that case).
    """
    _check_dims(couplings, scheme)
    M = couplings.M
    if phi.amplitudes.shape[0] != scheme.d**M:
        raise ValueError("state dimension does not match couplings/scheme")
    rates = {}
    for j in scheme.transition_ids:
        if not couplings.is_uniform(j):
            raise UnsupportedRegimeError(
                f"transition {j} has non-uniform mutual decay rates; the "
                "jump-operator criterion applies only in the equal-coupling "
                "regime (use liouvillian_apply instead)"
            )
        rates[j] = float(couplings.gamma[j][0, 0])

    jumps = collective_jump_operators(M, scheme)
    vec = phi.amplitudes
    jump_residuals = {}
    P = np.zeros((len(vec), len(vec)), dtype=complex)
    for j, S in zip(scheme.transition_ids, jumps):
        jump_residuals[j] = float(np.linalg.norm(S @ vec))
        P += rates[j] * (S.conj().T @ S)
    H = build_hamiltonian(couplings, scheme)
    Q_dag = P.conj().T + 1j * H
    image = Q_dag @ vec
    lam = complex(np.vdot(vec, image))
    eig_residual = float(np.linalg.norm(image - lam * vec))

    me = MasterEquation(couplings, scheme)
    liou_residual = float(np.linalg.norm(me.apply(np.outer(vec, vec.conj()))))

    ok = eig_residual < tol and all(r < tol for r in jump_residuals.values())
    return StationarityReport(
        is_stationary=ok,
        lam=lam,
        jump_residuals=jump_residuals,
        eigenvector_residual=eig_residual,
        liouvillian_residual=liou_residual,
        tol=tol,
    )


@dataclass(frozen=True, eq=False)
class DarkSubspace:
    """Joint kernel of the collective jump operators.

    ``basis`` spans the whole kernel; ``excited_basis`` spans its component
    orthogonal to the zero-excitation product subspace.
    """

    basis: np.ndarray
    excited_basis: np.ndarray

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    @property
    def excited_dimension(self) -> int:
        return self.excited_basis.shape[1]


def dark_subspace(M: int, scheme: LevelScheme, dim_cap: int = 10_000) -> DarkSubspace:
    """Orthonormal basis of states annihilated by every collective jump
    operator, computed from the dense joint nullspace."""
    D = scheme.d**M
    if D > dim_cap:
        raise DimensionCapError(f"d**M = {D} exceeds the dense kernel cap {dim_cap}")
    jumps = collective_jump_operators(M, scheme)
    stacked = np.vstack(jumps)
    kernel = null_space(stacked)

    # zero-excitation subspace = product states of non-excited levels only
    ground = set(scheme.ground_indices)
    flags = np.ones(D, dtype=bool)
    for idx in range(D):
        rem = idx
        for _ in range(M):
            if rem % scheme.d not in ground:
                flags[idx] = False
                break
            rem //= scheme.d
    projected = kernel.copy()
    projected[flags, :] = 0.0
    if projected.size and np.linalg.norm(projected) > 0:
        u, s, _ = np.linalg.svd(projected, full_matrices=False)
        excited = u[:, s > 1e-8]
    else:
        excited = np.zeros((D, 0))
    return DarkSubspace(basis=kernel, excited_basis=excited)
