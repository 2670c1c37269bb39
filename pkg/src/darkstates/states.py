"""Level schemes, pure states, density matrices and the named special states.

Conventions used throughout the package:

* Atoms are numbered 1..M in the public API. The tensor-product basis is
  ordered lexicographically with atom 1 as the most significant digit.
* Lambda scheme on d levels: level 0 is the excited state ``e``, levels
  1..d-1 are the ground states ``g_1``..``g_{d-1}``. Transition ``j``
  connects ``e`` to ``g_j``.
* V scheme on d levels: level 0 is the ground state ``g``, levels 1..d-1
  are the excited states ``e_1``..``e_{d-1}``. Transition ``j`` connects
  ``e_j`` to ``g``.

The totally antisymmetric N-atom state over N levels places amplitude
sgn(pi)/sqrt(N!) on every permutation ket; it carriers excitation yet has
zero total dipole moment on every transition, so it decouples from
collective decay when all mutual decay rates are equal.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ._tensor import basis_index

NORM_TOL = 1e-12
HERM_TOL = 1e-10
TRACE_TOL = 1e-10
EIG_TOL = 1e-8


def _permutation_sign(perm) -> int:
    """Sign of a permutation given as a tuple of images of 0..n-1."""
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _frozen_array(a, dtype=complex) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class LevelScheme:
    """Per-atom level structure and its radiative transitions.

    Attributes:
        kind: "lambda", "v" or "generic".
        d: number of levels per atom.
        excited_indices: level indices that carry excitation.
        transitions: tuple of (upper level, lower level, transition id).
        labels: human-readable level names, index-aligned.
    """

    kind: str
    d: int
    excited_indices: frozenset
    transitions: tuple
    labels: tuple

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("level scheme needs at least 2 levels")
        if len(self.labels) != self.d:
            raise ValueError("labels must have one entry per level")
        ids = [j for (_, _, j) in self.transitions]
        if len(set(ids)) != len(ids):
            raise ValueError("transition ids must be distinct")
        for up, lo, j in self.transitions:
            if up not in self.excited_indices or lo in self.excited_indices:
                raise ValueError(
                    f"transition {j} must connect an excited level to a "
                    f"non-excited level (got {up} -> {lo})"
                )
        if self.kind == "lambda" and len(self.transitions) != self.d - 1:
            raise ValueError("Lambda scheme requires d-1 decay channels")

    @property
    def transition_ids(self) -> tuple:
        return tuple(j for (_, _, j) in self.transitions)

    @property
    def ground_indices(self) -> tuple:
        return tuple(i for i in range(self.d) if i not in self.excited_indices)

    def lowering_matrix(self, transition_id: int) -> np.ndarray:
        """Single-atom lowering operator |lower><upper| for one transition."""
        for up, lo, j in self.transitions:
            if j == transition_id:
                mat = np.zeros((self.d, self.d), dtype=complex)
                mat[lo, up] = 1.0
                return mat
        raise ValueError(f"unknown transition id {transition_id}")

    def excited_projector(self) -> np.ndarray:
        """Single-atom projector onto the excited levels."""
        diag = np.zeros(self.d)
        for i in self.excited_indices:
            diag[i] = 1.0
        return np.diag(diag).astype(complex)

    def level_projector(self, level: int) -> np.ndarray:
        mat = np.zeros((self.d, self.d), dtype=complex)
        mat[level, level] = 1.0
        return mat


def lambda_scheme(d: int = 3) -> LevelScheme:
    """Single excited level decaying to d-1 distinguishable ground levels."""
    labels = ("e",) + tuple(f"g_{i}" for i in range(1, d))
    transitions = tuple((0, j, j) for j in range(1, d))
    return LevelScheme("lambda", d, frozenset({0}), transitions, labels)


def v_scheme(d: int = 3) -> LevelScheme:
    """d-1 excited levels decaying to one common ground level."""
    labels = ("g",) + tuple(f"e_{i}" for i in range(1, d))
    transitions = tuple((j, 0, j) for j in range(1, d))
    return LevelScheme("v", d, frozenset(range(1, d)), transitions, labels)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector of M atoms with d levels each.

    The amplitude vector has length d**M, ordered lexicographically with
    atom 1 most significant.
    """

    M: int
    d: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen_array(self.amplitudes)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (self.d**self.M,):
            raise ValueError(
                f"amplitude vector must have length d**M = {self.d**self.M}, "
                f"got shape {amps.shape}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state vector not normalized: |norm - 1| = {abs(norm - 1):.3e}")

    @classmethod
    def from_amplitudes(cls, M: int, d: int, amplitudes, normalize: bool = False):
        amps = np.asarray(amplitudes, dtype=complex)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm < 1e-12:
                raise ValueError("cannot normalize a (near-)zero amplitude vector")
            amps = amps / norm
        return cls(M, d, amps)

    def overlap(self, other: "PureState") -> complex:
        """Inner product <self|other>."""
        if (self.M, self.d) != (other.M, other.d):
            raise ValueError("overlap requires equal register shape")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.M, self.d, np.outer(self.amplitudes, self.amplitudes.conj()))


def basis_ket(M: int, d: int, levels) -> PureState:
    """Product basis ket |levels[0], ..., levels[M-1]>."""
    levels = tuple(levels)
    if len(levels) != M or any(not (0 <= l < d) for l in levels):
        raise ValueError("levels must list one index in [0, d) per atom")
    amps = np.zeros(d**M, dtype=complex)
    amps[basis_index(levels, d)] = 1.0
    return PureState(M, d, amps)


def _antisymmetrizer(N: int, sign: int) -> np.ndarray:
    amps = np.zeros(N**N, dtype=complex)
    for perm in itertools.permutations(range(N)):
        weight = _permutation_sign(perm) if sign < 0 else 1
        amps[basis_index(perm, N)] = weight
    return amps / math.sqrt(math.factorial(N))


def antisymmetric_dark_state(N: int) -> PureState:
    """Totally antisymmetric N-atom, N-level state.

    Amplitude of |s_{pi(1)}, ..., s_{pi(N)}> is sgn(pi)/sqrt(N!) with the
    level ordering s_0 = e, s_i = g_i of the Lambda scheme. The state is
    annihilated by every collective lowering operator, hence stationary
    under equal-rate collective decay.
    """
    if N < 2:
        raise ValueError("antisymmetric dark state requires N >= 2")
    return PureState(N, N, _antisymmetrizer(N, -1))


def symmetric_superradiant_state(N: int) -> PureState:
    """Symmetric counterpart with all permutation amplitudes +1/sqrt(N!)."""
    if N < 2:
        raise ValueError("superradiant state requires N >= 2")
    return PureState(N, N, _antisymmetrizer(N, +1))


def v_system_dark_state(N: int) -> PureState:
    """Totally antisymmetric state over the V-scheme levels g, e_1, ...

    Numerically identical amplitudes to :func:`antisymmetric_dark_state`
    under the V level ordering s_0 = g, s_i = e_i; it stores N-1 excitation
    quanta in N atoms.
    """
    if N < 2:
        raise ValueError("v-system dark state requires N >= 2")
    return PureState(N, N, _antisymmetrizer(N, -1))


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Kronecker product, atom ordering a-then-b."""
    if a.d != b.d:
        raise ValueError("tensor product requires equal local dimension")
    return PureState(a.M + b.M, a.d, np.kron(a.amplitudes, b.amplitudes))


def composite_dark_state(terms, weights, return_norm: bool = False):
    """Weighted superposition of tensor-product terms placed on atom subsets.

    Each term is a sequence of ``(atoms, state)`` blocks where ``atoms`` is
    an ordered tuple of 1-based atom indices and ``state`` a PureState on
    those atoms; the blocks of a term must partition the full register.
    Dark blocks and ground kets yield a state that remains dark for any
    weights. The result is renormalized; pass ``return_norm=True`` to also
    get the pre-normalization Euclidean norm of the weighted sum.
    """
    terms = list(terms)
    weights = np.asarray(list(weights), dtype=complex)
    if len(terms) == 0 or len(terms) != len(weights):
        raise ValueError("need one weight per term")
    if np.all(np.abs(weights) == 0):
        raise ValueError("at least one weight must be nonzero")

    all_atoms = None
    d = None
    vectors = []
    for t_idx, term in enumerate(terms):
        atoms_seen = []
        block_states = []
        for atoms, state in term:
            atoms = tuple(int(a) for a in atoms)
            if d is None:
                d = state.d
            if state.d != d:
                raise ValueError("all blocks must share the local dimension d")
            if len(atoms) != state.M:
                raise ValueError(
                    f"term {t_idx}: block state has {state.M} atoms but "
                    f"{len(atoms)} atom indices were given"
                )
            atoms_seen.extend(atoms)
            block_states.append(state)
        if len(set(atoms_seen)) != len(atoms_seen):
            raise ValueError(f"term {t_idx}: overlapping atom subsets")
        target = tuple(sorted(atoms_seen))
        if target != tuple(range(1, len(atoms_seen) + 1)):
            raise ValueError(f"term {t_idx}: atom subsets must partition 1..M")
        if all_atoms is None:
            all_atoms = target
        elif target != all_atoms:
            raise ValueError("all terms must cover the same atom register")

        vec = np.array([1.0 + 0.0j])
        for state in block_states:
            vec = np.kron(vec, state.amplitudes)
        # reorder atoms from block-concatenation order to 1..M
        tensor = vec.reshape([d] * len(all_atoms))
        axes = [atoms_seen.index(a) for a in all_atoms]
        vectors.append(np.transpose(tensor, axes).reshape(-1))

    total = sum(w * v for w, v in zip(weights, vectors))
    norm = float(np.linalg.norm(total))
    if norm < 1e-12:
        raise ValueError("weighted superposition has (near-)zero norm")
    state = PureState(len(all_atoms), d, total / norm)
    if return_norm:
        return state, norm
    return state


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix over the
    M-atom basis."""

    M: int
    d: int
    entries: np.ndarray
    eig_tol: float = field(default=EIG_TOL, compare=False)

    def __post_init__(self):
        mat = _frozen_array(self.entries)
        object.__setattr__(self, "entries", mat)
        D = self.d**self.M
        if mat.shape != (D, D):
            raise ValueError(f"density matrix must be {D} x {D}, got {mat.shape}")
        herm = np.linalg.norm(mat - mat.conj().T)
        if herm > HERM_TOL:
            raise ValueError(f"density matrix not Hermitian: residual {herm:.3e}")
        tr = np.trace(mat)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr} differs from 1")
        min_eig = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2).min())
        if min_eig < -self.eig_tol:
            raise ValueError(f"density matrix has negative eigenvalue {min_eig:.3e}")

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityMatrix":
        return psi.density_matrix()

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


def _density_entries(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out all atoms not in `keep` (1-based indices).

    The kept atoms are renumbered 1..len(keep) preserving their order.
    """
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 1 or keep[-1] > rho.M:
        raise ValueError(f"keep atoms must lie in 1..{rho.M}")
    M, d = rho.M, rho.d
    keep0 = [k - 1 for k in keep]
    tensor = rho.entries.reshape([d] * (2 * M))
    row = list(range(M))
    col = [M + i if i in keep0 else i for i in range(M)]
    out = [i for i in keep0] + [M + i for i in keep0]
    reduced = np.einsum(tensor, row + col, out)
    D_keep = d ** len(keep)
    return DensityMatrix(len(keep), d, reduced.reshape(D_keep, D_keep), eig_tol=rho.eig_tol)
