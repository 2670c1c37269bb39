"""Scenario configuration, presets and CSV output.

A scenario is described by a JSON object with the mandatory keys

    atoms, scheme ("lambda" | "v"), levels,
    coupling {model: "dicke" | "explicit" | "scalar_kernel",
              gamma, omega, [omega_bar], [positions]},
    initial_state, t_max, samples, tol

Rates are in multiples of the reference single-transition rate; times in
units of its inverse. For the "explicit" model gamma/omega are lists of
M x M matrices (one per transition); for "dicke" and "scalar_kernel" they
are scalars or per-transition lists, and "scalar_kernel" additionally
needs "positions" (wavelength units). ``initial_state`` is one of
dark, superradiant, inverted, ground, singlet_g1, singlet_g2, v_dark, or
"custom" with a top-level "amplitudes" key holding [re, im] pairs
(normalized on input).
"""

import json
import math

import numpy as np

from .couplings import CouplingSet, Geometry, dicke_couplings, explicit_couplings, scalar_kernel_couplings
from .dynamics import Trajectory, evolve
from .errors import ConfigError
from .states import (
    LevelScheme,
    PureState,
    antisymmetric_dark_state,
    basis_ket,
    lambda_scheme,
    symmetric_superradiant_state,
    v_scheme,
    v_system_dark_state,
)
from ._tensor import basis_index

_REQUIRED_KEYS = ("atoms", "scheme", "levels", "coupling", "initial_state", "t_max", "samples", "tol")
_COUPLING_MODELS = ("dicke", "explicit", "scalar_kernel")
_STATE_NAMES = (
    "dark",
    "superradiant",
    "inverted",
    "ground",
    "singlet_g1",
    "singlet_g2",
    "v_dark",
    "custom",
)


class ScenarioConfig:
    """Validated scenario description; see the module docstring for keys."""

    def __init__(self, data: dict):
        for key in _REQUIRED_KEYS:
            if key not in data:
                raise ConfigError(f"{key}: missing mandatory key")
        self.atoms = self._int(data, "atoms", minimum=1)
        self.scheme_kind = str(data["scheme"]).lower()
        if self.scheme_kind not in ("lambda", "v"):
            raise ConfigError(f"scheme: expected 'lambda' or 'v', got {data['scheme']!r}")
        self.levels = self._int(data, "levels", minimum=2)
        self.t_max = self._float(data, "t_max", positive=True)
        self.samples = self._int(data, "samples", minimum=2)
        self.tol = self._float(data, "tol", positive=True)
        if not (1e-12 <= self.tol <= 1e-3):
            raise ConfigError("tol: must lie in [1e-12, 1e-3]")

        coupling = data["coupling"]
        if not isinstance(coupling, dict):
            raise ConfigError("coupling: must be an object")
        model = str(coupling.get("model", "")).lower()
        if model not in _COUPLING_MODELS:
            raise ConfigError(f"coupling.model: expected one of {_COUPLING_MODELS}, got {model!r}")
        self.coupling_model = model
        self.coupling_data = coupling

        self.initial_state = data["initial_state"]
        if not isinstance(self.initial_state, str) or self.initial_state not in _STATE_NAMES:
            raise ConfigError(
                f"initial_state: expected one of {_STATE_NAMES}, got {self.initial_state!r}"
            )
        self.amplitudes = data.get("amplitudes")
        if self.initial_state == "custom" and self.amplitudes is None:
            raise ConfigError("amplitudes: required when initial_state is 'custom'")
        self.raw = data

    @staticmethod
    def _int(data, key, minimum):
        try:
            value = int(data[key])
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: expected an integer, got {data[key]!r}") from None
        if value < minimum:
            raise ConfigError(f"{key}: must be >= {minimum}")
        return value

    @staticmethod
    def _float(data, key, positive=False):
        try:
            value = float(data[key])
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: expected a number, got {data[key]!r}") from None
        if positive and value <= 0:
            raise ConfigError(f"{key}: must be positive")
        return value

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        return cls(data)

    # -- builders ---------------------------------------------------------

    def build_scheme(self) -> LevelScheme:
        return lambda_scheme(self.levels) if self.scheme_kind == "lambda" else v_scheme(self.levels)

    def build_couplings(self, scheme: LevelScheme) -> CouplingSet:
        c = self.coupling_data
        try:
            if self.coupling_model == "dicke":
                return dicke_couplings(
                    self.atoms,
                    scheme,
                    gamma=self._rates(c, "gamma", scheme),
                    omega=self._rates(c, "omega", scheme, default=0.0),
                    omega_bar=self._rates(c, "omega_bar", scheme, default=0.0),
                )
            if self.coupling_model == "explicit":
                if "gamma" not in c:
                    raise ConfigError("coupling.gamma: required for the explicit model")
                n_trans = len(scheme.transition_ids)
                omega = self._as_shift_matrices(c.get("omega"), n_trans)
                omega_bar = c.get("omega_bar")
                return explicit_couplings(c["gamma"], omega, omega_bar)
            positions = c.get("positions")
            if positions is None:
                raise ConfigError("coupling.positions: required for the scalar_kernel model")
            geometry = Geometry(np.asarray(positions, dtype=float))
            if geometry.M != self.atoms:
                raise ConfigError("coupling.positions: one position per atom required")
            return scalar_kernel_couplings(
                geometry,
                self._rates(c, "gamma", scheme),
                n_transitions=len(scheme.transition_ids),
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"coupling: {exc}") from None

    def _as_shift_matrices(self, value, n_trans):
        """Uniform-shift shorthand: a scalar (or per-transition scalars)
        expands to hollow matrices with that off-diagonal value."""
        if value is None:
            return None
        arr = np.asarray(value, dtype=float)
        M = self.atoms
        hollow = np.ones((M, M)) - np.eye(M)
        if arr.ndim == 0:
            return [float(arr) * hollow for _ in range(n_trans)]
        if arr.ndim == 1:
            if arr.shape[0] != n_trans:
                raise ConfigError("coupling.omega: expected one value per transition")
            return [float(v) * hollow for v in arr]
        if arr.ndim == 3:
            return [arr[i] for i in range(arr.shape[0])]
        raise ConfigError("coupling.omega: expected a scalar, per-transition list, or matrices")

    @staticmethod
    def _rates(c, key, scheme, default=None):
        if key not in c:
            if default is None:
                raise ConfigError(f"coupling.{key}: missing")
            return default
        value = c[key]
        if isinstance(value, (int, float)):
            return float(value)
        if isinstance(value, list):
            if len(value) != len(scheme.transition_ids):
                raise ConfigError(f"coupling.{key}: expected one rate per transition")
            return [float(v) for v in value]
        raise ConfigError(f"coupling.{key}: expected a number or list of rates")

    def build_initial_state(self, scheme: LevelScheme) -> PureState:
        M, d = self.atoms, self.levels
        name = self.initial_state
        try:
            if name == "dark":
                self._require(scheme.kind == "lambda" and M == d, "dark needs a Lambda scheme with atoms == levels")
                return antisymmetric_dark_state(M)
            if name == "superradiant":
                self._require(M == d, "superradiant needs atoms == levels")
                return symmetric_superradiant_state(M)
            if name == "v_dark":
                self._require(scheme.kind == "v" and M == d, "v_dark needs a V scheme with atoms == levels")
                return v_system_dark_state(M)
            if name == "inverted":
                level = 0 if scheme.kind == "lambda" else 1
                return basis_ket(M, d, [level] * M)
            if name == "ground":
                level = scheme.ground_indices[0]
                return basis_ket(M, d, [level] * M)
            if name in ("singlet_g1", "singlet_g2"):
                self._require(scheme.kind == "lambda", f"{name} needs a Lambda scheme")
                spectator = 1 if name == "singlet_g1" else 2
                self._require(d > spectator, f"{name} needs at least {spectator + 1} levels")
                self._require(M >= 2, f"{name} needs at least two atoms")
                amps = np.zeros(d**M, dtype=complex)
                rest = [spectator] * (M - 2)
                amps[basis_index([0, 1] + rest, d)] = 1.0 / math.sqrt(2.0)
                amps[basis_index([1, 0] + rest, d)] = -1.0 / math.sqrt(2.0)
                return PureState(M, d, amps)
            # custom amplitudes, [re, im] pairs or plain reals
            arr = np.asarray(self.amplitudes, dtype=float)
            if arr.ndim == 2 and arr.shape[1] == 2:
                vec = arr[:, 0] + 1j * arr[:, 1]
            elif arr.ndim == 1:
                vec = arr.astype(complex)
            else:
                raise ConfigError("amplitudes: expected a list of numbers or [re, im] pairs")
            if vec.shape[0] != d**M:
                raise ConfigError(f"amplitudes: expected length d**M = {d**M}, got {vec.shape[0]}")
            return PureState.from_amplitudes(M, d, vec, normalize=True)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"initial_state: {exc}") from None

    @staticmethod
    def _require(condition, message):
        if not condition:
            raise ConfigError(f"initial_state: {message}")


def run_scenario(config: ScenarioConfig) -> Trajectory:
    """Build all pieces from the config and integrate the master equation."""
    scheme = config.build_scheme()
    couplings = config.build_couplings(scheme)
    if couplings.M != config.atoms:
        raise ConfigError("coupling: matrices sized for a different atom count")
    psi0 = config.build_initial_state(scheme)
    if psi0.M != config.atoms or psi0.d != config.levels:
        raise ConfigError("initial_state: register does not match atoms/levels")
    t_grid = np.linspace(0.0, config.t_max, config.samples)
    return evolve(psi0.density_matrix(), couplings, scheme, t_grid, tol=config.tol)


def csv_header(trajectory: Trajectory) -> str:
    scheme = trajectory.scheme
    M = trajectory.pop_e_atom.shape[1]
    cols = ["time_gamma", "pop_e_total"]
    cols += [f"pop_e_atom_{i}" for i in range(1, M + 1)]
    cols += [f"pop_{scheme.labels[l]}_total" for l in scheme.ground_indices]
    cols += ["dark_fraction", "trace", "purity"]
    return ",".join(cols)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def csv_rows(trajectory: Trajectory):
    """Yield formatted CSV data rows (12 significant digits)."""
    scheme = trajectory.scheme
    ground_labels = [scheme.labels[l] for l in scheme.ground_indices]
    for n, t in enumerate(trajectory.times):
        fields = [_fmt(t), _fmt(trajectory.pop_e_total[n])]
        fields += [_fmt(v) for v in trajectory.pop_e_atom[n]]
        fields += [_fmt(trajectory.pop_g[label][n]) for label in ground_labels]
        fields += [
            _fmt(trajectory.dark_fraction[n]),
            _fmt(trajectory.trace[n]),
            _fmt(trajectory.purity[n]),
        ]
        yield ",".join(fields)


def write_csv(trajectory: Trajectory, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_header(trajectory) + "\n")
        for row in csv_rows(trajectory):
            fh.write(row + "\n")


# ---------------------------------------------------------------------------
# presets reproducing the bundled scenarios

_TRIANGLE_095 = [
    [1.0, 0.95, 0.95],
    [0.95, 1.0, 0.95],
    [0.95, 0.95, 1.0],
]
_CHAIN_NEGATIVE = [
    [1.0, -0.6, 0.2],
    [-0.6, 1.0, -0.6],
    [0.2, -0.6, 1.0],
]

PRESETS = {
    # sub-wavelength triangle with strong cross-damping, ideal dark state
    "fig2": {
        "atoms": 3,
        "scheme": "lambda",
        "levels": 3,
        "coupling": {"model": "explicit", "gamma": [_TRIANGLE_095, _TRIANGLE_095], "omega": 0.0},
        "initial_state": "dark",
        "t_max": 20.0,
        "samples": 400,
        "tol": 1e-9,
    },
    # two-atom singlet with a spectator in g_1: decays completely
    "fig3_g1": {
        "atoms": 3,
        "scheme": "lambda",
        "levels": 3,
        "coupling": {"model": "dicke", "gamma": 1.0, "omega": 0.0},
        "initial_state": "singlet_g1",
        "t_max": 20.0,
        "samples": 400,
        "tol": 1e-9,
    },
    # spectator in g_2: one third of the excitation is trapped
    "fig3_g2": {
        "atoms": 3,
        "scheme": "lambda",
        "levels": 3,
        "coupling": {"model": "dicke", "gamma": 1.0, "omega": 0.0},
        "initial_state": "singlet_g2",
        "t_max": 20.0,
        "samples": 400,
        "tol": 1e-9,
    },
    # chain with negative cross-damping from the fully inverted state; the
    # dark fraction grows transiently (qualitative stand-in, the true
    # distance-dependent couplings are not modeled)
    "fig5": {
        "atoms": 3,
        "scheme": "lambda",
        "levels": 3,
        "coupling": {"model": "explicit", "gamma": [_CHAIN_NEGATIVE, _CHAIN_NEGATIVE], "omega": 0.0},
        "initial_state": "inverted",
        "t_max": 20.0,
        "samples": 400,
        "tol": 1e-9,
    },
    # V-scheme chain in the equal-coupling limit: two trapped excitations
    "figv": {
        "atoms": 3,
        "scheme": "v",
        "levels": 3,
        "coupling": {"model": "dicke", "gamma": 1.0, "omega": 0.0},
        "initial_state": "v_dark",
        "t_max": 20.0,
        "samples": 400,
        "tol": 1e-9,
    },
}


def preset_config(name: str) -> ScenarioConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return ScenarioConfig(json.loads(json.dumps(PRESETS[name])))
