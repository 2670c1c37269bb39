"""Collective spontaneous emission of multilevel atoms: construction,
evolution, certification and preparation of multi-atom dark states."""

__version__ = "0.1.0"

from .couplings import (
    CouplingSet,
    Geometry,
    dicke_couplings,
    explicit_couplings,
    scalar_kernel_couplings,
)
from .circuits import (
    Circuit,
    Gate,
    LocalPhaseFit,
    controlled_cycle,
    cyclic_shift,
    equal_up_to_local_phases,
    exponential_triple_cycle_gate,
    prepare_dark_method1,
    prepare_dark_method2,
    prepare_dark_recursive,
    prepare_superradiant_recursive,
    prepare_two_atom_singlet,
)
from .dynamics import (
    DarkSubspace,
    MasterEquation,
    StationarityReport,
    Trajectory,
    build_hamiltonian,
    check_pure_stationary,
    collective_jump_operators,
    dark_fraction,
    dark_subspace,
    evolve,
    excited_population,
    ground_populations,
    liouvillian_apply,
    propagate_exact,
    total_dipole,
    vectorized_generator,
)
from .entanglement import (
    LossCertificate,
    ProductAnsatz,
    geometric_measure,
    gl_invariance_check,
    negativity,
    partial_transpose,
    persistence_under_loss,
    witness_expectation,
)
from .errors import (
    ConfigError,
    DimensionCapError,
    InvalidPhysicsError,
    NumericalError,
    PositivityError,
    ProtocolRegressionError,
    UnsupportedRegimeError,
)
from .scenarios import PRESETS, ScenarioConfig, preset_config, run_scenario, write_csv
from .states import (
    DensityMatrix,
    LevelScheme,
    PureState,
    antisymmetric_dark_state,
    basis_ket,
    composite_dark_state,
    lambda_scheme,
    partial_trace,
    symmetric_superradiant_state,
    tensor_product,
    v_scheme,
    v_system_dark_state,
)
