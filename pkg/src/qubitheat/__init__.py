"""Heat transport in a transversely coupled qubit pair with shared or separate reservoirs.

Steady-state and transient currents from the global (secular) master
equation, the dark-state current staircase, dissipation-channel splitting
with inverse-flow detection, and entanglement of assistance.
"""

from .dissipators import (
    Liouvillian,
    RateMatrix,
    RateTable,
    Regime,
    RegimeMismatchError,
    ReservoirSpec,
    Scenario,
    Topology,
    bose_occupation,
    build_liouvillian,
    population_block,
    rate_matrix,
    rate_matrix_common_detuned,
    rate_matrix_independent,
    rate_matrix_resonant,
    spectral_density,
)
from .entanglement import (
    XStateElements,
    coa_detuned_closed,
    coa_general,
    coa_general_product,
    coa_resonant_closed,
    resonant_intercept,
    x_elements_detuned,
    x_elements_resonant,
)
from .model import (
    EigenOperator,
    EigenSystem,
    SystemParams,
    diagonalize,
    eigenoperators,
    hamiltonian_bare,
    to_bare_basis,
    to_eigen_basis,
)
from .modulator import (
    PopulationTransfer,
    PulseEvent,
    PulseSchedule,
    TimeSeries,
    UnreachableTargetError,
    build_staircase_schedule,
    evolve_free,
    rabi_populations,
    run_schedule,
    solve_pulse_duration,
)
from .steadystate import (
    DARK_STATE,
    DegenerateSteadyStateError,
    NotDegenerateError,
    NullspaceDimensionError,
    SteadyStateFamily,
    equal_rate_steady_state,
    steady_state_closed_form,
    steady_state_family,
    steady_state_nullspace,
)
from .transport import (
    HeatCurrentReport,
    InvariantViolationError,
    SweepAxis,
    SweepResult,
    channel_currents_closed_degenerate,
    channel_currents_closed_detuned,
    channel_decomposition,
    cross_current_equal_rate,
    delta_current,
    heat_current,
    heat_current_closed,
    heat_current_report,
    max_heat_current_degenerate,
    max_heat_current_degenerate_uncoupled,
    steady_populations,
    sweep,
)

__version__ = "0.1.0"
