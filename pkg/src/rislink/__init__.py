"""Link budget and discrete-phase beamforming for active transmissive
reconfigurable surfaces.

The public surface re-exports the pieces most analyses touch: geometry and
channel primitives, per-unit hardware models, full-link evaluation, the
configuration searches, and the sweep runners.
"""

from .beamforming import (
    FeedbackChannel,
    SearchTrace,
    blind_rowcol_search,
    brute_force_optimum,
    greedy_element_search,
    nearest_quantize,
    power_oracle,
    uniform_configuration,
)
from .channel import (
    SPEED_OF_LIGHT,
    AntennaModel,
    channel_coefficient,
    channel_coefficients,
    effective_area,
    wavelength,
)
from .config import ConfigError, load_run_plan
from .experiments import (
    PatternResult,
    SweepResult,
    SweepSpec,
    angle_sweep,
    apply_beamforming,
    chamber_scenario,
    distance_sweep,
    gain_sweep,
    half_power_beamwidth,
    incidence_side_pose,
    peak_to_sidelobe,
    radiation_pattern,
    run_config,
    sweep_grid,
    transmission_side_pose,
)
from .geometry import (
    ArrayLayout,
    SphericalPose,
    departure_zenith,
    distance,
    element_grid,
    element_position,
    spherical_to_cartesian,
)
from .link import (
    InfinitePathLossError,
    LinkResult,
    Scenario,
    continuous_optimal_phases,
    element_weights,
    evaluate_link,
    from_db,
    max_received_power,
    min_path_loss,
    path_loss,
    path_loss_db,
    propagation_phase,
    propagation_phases,
    received_power,
    received_power_expanded,
    received_signal,
    states_from_configuration,
    to_db,
    uniform_states,
    unit_phases,
    watts_to_dbm,
)
from .ris import (
    AmplifierModel,
    ControlWord,
    PhaseCodebook,
    PhaseJitterModel,
    SupplyBudgetError,
    UnitState,
    decode_control,
    encode_control,
    unit_rcs,
    unit_transmission_coefficient,
)

__version__ = "0.1.0"
