"""Wire-driven elastic robotic fishtail: dynamics, drivetrain power and
spine-stiffness optimization.

The hot integration loop lives in a compiled extension with a pure-Python
twin selected automatically at import; ``backend_name()`` reports which one
is active.
"""

from ._backend import available_kernels, backend_name
from .config import (
    Config,
    ConfigError,
    SimSettings,
    SpringSpec,
    TailBodyParams,
    TransmissionSpec,
    default_config_path,
    load_config,
    rotational_stiffness,
    thickness_for_stiffness,
)
from .drivetrain import aes_moment_energy, cycle_summary, motor_torque, statics_motor_torque
from .dynamics import (
    IntegrationError,
    PhaseUndefinedError,
    SimTrace,
    SteadyStateError,
    TailState,
    eom_terms,
    phase_difference,
    simulate,
    simulate_base,
    step,
)
from .hydro import (
    LinkForce,
    axial_fin_force,
    drag_force,
    generalized_hydro_torques,
    link_force,
    thrust,
)
from .optimizer import (
    InfeasibleBoundsError,
    MaxFreqResult,
    StiffnessBounds,
    StiffnessOptResult,
    max_frequency,
    optimize_k1,
    peak_to_peak_objective,
    stiffness_bounds,
    sweep,
    variance_feasible_interval,
    variance_objective,
)
from .transmission import DriveState, drive_state, jacobians, joint_angles

__version__ = "0.1.0"

__all__ = [
    "Config", "ConfigError", "SimSettings", "SpringSpec", "TailBodyParams",
    "TransmissionSpec", "default_config_path", "load_config",
    "rotational_stiffness", "thickness_for_stiffness",
    "DriveState", "drive_state", "jacobians", "joint_angles",
    "LinkForce", "link_force", "drag_force", "generalized_hydro_torques",
    "axial_fin_force", "thrust",
    "SimTrace", "TailState", "IntegrationError", "SteadyStateError",
    "PhaseUndefinedError", "eom_terms", "simulate", "simulate_base", "step",
    "phase_difference",
    "aes_moment_energy", "motor_torque", "statics_motor_torque", "cycle_summary",
    "StiffnessBounds", "StiffnessOptResult", "MaxFreqResult",
    "InfeasibleBoundsError", "stiffness_bounds", "optimize_k1", "sweep",
    "max_frequency", "variance_objective", "peak_to_peak_objective",
    "variance_feasible_interval",
    "backend_name", "available_kernels",
]
