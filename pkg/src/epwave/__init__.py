"""epwave: 1-D Eulerian elastic-plastic wave propagation in metals.

A space-time CESE solver for the conserved system (rho, rho v, rho S11) with a
logarithmic equation of state, J2 plasticity with staged isotropic hardening,
plus closed-form oracles and scenario/analysis tooling.
"""
from .material import (HardeningStage, MaterialProperties, copper,
                       density_from_pressure, elastic_wave_speed,
                       general_wave_speed, plastic_wave_speed_perfect,
                       pressure_from_density)
from .system import (ConservedState, DegenerateStateError, PrimitiveState,
                     to_conserved, to_primitive)
from .constitutive import LoadingClass, PlasticState, radial_return
from .cese1d import (CFLViolationError, GhostNode, MeshLevel,
                     NewtonConvergenceError, SolverParams, StepError, run, step)
from .scenarios import (BoundaryPolicy, ConfigError, ScenarioConfig, Snapshot,
                        build_scenario, builtin_configs, config_from_dict,
                        read_config, read_snapshot, write_snapshot)
from .oracle import impact_plateaus, hugoniot_elastic_limit, linear_wave_speed

__version__ = "1.0.0"

__all__ = [
    "HardeningStage", "MaterialProperties", "copper", "pressure_from_density",
    "density_from_pressure", "elastic_wave_speed", "plastic_wave_speed_perfect",
    "general_wave_speed", "PrimitiveState", "ConservedState",
    "DegenerateStateError", "to_conserved", "to_primitive", "PlasticState",
    "LoadingClass", "radial_return", "MeshLevel", "SolverParams", "GhostNode",
    "StepError", "CFLViolationError", "NewtonConvergenceError", "run", "step",
    "BoundaryPolicy", "ConfigError", "ScenarioConfig", "Snapshot",
    "build_scenario", "builtin_configs", "config_from_dict", "read_config",
    "read_snapshot", "write_snapshot", "impact_plateaus",
    "hugoniot_elastic_limit", "linear_wave_speed", "__version__",
]
