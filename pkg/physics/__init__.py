"""
Physics Package
---------------

Numerical modules for Lorentz-group geometry and charged-particle dynamics.
Each module covers one layer: four-vectors and finite transformations, the
Lie algebra of generators, electromagnetic fields as generators, and the
equations of motion with their integrators.
"""

from .core_geometry import (
    ETA,
    FourVector,
    LorentzMatrix,
    apply,
    boost_matrix,
    compose,
    general_product,
    metric_defect,
    minkowski_inner,
    rapidity,
    rotation_matrix,
)
from .dynamics import (
    ParticleState,
    Stepper,
    Trajectory,
    convergence_slope,
    flow_group_defect,
    integrate,
    lorentz_force,
    oracle_cyclotron,
    oracle_hyperbolic,
    renormalize,
    step_exact,
    step_rk4,
)
from .field_tensor import (
    Coupling,
    FieldMap,
    FieldMapKind,
    FieldTensor,
    UniformFieldMap,
    build_field_map,
    drift_velocity,
    evaluate,
    field_invariants,
    frame_transform,
    generator_to_tensor,
    tensor_to_generator,
)
from .lie_algebra import (
    Generator,
    commutator,
    derivative_at_zero,
    expm,
    expm_matrix,
    generator_from_rates,
    parametrized_curve,
    rates_from_generator,
)

__all__ = [
    "ETA",
    "FourVector",
    "LorentzMatrix",
    "apply",
    "boost_matrix",
    "compose",
    "general_product",
    "metric_defect",
    "minkowski_inner",
    "rapidity",
    "rotation_matrix",
    "Generator",
    "commutator",
    "derivative_at_zero",
    "expm",
    "expm_matrix",
    "generator_from_rates",
    "parametrized_curve",
    "rates_from_generator",
    "Coupling",
    "FieldMap",
    "FieldMapKind",
    "FieldTensor",
    "UniformFieldMap",
    "build_field_map",
    "drift_velocity",
    "evaluate",
    "field_invariants",
    "frame_transform",
    "generator_to_tensor",
    "tensor_to_generator",
    "ParticleState",
    "Stepper",
    "Trajectory",
    "convergence_slope",
    "flow_group_defect",
    "integrate",
    "lorentz_force",
    "oracle_cyclotron",
    "oracle_hyperbolic",
    "renormalize",
    "step_exact",
    "step_rk4",
]
