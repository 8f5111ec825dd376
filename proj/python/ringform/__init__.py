"""Distributed reduced-attitude formations on ring graphs.

States are float arrays of shape (n, 3) holding one unit vector per agent.
"""

from ._core import (
    ConfigError,
    DomainError,
    NumericalError,
    SamplingError,
    antipodal_distance,
    check_bounds,
    circulant_eigenvalues,
    classify_equilibrium,
    classify_formation,
    control_omega,
    cyclic_distance,
    dini_derivative,
    equispaced_circle,
    from_angles,
    jacobian_phi,
    jacobian_psi,
    lyapunov_v,
    min_edge_distance,
    random_state,
    run_experiment,
    simulate,
    symmetric_eigenvalues,
    to_angles,
)

__all__ = [name for name in dir() if not name.startswith("_")]
