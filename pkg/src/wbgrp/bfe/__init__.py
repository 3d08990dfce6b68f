"""One-dimensional blood-flow model."""

from .model import (
    BFEModel,
    bfe_eigenvalues,
    bfe_flux_potential,
    bfe_stationary_rhs,
    tube_law,
    two_rarefaction_riemann,
)
from .profiles import (
    G_EARTH,
    MMHG,
    PASCAL,
    Constant,
    Linear,
    Polyline,
    Profile,
    SmoothGravity,
    VesselProfile,
    gravity_profile,
    load_samples_csv,
    taper,
)
from .riemann import RiemannFan
from .tubelaw import TubeLaw, TubeLawValue

__all__ = [
    "BFEModel", "Constant", "G_EARTH", "Linear", "MMHG", "PASCAL", "Polyline",
    "Profile", "RiemannFan", "SmoothGravity", "TubeLaw", "TubeLawValue",
    "VesselProfile", "bfe_eigenvalues", "bfe_flux_potential", "bfe_stationary_rhs",
    "gravity_profile", "load_samples_csv", "taper", "tube_law",
    "two_rarefaction_riemann",
]
