"""SU(2)^2-invariant coclosed G2-structures on cohomogeneity-one 7-manifolds."""

from __future__ import annotations

__version__ = "0.1.0"

from .analytic import asymptotic_slope, bryant_salamon, cone_family, symmetric_solution
from .exterior import InvariantForm, d, hodge_star, wedge
from .ode import CoclosedSystem, recover_B, series_bootstrap, solve
from .structures import ProfileSet, build_g2, build_su3

__all__ = [
    "__version__",
    "InvariantForm",
    "d",
    "wedge",
    "hodge_star",
    "ProfileSet",
    "build_su3",
    "build_g2",
    "CoclosedSystem",
    "series_bootstrap",
    "solve",
    "recover_B",
    "cone_family",
    "symmetric_solution",
    "bryant_salamon",
    "asymptotic_slope",
]
