"""Box-counting dimensions of images of sets under random multiplicative cascades."""

__version__ = "0.1.0"

from .weights import WeightModel, RegimeReport, parse_model, classify_regime, gamma  # noqa: E402
from .theory import (  # noqa: E402
    legendre_psi,
    phi,
    hausdorff_image_dim,
    lower_bound_s1,
    sequence_image_dim,
    lognormal_sequence_dim_closed_form,
    asymptotic_ratio,
    bounds_table,
)
from .cascade import CascadeConfig, DyadicPath, Cascade  # noqa: E402
from .point_sets import PointSetSpec, parse_set  # noqa: E402

__all__ = [
    "WeightModel", "RegimeReport", "parse_model", "classify_regime", "gamma",
    "legendre_psi", "phi", "hausdorff_image_dim", "lower_bound_s1", "sequence_image_dim",
    "lognormal_sequence_dim_closed_form", "asymptotic_ratio", "bounds_table",
    "CascadeConfig", "DyadicPath", "Cascade", "PointSetSpec", "parse_set",
]
