"""Energy-shaped tailbiting SC-LDPC toolkit.

Protograph construction, P-EXIT threshold analysis over two-level-energy
bi-AWGN channels, boosting-parameter optimization, and finite-length
windowed-BP Monte Carlo validation.
"""

__version__ = "0.1.0"

from .protograph import (
    BaseMatrix,
    EnsembleKind,
    build_tailbiting,
    build_terminated,
    build_uncoupled,
    validate,
)
from .shaping import (
    EnergyProfile,
    ShapingParams,
    SnrPoint,
    biawgn_capacity,
    db_to_linear,
    linear_to_db,
    rate_limit_snr,
    shaped_capacity,
    snr_split,
    two_level_profile,
)

__all__ = [
    "BaseMatrix",
    "EnsembleKind",
    "build_tailbiting",
    "build_terminated",
    "build_uncoupled",
    "validate",
    "ShapingParams",
    "SnrPoint",
    "EnergyProfile",
    "snr_split",
    "two_level_profile",
    "biawgn_capacity",
    "shaped_capacity",
    "rate_limit_snr",
    "db_to_linear",
    "linear_to_db",
]
