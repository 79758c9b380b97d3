from .logging_config import logger, configure_logging
from .helpers import make_rng, sign_positive_zero, stable_top_k
from .constants import DEFAULT_THRESHOLDS, SEPARATORS, MODEL_MAGIC, MODEL_VERSION

__all__ = [
    "logger",
    "configure_logging",
    "make_rng",
    "sign_positive_zero",
    "stable_top_k",
    "DEFAULT_THRESHOLDS",
    "SEPARATORS",
    "MODEL_MAGIC",
    "MODEL_VERSION",
]
