from .extreal import DEFAULT_PRECISION, EXPONENT_CAP_BITS, MIN_PRECISION, ExtReal, format_ext
from .magnitude import (
    DEFAULT_THRESHOLD,
    Magnitude,
    decimal_digits,
    floor_mul,
    log_sub,
    log_sum_accumulate,
    log_to_float,
    mag_mul,
    mag_pow,
    mag_scale,
    mag_sub_exponent,
)

__all__ = [
    "DEFAULT_PRECISION",
    "DEFAULT_THRESHOLD",
    "EXPONENT_CAP_BITS",
    "MIN_PRECISION",
    "ExtReal",
    "Magnitude",
    "decimal_digits",
    "floor_mul",
    "format_ext",
    "log_sub",
    "log_sum_accumulate",
    "log_to_float",
    "mag_mul",
    "mag_pow",
    "mag_scale",
    "mag_sub_exponent",
]
