"""Growth scales, order functions, canonical products and counting functions."""

from .appendix import BracketResult, alphahelp_bracket
from .estimate import (
    Estimate,
    GrowthReport,
    estimate_limsup,
    scale_from_coeffs,
    scale_from_maxmod,
    type_from_coeffs,
)
from .orderfn import OrderFunctionSpec, ValidationReport, dual_of, validate

# products depends on the sequences module, which itself imports the
# estimators above, so it is loaded on first use
_LAZY = {
    "CountingReport", "ProductLog", "canonical_product_log", "counting_sandwich",
    "log_product_float", "order_function_summability", "product_coeff_logs",
    "spec_zero_logs", "summability_vs_counting",
}


def __getattr__(name):
    if name in _LAZY:
        from . import products

        return getattr(products, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

__all__ = [
    "BracketResult",
    "CountingReport",
    "Estimate",
    "GrowthReport",
    "OrderFunctionSpec",
    "ProductLog",
    "ValidationReport",
    "alphahelp_bracket",
    "canonical_product_log",
    "counting_sandwich",
    "dual_of",
    "estimate_limsup",
    "log_product_float",
    "order_function_summability",
    "product_coeff_logs",
    "scale_from_coeffs",
    "scale_from_maxmod",
    "spec_zero_logs",
    "summability_vs_counting",
    "type_from_coeffs",
    "validate",
]
