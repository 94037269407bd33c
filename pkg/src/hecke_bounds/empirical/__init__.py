"""Exact eigenform coefficients and the densities measured from them."""

from .density import (
    AllPrimes,
    CongruenceClass,
    CubicSplit,
    DensityEstimate,
    QuadraticSplit,
    sign_density,
)
from .sato_tate import (
    MonteCarloCheck,
    SatakeSampleBatch,
    monte_carlo_bound_check,
    sato_tate_cdf,
    sato_tate_sample,
)
from .tables import (
    CoefficientTable,
    DataIntegrityError,
    TableFormatError,
    delta_coefficients,
    normalized_ap,
    read_table,
    second_form_coefficients,
    write_table,
)

__all__ = [
    "AllPrimes",
    "CongruenceClass",
    "CubicSplit",
    "QuadraticSplit",
    "DensityEstimate",
    "sign_density",
    "MonteCarloCheck",
    "SatakeSampleBatch",
    "monte_carlo_bound_check",
    "sato_tate_cdf",
    "sato_tate_sample",
    "CoefficientTable",
    "DataIntegrityError",
    "TableFormatError",
    "delta_coefficients",
    "normalized_ap",
    "read_table",
    "second_form_coefficients",
    "write_table",
]
