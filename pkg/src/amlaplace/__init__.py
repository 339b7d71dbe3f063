"""Configurable-precision checks and transforms for nonnegative-coefficient
power series, their inverse-power images, and representing-measure chains.

Importing the package sets the working precision to the 256-bit default;
use `amlaplace.precision.use_bits` or the CLI `--prec` flag to change it.
"""

from .precision import DEFAULT_PRECISION_BITS, use_bits, working_precision

use_bits(DEFAULT_PRECISION_BITS)

from .am_series import (  # noqa: E402
    AMSeries,
    EvalResult,
    TypeCertificate,
    TypeEstimate,
    derivative_series,
    estimate_type,
    eval_phi,
    exp_series,
    new_am_series,
    series_from_json,
    series_to_json,
    weight_gamma,
)
from .laplace_image import (  # noqa: E402
    InvPowerSeries,
    eval_image,
    image_from_json,
    image_to_json,
    laplace_coeffs,
    split_remainder,
)
from .handles import (  # noqa: E402
    ClosedForm,
    FunctionHandle,
    SeriesHandle,
    parse_closed_form,
)
from .widder_ops import (  # noqa: E402
    CheckEntry,
    CheckReport,
    CorollaryTable,
    check_conditions,
    cm_order_detect,
    corollary_coeffs,
    corollary_identity_check,
    decay_check,
    default_x_grid,
    derivative_recursion_check,
    detect_polynomial,
    recursion_step,
    sokal_T,
    widder_by_recursion,
    widder_identity_check,
    widder_image,
)
from .quad_engine import laplace_numeric, laplace_weighted_numeric  # noqa: E402
from .measure_chain import (  # noqa: E402
    GridMeasure,
    default_measure_grid,
    grid_measure,
    laplace_of_measure,
    measure_from_json,
    measure_to_csv,
    measure_to_json,
    mu_step,
    positivity_check,
    sigma_j,
)
from .hyper_gallery import (  # noqa: E402
    HyperParams,
    bessel_family,
    f_2f2,
    f_2f2_weighted,
    h_series,
    hyper_params,
    phi_1f2,
    pochhammer,
    scaled_family,
)

__version__ = "0.1.0"

__all__ = [
    "AMSeries",
    "CheckEntry",
    "CheckReport",
    "ClosedForm",
    "CorollaryTable",
    "EvalResult",
    "FunctionHandle",
    "GridMeasure",
    "HyperParams",
    "InvPowerSeries",
    "SeriesHandle",
    "TypeCertificate",
    "TypeEstimate",
    "bessel_family",
    "check_conditions",
    "cm_order_detect",
    "corollary_coeffs",
    "corollary_identity_check",
    "decay_check",
    "default_measure_grid",
    "default_x_grid",
    "derivative_recursion_check",
    "derivative_series",
    "detect_polynomial",
    "estimate_type",
    "eval_image",
    "eval_phi",
    "exp_series",
    "f_2f2",
    "f_2f2_weighted",
    "grid_measure",
    "h_series",
    "hyper_params",
    "image_from_json",
    "image_to_json",
    "laplace_coeffs",
    "laplace_numeric",
    "laplace_of_measure",
    "laplace_weighted_numeric",
    "measure_from_json",
    "measure_to_csv",
    "measure_to_json",
    "mu_step",
    "new_am_series",
    "parse_closed_form",
    "phi_1f2",
    "pochhammer",
    "positivity_check",
    "recursion_step",
    "scaled_family",
    "series_from_json",
    "series_to_json",
    "sigma_j",
    "sokal_T",
    "split_remainder",
    "use_bits",
    "weight_gamma",
    "widder_by_recursion",
    "widder_identity_check",
    "widder_image",
    "working_precision",
]
