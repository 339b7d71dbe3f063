"""Nonnegative-coefficient power series with a growth certificate.

The central object is the truncated series

    phi(t) = sum_{n=0}^{N} a_n t^n,        a_n >= 0,

which represents a function that is increasing together with all its
derivatives on [0, oo).  The Laplace integral of such a function exists
for every x > 0 exactly when the entire extension grows slower than any
exponential, which in coefficient terms means the normalized root
sequence

    r_n = (n! * a_n)^(1/n)

tends to zero.  With finitely many coefficients that limit statement can
only be estimated, so construction attaches a four-valued certificate
(certified / heuristic / unknown / violated) derived from the trend of
r_n over the trailing half of the stored indices.  The certified case
also supplies a geometric majorant a_n <= rho^n / n! for the unstored
indices, which downstream evaluations convert into error bounds.

Series objects are immutable after construction and safe for concurrent
reads.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .errors import NegativeCoefficient, NonPositiveLambda, OrderExceedsTruncation
from .precision import GUARD_BITS, rounding_term, to_mpf
from .tails import poly_exponential_tail

#: Default truncation order N (N+1 stored coefficients).
DEFAULT_TRUNCATION = 64

# r_N below this value (with a nonincreasing trend) certifies the series.
_CERTIFY_THRESHOLD = mpf("0.25")

# Negative inputs larger than -clamp_threshold are treated as serialization
# noise and clamped to zero; anything more negative is rejected.
_CLAMP_BITS = 30


class TypeCertificate(str, enum.Enum):
    CERTIFIED_ZERO = "certified_zero"
    HEURISTIC_ZERO = "heuristic_zero"
    UNKNOWN = "unknown"
    VIOLATED = "violated"


@dataclass(frozen=True)
class TypeEstimate:
    """Certificate plus the r_n evidence it was derived from.

    `tail_ratio` is the geometric majorant ratio rho (a_n <= rho^n / n!
    beyond the truncation) when the certificate supports one, else None.
    """

    certificate: TypeCertificate
    r_sequence: tuple  # ((n, r_n), ...) over indices with a_n > 0
    tail_ratio: mpf | None


@dataclass(frozen=True)
class EvalResult:
    """A value together with a rigorous absolute error bound.

    The enclosure [value - bound, value + bound] contains the represented
    function's value whenever the source certificate is certified_zero.
    """

    value: mpf
    abs_error_bound: mpf

    def __post_init__(self):
        if not (self.abs_error_bound >= 0):
            raise ValueError("error bound must be nonnegative")


@dataclass(frozen=True)
class AMSeries:
    coeffs: tuple
    estimate: TypeEstimate

    @property
    def truncation_order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def type_certificate(self) -> TypeCertificate:
        return self.estimate.certificate

    @property
    def r_sequence(self) -> tuple:
        return self.estimate.r_sequence

    @property
    def tail_ratio(self):
        return self.estimate.tail_ratio

    @property
    def is_certified(self) -> bool:
        return self.estimate.certificate is TypeCertificate.CERTIFIED_ZERO


def _estimate_from_coeffs(coeffs: tuple) -> TypeEstimate:
    n_top = len(coeffs) - 1
    supported = [n for n in range(1, n_top + 1) if coeffs[n] > 0]
    r_seq = tuple(
        (n, (mpmath.factorial(n) * coeffs[n]) ** (mpf(1) / n)) for n in supported
    )

    # A meaningful run of trailing zeros marks an intended polynomial, whose
    # tail is exactly zero.  A constant ([a0] alone) is the degenerate case.
    trailing_zeros = 0
    for n in range(n_top, 0, -1):
        if coeffs[n] == 0:
            trailing_zeros += 1
        else:
            break
    if not supported or trailing_zeros >= max(4, (n_top + 1) // 4):
        return TypeEstimate(TypeCertificate.CERTIFIED_ZERO, r_seq, mpf(0))

    if n_top < 8:
        return TypeEstimate(TypeCertificate.UNKNOWN, r_seq, None)

    trailing = [(n, r) for n, r in r_seq if n > n_top // 2]
    if len(trailing) < 4:
        return TypeEstimate(TypeCertificate.UNKNOWN, r_seq, None)

    slack = 1 + mpf(2) ** (-40)
    nonincreasing = all(
        trailing[i + 1][1] <= trailing[i][1] * slack for i in range(len(trailing) - 1)
    )
    r_first = trailing[0][1]
    r_last = trailing[-1][1]
    r_max = max(r for _, r in trailing)

    if nonincreasing and r_last < _CERTIFY_THRESHOLD:
        return TypeEstimate(TypeCertificate.CERTIFIED_ZERO, r_seq, r_max)
    if nonincreasing and r_last < mpf("0.9") * r_first:
        return TypeEstimate(TypeCertificate.HEURISTIC_ZERO, r_seq, r_max)
    if r_last >= mpf("0.5") and r_last >= mpf("0.9") * r_max:
        return TypeEstimate(TypeCertificate.VIOLATED, r_seq, None)
    return TypeEstimate(TypeCertificate.UNKNOWN, r_seq, None)


def new_am_series(coeffs) -> AMSeries:
    """Build a series from a finite coefficient list.

    Accepts ints, floats, decimal strings, Fractions and mpf values.
    Tiny negative inputs (serialization round-off) are clamped to zero
    with a warning; larger negatives raise NegativeCoefficient.
    """
    raw = [to_mpf(c) for c in coeffs]
    if not raw:
        raise ValueError("coefficient list must be nonempty")
    scale = max([abs(c) for c in raw] + [mpf(1)])
    clamp_threshold = scale * mpf(2) ** (_CLAMP_BITS - mp.prec)
    cleaned = []
    for i, c in enumerate(raw):
        if c < 0:
            if -c <= clamp_threshold:
                warnings.warn(
                    f"clamping coefficient a_{i} = {mpmath.nstr(c, 8)} to 0",
                    stacklevel=2,
                )
                c = mpf(0)
            else:
                raise NegativeCoefficient(i, c)
        cleaned.append(c)
    coeffs_t = tuple(cleaned)
    return AMSeries(coeffs_t, _estimate_from_coeffs(coeffs_t))


def estimate_type(s: AMSeries) -> TypeEstimate:
    """Return the growth certificate and the r_n evidence sequence."""
    return s.estimate


def eval_phi(s: AMSeries, t) -> EvalResult:
    """Evaluate phi(t) = sum a_n t^n for t >= 0.

    The bound covers the unstored tail via the certificate's geometric
    majorant plus accumulated rounding.  Without a certified_zero
    certificate the tail cannot be bounded and the result is flagged
    with an infinite bound.
    """
    t = to_mpf(t)
    if t < 0:
        raise ValueError("t must be nonnegative")
    n_top = s.truncation_order
    with mp.extraprec(GUARD_BITS):
        acc = mpf(0)
        for c in reversed(s.coeffs):
            acc = acc * t + c
    value = +acc
    if s.is_certified:
        rho = s.tail_ratio
        tail = poly_exponential_tail(1, rho * t, 0, n_top + 1) if rho > 0 else mpf(0)
        bound = tail + rounding_term(value, n_top + 1)
    else:
        bound = mpf("inf")
    return EvalResult(value, bound)


def derivative_series(s: AMSeries, j: int) -> AMSeries:
    """j-th derivative, reindexed: b_n = a_{n+j} * (n+j)! / n!."""
    j = int(j)
    if j < 0:
        raise ValueError("derivative order must be nonnegative")
    if j > s.truncation_order:
        raise OrderExceedsTruncation(
            f"derivative order {j} exceeds truncation {s.truncation_order}"
        )
    if j == 0:
        return s
    out = []
    for n in range(len(s.coeffs) - j):
        factor = mpf(1)
        for i in range(n + 1, n + j + 1):
            factor *= i
        out.append(s.coeffs[n + j] * factor)
    coeffs_t = tuple(out)
    return AMSeries(coeffs_t, _estimate_from_coeffs(coeffs_t))


def weight_gamma(s: AMSeries, lam) -> AMSeries:
    """Reweight coefficients: b_n = a_n * Gamma(n + lam) / n!.

    With lam = 1 this is the identity on coefficients, exactly.
    """
    lam = to_mpf(lam)
    if lam <= 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    out = []
    for n, a in enumerate(s.coeffs):
        out.append(a * (mpmath.gamma(n + lam) / mpmath.factorial(n)))
    coeffs_t = tuple(out)
    return AMSeries(coeffs_t, _estimate_from_coeffs(coeffs_t))


# ---------------------------------------------------------------------------
# JSON wire format: {"coeffs": [...decimal strings...], "name": optional}
# ---------------------------------------------------------------------------

def series_to_json(s: AMSeries, name: str | None = None) -> str:
    obj = {"coeffs": [mpmath.nstr(c, mp.dps + 8) for c in s.coeffs]}
    if name is not None:
        obj["name"] = name
    return json.dumps(obj, sort_keys=True)


def series_from_json(text_or_obj) -> AMSeries:
    obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
    return new_am_series(obj["coeffs"])


def exp_series(n_terms: int = DEFAULT_TRUNCATION + 1) -> AMSeries:
    """Coefficients 1/n!: the canonical series that is *not* of minimal
    growth (its r_n sequence is identically 1)."""
    return new_am_series([Fraction(1, math.factorial(n)) for n in range(n_terms)])
