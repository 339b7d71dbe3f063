"""Closed-form reference family built from generalized hypergeometric series.

The source series

    phi(t) = sum_k (a)_k / ((b)_k (c)_k k!) t^k,      a, b, c > 0,

has nonnegative coefficients and minimal exponential growth, and its
transform and weighted transform have closed inverse-power expansions:

    f(x)            = sum_n (a)_n / ((b)_n (c)_n) x^-(n+1)
    f_lam(x)        = Gamma(lam) x^-lam
                      * sum_n (a)_n (lam)_n / ((b)_n (c)_n n!) x^-n

The special case a = b, c = 1 collapses the coefficients to 1/(k!)^2,
whose transform is x^-1 e^(1/x); a = b, c = alpha+1 gives the
modified-Bessel-type family.  Parameters are kept as exact rationals so
coefficient identities hold to the last bit.

`scaled_family` tracks what happens when a transform is multiplied by
x^-lam: for integer lam every operator sign condition survives, while
for fractional lam the first failure order is floor(lam) + 2 with a
predictable leading coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .am_series import AMSeries, EvalResult, TypeCertificate, new_am_series
from .errors import NonPositiveLambda, OffsetNotZero
from .laplace_image import InvPowerSeries
from .precision import GUARD_BITS, fraction_to_mpf, rounding_term, to_mpf

_DEFAULT_TERMS = 65


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, (int, float)):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class HyperParams:
    a: Fraction
    b: Fraction
    c: Fraction
    lam: Fraction | None = None


def hyper_params(a, b, c, lam=None) -> HyperParams:
    a, b, c = _to_fraction(a), _to_fraction(b), _to_fraction(c)
    if a <= 0 or b <= 0 or c <= 0:
        raise ValueError("parameters a, b, c must be positive")
    if lam is not None:
        lam = _to_fraction(lam)
        if lam <= 0:
            raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    return HyperParams(a, b, c, lam)


def pochhammer(a, k: int) -> mpf:
    """Rising factorial a (a+1) ... (a+k-1); (a)_0 = 1."""
    k = int(k)
    if k < 0:
        raise ValueError("k must be nonnegative")
    p = mpf(1)
    a = to_mpf(a)
    for i in range(k):
        p *= a + i
    return p


def _poch_fraction(a: Fraction, k: int) -> Fraction:
    p = Fraction(1)
    for i in range(k):
        p *= a + i
    return p


def phi_1f2(p: HyperParams, n_terms: int = _DEFAULT_TERMS) -> AMSeries:
    """Source series with coefficients (a)_k / ((b)_k (c)_k k!).

    Coefficients are built over exact rationals and rounded once, so
    parameter coincidences (a = b) cancel exactly.
    """
    coef = Fraction(1)
    out = [coef]
    for k in range(1, n_terms):
        coef *= (p.a + k - 1) / ((p.b + k - 1) * (p.c + k - 1) * k)
        out.append(coef)
    series = new_am_series(out)
    if n_terms >= 33 and series.type_certificate is not TypeCertificate.CERTIFIED_ZERO:
        raise ValueError(
            f"hypergeometric source failed to certify: {series.type_certificate}"
        )
    return series


def h_series(n_terms: int = _DEFAULT_TERMS) -> AMSeries:
    """Coefficients 1/(k!)^2; the transform is x^-1 e^(1/x)."""
    return phi_1f2(hyper_params(1, 1, 1), n_terms)


def _sum_ratio_series(first: Fraction, ratio_num, x, n_terms: int):
    """Sum terms with exact rational coefficients and ratio function
    ratio_num(n) = coef_{n+1}/coef_n, against powers of 1/x.

    Returns (value, tail_bound, scale).  The coefficient ratio must be
    eventually decreasing; past the stored range the running term is
    majorized geometrically once the full ratio drops below 1/2.
    """
    x = to_mpf(x)
    if x <= 0:
        raise ValueError("x must be positive")
    with mp.extraprec(GUARD_BITS):
        u = 1 / x
        coef = first
        total = mpf(0)
        scale = mpf(0)
        power = u
        for n in range(n_terms):
            term = fraction_to_mpf(coef) * power
            total += term
            scale += abs(term)
            coef *= ratio_num(n)
            power *= u
        # tail: extend the running term until the ratio settles below 1/2,
        # then close with a geometric bound (the coefficient ratio is
        # eventually decreasing, so later ratios only shrink)
        inflate = 1 + mpf(2) ** (-40)
        term = fraction_to_mpf(coef) * power * inflate
        tail = mpf(0)
        n = n_terms
        for _ in range(8192):
            r = fraction_to_mpf(ratio_num(n)) * u * inflate
            if r < mpf("0.5"):
                tail += term / (1 - r)
                break
            tail += term
            term *= r
            n += 1
        else:
            tail = mpf("inf")
    return +total, +tail, +scale


def f_2f2(p: HyperParams, x, n_terms: int = _DEFAULT_TERMS) -> EvalResult:
    """Transform value sum_n (a)_n / ((b)_n (c)_n) x^-(n+1)."""
    def ratio(n):
        return (p.a + n) / ((p.b + n) * (p.c + n))

    value, tail, scale = _sum_ratio_series(Fraction(1), ratio, x, n_terms)
    return EvalResult(value, tail + rounding_term(scale, n_terms))


def f_2f2_weighted(p: HyperParams, x, n_terms: int = _DEFAULT_TERMS) -> EvalResult:
    """Weighted transform Gamma(lam) x^-lam
    sum_n (a)_n (lam)_n / ((b)_n (c)_n n!) x^-n."""
    if p.lam is None:
        raise NonPositiveLambda("params carry no lambda")
    lam = p.lam

    def ratio(n):
        return (p.a + n) * (lam + n) / ((p.b + n) * (p.c + n) * (n + 1))

    x = to_mpf(x)
    # reuse the ratio machinery against powers of 1/x starting at u^1,
    # then shift: sum starts at n=0 with coefficient 1 and power u^0
    value, tail, scale = _sum_ratio_series(Fraction(1), ratio, x, n_terms)
    front = mpmath.gamma(to_mpf(lam)) * x ** (1 - to_mpf(lam))
    return EvalResult(front * value, abs(front) * (tail + rounding_term(scale, n_terms)))


@dataclass(frozen=True)
class ScaledFamily:
    series: InvPowerSeries
    integer_order: bool
    failing_order: int | None       # floor(lam) + 2 when lam not an integer
    failure_product: mpf | None     # (lam - k - 1)(lam - k) ... lam, k = floor(lam)
    leading_coefficient: mpf | None  # c_0 * failure_product


def scaled_family(ips: InvPowerSeries, lam) -> ScaledFamily:
    """Shift a transform to x^-lam f(x) and predict its first failing
    operator order.

    Integer lam keeps every sign condition; fractional lam first fails
    at order floor(lam) + 2, where the n = 0 coefficient becomes
    c_0 * (lam - k - 1)(lam - k) ... lam with k = floor(lam), a product
    with exactly one negative factor.
    """
    lam = to_mpf(lam)
    if lam <= 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    if ips.offset != 0:
        raise OffsetNotZero("scaled family starts from an offset-zero series")
    shifted = InvPowerSeries(ips.coeffs, lam, ips.tail)
    if lam == mpmath.floor(lam):
        return ScaledFamily(shifted, True, None, None, None)
    k = int(mpmath.floor(lam))
    product = mpf(1)
    for i in range(k + 2):
        product *= lam - k - 1 + i
    leading = ips.coeffs[0] * product if ips.coeffs else None
    return ScaledFamily(shifted, False, k + 2, product, leading)


def bessel_family(alpha, n_terms: int = _DEFAULT_TERMS) -> AMSeries:
    """a = b, c = alpha + 1: coefficients 1/((alpha+1)_k k!)."""
    alpha = _to_fraction(alpha)
    return phi_1f2(hyper_params(1, 1, alpha + 1), n_terms)
