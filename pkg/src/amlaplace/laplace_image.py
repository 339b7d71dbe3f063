"""Inverse-power images of nonnegative series.

Term-by-term integration of exp(-x*t) against phi(t) = sum a_n t^n turns
the coefficient list into an inverse-power series

    f(x) = sum_n c_n * x^(-n-1-offset),        c_n = a_n * n!   (offset 0),

convergent for every x > 0 when the source certificate holds, since then
c_n <= rho^n is geometrically small.  The `offset` field carries the
x^(-offset)-scaled family without a separate type; library constructors
produce offset >= 0, while intermediate calculus helpers (derivative,
multiplication by powers of x) may go negative internally.

The head/tail split at order n peels off the first n inverse powers and
leaves a series for x^n * R_n(x); nonnegativity of every tail coefficient
is the exact witness that the remainder R_n, multiplied by x^n, is again
completely monotonic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import mpmath
from mpmath import mp, mpf

from .am_series import AMSeries, EvalResult
from .errors import DivergentAt, OffsetNotZero, OrderExceedsTruncation
from .precision import GUARD_BITS, rounding_term, to_mpf
from .tails import TailModel, poly_geometric_tail


@dataclass(frozen=True)
class InvPowerSeries:
    coeffs: tuple
    offset: mpf = mpf(0)
    tail: TailModel | None = None

    @property
    def truncation_order(self) -> int:
        return len(self.coeffs) - 1


def falling(a, j: int) -> mpf:
    """a * (a-1) * ... * (a-j+1)."""
    p = mpf(1)
    a = mpf(a)
    for i in range(int(j)):
        p *= a - i
    return p


def rising(a, j: int) -> mpf:
    """a * (a+1) * ... * (a+j-1)."""
    p = mpf(1)
    a = mpf(a)
    for i in range(int(j)):
        p *= a + i
    return p


def laplace_coeffs(s: AMSeries) -> InvPowerSeries:
    """Exact image coefficients c_n = a_n * n!, offset zero."""
    coeffs = tuple(a * mpmath.factorial(n) for n, a in enumerate(s.coeffs))
    tail = None
    if s.is_certified:
        tail = TailModel(mpf(1), s.tail_ratio, 0)
    return InvPowerSeries(coeffs, mpf(0), tail)


def _eval_terms(ips: InvPowerSeries, x) -> tuple:
    """Sum the stored terms at x; returns (value, tail_bound+rounding, scale).

    `scale` is the sum of absolute term values, the natural magnitude for
    relative-slack sign decisions.
    """
    x = to_mpf(x)
    if x <= 0:
        raise ValueError("x must be positive")
    n_top = ips.truncation_order
    with mp.extraprec(GUARD_BITS):
        u = 1 / x
        acc = mpf(0)
        absacc = mpf(0)
        for c in reversed(ips.coeffs):
            acc = acc * u + c
            absacc = absacc * u + abs(c)
        front = x ** (-(1 + ips.offset))
        value = acc * front
        scale = absacc * front
    value = +value
    scale = +scale
    if ips.tail is None:
        bound = mpf("inf")
    else:
        t = ips.tail
        geo = poly_geometric_tail(t.scale, t.ratio / x, t.degree, n_top + 1)
        bound = geo * x ** (-(1 + ips.offset)) + rounding_term(scale, n_top + 1)
    return value, bound, scale


def _check_divergence(ips: InvPowerSeries, x) -> None:
    """Flag x where the stored terms |c_n| x^-n fail to decay.

    The test looks at the last quarter of the stored terms; a weakly
    nondecreasing, nonzero run means the truncated sum carries no usable
    information at this x.
    """
    x = to_mpf(x)
    if x <= 0:
        raise ValueError("x must be positive")
    n_top = ips.truncation_order
    if n_top < 11:
        return
    u = 1 / x
    start = (3 * (n_top + 1)) // 4
    mags = [abs(c) * u ** n for n, c in enumerate(ips.coeffs) if n >= start]
    if mags[-1] == 0:
        return
    slack = 1 - mpf(2) ** (-40)
    if all(mags[i + 1] >= mags[i] * slack for i in range(len(mags) - 1)):
        raise DivergentAt(x)


def eval_image(ips: InvPowerSeries, x) -> EvalResult:
    """Evaluate sum c_n x^(-n-1-offset) with a tail bound.

    Raises DivergentAt(x) when the stored terms grow over the last
    quarter of indices; the bound is infinite for sources without a
    tail majorant.
    """
    _check_divergence(ips, x)
    value, bound, _ = _eval_terms(ips, x)
    return EvalResult(value, bound)


def split_remainder(ips: InvPowerSeries, n: int):
    """Split off the first n inverse powers.

    Returns (head, tail) with head_k = c_{k-1} for k = 1..n, and a tail
    series whose value at x equals x^n * R_n(x); the full function is
    sum_k head_k x^-k + x^-n * tail(x).
    """
    n = int(n)
    if n < 1:
        raise ValueError("split order must be a positive integer")
    if ips.offset != 0:
        raise OffsetNotZero("split requires offset zero")
    if n > len(ips.coeffs):
        # the head consumes c_0 .. c_{n-1}, so n may reach the stored count
        # (leaving an empty tail for finite series)
        raise OrderExceedsTruncation(
            f"split order {n} exceeds stored coefficients {len(ips.coeffs)}"
        )
    head = tuple(ips.coeffs[:n])
    tail_coeffs = tuple(ips.coeffs[n:])
    tail_model = None
    if ips.tail is not None:
        t = ips.tail
        # |c_{n+m}| <= K (n+m+1)^d rho^(n+m) <= [K rho^n (n+1)^d] (m+1)^d rho^m
        tail_model = TailModel(
            t.scale * t.ratio ** n * mpf(n + 1) ** t.degree, t.ratio, t.degree
        )
    return head, InvPowerSeries(tail_coeffs, mpf(0), tail_model)


# ---------------------------------------------------------------------------
# Series calculus used by the operator modules.
# ---------------------------------------------------------------------------

def ips_derivative(ips: InvPowerSeries, m: int = 1) -> InvPowerSeries:
    """m-fold derivative: c_n -> c_n * (-1)^m * (n+1+offset)_m, offset + m."""
    m = int(m)
    if m < 0:
        raise ValueError("derivative order must be nonnegative")
    if m == 0:
        return ips
    lam = ips.offset
    sign = mpf(-1) ** m
    coeffs = tuple(
        c * sign * rising(n + 1 + lam, m) for n, c in enumerate(ips.coeffs)
    )
    tail = None
    if ips.tail is not None:
        # |(n+1+lam)_m| <= (n+1)^m * (2 + |lam| + m)^m
        tail = ips.tail.widened((2 + abs(lam) + m) ** m, m)
    return InvPowerSeries(coeffs, lam + m, tail)


def ips_xmul(ips: InvPowerSeries, power) -> InvPowerSeries:
    """Multiply by x^power (offset decreases by power; may go negative
    on intermediates)."""
    return replace(ips, offset=ips.offset - to_mpf(power))


def ips_scale(ips: InvPowerSeries, factor) -> InvPowerSeries:
    factor = to_mpf(factor)
    tail = ips.tail.widened(abs(factor)) if ips.tail is not None else None
    return InvPowerSeries(tuple(c * factor for c in ips.coeffs), ips.offset, tail)


# ---------------------------------------------------------------------------
# JSON wire format: {"coeffs": [...], "offset": decimal-string}
# ---------------------------------------------------------------------------

def image_to_json(ips: InvPowerSeries) -> str:
    obj = {
        "coeffs": [mpmath.nstr(c, mp.dps + 8) for c in ips.coeffs],
        "offset": mpmath.nstr(ips.offset, mp.dps + 8),
    }
    return json.dumps(obj, sort_keys=True)


def image_from_json(text_or_obj) -> InvPowerSeries:
    obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
    offset = to_mpf(obj.get("offset", 0))
    if offset < 0:
        raise ValueError("offset must be nonnegative")
    return InvPowerSeries(tuple(to_mpf(c) for c in obj["coeffs"]), offset, None)
