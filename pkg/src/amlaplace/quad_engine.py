"""Independent numerical Laplace transforms with rigorous tail bounds.

This is the cross-validation oracle against the coefficient paths: it
evaluates

    int_0^oo e^(-x t) phi(t) dt        and
    int_0^oo e^(-x t) t^(lam-1) phi(t) dt

by adaptive Gauss-Legendre bisection on [0, T] with an embedded
low/high-order pair per panel, plus an analytic bound for the cutoff
tail.  The cutoff uses the growth certificate: with eps = x/2 any
certified series satisfies phi(t) <= C_eps * e^(eps t) for a computable
C_eps, so

    int_T^oo e^(-x t) phi(t) dt <= C_eps e^(-(x-eps) T) / (x - eps),

and T is chosen to push that below half the requested tolerance.

For the weighted transform the integrand is split at t = 1: the head
int_0^1 t^(lam-1) e^(-x t) phi(t) dt is integrated term by term against
the power-series expansion of e^(-x t) phi(t) (exact integrals
1/(m+lam) per power), which removes both the lam < 1 singularity and
the lam in (1,2) derivative singularity from the quadrature range.

Nodes and weights are computed at working precision and cached per
precision.  Panels are summed in left-to-right order, so results are
deterministic.
"""

from __future__ import annotations

import math

import mpmath
from mpmath import mp, mpf

from .am_series import AMSeries, EvalResult, TypeCertificate
from .errors import CertificateInsufficient, NonPositiveLambda, ToleranceUnreachable
from .precision import GUARD_BITS, rounding_term, to_mpf
from .tails import poly_geometric_tail

_LOW_ORDER = 8
_HIGH_ORDER = 16
_MAX_PANELS = 16384
_MAX_CUTOFF = mpf("1e5")

_node_cache: dict = {}


def _gauss_legendre(n: int):
    """Nodes and weights on [-1, 1] at the current working precision."""
    key = (n, mp.prec)
    if key in _node_cache:
        return _node_cache[key]
    with mp.extraprec(GUARD_BITS):
        nodes = []
        weights = []
        for i in range(1, n // 2 + n % 2 + 1):
            # Chebyshev initial guess, then Newton on P_n.
            x = mpmath.cos(mpmath.pi * (i - mpf(1) / 4) / (n + mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpf(1), x
                for j in range(2, n + 1):
                    p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpf(2) ** (-mp.prec + 8):
                    break
            p0, p1 = mpf(1), x
            for j in range(2, n + 1):
                p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
            dp = n * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append(x)
            weights.append(w)
    full_nodes = []
    full_weights = []
    for x, w in zip(nodes, weights):
        full_nodes.append(-x)
        full_weights.append(w)
    if n % 2 == 1:
        # midpoint already included once; drop the duplicate mirror
        full_nodes = full_nodes[:-1]
        full_weights = full_weights[:-1]
    for x, w in zip(reversed(nodes), reversed(weights)):
        full_nodes.append(x)
        full_weights.append(w)
    pair = (tuple(+x for x in full_nodes), tuple(+w for w in full_weights))
    _node_cache[key] = pair
    return pair


def _panel(g, a, b):
    """Embedded GL pair on [a, b]; returns (value, error_estimate)."""
    half = (b - a) / 2
    mid = (a + b) / 2
    lo_nodes, lo_weights = _gauss_legendre(_LOW_ORDER)
    hi_nodes, hi_weights = _gauss_legendre(_HIGH_ORDER)
    lo = mpf(0)
    for x, w in zip(lo_nodes, lo_weights):
        lo += w * g(mid + half * x)
    hi = mpf(0)
    for x, w in zip(hi_nodes, hi_weights):
        hi += w * g(mid + half * x)
    lo *= half
    hi *= half
    err = abs(hi - lo) + rounding_term(abs(hi), _HIGH_ORDER)
    return hi, err


def adaptive_integrate(g, a, b, tol):
    """Adaptive bisection on [a, b]; returns (value, error_bound).

    Panels are accepted when the embedded-pair estimate fits the
    proportional share of `tol`; accepted panels are summed left to
    right for a deterministic result.
    """
    a, b, tol = mpf(a), mpf(b), mpf(tol)
    total_width = b - a
    min_width = total_width * mpf(2) ** (-60)
    stack = [(a, b)]
    accepted = []
    while stack:
        left, right = stack.pop()
        value, err = _panel(g, left, right)
        budget = tol * (right - left) / total_width
        if err <= budget or (right - left) <= min_width:
            accepted.append((left, value, err))
        else:
            mid = (left + right) / 2
            stack.append((mid, right))
            stack.append((left, mid))
        if len(accepted) + len(stack) > _MAX_PANELS:
            raise ToleranceUnreachable(
                f"panel budget exhausted integrating to tolerance {tol}"
            )
    accepted.sort(key=lambda item: item[0])
    total = mpf(0)
    err_total = mpf(0)
    for _, v, e in accepted:
        total += v
        err_total += e
    return total, err_total + rounding_term(total, len(accepted))


# ---------------------------------------------------------------------------
# Growth envelopes
# ---------------------------------------------------------------------------

def _require_usable_certificate(s: AMSeries, what: str):
    if s.type_certificate not in (
        TypeCertificate.CERTIFIED_ZERO,
        TypeCertificate.HEURISTIC_ZERO,
    ):
        raise CertificateInsufficient(
            f"{what} needs a certified or heuristic growth certificate, "
            f"got {s.type_certificate.value}"
        )


def _envelope_constant(s: AMSeries, eps) -> mpf:
    """C with phi(t) <= C * e^(eps t) for all t >= 0 under the tail model."""
    eps = mpf(eps)
    if eps <= 0:
        raise CertificateInsufficient("tail exponent must be positive")
    c = s.coeffs[0]
    e = mpmath.e
    for n in range(1, len(s.coeffs)):
        a = s.coeffs[n]
        if a > 0:
            c += a * (n / (e * eps)) ** n  # sup_t t^n e^(-eps t)
    rho = s.tail_ratio if s.tail_ratio is not None else mpf(0)
    if rho > 0:
        if rho >= eps:
            raise CertificateInsufficient(
                f"tail ratio {mpmath.nstr(rho, 8)} is not below eps "
                f"{mpmath.nstr(eps, 8)}"
            )
        n0 = s.truncation_order + 1
        first = (rho * n0 / (e * eps)) ** n0 / mpmath.factorial(n0)
        c += first / (1 - rho / eps)
    return c


def _phi_horner(coeffs, t):
    acc = mpf(0)
    for a in reversed(coeffs):
        acc = acc * t + a
    return acc


def _image_series_tail(s: AMSeries, x) -> mpf:
    """Bound the transform of the unstored series tail: sum_{n>N} rho^n x^-n-1."""
    rho = s.tail_ratio if s.tail_ratio is not None else mpf(0)
    if rho == 0:
        return mpf(0)
    return poly_geometric_tail(1, rho / x, 0, s.truncation_order + 1) / x


def _validate_tol(tol) -> mpf:
    tol = to_mpf(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if tol < mpf(2) ** (16 - mp.prec):
        raise ToleranceUnreachable(
            f"tolerance {mpmath.nstr(tol, 8)} below working-precision floor"
        )
    return tol


def laplace_numeric(s: AMSeries, x, tol=mpf("1e-25")) -> EvalResult:
    """Quadrature value of int_0^oo e^(-x t) phi(t) dt within tol."""
    x = to_mpf(x)
    if x <= 0:
        raise ValueError("x must be positive")
    tol = _validate_tol(tol)
    _require_usable_certificate(s, "laplace_numeric")
    if all(c == 0 for c in s.coeffs):
        return EvalResult(mpf(0), mpf(0))
    eps = x / 2
    envelope = _envelope_constant(s, eps)
    cutoff = mpmath.log(2 * envelope / (tol * (x - eps))) / (x - eps)
    cutoff = max(cutoff, mpf(1))
    if cutoff > _MAX_CUTOFF:
        raise ToleranceUnreachable(
            f"cutoff T = {mpmath.nstr(cutoff, 8)} beyond supported range"
        )
    coeffs = s.coeffs

    def g(t):
        return mpmath.exp(-x * t) * _phi_horner(coeffs, t)

    value, quad_err = adaptive_integrate(g, 0, cutoff, tol / 2)
    tail = envelope * mpmath.exp(-(x - eps) * cutoff) / (x - eps)
    bound = quad_err + tail + _image_series_tail(s, x)
    return EvalResult(value, bound)


# ---------------------------------------------------------------------------
# Weighted transform
# ---------------------------------------------------------------------------

def _weighted_head(s: AMSeries, lam, x, tol):
    """int_0^1 e^(-x t) t^(lam-1) phi(t) dt, term by term.

    e^(-x t) phi(t) is re-expanded as sum b_m t^m with
    b_m = sum_j a_j (-x)^(m-j) / (m-j)!; each power integrates exactly
    to 1/(m+lam).  The majorant |b_m| <= K (rho+x)^m / m! governs both
    the stopping rule and the truncation allowance.
    """
    rho = s.tail_ratio if s.tail_ratio is not None else mpf(0)
    n_top = s.truncation_order
    z = rho + x
    total = mpf(0)
    abs_total = mpf(0)
    m = 0
    with mp.extraprec(GUARD_BITS):
        while True:
            b = mpf(0)
            babs = mpf(0)
            for j in range(0, min(m, n_top) + 1):
                term = s.coeffs[j] * (-x) ** (m - j) / mpmath.factorial(m - j)
                b += term
                babs += abs(term)
            total += b / (m + lam)
            abs_total += babs / (m + lam)
            majorant = z ** (m + 1) / mpmath.factorial(m + 1) / (m + 1 + lam)
            if m > n_top and m + 2 > 2 * z and majorant * 2 < tol / 8:
                truncation = 2 * majorant
                break
            m += 1
            if m > 4096:
                raise ToleranceUnreachable("weighted head expansion too long")
    value = +total
    bound = truncation + rounding_term(+abs_total, (m + 1) * (n_top + 1))
    return value, bound


def laplace_weighted_numeric(s: AMSeries, lam, x, tol=mpf("1e-25")) -> EvalResult:
    """Quadrature value of int_0^oo e^(-x t) t^(lam-1) phi(t) dt."""
    lam = to_mpf(lam)
    if lam <= 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    x = to_mpf(x)
    if x <= 0:
        raise ValueError("x must be positive")
    tol = _validate_tol(tol)
    _require_usable_certificate(s, "laplace_weighted_numeric")
    if all(c == 0 for c in s.coeffs):
        return EvalResult(mpf(0), mpf(0))

    head_value, head_bound = _weighted_head(s, lam, x, tol)

    # envelope on [1, oo): phi <= C e^(x t / 4), t^(lam-1) <= C_w e^(x t / 4)
    eps = x / 4
    envelope = _envelope_constant(s, eps)
    if lam > 1:
        peak = (lam - 1) / (mpmath.e * eps)
        weight_env = peak ** (lam - 1) if peak > 1 else mpf(1)
    else:
        weight_env = mpf(1)
    cutoff = 2 / x * mpmath.log(4 * envelope * weight_env / (x * tol))
    cutoff = max(cutoff, mpf(2))
    if cutoff > _MAX_CUTOFF:
        raise ToleranceUnreachable(
            f"cutoff T = {mpmath.nstr(cutoff, 8)} beyond supported range"
        )
    coeffs = s.coeffs

    def g(t):
        return mpmath.exp(-x * t) * t ** (lam - 1) * _phi_horner(coeffs, t)

    quad_value, quad_err = adaptive_integrate(g, 1, cutoff, tol / 2)
    tail = 2 * envelope * weight_env * mpmath.exp(-x * cutoff / 2) / x

    # transform of the unstored series tail, Gamma(n+lam) x^-(n+lam)
    rho = s.tail_ratio if s.tail_ratio is not None else mpf(0)
    series_tail = mpf(0)
    if rho > 0:
        dc = max(0, math.ceil(lam) - 1)
        k_factor = (1 + math.ceil(lam)) ** dc if dc else 1
        series_tail = (
            poly_geometric_tail(k_factor, rho / x, dc, s.truncation_order + 1)
            * x ** (-lam)
        )
    value = head_value + quad_value
    bound = head_bound + quad_err + tail + series_tail
    return EvalResult(value, bound)
