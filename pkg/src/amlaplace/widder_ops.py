"""Sign-test operators for inverse-power functions.

For f on (0, oo) the operator family

    f_j(x) = (-1)^j (x^j f(x))^(j)

is the test battery: f is the Laplace image of a nonnegative-coefficient
series of minimal growth exactly when every f_j is completely monotonic,
equivalently nonnegative, equivalently f >= 0 with (x^k f)^(2k-1) <= 0.
On inverse-power series the operator acts diagonally,

    c_n -> c_n * (n + offset) (n + offset - 1) ... (n + offset - j + 1),

so coefficient nonnegativity is an exact, truncation-free witness.  The
module also provides the first-order recursion f_j = -x f_{j-1}' - j
f_{j-1} and its derivative form as independent evaluation paths, the
weighted operator T_{n,k}(lam), the bridging identity

    x^(k-1) (x^k f)^(2k-1) = (x^(2k-1) f^(k-1))^(k),

a coefficient-table expansion of (-1)^j x^j f^(k-1) in terms of the
f_l derivatives, large-x decay checks, and detectors for order-r
complete monotonicity and polynomial sources.

All operations are pure functions of immutable inputs; grid points and
orders may be evaluated concurrently, and report assembly is a
deterministic reduction independent of evaluation order.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .am_series import EvalResult
from .errors import IndexOutOfRange, NonPositiveLambda
from .handles import ClosedForm, FunctionHandle, SeriesHandle, as_handle
from .laplace_image import (
    InvPowerSeries,
    falling,
    ips_derivative,
    rising,
)
from .precision import rounding_term, to_mpf
from .tails import TailModel

DEFAULT_ABS_TOL = mpf("1e-40")
DEFAULT_REL_TOL = mpf("1e-35")
DEFAULT_DERIVATIVE_DEPTH = 8


def default_x_grid() -> tuple:
    """Geometric grid, 16 points from 2^-4 to 2^11."""
    return tuple(mpf(2) ** e for e in range(-4, 12))


def default_decay_grid() -> tuple:
    """Geometric grid 10^1 .. 10^6, one point per decade."""
    return tuple(mpf(10) ** e for e in range(1, 7))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckEntry:
    condition: str
    k: int
    x: mpf
    value: mpf
    bound: mpf
    verdict: str            # pass | fail | inconclusive
    m: int | None = None    # derivative depth, where relevant


@dataclass(frozen=True)
class CheckReport:
    entries: tuple
    abs_tol: mpf
    rel_tol: mpf
    summary: str

    def failures(self):
        return tuple(e for e in self.entries if e.verdict == "fail")

    def to_json(self) -> str:
        def num(v):
            return mpmath.nstr(v, 30) if v is not None else None

        obj = {
            "summary": self.summary,
            "tolerances": {
                "abs_tol": num(self.abs_tol),
                "rel_tol": num(self.rel_tol),
            },
            "entries": [
                {
                    "condition": e.condition,
                    "k": e.k,
                    "m": e.m,
                    "x": num(e.x),
                    "value": num(e.value),
                    "bound": num(e.bound),
                    "verdict": e.verdict,
                }
                for e in self.entries
            ],
        }
        return json.dumps(obj, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["condition", "k", "m", "x", "value", "bound", "verdict"])
        for e in self.entries:
            writer.writerow(
                [
                    e.condition,
                    e.k,
                    "" if e.m is None else e.m,
                    mpmath.nstr(e.x, 30),
                    mpmath.nstr(e.value, 30),
                    mpmath.nstr(e.bound, 30),
                    e.verdict,
                ]
            )
        writer.writerow(["summary", "", "", "", "", "", self.summary])
        return out.getvalue()


def make_report(entries, abs_tol=DEFAULT_ABS_TOL, rel_tol=DEFAULT_REL_TOL) -> CheckReport:
    entries = tuple(entries)
    if any(e.verdict == "fail" for e in entries):
        summary = "fail"
    elif any(e.verdict == "inconclusive" for e in entries):
        summary = "inconclusive"
    else:
        summary = "pass"
    return CheckReport(entries, abs_tol, rel_tol, summary)


def _sign_verdict(value, bound, required, scale, abs_tol, rel_tol) -> str:
    """Classify a signed quantity against its required sign.

    fail: the value violates the required sign by more than bound+slack;
    inconclusive: |value| within bound+slack of zero;
    the exact-zero rule (value and bound both exactly 0) passes.
    """
    if value == 0 and bound == 0:
        return "pass"
    slack = max(abs_tol, rel_tol * scale) + bound
    signed = value if required == "+" else -value
    if signed < -slack:
        return "fail"
    if abs(value) <= slack:
        return "inconclusive"
    return "pass"


def _coefficient_witness(handle, required) -> bool:
    """True when every stored coefficient already has the required sign.

    For series-backed inputs this is an exact, truncation-free proof of
    the pointwise sign (all terms x^-n-1-offset are positive), so it
    upgrades tiny-magnitude samples that the slack logic alone would
    leave inconclusive.
    """
    if not isinstance(handle, SeriesHandle):
        return False
    if required == "+":
        return all(c >= 0 for c in handle.series.coeffs)
    return all(c <= 0 for c in handle.series.coeffs)


# ---------------------------------------------------------------------------
# The diagonal operator action and its recursion paths
# ---------------------------------------------------------------------------

def widder_image(ips: InvPowerSeries, j: int) -> InvPowerSeries:
    """Coefficient action of f -> (-1)^j (x^j f)^(j).

    With offset lam the n-th coefficient picks up the factor
    (n + lam)(n + lam - 1)...(n + lam - j + 1); for lam = 0 that is
    n!/(n-j)! for n >= j and exactly zero below, so nonnegative inputs
    stay nonnegative.  The offset is unchanged.
    """
    j = int(j)
    if j < 0:
        raise ValueError("operator order must be nonnegative")
    lam = ips.offset
    coeffs = tuple(c * falling(n + lam, j) for n, c in enumerate(ips.coeffs))
    tail = None
    if ips.tail is not None:
        tail = ips.tail.widened((1 + abs(lam) + j) ** j, j)
    return InvPowerSeries(coeffs, lam, tail)


def _fk_handle(f: FunctionHandle, k: int) -> FunctionHandle:
    """f_k = (-1)^k (x^k f)^(k) as a handle, exact per backend."""
    if isinstance(f, SeriesHandle):
        return SeriesHandle(widder_image(f.series, k))
    h = f.xmul(k).diff(k)
    return h.scaled((-1) ** k)


def recursion_step(f_prev, j: int, x) -> EvalResult:
    """One step of f_j = -x f_{j-1}' - j f_{j-1}, evaluated at x.

    `f_prev` is a handle (or inverse-power series) for f_{j-1}.
    """
    j = int(j)
    if j < 1:
        raise ValueError("recursion index must be >= 1")
    h = as_handle(f_prev)
    x = to_mpf(x)
    dv, db, dscale = h.diff().eval_at(x)
    v, vb, vscale = h.eval_at(x)
    value = -x * dv - j * v
    scale = x * dscale + j * vscale
    bound = x * db + j * vb + rounding_term(scale, 4)
    return EvalResult(value, bound)


# The chain step needs addition; series and closed forms both support it,
# but through different operations.  Provide it via a tiny dispatcher so
# the protocol core stays minimal.
def _plus(a: FunctionHandle, b: FunctionHandle) -> FunctionHandle:
    if isinstance(a, ClosedForm) and isinstance(b, ClosedForm):
        return a.plus(b)
    if isinstance(a, SeriesHandle) and isinstance(b, SeriesHandle):
        sa, sb = a.series, b.series
        if sa.offset != sb.offset or len(sa.coeffs) != len(sb.coeffs):
            raise ValueError("series addition requires matching layout")
        tail = None
        if sa.tail is not None and sb.tail is not None:
            ratio = max(sa.tail.ratio, sb.tail.ratio)
            degree = max(sa.tail.degree, sb.tail.degree)
            tail = TailModel(sa.tail.scale + sb.tail.scale, ratio, degree)
        coeffs = tuple(ca + cb for ca, cb in zip(sa.coeffs, sb.coeffs))
        return SeriesHandle(InvPowerSeries(coeffs, sa.offset, tail))
    raise ValueError("cannot add handles of different backends")


def widder_by_recursion(f, j: int) -> FunctionHandle:
    """Build f_j by iterating h -> -x h' - i h, i = 1..j, on a handle."""
    h = as_handle(f)
    for i in range(1, int(j) + 1):
        h = _plus(h.diff().xmul(1).scaled(-1), h.scaled(-i))
    return h


def derivative_recursion_check(f, j: int, k: int, x) -> tuple:
    """Evaluate both sides of
    f_j^(k-1) = -x f_{j-1}^(k) - (j+k-1) f_{j-1}^(k-1)
    by independent paths; returns (left, right) as EvalResults.
    """
    j, k = int(j), int(k)
    if j < 1 or k < 1:
        raise ValueError("requires j >= 1 and k >= 1")
    h = as_handle(f)
    x = to_mpf(x)

    left_v, left_b, left_s = _fk_handle(h, j).diff(k - 1).eval_at(x)
    left = EvalResult(left_v, left_b + rounding_term(left_s, 4))

    prev = _fk_handle(h, j - 1)
    dv, db, ds = prev.diff(k).eval_at(x)
    v, vb, vs = prev.diff(k - 1).eval_at(x)
    right_value = -x * dv - (j + k - 1) * v
    right_scale = x * ds + (j + k - 1) * vs
    right = EvalResult(right_value, x * db + (j + k - 1) * vb
                       + rounding_term(right_scale, 4))
    return left, right


def sokal_T(f, n: int, k: int, lam, x) -> EvalResult:
    """The weighted operator
    (-1)^n x^-(n+lam-1) (x^(k+n+lam-1) f^(n)(x))^(k)  at x.

    Series-backed inputs are computed exactly on coefficients; closed
    forms symbolically.
    """
    n, k = int(n), int(k)
    if n < 0 or k < 0:
        raise ValueError("operator orders must be nonnegative")
    lam = to_mpf(lam)
    if lam <= 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    h = as_handle(f)
    x = to_mpf(x)
    if isinstance(h, SeriesHandle):
        ips = h.series
        mu = ips.offset
        with mp.extraprec(32):
            total = mpf(0)
            scale = mpf(0)
            for m, c in enumerate(ips.coeffs):
                factor = rising(m + 1 + mu, n) * falling(k + lam - 2 - m - mu, k)
                term = c * factor * x ** (-m - 1 - mu - n)
                total += term
                scale += abs(term)
        value = +total
        scale = +scale
        bound = rounding_term(scale, len(ips.coeffs))
        if ips.tail is not None:
            t = ips.tail
            widened = t.widened(
                ((1 + abs(mu) + n) ** n) * ((1 + abs(lam) + abs(mu) + k + 2) ** k),
                n + k,
            )
            shifted = InvPowerSeries(ips.coeffs, mu + n, widened)
            from .laplace_image import _eval_terms

            _, tail_bound, _ = _eval_terms(shifted, x)
            bound += tail_bound
        return EvalResult(value, bound)
    g = h.diff(n).xmul(k + n + lam - 1).diff(k).xmul(-(n + lam - 1))
    g = g.scaled((-1) ** n)
    value, bound, scale = g.eval_at(x)
    return EvalResult(value, bound + rounding_term(scale, 4))


# ---------------------------------------------------------------------------
# Condition battery
# ---------------------------------------------------------------------------

def check_conditions(
    f,
    k_max: int,
    x_grid=None,
    depth: int = DEFAULT_DERIVATIVE_DEPTH,
    abs_tol=DEFAULT_ABS_TOL,
    rel_tol=DEFAULT_REL_TOL,
) -> CheckReport:
    """Run the three sign conditions over orders k <= k_max and a grid.

    thm1.1.iv: f_k(x) >= 0.
    thm1.1.iii: (-1)^m f_k^(m)(x) >= 0 sampled to derivative depth
        `depth` (for series inputs, coefficient nonnegativity of the
        operator image supplies the unbounded-depth witness).
    thm1.1.v: f(x) >= 0 and (x^k f)^(2k-1)(x) <= 0 for k >= 1.
    Sign failures become verdicts, never exceptions.
    """
    h = as_handle(f)
    grid = tuple(to_mpf(x) for x in (x_grid or default_x_grid()))
    entries = []

    def verdict_for(handle, value, bound, required, scale):
        if _coefficient_witness(handle, required):
            return "pass"
        return _sign_verdict(value, bound, required, scale, abs_tol, rel_tol)

    for k in range(0, int(k_max) + 1):
        fk = _fk_handle(h, k)
        for x in grid:
            v, b, s = fk.eval_at(x)
            entries.append(
                CheckEntry("thm1.1.iv", k, x, v, b, verdict_for(fk, v, b, "+", s))
            )
        for m in range(0, int(depth) + 1):
            fkm = fk.diff(m)
            sign = (-1) ** m
            signed_handle = fkm.scaled(sign)
            for x in grid:
                v, b, s = signed_handle.eval_at(x)
                entries.append(
                    CheckEntry(
                        "thm1.1.iii", k, x, v, b,
                        verdict_for(signed_handle, v, b, "+", s),
                        m=m,
                    )
                )
        if k == 0:
            for x in grid:
                v, b, s = h.eval_at(x)
                entries.append(
                    CheckEntry("thm1.1.v", 0, x, v, b, verdict_for(h, v, b, "+", s))
                )
        else:
            g = h.xmul(k).diff(2 * k - 1)
            for x in grid:
                v, b, s = g.eval_at(x)
                entries.append(
                    CheckEntry("thm1.1.v", k, x, v, b, verdict_for(g, v, b, "-", s))
                )
    return make_report(entries, abs_tol, rel_tol)


def widder_identity_check(f, k: int, x) -> tuple:
    """Both sides of x^(k-1) (x^k f)^(2k-1) = (x^(2k-1) f^(k-1))^(k),
    evaluated by independent exact paths."""
    k = int(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    h = as_handle(f)
    x = to_mpf(x)
    lv, lb, ls = h.xmul(k).diff(2 * k - 1).eval_at(x)
    front = x ** (k - 1)
    left = EvalResult(front * lv, front * lb + rounding_term(front * ls, 2))
    rv, rb, rs = h.diff(k - 1).xmul(2 * k - 1).diff(k).eval_at(x)
    right = EvalResult(rv, rb + rounding_term(rs, 2))
    return left, right


def decay_check(f, k_max: int, grid=None, decay_factor=mpf("1e-5")) -> CheckReport:
    """Track x^k f^(k)(x) along a large-x grid (condition id lem2.3).

    For each k the magnitudes must be nonincreasing along the grid and
    the final point must have decayed below `decay_factor` times the
    first.  The factor form is used because the quantity itself behaves
    like k! c_0 / x, so a fixed absolute target would not scale in k.
    """
    h = as_handle(f)
    grid = tuple(to_mpf(x) for x in (grid or default_decay_grid()))
    entries = []
    for k in range(0, int(k_max) + 1):
        dk = h.diff(k)
        magnitudes = []
        bounds = []
        for x in grid:
            v, b, _ = dk.eval_at(x)
            magnitudes.append(abs(v * x ** k))
            bounds.append(b * x ** k)
        first = magnitudes[0]
        for i, x in enumerate(grid):
            if i == 0:
                verdict = "pass"
            else:
                monotone = magnitudes[i] <= magnitudes[i - 1] + bounds[i] + bounds[i - 1]
                verdict = "pass" if monotone else "fail"
            if i == len(grid) - 1 and verdict == "pass":
                if first == 0:
                    verdict = "pass" if magnitudes[i] == 0 else "fail"
                elif not (magnitudes[i] <= decay_factor * first):
                    verdict = "fail"
            entries.append(
                CheckEntry("lem2.3", k, x, magnitudes[i], bounds[i], verdict)
            )
    return make_report(entries)


# ---------------------------------------------------------------------------
# Coefficient-table expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorollaryTable:
    """Nonnegative integers a[j][l] with
    (-1)^j x^j f^(k-1) = sum_l a[j][l] f_l^(k-j-1) for j <= k-1,
    built by a_{j+1,l+1} += a_{j,l} and a_{j+1,l} += (k-1-j+l) a_{j,l}."""

    k: int
    rows: tuple  # rows[j] = (a_{j,0}, ..., a_{j,j})

    def entry(self, j: int, l: int) -> int:
        return self.rows[j][l]


def corollary_coeffs(k: int, j_max: int) -> CorollaryTable:
    k, j_max = int(k), int(j_max)
    if k < 1:
        raise IndexOutOfRange("k must be >= 1")
    if not (0 <= j_max <= k - 1):
        raise IndexOutOfRange(f"need 0 <= j_max <= k-1, got j_max={j_max}, k={k}")
    rows = [(1,)]
    for j in range(j_max):
        prev = rows[-1]
        nxt = [0] * (j + 2)
        for l, a in enumerate(prev):
            nxt[l + 1] += a
            nxt[l] += (k - 1 - j + l) * a
        rows.append(tuple(nxt))
    return CorollaryTable(k, tuple(rows))


def corollary_identity_check(f, j: int, k: int, x) -> tuple:
    """Both sides of (-1)^j x^j f^(k-1) = sum_l a_{j,l} f_l^(k-j-1)."""
    j, k = int(j), int(k)
    if not (0 <= j <= k - 1):
        raise IndexOutOfRange(f"need 0 <= j <= k-1, got j={j}, k={k}")
    h = as_handle(f)
    x = to_mpf(x)
    lv, lb, ls = h.diff(k - 1).eval_at(x)
    front = (-x) ** j if j % 2 else x ** j
    left = EvalResult(front * lv, abs(front) * lb + rounding_term(abs(front) * ls, 2))

    table = corollary_coeffs(k, j)
    total = mpf(0)
    bound = mpf(0)
    scale = mpf(0)
    for l in range(j + 1):
        a = table.entry(j, l)
        if a == 0:
            continue
        v, b, s = _fk_handle(h, l).diff(k - j - 1).eval_at(x)
        total += a * v
        bound += a * b
        scale += a * s
    right = EvalResult(total, bound + rounding_term(scale, j + 2))
    return left, right


# ---------------------------------------------------------------------------
# Detectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CmOrderVerdict:
    passed: bool
    derivative_nonpositive: bool
    leading_coeffs_zero: bool | None  # None for non-series inputs
    entries: tuple


def cm_order_detect(f, r: int, x_grid=None,
                    abs_tol=DEFAULT_ABS_TOL, rel_tol=DEFAULT_REL_TOL) -> CmOrderVerdict:
    """Check (x^r f)' <= 0 on the grid; on a pass for series-backed
    input, additionally require the first r-1 coefficients to vanish."""
    r = int(r)
    if r < 2:
        raise ValueError("order r must be >= 2")
    h = as_handle(f)
    grid = tuple(to_mpf(x) for x in (x_grid or default_x_grid()))
    g = h.xmul(r).diff(1)
    entries = []
    ok = True
    for x in grid:
        v, b, s = g.eval_at(x)
        verdict = _sign_verdict(v, b, "-", s, abs_tol, rel_tol)
        if verdict == "fail":
            ok = False
        entries.append(CheckEntry("cm.order", r, x, v, b, verdict))
    coeffs_zero = None
    if isinstance(h, SeriesHandle) and ok:
        coeffs_zero = all(c == 0 for c in h.series.coeffs[: max(r - 1, 0)])
    passed = ok and (coeffs_zero is not False)
    return CmOrderVerdict(passed, ok, coeffs_zero, tuple(entries))


@dataclass(frozen=True)
class PolynomialDetection:
    order: int | None       # r with lim_{x->0+} x^r f(x) = leading
    leading: mpf | None
    evidence: tuple         # ((x, value), ...) sampled near zero


def detect_polynomial(f) -> PolynomialDetection:
    """Decide whether f is the image of a polynomial source.

    Series inputs are decided on coefficients: a tail majorant with
    positive ratio, or an unbroken run of nonzero trailing coefficients,
    signals an infinite series (x^k f blows up at 0+ for every k); the
    sampled blowup is returned as evidence.  Otherwise the last nonzero
    coefficient c_{r-1} gives order r and limit c_{r-1}.  Closed-form
    inputs are decided by sampling x^r f(x) for shrinking x.
    """
    h = as_handle(f)
    if isinstance(h, SeriesHandle):
        ips = h.series
        coeffs = ips.coeffs
        nonzero = [n for n, c in enumerate(coeffs) if c != 0]
        if not nonzero:
            return PolynomialDetection(None, None, ())
        infinite = ips.tail is not None and ips.tail.ratio > 0
        if not infinite and len(coeffs) >= 16:
            quarter = len(coeffs) - len(coeffs) // 4
            infinite = all(c != 0 for c in coeffs[quarter:])
        if infinite:
            # sample x * f(x) shrinking toward 0+: it blows up for every
            # nonpolynomial source (and visibly so for the stored head)
            evidence = []
            with mp.extraprec(32):
                for e in range(1, 6):
                    x = mpf(2) ** (-e)
                    acc = mpf(0)
                    for c in reversed(coeffs):
                        acc = acc / x + c  # sum c_n x^(-n)
                    evidence.append((x, +(acc * x ** (-ips.offset))))
            return PolynomialDetection(None, None, tuple(evidence))
        d = nonzero[-1]
        return PolynomialDetection(d + 1, coeffs[d], ())

    # closed-form path: find the smallest r with a finite nonzero limit
    evidence = []
    for r in range(1, 17):
        values = []
        for e in (8, 16, 24, 32):
            x = mpf(2) ** (-e)
            v, _, _ = h.eval_at(x)
            values.append(v * x ** r)
        evidence = [(mpf(2) ** (-e), v) for e, v in zip((8, 16, 24, 32), values)]
        last, prev = values[-1], values[-2]
        if last != 0 and abs(last - prev) <= abs(last) * mpf("1e-10"):
            return PolynomialDetection(r, last, tuple(evidence))
        if abs(last) < abs(prev):  # shrinking: no nonzero limit at any larger r
            return PolynomialDetection(None, None, tuple(evidence))
    return PolynomialDetection(None, None, tuple(evidence))
