"""The acceptance battery: ten identity/property criteria at pinned tolerances.

Each criterion returns a result record with a pass flag and a short
detail string; `run_all` executes the battery in order and is what both
the CLI selftest and the test suite drive.  Tolerances are fixed here,
at the default 256-bit working precision, and are not configurable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

from .am_series import exp_series, weight_gamma
from .errors import DivergentAt
from .handles import parse_closed_form
from .hyper_gallery import (
    f_2f2,
    f_2f2_weighted,
    h_series,
    hyper_params,
    phi_1f2,
    scaled_family,
)
from .laplace_image import InvPowerSeries, eval_image, laplace_coeffs, split_remainder
from .measure_chain import (
    default_measure_grid,
    laplace_of_measure,
    mu_step,
    positivity_check,
    sigma_j,
)
from .precision import ulp
from .quad_engine import laplace_numeric, laplace_weighted_numeric
from .sampling import seeded_series
from .widder_ops import (
    CheckEntry,
    corollary_coeffs,
    corollary_identity_check,
    decay_check,
    check_conditions,
    default_x_grid,
    make_report,
    widder_by_recursion,
    widder_identity_check,
    widder_image,
)

DEFAULT_SEED = 7

_X_SAMPLE = (mpf("0.5"), mpf(1), mpf(2), mpf(10))


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str


def _rel_err(got, want) -> mpf:
    denom = max(abs(got), abs(want))
    if denom == 0:
        return mpf(0)
    return abs(got - want) / denom


def _pair_rel_err(a, b) -> mpf:
    return _rel_err(a.value, b.value)


# ---------------------------------------------------------------------------

def criterion_1(seed, quick) -> CriterionResult:
    """Transform of 1/(k!)^2: operator order k gives x^-(k+1) e^(1/x),
    by the coefficient path (rel 1e-30) and the recursion path (1e-20)."""
    ips = laplace_coeffs(h_series())
    cf = parse_closed_form("e^(1/x)/x")
    worst_series = mpf(0)
    worst_rec = mpf(0)
    for k in range(0, 9):
        image = widder_image(ips, k)
        chain = widder_by_recursion(cf, k)
        for x in _X_SAMPLE:
            truth = x ** (-(k + 1)) * mpmath.exp(1 / x)
            worst_series = max(worst_series, _rel_err(eval_image(image, x).value, truth))
            worst_rec = max(worst_rec, _rel_err(chain.eval_at(x)[0], truth))
    ok = worst_series <= mpf("1e-30") and worst_rec <= mpf("1e-20")
    return CriterionResult(
        1, "closed-form operator identity",
        ok,
        f"series rel err {mpmath.nstr(worst_series, 3)} (<=1e-30), "
        f"recursion rel err {mpmath.nstr(worst_rec, 3)} (<=1e-20)",
    )


def criterion_2(seed, quick) -> CriterionResult:
    """Quadrature agrees with the coefficient image within combined bounds
    (quad tolerance 1e-25) for seeded random certified series."""
    count = 6 if quick else 20
    tol = mpf("1e-25")
    worst = mpf("-inf")
    ok = True
    for s in seeded_series(seed, count):
        ips = laplace_coeffs(s)
        for x in _X_SAMPLE:
            numeric = laplace_numeric(s, x, tol)
            image = eval_image(ips, x)
            diff = abs(numeric.value - image.value)
            allowance = numeric.abs_error_bound + image.abs_error_bound
            worst = max(worst, diff - allowance)
            if diff > allowance:
                ok = False
    return CriterionResult(
        2, "dual-path transform",
        ok,
        f"{count} series x {len(_X_SAMPLE)} points; "
        f"worst (diff - bounds) = {mpmath.nstr(worst, 3)}",
    )


def criterion_3(seed, quick) -> CriterionResult:
    """Head/tail split: tail coefficients nonnegative and reconstruction
    within 4 ulp for orders n <= 10."""
    count = 6 if quick else 20
    ok = True
    worst_ulps = mpf(0)
    for s in seeded_series(seed, count):
        ips = laplace_coeffs(s)
        for n in range(1, 11):
            head, tail = split_remainder(ips, n)
            if any(c < 0 for c in tail.coeffs):
                ok = False
            for x in _X_SAMPLE:
                full = eval_image(ips, x)
                recon = mpf(0)
                for k, h in enumerate(head, start=1):
                    recon += h * x ** (-k)
                recon += x ** (-n) * eval_image(tail, x).value
                scale = max(abs(full.value), abs(recon))
                err_ulps = abs(full.value - recon) / ulp(scale) if scale != 0 else mpf(0)
                worst_ulps = max(worst_ulps, err_ulps)
                if err_ulps > 4:
                    ok = False
    return CriterionResult(
        3, "remainder split witness",
        ok,
        f"tail coefficients nonnegative; reconstruction worst "
        f"{mpmath.nstr(worst_ulps, 3)} ulp (<=4)",
    )


def _identity_functions(seed):
    return (
        ("h", laplace_coeffs(h_series())),
        ("1f2(1;2,3)", laplace_coeffs(phi_1f2(hyper_params(1, 2, 3)))),
        ("random", laplace_coeffs(seeded_series(seed + 1, 1)[0])),
    )


def criterion_4(seed, quick) -> CriterionResult:
    """Bridging identity x^(k-1)(x^k f)^(2k-1) = (x^(2k-1) f^(k-1))^(k)
    to relative 1e-25 for k <= 5 on the default grid."""
    grid = default_x_grid()
    worst = mpf(0)
    entries = []
    for name, ips in _identity_functions(seed):
        for k in range(1, 6):
            for x in grid:
                left, right = widder_identity_check(ips, k, x)
                err = _pair_rel_err(left, right)
                worst = max(worst, err)
                entries.append(
                    CheckEntry("eq7", k, x, left.value - right.value,
                               left.abs_error_bound + right.abs_error_bound,
                               "pass" if err <= mpf("1e-25") else "fail")
                )
    report = make_report(entries)
    return CriterionResult(
        4, "bridging identity",
        report.summary == "pass",
        f"worst rel err {mpmath.nstr(worst, 3)} (<=1e-25)",
    )


def criterion_5(seed, quick) -> CriterionResult:
    """Coefficient-table expansion holds to relative 1e-25 for k <= 5,
    j <= k-1, with all table entries nonnegative."""
    worst = mpf(0)
    ok = True
    for k in range(1, 6):
        table = corollary_coeffs(k, k - 1)
        for row in table.rows:
            if any(a < 0 for a in row):
                ok = False
    for name, ips in _identity_functions(seed):
        for k in range(1, 6):
            for j in range(0, k):
                for x in (mpf("0.5"), mpf(2), mpf(16)):
                    left, right = corollary_identity_check(ips, j, k, x)
                    err = _pair_rel_err(left, right)
                    worst = max(worst, err)
                    if err > mpf("1e-25"):
                        ok = False
    return CriterionResult(
        5, "coefficient-table identity",
        ok,
        f"entries nonnegative; worst rel err {mpmath.nstr(worst, 3)} (<=1e-25)",
    )


def criterion_6(seed, quick) -> CriterionResult:
    """Measure chain: stepped density equals t^(j+1) p^(j+1)(t) nodewise
    (rel 1e-30, j <= 4); measure transform matches the operator value to
    1e-6 absolute for k <= 3, x in {1, 2, 5}."""
    grid = default_measure_grid()
    sources = (
        ("exp", exp_series()),
        ("h", h_series()),
        ("1f2(1;2,3)", phi_1f2(hyper_params(1, 2, 3))),
    )
    worst_node = mpf(0)
    worst_match = mpf(0)
    ok = True
    divergent_notes = 0
    for name, p in sources:
        from .am_series import derivative_series, eval_phi

        j_top = 2 if quick else 4
        for j in range(0, j_top + 1):
            sig = sigma_j(p, j, grid)
            stepped = mu_step(sig, j + 1)
            if not positivity_check(stepped).passed:
                ok = False
            oracle_series = derivative_series(p, j + 1)
            for t, d in zip(stepped.grid, stepped.density):
                want = t ** (j + 1) * eval_phi(oracle_series, t).value
                if want == 0 and d == 0:
                    continue
                err = _rel_err(d, want)
                worst_node = max(worst_node, err)
                if err > mpf("1e-30"):
                    ok = False
        ips = laplace_coeffs(p)
        for k in range(1, 4):
            measure = mu_step(sigma_j(p, k - 1, grid), k)
            for x in (mpf(1), mpf(2), mpf(5)):
                try:
                    operator_value = eval_image(widder_image(ips, k), x).value
                except DivergentAt:
                    # boundary of convergence (growth certificate violated
                    # and x at or below the growth rate): nothing to compare
                    divergent_notes += 1
                    continue
                got = laplace_of_measure(measure, x).value
                diff = abs(got - operator_value)
                worst_match = max(worst_match, diff)
                if diff > mpf("1e-6"):
                    ok = False
    note = f", {divergent_notes} divergent points skipped" if divergent_notes else ""
    return CriterionResult(
        6, "measure chain oracle",
        ok,
        f"nodewise rel err {mpmath.nstr(worst_node, 3)} (<=1e-30); "
        f"transform match {mpmath.nstr(worst_match, 3)} (<=1e-6){note}",
    )


def criterion_7(seed, quick) -> CriterionResult:
    """Scaled-family failure prediction: nonnegative coefficients through
    order floor(lam)+1, first negative head coefficient at floor(lam)+2
    matching the predicted product (rel 1e-30); the 1/x, lam=1/2 case
    equals -1/4 within 2 ulp."""
    ok = True
    worst = mpf(0)
    one_over_x = InvPowerSeries((mpf(1),), mpf(0), None)
    h_image = laplace_coeffs(h_series())
    for lam_str in ("0.3", "0.5", "1.7", "2.5"):
        lam = mpf(lam_str)
        for name, ips in (("1/x", one_over_x), ("h", h_image)):
            fam = scaled_family(ips, lam)
            k = int(mpmath.floor(lam))
            for j in range(0, k + 2):
                image = widder_image(fam.series, j)
                if not all(c >= 0 for c in image.coeffs):
                    ok = False
            image = widder_image(fam.series, fam.failing_order)
            head = image.coeffs[0]
            if not (head < 0):
                ok = False
            err = _rel_err(head, fam.leading_coefficient)
            worst = max(worst, err)
            if err > mpf("1e-30"):
                ok = False
    fam = scaled_family(one_over_x, mpf("0.5"))
    got = widder_image(fam.series, 2).coeffs[0]
    quarter_ok = abs(got - mpf(-0.25)) <= 2 * ulp(mpf(0.25))
    if not quarter_ok:
        ok = False
    return CriterionResult(
        7, "scaled-family failure order",
        ok,
        f"sign pattern as predicted; coefficient rel err "
        f"{mpmath.nstr(worst, 3)} (<=1e-30); 1/x case {mpmath.nstr(got, 8)}",
    )


def criterion_8(seed, quick) -> CriterionResult:
    """The function 1/(x+1) must fail condition thm1.1.v at k = 1 with a
    strictly positive first derivative of x*f at every grid point."""
    cf = parse_closed_form("1/(x+1)")
    report = check_conditions(cf, k_max=2)
    grid = default_x_grid()
    v_entries = [
        e for e in report.entries if e.condition == "thm1.1.v" and e.k == 1
    ]
    all_fail = (
        len(v_entries) == len(grid)
        and all(e.verdict == "fail" and e.value > 0 for e in v_entries)
    )
    ok = all_fail and report.summary == "fail"
    return CriterionResult(
        8, "counterexample detection",
        ok,
        f"thm1.1.v entries failing at k=1: {sum(e.verdict == 'fail' for e in v_entries)}"
        f"/{len(grid)}, summary={report.summary}",
    )


def criterion_9(seed, quick) -> CriterionResult:
    """Hypergeometric dualities: transform vs quadrature, and weighted
    transform vs weighted quadrature, within combined bounds over the
    parameter sample (>= 64 combinations)."""
    values = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3))
    triples = []
    for i, a in enumerate(values):
        for j, b in enumerate(values):
            triples.append((a, b, values[(i + j) % 4]))
    if quick:
        triples = triples[::4]
    lams = ("0.5", "1", "1.5", "2")
    combos = 0
    ok = True
    worst = mpf("-inf")
    for idx, (a, b, c) in enumerate(triples):
        p = hyper_params(a, b, c)
        phi = phi_1f2(p)
        for x in (_X_SAMPLE[idx % 4], _X_SAMPLE[(idx + 2) % 4]):
            series_val = f_2f2(p, x)
            quad_val = laplace_numeric(phi, x, mpf("1e-25"))
            diff = abs(series_val.value - quad_val.value)
            allowance = series_val.abs_error_bound + quad_val.abs_error_bound
            worst = max(worst, diff - allowance)
            ok = ok and diff <= allowance
            combos += 1

        pairs = (
            (lams[idx % 4], _X_SAMPLE[(idx + 1) % 4]),
            (lams[(idx + 2) % 4], _X_SAMPLE[(idx + 3) % 4]),
        )
        for lam_str, xw in pairs:
            pw = hyper_params(a, b, c, lam_str)
            weighted_series = f_2f2_weighted(pw, xw)
            weighted_quad = laplace_weighted_numeric(phi, mpf(lam_str), xw, mpf("1e-25"))
            diff = abs(weighted_series.value - weighted_quad.value)
            allowance = weighted_series.abs_error_bound + weighted_quad.abs_error_bound
            worst = max(worst, diff - allowance)
            ok = ok and diff <= allowance
            combos += 1
    min_combos = 16 if quick else 64
    ok = ok and combos >= min_combos
    return CriterionResult(
        9, "hypergeometric dualities",
        ok,
        f"{combos} combinations; worst (diff - bounds) = {mpmath.nstr(worst, 3)}",
    )


def criterion_10(seed, quick) -> CriterionResult:
    """Large-x decay: x^k f^(k)(x) shrinks monotonically along
    10^1..10^6 and ends at least 1e-5 below its starting magnitude,
    for k <= 4.  (The quantity behaves like k! c_0 / x, so the target is
    the decay factor across the grid rather than a fixed absolute
    value.)"""
    functions = (
        ("h", laplace_coeffs(h_series())),
        ("1f2(1;2,3)", laplace_coeffs(phi_1f2(hyper_params(1, 2, 3)))),
        ("1f2(1/2;1,2)", laplace_coeffs(phi_1f2(hyper_params("1/2", 1, 2)))),
    )
    ok = True
    for name, ips in functions:
        report = decay_check(ips, 4)
        if report.summary != "pass":
            ok = False
    return CriterionResult(
        10, "decay limits",
        ok,
        "monotone decay with factor <= 1e-5 across 10^1..10^6 for k <= 4",
    )


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
)


def run_all(seed: int = DEFAULT_SEED, quick: bool = False, stream=None):
    """Run every criterion; prints one line each when `stream` is given."""
    results = []
    for fn in CRITERIA:
        result = fn(seed, quick)
        results.append(result)
        if stream is not None:
            status = "PASS" if result.passed else "FAIL"
            print(
                f"criterion {result.index:2d} [{status}] {result.name}: {result.detail}",
                file=stream,
            )
    return tuple(results)
