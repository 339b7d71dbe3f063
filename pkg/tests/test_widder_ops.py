import math

import mpmath
import pytest
from mpmath import mpf

from amlaplace import (
    InvPowerSeries,
    check_conditions,
    cm_order_detect,
    corollary_coeffs,
    corollary_identity_check,
    decay_check,
    derivative_recursion_check,
    detect_polynomial,
    eval_image,
    h_series,
    laplace_coeffs,
    new_am_series,
    parse_closed_form,
    pochhammer,
    recursion_step,
    sokal_T,
    widder_by_recursion,
    widder_identity_check,
    widder_image,
)
from amlaplace.errors import IndexOutOfRange, NonPositiveLambda
from amlaplace.sampling import seeded_series


def h_image():
    return laplace_coeffs(h_series())


def test_widder_image_h_shifts_factorials():
    ips = h_image()
    for k in (1, 3, 6):
        w = widder_image(ips, k)
        for n in range(len(w.coeffs)):
            if n < k:
                assert w.coeffs[n] == 0
            else:
                want = mpf(1) / math.factorial(n - k)
                assert abs(w.coeffs[n] - want) <= abs(want) * mpf("1e-70")


def test_widder_image_kills_constant_source():
    ips = InvPowerSeries((mpf(1),), mpf(0), None)
    w = widder_image(ips, 1)
    assert w.coeffs == (mpf(0),)


def test_widder_image_offset_half_order_two():
    ips = InvPowerSeries((mpf(1),), mpf("0.5"), None)
    w = widder_image(ips, 2)
    assert w.coeffs[0] == mpf("-0.25")
    assert w.offset == mpf("0.5")


def test_widder_image_nonnegative_for_source_series():
    for s in seeded_series(3, 3):
        ips = laplace_coeffs(s)
        for j in (1, 2, 5):
            assert all(c >= 0 for c in widder_image(ips, j).coeffs)


def test_recursion_step_h():
    cf = parse_closed_form("e^(1/x)/x")
    r = recursion_step(cf, 1, 1)
    assert abs(r.value - mpmath.e) < mpf("1e-70")


def test_recursion_step_trivial_and_square():
    one_over_x = InvPowerSeries((mpf(1),), mpf(0), None)
    assert recursion_step(one_over_x, 1, mpf("1.7")).value == 0
    inv_sq = parse_closed_form("1/x^2")
    r = recursion_step(inv_sq, 1, 2)
    assert abs(r.value - mpf("0.25")) < mpf("1e-70")


def test_widder_by_recursion_matches_image_path():
    ips = h_image()
    for j in (1, 2, 4, 6):
        chain = widder_by_recursion(ips, j)
        image = widder_image(ips, j)
        for x in (mpf("0.5"), mpf(2)):
            a = chain.eval_at(x)[0]
            b = eval_image(image, x).value
            assert abs(a - b) <= abs(b) * mpf("1e-65")


def test_derivative_recursion_check_h():
    left, right = derivative_recursion_check(h_image(), 1, 2, 1)
    want = -3 * mpmath.e
    assert abs(left.value - want) < mpf("1e-70")
    assert abs(right.value - want) < mpf("1e-70")


def test_derivative_recursion_check_trivial():
    one_over_x = InvPowerSeries((mpf(1),), mpf(0), None)
    left, right = derivative_recursion_check(one_over_x, 1, 2, mpf(3))
    assert left.value == 0
    assert right.value == 0


def test_derivative_recursion_check_random_series():
    s = seeded_series(11, 1)[0]
    left, right = derivative_recursion_check(laplace_coeffs(s), 2, 3, mpf("1.5"))
    assert abs(left.value - right.value) <= (
        left.abs_error_bound + right.abs_error_bound + abs(left.value) * mpf("1e-70")
    )


def test_sokal_identity_case():
    ips = h_image()
    t = sokal_T(ips, 0, 0, 1, mpf(2))
    f = eval_image(ips, 2)
    assert abs(t.value - f.value) <= abs(f.value) * mpf("1e-70")


def test_sokal_power_function():
    from amlaplace.handles import ClosedForm

    # dyadic exponent: the operator annihilates x^-lam exactly for k >= 1
    lam = mpf("0.75")
    xl = ClosedForm.from_term(1, -lam)
    for k in (1, 2):
        assert sokal_T(xl, 2, k, lam, mpf(3)).value == 0
    got = sokal_T(xl, 2, 0, lam, mpf(3)).value
    want = pochhammer(lam, 2) * mpf(3) ** (-lam - 2)
    assert abs(got - want) <= abs(want) * mpf("1e-70")
    # non-dyadic exponents perturb the symbolic constants at rounding
    # scale; the annihilation then holds to relative working precision
    lam2 = mpf("0.7")
    xl2 = ClosedForm.from_term(1, -lam2)
    reference = abs(sokal_T(xl2, 2, 0, lam2, mpf(3)).value)
    assert abs(sokal_T(xl2, 2, 1, lam2, mpf(3)).value) <= reference * mpf("1e-70")


def test_sokal_weight_one_matches_widder_with_alternating_sign():
    ips = h_image()
    for k in range(0, 7):
        t = sokal_T(ips, 0, k, 1, mpf(2)).value
        w = eval_image(widder_image(ips, k), 2).value
        assert abs(t - (-1) ** k * w) <= abs(w) * mpf("1e-65")


def test_sokal_rejects_nonpositive_lambda():
    with pytest.raises(NonPositiveLambda):
        sokal_T(h_image(), 0, 1, 0, 1)


def test_check_conditions_h_passes():
    report = check_conditions(h_image(), 6, x_grid=(mpf("0.5"), mpf(1), mpf(2), mpf(10)))
    assert report.summary == "pass"


def test_check_conditions_counterexample_fails_condition_v():
    cf = parse_closed_form("1/(x+1)")
    report = check_conditions(cf, 1)
    v_fails = [
        e for e in report.entries
        if e.condition == "thm1.1.v" and e.k == 1 and e.verdict == "fail"
    ]
    assert len(v_fails) == 16
    assert all(e.value > 0 for e in v_fails)
    assert report.summary == "fail"


def test_check_conditions_zero_series_passes_exact_zero_rule():
    report = check_conditions(laplace_coeffs(new_am_series([0])), 3)
    assert report.summary == "pass"
    assert all(e.value == 0 for e in report.entries)


def test_report_serialization_deterministic():
    report = check_conditions(h_image(), 1, x_grid=(mpf(1), mpf(2)), depth=1)
    assert report.to_json() == report.to_json()
    csv_text = report.to_csv()
    assert csv_text.splitlines()[0] == "condition,k,m,x,value,bound,verdict"
    assert csv_text.splitlines()[-1].endswith("pass")


def test_widder_identity_trivial_for_one_over_x():
    one_over_x = InvPowerSeries((mpf(1),), mpf(0), None)
    left, right = widder_identity_check(one_over_x, 2, mpf("1.3"))
    assert left.value == 0
    assert right.value == 0


def test_widder_identity_h_and_random():
    for ips in (h_image(), laplace_coeffs(seeded_series(5, 1)[0])):
        for k in (1, 2, 3, 5):
            for x in (mpf("0.7"), mpf(1), mpf(4)):
                left, right = widder_identity_check(ips, k, x)
                denom = max(abs(left.value), abs(right.value), mpf("1e-200"))
                assert abs(left.value - right.value) / denom < mpf("1e-70")


def test_decay_check_h_and_closed_form_match():
    report = decay_check(h_image(), 1)
    assert report.summary == "pass"
    # spot value against the closed form -(x^-1 + x^-2) e^(1/x)
    k1 = [e for e in report.entries if e.k == 1]
    x = k1[0].x
    want = (1 / x + 1 / x ** 2) * mpmath.exp(1 / x)
    assert abs(k1[0].value - want) <= abs(want) * mpf("1e-60")


def test_decay_check_constant_source():
    one_over_x = InvPowerSeries((mpf(1),), mpf(0), None)
    assert decay_check(one_over_x, 0).summary == "pass"


def test_corollary_table_small_cases():
    assert corollary_coeffs(3, 0).rows == ((1,),)
    table = corollary_coeffs(3, 1)
    assert table.rows[1] == (2, 1)
    full = corollary_coeffs(5, 4)
    for row in full.rows:
        assert all(a >= 0 for a in row)
    with pytest.raises(IndexOutOfRange):
        corollary_coeffs(3, 3)


def test_corollary_identity_h():
    ips = h_image()
    left, right = corollary_identity_check(ips, 2, 3, mpf(1))
    denom = max(abs(left.value), abs(right.value))
    assert abs(left.value - right.value) / denom < mpf("1e-70")


def test_corollary_identity_trivial():
    one_over_x = InvPowerSeries((mpf(1),), mpf(0), None)
    left, right = corollary_identity_check(one_over_x, 1, 2, mpf(2))
    assert abs(left.value - right.value) <= mpf("1e-70")


def test_cm_order_detect_cases():
    # x^3 f = 2 constant: passes, with vanishing leading coefficients
    v = cm_order_detect(InvPowerSeries((mpf(0), mpf(0), mpf(2)), mpf(0), None), 3)
    assert v.passed and v.leading_coeffs_zero
    v2 = cm_order_detect(h_image(), 2)
    assert not v2.passed
    v3 = cm_order_detect(InvPowerSeries((mpf(0), mpf(1)), mpf(0), None), 2)
    assert v3.passed


def test_detect_polynomial_cases():
    det = detect_polynomial(InvPowerSeries((mpf(1), mpf(0), mpf(3)), mpf(0), None))
    assert det.order == 3 and det.leading == 3
    det_h = detect_polynomial(h_image())
    assert det_h.order is None
    assert det_h.evidence[0][1] < det_h.evidence[-1][1]
    det_c = detect_polynomial(InvPowerSeries((mpf(5),), mpf(0), None))
    assert det_c.order == 1 and det_c.leading == 5
