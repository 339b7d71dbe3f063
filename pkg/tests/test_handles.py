import mpmath
import pytest
from mpmath import mpf

from amlaplace import SeriesHandle, h_series, laplace_coeffs, parse_closed_form
from amlaplace.errors import SpecParseError
from amlaplace.handles import ClosedForm


def test_parse_simple_pole():
    cf = parse_closed_form("1/(x+1)")
    v, b, _ = cf.eval_at(1)
    assert v == mpf("0.5")
    assert b < mpf("1e-70")


def test_parse_h_closed_form():
    cf = parse_closed_form("e^(1/x)/x")
    v, _, _ = cf.eval_at(1)
    assert abs(v - mpmath.e) < mpf("1e-74")
    v2, _, _ = cf.eval_at(2)
    assert abs(v2 - mpmath.exp(mpf("0.5")) / 2) < mpf("1e-74")


def test_parse_various_forms():
    assert abs(parse_closed_form("2/x^3").eval_at(2)[0] - mpf("0.25")) < mpf("1e-75")
    assert abs(parse_closed_form("x^-2").eval_at(4)[0] - mpf("0.0625")) == 0
    got = parse_closed_form("3*x^0.5*e^(-2/x)").eval_at(2)[0]
    want = 3 * mpmath.sqrt(2) * mpmath.exp(-1)
    assert abs(got - want) < mpf("1e-74")
    combo = parse_closed_form("1/x + 1/(x+1)^2 - 0.5/x^2")
    want = mpf(1) / 3 + mpf(1) / 16 - mpf("0.5") / 9
    assert abs(combo.eval_at(3)[0] - want) < mpf("1e-74")


def test_parse_errors_carry_position():
    with pytest.raises(SpecParseError):
        parse_closed_form("1/(y+1)")
    with pytest.raises(SpecParseError):
        parse_closed_form("x^2 +")
    with pytest.raises(SpecParseError):
        parse_closed_form("e^(1/x")


def test_closed_form_derivative_against_numeric():
    cf = parse_closed_form("e^(1/x)/x")
    d = cf.diff()
    x = mpf(2)
    got = d.eval_at(x)[0]
    want = mpmath.diff(lambda t: mpmath.exp(1 / t) / t, x)
    assert abs(got - want) < mpf("1e-50")


def test_closed_form_high_order_derivative_pole():
    cf = parse_closed_form("1/(x+1)")
    d5 = cf.diff(5)
    x = mpf(1)
    want = -mpf(120) / mpf(2) ** 6  # (-1)^5 5! (x+1)^-6
    assert abs(d5.eval_at(x)[0] - want) < mpf("1e-70")


def test_closed_form_xmul_and_scale():
    cf = parse_closed_form("1/(x+1)")
    g = cf.xmul(2).scaled(-3)
    x = mpf(3)
    assert abs(g.eval_at(x)[0] - (-3 * 9 / mpf(4))) < mpf("1e-70")


def test_term_merging_keeps_forms_small():
    cf = parse_closed_form("e^(1/x)/x")
    d = cf
    for _ in range(10):
        d = d.diff()
    # derivatives of x^-1 e^(1/x) stay in the span of x^-1-j e^(1/x)
    assert len(d.terms) <= 12


def test_series_handle_calculus_matches_closed_form():
    ips = laplace_coeffs(h_series())
    sh = SeriesHandle(ips)
    cf = parse_closed_form("e^(1/x)/x")
    for ops in range(3):
        x = mpf("1.5")
        sv = sh.diff(ops).eval_at(x)[0]
        cv = cf.diff(ops).eval_at(x)[0]
        assert abs(sv - cv) <= abs(cv) * mpf("1e-60")


def test_from_term_normalizes_duplicate_poles():
    cf = ClosedForm.from_term(2, 0, 0, ((mpf(1), 1), (mpf(1), 2)))
    assert len(cf.terms) == 1
    assert cf.terms[0].poles == ((mpf(1), 3),)
