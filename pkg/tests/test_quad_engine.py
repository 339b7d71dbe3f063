import mpmath
import pytest
from mpmath import mpf

from amlaplace import (
    eval_image,
    exp_series,
    h_series,
    laplace_coeffs,
    laplace_numeric,
    laplace_weighted_numeric,
    new_am_series,
    weight_gamma,
)
from amlaplace.errors import CertificateInsufficient, NonPositiveLambda, ToleranceUnreachable
from amlaplace.quad_engine import _gauss_legendre, adaptive_integrate
from amlaplace.sampling import seeded_series

TOL = mpf("1e-25")


def test_gauss_legendre_integrates_polynomials_exactly():
    nodes, weights = _gauss_legendre(16)
    assert len(nodes) == 16
    # degree 31 is integrated exactly: int_-1^1 x^30 = 2/31
    got = sum(w * x ** 30 for x, w in zip(nodes, weights))
    assert abs(got - mpf(2) / 31) < mpf("1e-70")
    got_odd = sum(w * x ** 31 for x, w in zip(nodes, weights))
    assert abs(got_odd) < mpf("1e-70")


def test_adaptive_integrate_known_integral():
    value, err = adaptive_integrate(lambda t: mpmath.exp(-t), 0, 50, mpf("1e-30"))
    want = 1 - mpmath.exp(-50)
    assert abs(value - want) <= err + mpf("1e-35")
    assert err < mpf("1e-29")


def test_laplace_numeric_h_is_e():
    r = laplace_numeric(h_series(), 1, TOL)
    assert abs(r.value - mpmath.e) <= r.abs_error_bound
    assert abs(r.value - mpmath.e) < mpf("1e-30")


def test_laplace_numeric_zero_series():
    assert laplace_numeric(new_am_series([0]), 3, TOL).value == 0


def test_laplace_numeric_monomial():
    # source t: transform 1/x^2, so 1/4 at x = 2
    s = new_am_series([0, 1] + [0] * 15)
    r = laplace_numeric(s, 2, TOL)
    assert abs(r.value - mpf("0.25")) <= r.abs_error_bound


def test_laplace_numeric_rejects_uncertified():
    with pytest.raises(CertificateInsufficient):
        laplace_numeric(exp_series(), 3, TOL)


def test_laplace_numeric_rejects_absurd_tolerance():
    with pytest.raises(ToleranceUnreachable):
        laplace_numeric(h_series(), 1, mpf("1e-100"))


def test_laplace_numeric_nonnegative_and_additive():
    a = seeded_series(21, 1)[0]
    b = h_series()
    ab = new_am_series([x + y for x, y in zip(a.coeffs, b.coeffs)])
    x = mpf("1.5")
    ra, rb, rab = (laplace_numeric(s, x, TOL) for s in (a, b, ab))
    assert ra.value >= 0 and rb.value >= 0
    assert abs(rab.value - (ra.value + rb.value)) <= (
        ra.abs_error_bound + rb.abs_error_bound + rab.abs_error_bound
    )


def test_weighted_lambda_one_equals_plain():
    s = h_series()
    x = mpf(2)
    plain = laplace_numeric(s, x, TOL)
    weighted = laplace_weighted_numeric(s, 1, x, TOL)
    assert abs(plain.value - weighted.value) <= (
        plain.abs_error_bound + weighted.abs_error_bound
    )


def test_weighted_gamma_integral():
    # source 1, lam = 1/2: Gamma(1/2) / x^(1/2) = sqrt(pi)/2 at x = 4
    r = laplace_weighted_numeric(new_am_series([1] + [0] * 16), mpf("0.5"), 4, TOL)
    want = mpmath.sqrt(mpmath.pi) / 2
    assert abs(r.value - want) <= r.abs_error_bound
    assert abs(r.value - want) < mpf("1e-24")


def test_weighted_rejects_nonpositive_lambda():
    with pytest.raises(NonPositiveLambda):
        laplace_weighted_numeric(h_series(), 0, 1, TOL)


def test_weighted_consistency_with_reweighted_series():
    # the weighted transform equals x^(1-lam) times the image of the
    # gamma-reweighted series
    s = h_series()
    for lam in (mpf("0.5"), mpf("1.5"), mpf(2)):
        for x in (mpf(1), mpf(3)):
            direct = laplace_weighted_numeric(s, lam, x, TOL)
            psi = weight_gamma(s, lam)
            via_series = x ** (1 - lam) * eval_image(laplace_coeffs(psi), x).value
            assert abs(direct.value - via_series) <= direct.abs_error_bound + mpf("1e-40")


def test_quadrature_agrees_with_image_for_random_series():
    for s in seeded_series(9, 3):
        ips = laplace_coeffs(s)
        for x in (mpf("0.5"), mpf(4)):
            numeric = laplace_numeric(s, x, TOL)
            image = eval_image(ips, x)
            assert abs(numeric.value - image.value) <= (
                numeric.abs_error_bound + image.abs_error_bound
            )
