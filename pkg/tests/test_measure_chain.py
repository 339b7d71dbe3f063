import mpmath
import pytest
from mpmath import mpf

from amlaplace import (
    default_measure_grid,
    derivative_series,
    eval_image,
    eval_phi,
    exp_series,
    grid_measure,
    h_series,
    laplace_coeffs,
    laplace_of_measure,
    measure_from_json,
    measure_to_csv,
    measure_to_json,
    mu_step,
    new_am_series,
    positivity_check,
    sigma_j,
    widder_image,
)
from amlaplace.errors import OrderExceedsTruncation

GRID = default_measure_grid(40, 256)  # coarse grid keeps unit tests fast


def test_default_grid_shape():
    g = default_measure_grid()
    assert len(g) == 2048
    assert g[0] == 0 and g[-1] == 40
    assert all(g[i + 1] > g[i] for i in range(len(g) - 1))


def test_sigma_0_exp():
    p = exp_series()
    s0 = sigma_j(p, 0, GRID)
    assert s0.atom0 == 1
    # compare against the true exponential where the 65-term truncation
    # is far below the comparison tolerance (t <= 2)
    for i in (1, 50, 68):
        t = GRID[i]
        assert t <= 2
        assert abs(s0.density[i] - mpmath.exp(t)) <= mpmath.exp(t) * mpf("1e-60")
        assert abs(s0.cdf[i] - mpmath.exp(t)) <= mpmath.exp(t) * mpf("1e-60")


def test_sigma_1_polynomial():
    p = new_am_series([0, 0, 1])  # t^2
    s1 = sigma_j(p, 1, GRID)
    assert s1.atom0 == 0
    for i in (1, 100):
        t = GRID[i]
        assert abs(s1.cdf[i] - 2 * t ** 2) <= abs(2 * t ** 2) * mpf("1e-70") + mpf("1e-70")
        assert abs(s1.density[i] - 4 * t) <= abs(4 * t) * mpf("1e-70") + mpf("1e-70")


def test_sigma_0_h_has_unit_atom():
    s0 = sigma_j(h_series(), 0, GRID)
    assert s0.atom0 == 1


def test_sigma_rejects_excessive_order():
    with pytest.raises(OrderExceedsTruncation):
        sigma_j(h_series(5), 5, GRID)


def test_mu_step_exp_densities():
    p = exp_series()
    s1 = sigma_j(p, 1, GRID)
    m2 = mu_step(s1, 2)
    # small t: the truncated source matches e^t far below tolerance
    for i in (1, 64, 68):
        t = GRID[i]
        want = t ** 2 * mpmath.exp(t)
        assert abs(m2.density[i] - want) <= abs(want) * mpf("1e-60")
    # all t: the stepped density equals t^2 p''(t) for the stored series
    oracle = derivative_series(p, 2)
    for i in (100, 200, 255):
        t = GRID[i]
        want = t ** 2 * eval_phi(oracle, t).value
        assert abs(m2.density[i] - want) <= abs(want) * mpf("1e-60")
    s0 = sigma_j(p, 0, GRID)
    m1 = mu_step(s0, 1)
    assert m1.atom0 == 0
    for i in (1, 64):
        t = GRID[i]
        want = t * mpmath.exp(t)
        assert abs(m1.density[i] - want) <= abs(want) * mpf("1e-60")


def test_mu_step_constant_source_collapses():
    p = new_am_series([1] + [0] * 8)
    s0 = sigma_j(p, 0, GRID)
    m1 = mu_step(s0, 1)
    assert all(d == 0 for d in m1.density)


def test_chain_identity_nodewise():
    for p in (exp_series(), h_series()):
        for j in (0, 1, 3):
            stepped = mu_step(sigma_j(p, j, GRID), j + 1)
            oracle = derivative_series(p, j + 1)
            for i in (0, 1, 80, 255):
                t = GRID[i]
                want = t ** (j + 1) * eval_phi(oracle, t).value
                if want == 0:
                    assert stepped.density[i] == 0
                else:
                    assert abs(stepped.density[i] - want) <= abs(want) * mpf("1e-30")


def test_positivity_check():
    s1 = sigma_j(h_series(), 1, GRID)
    assert positivity_check(s1).passed
    assert positivity_check(mu_step(s1, 2)).passed
    bad = grid_measure(0, (0, 1, 2, 3, 4), (0, 1, 2, -1, 3))
    assert not positivity_check(bad).passed


def test_laplace_of_measure_atom_only():
    p = new_am_series([1] + [0] * 8)
    s0 = sigma_j(p, 0, GRID)
    r = laplace_of_measure(s0, 2)
    assert abs(r.value - 1) <= r.abs_error_bound + mpf("1e-70")


def test_laplace_of_measure_zero():
    zero = grid_measure(0, (0, 1, 2), (0, 0, 0))
    r = laplace_of_measure(zero, 3)
    assert r.value == 0
    assert not r.grid_truncated


def test_laplace_of_measure_matches_operator_path():
    p = exp_series()
    fine = default_measure_grid(40, 2048)
    m2 = mu_step(sigma_j(p, 1, fine), 2)
    got = laplace_of_measure(m2, 3)
    want = eval_image(widder_image(laplace_coeffs(p), 2), 3).value
    assert abs(got.value - want) < mpf("1e-6")
    assert got.grid_truncated


def test_measure_serialization_round_trip():
    m = sigma_j(h_series(10), 1, default_measure_grid(10, 32))
    text = measure_to_json(m)
    back = measure_from_json(text)
    assert back.atom0 == m.atom0
    assert len(back.grid) == len(m.grid)
    csv_text = measure_to_csv(m)
    assert csv_text.splitlines()[0] == "t,density,cdf"
    assert len(csv_text.splitlines()) == len(m.grid) + 1


def test_grid_measure_validation():
    with pytest.raises(ValueError):
        grid_measure(-1, (0, 1), (0, 0))
    with pytest.raises(ValueError):
        grid_measure(0, (0, 1, 1), (0, 0, 0))
    with pytest.raises(ValueError):
        grid_measure(0, (1, 2), (0, 0))
