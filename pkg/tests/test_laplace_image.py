import math

import mpmath
import pytest
from mpmath import mpf

from amlaplace import (
    InvPowerSeries,
    eval_image,
    exp_series,
    h_series,
    image_from_json,
    image_to_json,
    laplace_coeffs,
    new_am_series,
    split_remainder,
)
from amlaplace.errors import DivergentAt, OffsetNotZero, OrderExceedsTruncation

# sum (2)_n / ((1)_n (1)_n) 3^-(n+1), brute-force summation at 90 dps
SUM_2F2_AT_3 = mpf(
    "0.62027218892715090161250014204559415004351400675529199227445187"
)


def test_laplace_coeffs_of_h_are_inverse_factorials():
    ips = laplace_coeffs(h_series())
    assert ips.offset == 0
    for n in (0, 1, 3, 10, 64):
        want = mpf(1) / math.factorial(n)
        assert abs(ips.coeffs[n] - want) <= abs(want) * mpf("1e-70")
    assert all(c >= 0 for c in ips.coeffs)


def test_laplace_coeffs_definition_exact():
    s = new_am_series(["0.5", "0.25", "0.125"])
    ips = laplace_coeffs(s)
    for n, a in enumerate(s.coeffs):
        assert ips.coeffs[n] == a * mpmath.factorial(n)


def test_eval_image_h_at_one_is_e():
    ips = laplace_coeffs(h_series())
    r = eval_image(ips, 1)
    assert abs(r.value - mpmath.e) < mpf("1e-73")
    assert abs(r.value - mpmath.e) <= r.abs_error_bound


def test_eval_image_constant_source():
    ips = laplace_coeffs(new_am_series([1]))
    assert eval_image(ips, 2).value == mpf("0.5")


def test_eval_image_2f2_matches_brute_force():
    # coefficients (2)_n / ((1)_n (1)_n) come from a_n = (2)_n/((1)_n (1)_n n!)
    coeffs = []
    poch2 = 1
    for n in range(65):
        if n > 0:
            poch2 *= n + 1
        coeffs.append(mpf(poch2) / (mpf(math.factorial(n)) ** 2 * math.factorial(n)))
    s = new_am_series(coeffs)
    r = eval_image(laplace_coeffs(s), 3)
    assert abs(r.value - SUM_2F2_AT_3) < mpf("1e-58")


def test_eval_image_offset_direct():
    ips = InvPowerSeries((mpf(1),), mpf("0.5"), None)
    r = eval_image(ips, 4)
    assert abs(r.value - mpf(4) ** mpf("-1.5")) <= mpf("1e-75")


def test_eval_image_requires_positive_x():
    with pytest.raises(ValueError):
        eval_image(laplace_coeffs(h_series()), 0)


def test_divergence_detection_on_exp_image():
    ips = laplace_coeffs(exp_series())
    with pytest.raises(DivergentAt):
        eval_image(ips, 1)
    # just above the growth rate the terms decay and the sum is geometric
    r = eval_image(ips, 2)
    assert abs(r.value - 1) < mpf("1e-19")
    assert r.abs_error_bound == mpf("inf")


def test_split_remainder_h_shifts_indices():
    ips = laplace_coeffs(h_series())
    head, tail = split_remainder(ips, 1)
    assert head == (ips.coeffs[0],)
    assert tail.coeffs == ips.coeffs[1:]
    assert all(c >= 0 for c in tail.coeffs)


def test_split_remainder_trivial_cases():
    head, tail = split_remainder(InvPowerSeries((mpf(1),), mpf(0), None), 1)
    assert head == (mpf(1),)
    assert tail.coeffs == ()
    head2, tail2 = split_remainder(InvPowerSeries((mpf(1), mpf(2)), mpf(0), None), 2)
    assert head2 == (mpf(1), mpf(2))
    assert tail2.coeffs == ()


def test_split_remainder_reconstruction():
    ips = laplace_coeffs(h_series())
    for n in (1, 3, 7):
        head, tail = split_remainder(ips, n)
        for x in (mpf("0.5"), mpf(2)):
            full = eval_image(ips, x).value
            recon = sum(h * x ** (-k) for k, h in enumerate(head, start=1))
            recon += x ** (-n) * eval_image(tail, x).value
            assert abs(full - recon) <= abs(full) * mpf("1e-70")


def test_split_remainder_errors():
    ips = laplace_coeffs(h_series(5))
    with pytest.raises(OrderExceedsTruncation):
        split_remainder(ips, 10)
    shifted = InvPowerSeries(ips.coeffs, mpf(1), None)
    with pytest.raises(OffsetNotZero):
        split_remainder(shifted, 1)


def test_certified_source_never_flags_divergence_on_grid():
    ips = laplace_coeffs(h_series())
    for e in range(-4, 12):
        eval_image(ips, mpf(2) ** e)  # must not raise


def test_image_json_round_trip():
    ips = laplace_coeffs(h_series(10))
    back = image_from_json(image_to_json(ips))
    assert back.offset == 0
    for a, b in zip(ips.coeffs, back.coeffs):
        assert abs(a - b) <= abs(a) * mpf("1e-40") + mpf("1e-70")
    with pytest.raises(ValueError):
        image_from_json('{"coeffs": ["1"], "offset": "-1"}')
