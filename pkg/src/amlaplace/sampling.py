"""Deterministic generation of certified random series for self-tests."""

from __future__ import annotations

import random
from fractions import Fraction

from mpmath import mpf

from .am_series import AMSeries, new_am_series


def random_certified_series(rng: random.Random, n_terms: int = 65) -> AMSeries:
    """Random coefficients u_n * s^n / (n!)^2 with u_n in [0.75, 1].

    The (n!)^-2 envelope forces the normalized roots down like 1/n while
    the bounded jitter keeps the trailing trend monotone, so the result
    always certifies.
    """
    scale = mpf(1) / 2 + mpf(3) / 2 * mpf(rng.random())
    fact_sq = Fraction(1)
    coeffs = []
    for n in range(n_terms):
        if n > 0:
            fact_sq /= n * n
        jitter = (mpf(3) + mpf(rng.random())) / 4
        coeffs.append(jitter * scale ** n * mpf(fact_sq.numerator) / fact_sq.denominator)
    series = new_am_series(coeffs)
    if not series.is_certified:
        raise AssertionError("random series generator produced an uncertified series")
    return series


def seeded_series(seed: int, count: int, n_terms: int = 65) -> tuple:
    rng = random.Random(int(seed))
    return tuple(random_certified_series(rng, n_terms) for _ in range(count))
