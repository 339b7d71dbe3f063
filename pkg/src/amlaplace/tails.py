"""Rigorous tail majorants for truncated series.

A certified series carries a model |c_n| <= K * (n+1)^d * rho^n for all
indices beyond the stored truncation.  Every coefficient-level operation
in the library maps this family into itself (widening K and d), so each
evaluation can convert the model into a concrete tail bound:

    geometric form:    sum_{n>=n0} K (n+1)^d (rho/x)^n
    exponential form:  sum_{n>=n0} K (n+1)^d (rho t)^n / n!

Both are summed term by term until the term ratio drops below 1/2, after
which the remainder is enclosed by a geometric series.  The ratio bounds
used are nonincreasing in n, which makes the enclosure sound.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf


@dataclass(frozen=True)
class TailModel:
    """Majorant |c_n| <= scale * (n+1)^degree * ratio^n beyond truncation."""

    scale: mpf
    ratio: mpf
    degree: int = 0

    def widened(self, scale_factor, extra_degree: int = 0) -> "TailModel":
        return TailModel(self.scale * mpf(scale_factor), self.ratio,
                         self.degree + int(extra_degree))


_MAX_TAIL_TERMS = 8192


def poly_geometric_tail(scale, q, degree: int, n_start: int) -> mpf:
    """Bound sum_{n >= n_start} scale * (n+1)^degree * q^n for q >= 0."""
    scale = mpf(scale)
    q = mpf(q)
    if scale == 0 or q == 0:
        return mpf(0)
    if q >= 1:
        return mpf("inf")
    n = int(n_start)
    term = scale * mpf(n + 1) ** degree * q ** n
    total = mpf(0)
    for _ in range(_MAX_TAIL_TERMS):
        # term(n+1)/term(n) = q * ((n+2)/(n+1))^degree, nonincreasing in n
        ratio = q * (mpf(n + 2) / (n + 1)) ** degree
        if ratio <= mpf("0.5"):
            return total + term / (1 - ratio)
        if ratio < 1 and term < total * machine_floor():
            return total + term / (1 - ratio)
        total += term
        term *= ratio
        n += 1
    return mpf("inf")


def poly_exponential_tail(scale, z, degree: int, n_start: int) -> mpf:
    """Bound sum_{n >= n_start} scale * (n+1)^degree * z^n / n! for z >= 0."""
    scale = mpf(scale)
    z = mpf(z)
    if scale == 0 or z == 0:
        return mpf(0)
    n = int(n_start)
    term = scale * mpf(n + 1) ** degree * z ** n / mpmath.factorial(n)
    total = mpf(0)
    for _ in range(_MAX_TAIL_TERMS):
        ratio = (mpf(n + 2) / (n + 1)) ** degree * z / (n + 1)
        if ratio <= mpf("0.5"):
            return total + term / (1 - ratio)
        total += term
        term *= ratio
        n += 1
    return mpf("inf")


def machine_floor() -> mpf:
    return mpf(2) ** (4 - mp.prec)
