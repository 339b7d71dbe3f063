"""Grid realizations of representing measures and their recursion chain.

A measure here is an atom at the origin plus a density sampled on a
fixed grid [0, T].  For a series source p the j-th chain measure has
cumulative function

    sigma_j([0, t]) = t^j p^(j)(t),

so sigma_0 carries the atom p(0) with density p'(t), and for j >= 1 the
density is j t^(j-1) p^(j)(t) + t^j p^(j+1)(t).  One recursion step

    new density(t) = t * density(t) - (k-1) * cumulative(t)

maps sigma_{k-1} to a measure whose density is exactly t^k p^(k)(t);
positivity of every chain measure is the grid-scale witness that the
operator images of the transform stay completely monotonic, and

    atom + int_0^T e^(-x t) density(t) dt

reproduces the k-th operator value of the transform (up to grid
truncation, which is flagged).

Series-backed construction stores the cumulative function exactly, so
chain identities hold nodewise to rounding; derived and hand-built
measures fall back to trapezoidal accumulation, whose O(M^-2) error is
what the grid-scale tolerances account for.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .am_series import AMSeries, derivative_series, eval_phi
from .errors import OrderExceedsTruncation
from .precision import GUARD_BITS, rounding_term, to_mpf

DEFAULT_GRID_T = mpf(40)
DEFAULT_GRID_M = 2048

_grid_cache: dict = {}


def default_measure_grid(t_max=DEFAULT_GRID_T, nodes: int = DEFAULT_GRID_M) -> tuple:
    """Hybrid grid on [0, T]: t=0, a geometric block resolving (0, 1],
    then a uniform block up to T."""
    t_max = to_mpf(t_max)
    nodes = int(nodes)
    key = (str(t_max), nodes, mp.prec)
    if key in _grid_cache:
        return _grid_cache[key]
    if nodes < 16:
        raise ValueError("grid needs at least 16 nodes")
    geo_count = nodes // 4
    lin_count = nodes - 1 - geo_count
    t_min = t_max * mpf("1e-6")
    ratio = (1 / t_min) ** (mpf(1) / (geo_count - 1))
    grid = [mpf(0)]
    value = t_min
    for _ in range(geo_count):
        grid.append(value)
        value *= ratio
    # the geometric block ends at 1 (up to rounding); pin it and go linear
    grid[geo_count] = mpf(1)
    step = (t_max - 1) / lin_count
    for i in range(1, lin_count + 1):
        grid.append(1 + step * i)
    grid[-1] = t_max
    out = tuple(grid)
    _grid_cache[key] = out
    return out


@dataclass(frozen=True)
class GridMeasure:
    atom0: mpf
    grid: tuple
    density: tuple
    cdf: tuple
    cdf_exact: bool

    @property
    def node_count(self) -> int:
        return len(self.grid)


def _trapezoid_cdf(atom0, grid, density) -> tuple:
    acc = atom0
    out = [acc]
    for i in range(1, len(grid)):
        acc += (grid[i] - grid[i - 1]) * (density[i] + density[i - 1]) / 2
        out.append(acc)
    return tuple(out)


def grid_measure(atom0, grid, density, cdf=None) -> GridMeasure:
    """Assemble a measure; validates the grid and computes the cumulative
    function by trapezoidal accumulation when no exact one is supplied."""
    atom0 = to_mpf(atom0)
    if atom0 < 0:
        raise ValueError("atom at 0 must be nonnegative")
    grid = tuple(to_mpf(t) for t in grid)
    density = tuple(to_mpf(d) for d in density)
    if len(grid) != len(density):
        raise ValueError("grid and density lengths differ")
    if len(grid) < 2 or grid[0] != 0:
        raise ValueError("grid must start at t = 0 with at least two nodes")
    if any(grid[i + 1] <= grid[i] for i in range(len(grid) - 1)):
        raise ValueError("grid must be strictly increasing")
    if cdf is not None:
        cdf = tuple(to_mpf(c) for c in cdf)
        if len(cdf) != len(grid):
            raise ValueError("cdf length differs from grid")
        return GridMeasure(atom0, grid, density, cdf, True)
    return GridMeasure(atom0, grid, density, _trapezoid_cdf(atom0, grid, density), False)


def sigma_j(s: AMSeries, j: int, grid=None) -> GridMeasure:
    """Chain measure with cumulative function t^j p^(j)(t).

    j = 0 carries the atom p(0); higher j are atomless.  Density and
    cumulative values are sampled exactly from the series.
    """
    j = int(j)
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j > s.truncation_order - 1:
        raise OrderExceedsTruncation(
            f"chain order {j} needs derivative {j + 1} beyond truncation"
        )
    grid = tuple(to_mpf(t) for t in (grid or default_measure_grid()))
    dj = derivative_series(s, j)
    dj1 = derivative_series(s, j + 1)
    density = []
    cdf = []
    with mp.extraprec(GUARD_BITS):
        for t in grid:
            pj = eval_phi(dj, t).value
            pj1 = eval_phi(dj1, t).value
            if j == 0:
                density.append(+pj1)
                cdf.append(+pj)
            else:
                density.append(+(j * t ** (j - 1) * pj + t ** j * pj1))
                cdf.append(+(t ** j * pj))
    atom0 = s.coeffs[0] if j == 0 else mpf(0)
    return GridMeasure(atom0, grid, tuple(density), tuple(cdf), True)


def mu_step(mu_prev: GridMeasure, k: int) -> GridMeasure:
    """One chain step: density_new(t) = t * density(t) - (k-1) * cdf(t).

    The factor t annihilates any atom at the origin, so the result is
    atomless; positivity is a separate verdict.
    """
    k = int(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    density = tuple(
        t * d - (k - 1) * c
        for t, d, c in zip(mu_prev.grid, mu_prev.density, mu_prev.cdf)
    )
    return GridMeasure(
        mpf(0),
        mu_prev.grid,
        density,
        _trapezoid_cdf(mpf(0), mu_prev.grid, density),
        False,
    )


@dataclass(frozen=True)
class PositivityVerdict:
    passed: bool
    atom0: mpf
    min_density: mpf
    scale: mpf
    tol: mpf


def positivity_check(m: GridMeasure, tol=mpf("1e-30")) -> PositivityVerdict:
    """Pass iff atom0 >= -tol and min density >= -tol * scale."""
    tol = to_mpf(tol)
    min_density = min(m.density)
    scale = max([abs(d) for d in m.density] + [mpf(1)])
    passed = m.atom0 >= -tol and min_density >= -tol * scale
    return PositivityVerdict(passed, m.atom0, min_density, scale, tol)


@dataclass(frozen=True)
class MeasureTransform:
    value: mpf
    abs_error_bound: mpf
    grid_truncated: bool


def _quadratic_pair_integral(t0, t1, t2, y0, y1, y2):
    """Integral over [t0, t2] of the parabola through three samples,
    valid for non-uniform spacing, plus a trapezoid value for the
    embedded error estimate."""
    def basis_integral(p, q, r):
        # int_{t0}^{t2} (t-p)(t-q) dt / ((r-p)(r-q))
        def primitive(t):
            return t ** 3 / 3 - (p + q) * t ** 2 / 2 + p * q * t

        return (primitive(t2) - primitive(t0)) / ((r - p) * (r - q))

    quad = (
        y0 * basis_integral(t1, t2, t0)
        + y1 * basis_integral(t0, t2, t1)
        + y2 * basis_integral(t0, t1, t2)
    )
    trap = (t1 - t0) * (y0 + y1) / 2 + (t2 - t1) * (y1 + y2) / 2
    return quad, abs(quad - trap)


def laplace_of_measure(m: GridMeasure, x) -> MeasureTransform:
    """atom0 + int_0^T e^(-x t) density(t) dt from the samples.

    Piecewise-quadratic panels over node triples with the
    quadratic-vs-trapezoid difference as the panel error bound.  The
    grid-truncated flag records that mass beyond T is not covered.
    """
    x = to_mpf(x)
    if x <= 0:
        raise ValueError("x must be positive")
    grid = m.grid
    with mp.extraprec(GUARD_BITS):
        samples = [mpmath.exp(-x * t) * d for t, d in zip(grid, m.density)]
        total = mpf(0)
        err = mpf(0)
        i = 0
        while i + 2 < len(grid):
            q, e = _quadratic_pair_integral(
                grid[i], grid[i + 1], grid[i + 2],
                samples[i], samples[i + 1], samples[i + 2],
            )
            total += q
            err += e
            i += 2
        if i + 1 < len(grid):  # odd leftover interval: trapezoid
            total += (grid[i + 1] - grid[i]) * (samples[i] + samples[i + 1]) / 2
            err += abs(grid[i + 1] - grid[i]) * abs(samples[i + 1] - samples[i])
        value = +(m.atom0 + total)
        err = +err
    truncated = m.density[-1] != 0
    return MeasureTransform(
        value, err + rounding_term(value, len(grid)), truncated
    )


# ---------------------------------------------------------------------------
# Serialization: CSV with columns t, density, cdf; JSON for hand-built input
# ---------------------------------------------------------------------------

def measure_to_csv(m: GridMeasure) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t", "density", "cdf"])
    for t, d, c in zip(m.grid, m.density, m.cdf):
        writer.writerow([mpmath.nstr(t, 30), mpmath.nstr(d, 30), mpmath.nstr(c, 30)])
    return out.getvalue()


def measure_to_json(m: GridMeasure) -> str:
    obj = {
        "atom0": mpmath.nstr(m.atom0, mp.dps + 8),
        "grid": [mpmath.nstr(t, mp.dps + 8) for t in m.grid],
        "density": [mpmath.nstr(d, mp.dps + 8) for d in m.density],
    }
    return json.dumps(obj, sort_keys=True)


def measure_from_json(text_or_obj) -> GridMeasure:
    obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
    return grid_measure(obj.get("atom0", 0), obj["grid"], obj["density"])
