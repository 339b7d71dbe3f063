"""Working-precision control.

All arithmetic runs on mpmath's global context.  The package default is a
256-bit significand; every documented tolerance assumes that default.
Evaluation routines add a few guard bits internally and round once on
return, so ulp-level assertions stay meaningful at the working precision.
"""

from __future__ import annotations

import contextlib
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

DEFAULT_PRECISION_BITS = 256

# Extra bits used inside summation loops before the final rounding.
GUARD_BITS = 32


def use_bits(bits: int) -> None:
    """Set the working significand size in bits (minimum 64)."""
    bits = int(bits)
    if bits < 64:
        raise ValueError("working precision below 64 bits is not supported")
    mp.prec = bits


def current_bits() -> int:
    return mp.prec


@contextlib.contextmanager
def working_precision(bits: int):
    """Temporarily switch the working precision."""
    old = mp.prec
    use_bits(bits)
    try:
        yield
    finally:
        mp.prec = old


def machine_eps() -> mpf:
    return mpf(2) ** (1 - mp.prec)


def ulp(value) -> mpf:
    """Unit in the last place of `value` at the working precision."""
    v = mpf(value)
    if v == 0:
        return mpf(2) ** (-mp.prec)
    return mpf(2) ** (mpmath.mag(v) - mp.prec)


def rounding_term(abs_scale, op_count: int) -> mpf:
    """Crude bound on accumulated rounding for `op_count` operations
    on quantities of magnitude `abs_scale`."""
    if abs_scale == 0:
        return mpf(0)
    return mpf(abs_scale) * machine_eps() * 4 * max(int(op_count), 1)


def fraction_to_mpf(fr: Fraction) -> mpf:
    """Round an exact rational to the working precision (one division)."""
    return mpf(fr.numerator) / mpf(fr.denominator)


def to_mpf(value) -> mpf:
    """Convert int/float/str/Fraction/mpf to mpf.

    Strings are treated as decimal literals, which is the preferred wire
    format: a decimal string rounds exactly once at the working precision.
    """
    if isinstance(value, Fraction):
        return fraction_to_mpf(value)
    if isinstance(value, str):
        return mpf(value)
    return mpf(value)
