"""Evaluable function handles with exact differentiation.

Two interchangeable backends feed the operator checks:

* `SeriesHandle` wraps an inverse-power series; differentiation and
  multiplication by powers of x act exactly on coefficients.
* `ClosedForm` is a small symbolic family closed under those operations:
  finite sums of terms  coef * x^p * e^(beta/x) * prod_i (x+c_i)^(m_i).
  It exists for reference functions and counterexamples (x^a, e^(b/x),
  1/(x+c) and their products), where high-order numeric differentiation
  would be unstable.

Closed forms can be parsed from a tiny expression grammar, e.g.
"e^(1/x)/x", "1/(x+1)", "2/x^3", "3*x^0.5*e^(-2/x)".
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .errors import DerivativeUnavailable, SpecParseError
from .laplace_image import (
    InvPowerSeries,
    _check_divergence,
    _eval_terms,
    ips_derivative,
    ips_scale,
    ips_xmul,
)
from .precision import GUARD_BITS, rounding_term, to_mpf


class FunctionHandle:
    """Minimal protocol: pointwise evaluation plus exact calculus."""

    def eval_at(self, x):
        """Return (value, abs_error_bound, abs_scale) at x > 0."""
        raise NotImplementedError

    def diff(self, m: int = 1) -> "FunctionHandle":
        raise DerivativeUnavailable(type(self).__name__)

    def xmul(self, power) -> "FunctionHandle":
        raise NotImplementedError

    def scaled(self, factor) -> "FunctionHandle":
        raise NotImplementedError


def as_handle(f) -> FunctionHandle:
    if isinstance(f, FunctionHandle):
        return f
    if isinstance(f, InvPowerSeries):
        return SeriesHandle(f)
    raise DerivativeUnavailable(
        f"cannot build a differentiable handle from {type(f).__name__}"
    )


@dataclass(frozen=True)
class SeriesHandle(FunctionHandle):
    series: InvPowerSeries

    def eval_at(self, x):
        _check_divergence(self.series, x)
        return _eval_terms(self.series, x)

    def diff(self, m: int = 1) -> "SeriesHandle":
        return SeriesHandle(ips_derivative(self.series, m))

    def xmul(self, power) -> "SeriesHandle":
        return SeriesHandle(ips_xmul(self.series, power))

    def scaled(self, factor) -> "SeriesHandle":
        return SeriesHandle(ips_scale(self.series, factor))


# ---------------------------------------------------------------------------
# Closed-form term algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Term:
    coef: mpf
    xpow: mpf               # exponent of x
    expcoef: mpf            # beta in e^(beta/x); 0 for none
    poles: tuple            # ((c, m), ...) for prod (x+c)^m, c != 0

    def key(self):
        return (self.xpow, self.expcoef, self.poles)


def _merge(terms) -> tuple:
    merged = {}
    for t in terms:
        k = t.key()
        if k in merged:
            merged[k] = _Term(merged[k].coef + t.coef, *k)
        else:
            merged[k] = t
    out = tuple(t for t in merged.values() if t.coef != 0)
    return tuple(sorted(out, key=lambda t: (t.xpow, t.expcoef, t.poles)))


@dataclass(frozen=True)
class ClosedForm(FunctionHandle):
    terms: tuple

    @staticmethod
    def from_term(coef=1, xpow=0, expcoef=0, poles=()) -> "ClosedForm":
        norm = {}
        for c, m in poles:
            c = to_mpf(c)
            norm[c] = norm.get(c, 0) + int(m)
        poles_t = tuple(sorted((c, m) for c, m in norm.items() if m != 0))
        return ClosedForm(
            _merge([_Term(to_mpf(coef), to_mpf(xpow), to_mpf(expcoef), poles_t)])
        )

    def eval_at(self, x):
        x = to_mpf(x)
        if x <= 0:
            raise ValueError("x must be positive")
        with mp.extraprec(GUARD_BITS):
            total = mpf(0)
            scale = mpf(0)
            for t in self.terms:
                v = t.coef * x ** t.xpow
                if t.expcoef != 0:
                    v *= mpmath.exp(t.expcoef / x)
                for c, m in t.poles:
                    v *= (x + c) ** m
                total += v
                scale += abs(v)
        value = +total
        scale = +scale
        return value, rounding_term(scale, 4 * max(len(self.terms), 1)), scale

    def diff(self, m: int = 1) -> "ClosedForm":
        cf = self
        for _ in range(int(m)):
            cf = cf._diff_once()
        return cf

    def _diff_once(self) -> "ClosedForm":
        out = []
        for t in self.terms:
            if t.xpow != 0:
                out.append(_Term(t.coef * t.xpow, t.xpow - 1, t.expcoef, t.poles))
            if t.expcoef != 0:
                out.append(_Term(-t.coef * t.expcoef, t.xpow - 2, t.expcoef, t.poles))
            for i, (c, mm) in enumerate(t.poles):
                rest = t.poles[:i] + ((c, mm - 1),) + t.poles[i + 1:]
                rest = tuple(p for p in rest if p[1] != 0)
                out.append(_Term(t.coef * mm, t.xpow, t.expcoef, rest))
        return ClosedForm(_merge(out))

    def xmul(self, power) -> "ClosedForm":
        p = to_mpf(power)
        return ClosedForm(
            _merge(_Term(t.coef, t.xpow + p, t.expcoef, t.poles) for t in self.terms)
        )

    def scaled(self, factor) -> "ClosedForm":
        f = to_mpf(factor)
        return ClosedForm(
            _merge(_Term(t.coef * f, t.xpow, t.expcoef, t.poles) for t in self.terms)
        )

    def plus(self, other: "ClosedForm") -> "ClosedForm":
        return ClosedForm(_merge(self.terms + other.terms))

    def times(self, other: "ClosedForm") -> "ClosedForm":
        out = []
        for a in self.terms:
            for b in other.terms:
                out.append(
                    _Term(
                        a.coef * b.coef,
                        a.xpow + b.xpow,
                        a.expcoef + b.expcoef,
                        _merge_poles(a.poles, b.poles),
                    )
                )
        return ClosedForm(_merge(out))

    def power_inverted(self) -> "ClosedForm":
        """1/term for single-term forms (used by the '/' parser rule)."""
        if len(self.terms) != 1:
            raise SpecParseError("division only supported by a single factor")
        t = self.terms[0]
        poles = tuple((c, -m) for c, m in t.poles)
        return ClosedForm(
            _merge([_Term(1 / t.coef, -t.xpow, -t.expcoef, poles)])
        )


def _merge_poles(p1, p2):
    acc = {}
    for c, m in p1 + p2:
        acc[c] = acc.get(c, 0) + m
    return tuple(sorted((c, m) for c, m in acc.items() if m != 0))


# ---------------------------------------------------------------------------
# Expression parser
#
#   expr   := term (('+'|'-') term)*
#   term   := ['-'] factor (('*'|'/') factor)*
#   factor := NUMBER | 'x' ['^' NUMBER] | 'e^(' NUMBER '/x' ')'
#           | '(x' ('+'|'-') NUMBER ')' ['^' NUMBER]
# ---------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"[+-]?\d+(\.\d+)?([eE][+-]?\d+)?")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message):
        raise SpecParseError(message, column=self.pos + 1)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, token):
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def number(self, signed=True):
        self.skip_ws()
        m = _NUMBER_RE.match(self.text, self.pos)
        if not m or (not signed and m.group(0)[0] in "+-"):
            self.error("expected a number")
        self.pos = m.end()
        return mpf(m.group(0))

    def parse(self) -> ClosedForm:
        cf = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("unexpected trailing input")
        return cf

    def expr(self) -> ClosedForm:
        cf = self.term()
        while True:
            if self.take("+"):
                cf = cf.plus(self.term())
            elif self.take("-"):
                cf = cf.plus(self.term().scaled(-1))
            else:
                return cf

    def term(self) -> ClosedForm:
        negate = self.take("-")
        cf = self.factor()
        while True:
            if self.take("*"):
                cf = cf.times(self.factor())
            elif self.take("/"):
                cf = cf.times(self.factor().power_inverted())
            else:
                break
        return cf.scaled(-1) if negate else cf

    def factor(self) -> ClosedForm:
        ch = self.peek()
        if ch == "x":
            self.take("x")
            p = self.number() if self.take("^") else mpf(1)
            return ClosedForm.from_term(1, p)
        if ch == "e":
            self.take("e")
            if not (self.take("^") and self.take("(")):
                self.error("expected e^( beta /x )")
            beta = self.number()
            if not (self.take("/") and self.take("x") and self.take(")")):
                self.error("expected e^( beta /x )")
            return ClosedForm.from_term(1, 0, beta)
        if ch == "(":
            self.take("(")
            if not self.take("x"):
                self.error("expected (x + c)")
            if self.take("+"):
                c = self.number(signed=False)
            elif self.take("-"):
                c = -self.number(signed=False)
            else:
                self.error("expected (x + c)")
            if not self.take(")"):
                self.error("expected ')'")
            m = self.number() if self.take("^") else mpf(1)
            if m != int(m):
                self.error("pole exponent must be an integer")
            return ClosedForm.from_term(1, 0, 0, ((c, int(m)),))
        if ch and (ch.isdigit() or ch in "+-."):
            return ClosedForm.from_term(self.number())
        self.error("expected a factor")


def parse_closed_form(text: str) -> ClosedForm:
    """Parse an expression like "e^(1/x)/x" or "1/(x+1)" into a handle."""
    return _Parser(text).parse()
