"""Rational functions over Q(sqrt2) in the registered symbols.

A RatFn is a pair num/den of polynomials with den != 0.  Canonical form:

  * common monomial content of num and den is cancelled,
  * den's leading coefficient under the global monomial order is 1,
  * zero is represented as 0/1.

No polynomial GCD is computed: equality is decided semantically by
cross-multiplication, with a randomized evaluation pre-check that can only
answer "different".  Substitution tracks the denominators it introduces in
factored form so that the factors shared by the substituted numerator and
denominator cancel exactly without any GCD machinery; this is what keeps
composed generator words from blowing up.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .poly import ONE as P_ONE, Poly, min_key
from .qsqrt2 import QSqrt2
from .symbols import Symbol, var_key


class DivisionByZero(ZeroDivisionError):
    """Division of a rational function by zero."""


class DenominatorVanishes(ZeroDivisionError):
    """A substitution produced an identically zero denominator."""


class RatFn:
    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = P_ONE):
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            self.num = Poly.zero()
            self.den = P_ONE
            return
        content = min_key(num.content_key(), den.content_key())
        if content:
            num = num.div_key(content)
            den = den.div_key(content)
        lead = den.leading_coeff()
        if not (lead.a == 1 and not lead.b):
            inv = lead.inverse()
            num = num.scale(inv)
            den = den.scale(inv)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, value) -> "RatFn":
        return cls(Poly.const(value))

    @classmethod
    def variable(cls, s: Symbol | str) -> "RatFn":
        return cls(Poly.variable(s))

    @classmethod
    def of(cls, value) -> "RatFn":
        if isinstance(value, RatFn):
            return value
        if isinstance(value, Poly):
            return cls(value)
        return cls.const(value)

    # ------------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_one()

    def const_value(self) -> QSqrt2:
        if not self.den.is_one():
            raise ValueError("rational function is not constant")
        return self.num.const_value()

    def symbols_used(self) -> set[Symbol]:
        return self.num.symbols_used() | self.den.symbols_used()

    def uses(self, s: Symbol) -> bool:
        return self.num.uses(s) or self.den.uses(s)

    # ------------------------------------------------------------------
    # field arithmetic

    def __add__(self, other: "RatFn") -> "RatFn":
        if self.den == other.den:
            return RatFn(self.num + other.num, self.den)
        return RatFn(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatFn") -> "RatFn":
        if self.den == other.den:
            return RatFn(self.num - other.num, self.den)
        return RatFn(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatFn":
        out = RatFn.__new__(RatFn)
        out.num = -self.num
        out.den = self.den
        return out

    def __mul__(self, other: "RatFn") -> "RatFn":
        return RatFn(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFn") -> "RatFn":
        if other.num.is_zero():
            raise DivisionByZero("division by zero rational function")
        return RatFn(self.num * other.den, self.den * other.num)

    def inverse(self) -> "RatFn":
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero")
        return RatFn(self.den, self.num)

    def __pow__(self, n: int) -> "RatFn":
        if n < 0:
            return self.inverse() ** (-n)
        return RatFn(self.num**n, self.den**n)

    def partial(self, s: Symbol) -> "RatFn":
        """Exact partial derivative by the quotient rule."""
        dn = self.num.partial(s)
        dd = self.den.partial(s)
        if dd.is_zero():
            return RatFn(dn, self.den)
        return RatFn(dn * self.den - self.num * dd, self.den * self.den)

    # ------------------------------------------------------------------
    # substitution

    def substitute(self, bindings: dict[Symbol, "RatFn"]) -> "RatFn":
        """Simultaneously substitute rational functions for symbols.

        Unbound symbols map to themselves.  Raises DenominatorVanishes if the
        composed denominator is identically zero.
        """
        live = {
            s: b
            for s, b in bindings.items()
            if (self.num.uses(s) or self.den.uses(s)) and not _is_identity(s, b)
        }
        if not live:
            return self
        num_poly, num_facs = _subst_poly(self.num, live)
        den_poly, den_facs = _subst_poly(self.den, live)
        if den_poly.is_zero():
            raise DenominatorVanishes("substituted denominator is identically zero")
        # Cancel the tracked denominator factors the two sides share.
        num_extra = P_ONE
        den_extra = P_ONE
        for fac in set(num_facs) | set(den_facs):
            diff = den_facs.get(fac, 0) - num_facs.get(fac, 0)
            if diff > 0:
                num_extra = num_extra * fac**diff
            elif diff < 0:
                den_extra = den_extra * fac ** (-diff)
        return RatFn(num_poly * num_extra, den_poly * den_extra)

    # ------------------------------------------------------------------
    # evaluation

    def eval_exact(self, values: dict[Symbol, Fraction]) -> QSqrt2:
        den = self.den.eval_exact(values)
        if den.is_zero():
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.eval_exact(values) / den

    # ------------------------------------------------------------------
    # equality

    def equals(self, other: "RatFn") -> bool:
        """Semantic equality: num*other.den - other.num*den expands to zero."""
        return ratfn_equal(self, other)

    def __eq__(self, other) -> bool:
        # Structural equality of canonical forms.  Use .equals() for the
        # semantic test; structural equality implies semantic equality.
        if not isinstance(other, RatFn):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        from .exprio import print_expr

        return f"RatFn({print_expr(self)})"


def _is_identity(s: Symbol, b: RatFn) -> bool:
    return (
        b.den.is_one()
        and len(b.num.terms) == 1
        and b.num.terms.get(var_key(s)) == QSqrt2(1)
    )


def _subst_poly(
    poly: Poly, bindings: dict[Symbol, RatFn]
) -> tuple[Poly, dict[Poly, int]]:
    """Substitute into a polynomial, returning num and factored denominator.

    The denominator is the product over bound symbols s of den(s)^max_deg(s),
    kept as a factor -> exponent map so the caller can cancel factors shared
    between two substituted polynomials exactly.
    """
    from .symbols import MASK, SHIFTS

    active = [(s, b) for s, b in bindings.items() if poly.uses(s)]
    if not active:
        return poly, {}
    degs = [poly.max_exponent(s) for s, _ in active]
    # Power tables for each binding's numerator and denominator.
    num_pows: list[list[Poly]] = []
    den_pows: list[list[Poly]] = []
    for (s, b), d in zip(active, degs):
        npws = [P_ONE]
        dpws = [P_ONE]
        for k in range(d):
            npws.append(npws[-1] * b.num)
            dpws.append(dpws[-1] * b.den)
        num_pows.append(npws)
        den_pows.append(dpws)
    shifts = [SHIFTS[s.index] for s, _ in active]
    result = Poly.zero()
    for key, c in poly.terms.items():
        term = Poly.const(c)
        rest = key
        for i, sh in enumerate(shifts):
            e = (key >> sh) & MASK
            if e:
                rest -= e << sh
            term = term * num_pows[i][e]
            cod = degs[i] - e
            if cod:
                term = term * den_pows[i][cod]
        result = result + term.mul_key(rest)
    factors: dict[Poly, int] = {}
    for (s, b), d in zip(active, degs):
        if d and not b.den.is_one():
            factors[b.den] = factors.get(b.den, 0) + d
    return result, factors


# Fixed seed: the pre-check must be deterministic run to run.
_PRECHECK_SEED = 0x5EED
_PRECHECK_POINTS = 3


def ratfn_equal(f: RatFn, g: RatFn) -> bool:
    """Decide f == g in the rational function field.

    A randomized evaluation pre-check runs first; a nonzero value at any
    sample point settles the answer as "different".  Equality is always
    confirmed by expanding the cross product.
    """
    if f.num == g.num and f.den == g.den:
        return True
    syms = f.symbols_used() | g.symbols_used()
    if syms:
        rng = random.Random(_PRECHECK_SEED)
        for _ in range(_PRECHECK_POINTS):
            point = {
                s: Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for s in syms
            }
            lhs = f.num.eval_exact(point) * g.den.eval_exact(point)
            rhs = g.num.eval_exact(point) * f.den.eval_exact(point)
            if lhs != rhs:
                return False
    return (f.num * g.den - g.num * f.den).is_zero()


ZERO = RatFn(Poly.zero())
ONE = RatFn(P_ONE)
