"""Partially factored fractions for composing long substitution words.

Composed generator words are birational, so their reduced coordinate
expressions stay small, but naive num/den composition accumulates huge
common factors: the numerator of step k becomes divisible by images of the
denominators introduced at earlier steps.  Cross-multiplication cannot see
this without a GCD.

This engine avoids the blowup without general GCDs by keeping the
denominator as a multiset of unexpanded atomic factors (binding denominators
and their images), and cancelling

  * structurally identical atoms on the two sides, and
  * atoms that exactly divide the expanded numerator (checked by sparse
    trial division, which is unconditionally correct).

Only substitution is supported; word actions never need ring addition at
this level.
"""

from __future__ import annotations

from .poly import ONE as P_ONE, Poly
from .ratfn import DenominatorVanishes, RatFn, _subst_poly
from .symbols import Symbol


class FactoredFrac:
    __slots__ = ("num", "num_facs", "den_facs")

    def __init__(
        self,
        num: Poly,
        num_facs: dict[Poly, int] | None = None,
        den_facs: dict[Poly, int] | None = None,
    ):
        self.num = num
        self.num_facs = {f: e for f, e in (num_facs or {}).items() if e}
        self.den_facs = {f: e for f, e in (den_facs or {}).items() if e}

    @classmethod
    def from_ratfn(cls, f: RatFn) -> "FactoredFrac":
        den_facs = {} if f.den.is_one() else {f.den: 1}
        return cls(f.num, {}, den_facs)

    def to_ratfn(self) -> RatFn:
        num = self.num
        for f, e in self.num_facs.items():
            num = num * f**e
        den = P_ONE
        for f, e in self.den_facs.items():
            den = den * f**e
        return RatFn(num, den)

    def substitute(self, bindings: dict[Symbol, RatFn]) -> "FactoredFrac":
        binding_dens = list({b.den for b in bindings.values() if not b.den.is_one()})

        def peel(poly: Poly) -> tuple[Poly, dict[Poly, int]]:
            # Split off exceptional components: powers of the binding
            # denominators hiding inside a substituted polynomial.
            counts: dict[Poly, int] = {}
            for b in binding_dens:
                while True:
                    quo = poly.try_div(b)
                    if quo is None:
                        break
                    poly = quo
                    counts[b] = counts.get(b, 0) + 1
            return poly, counts

        images: dict[Poly, tuple[Poly, dict[Poly, int], dict[Poly, int]]] = {}

        def image(f: Poly) -> tuple[Poly, dict[Poly, int], dict[Poly, int]]:
            got = images.get(f)
            if got is None:
                body, extra_den = _subst_poly(f, bindings)
                if not body.is_zero():
                    body, split = peel(body)
                else:
                    split = {}
                got = (body, split, extra_den)
                images[f] = got
            return got

        num_facs: dict[Poly, int] = {}
        den_facs: dict[Poly, int] = {}
        num_new, split, extra = image(self.num)
        for g, k in split.items():
            _bump(num_facs, g, k)
        for g, k in extra.items():
            _bump(den_facs, g, k)
        for f, e in self.num_facs.items():
            body, split, extra = image(f)
            if body.is_zero():
                return FactoredFrac(Poly.zero())
            _bump(num_facs, body, e)
            for g, k in split.items():
                _bump(num_facs, g, k * e)
            for g, k in extra.items():
                _bump(den_facs, g, k * e)
        for f, e in self.den_facs.items():
            body, split, extra = image(f)
            if body.is_zero():
                raise DenominatorVanishes(
                    "a denominator factor maps to zero under substitution"
                )
            _bump(den_facs, body, e)
            for g, k in split.items():
                _bump(den_facs, g, k * e)
            for g, k in extra.items():
                _bump(num_facs, g, k * e)
        return FactoredFrac(num_new, num_facs, den_facs)._reduced()

    def _reduced(self) -> "FactoredFrac":
        num = self.num
        num_facs = dict(self.num_facs)
        den_facs = dict(self.den_facs)
        if num.is_zero():
            return FactoredFrac(num)
        # Identical atoms cancel outright.
        for f in list(den_facs):
            if f in num_facs:
                m = min(num_facs[f], den_facs[f])
                _bump(num_facs, f, -m)
                _bump(den_facs, f, -m)
        # Remaining denominator atoms may divide the expanded numerator.
        for f in list(den_facs):
            if f.is_const():
                continue
            while den_facs.get(f, 0):
                quo = num.try_div(f)
                if quo is None:
                    break
                num = quo
                _bump(den_facs, f, -1)
        return FactoredFrac(num, num_facs, den_facs)

    def __repr__(self) -> str:
        return (
            f"FactoredFrac({len(self.num.terms)} terms,"
            f" num_facs={[(len(f.terms), e) for f, e in self.num_facs.items()]},"
            f" den_facs={[(len(f.terms), e) for f, e in self.den_facs.items()]})"
        )


def _bump(facs: dict[Poly, int], f: Poly, e: int) -> None:
    if f.is_one() or e == 0:
        return
    new = facs.get(f, 0) + e
    if new:
        facs[f] = new
    else:
        del facs[f]


def substitute_reduced(f: RatFn, bindings: dict[Symbol, RatFn]) -> RatFn:
    """RatFn substitution routed through the factored engine.

    Same contract as RatFn.substitute, but with factor peeling and trial
    division, for substitutions into large composite expressions.
    """
    return FactoredFrac.from_ratfn(f).substitute(bindings).to_ratfn()
