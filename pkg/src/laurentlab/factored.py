"""Cascade evolution: factored iterates for binomial-numerator rules.

Some reduced equations have iterates whose expanded term counts grow
doubly exponentially, far past what sparse arithmetic can expand, while
their *multiplicative structure* stays tiny.  When the defining numerator
has exactly two terms, every evolution step has the shape

    value = (A . prod(args) + B . prod(args)) / prod(den args)

and both numerator terms are products of already-factored values.  Pull
out the common factored part G, call the leftover two-term combination a
fresh *atom*, and the step is pure exponent bookkeeping:

    value = G . atom . D^-1

Each iterate is then a Laurent monomial over the initial variables times
a product of integer powers of atoms, where each atom is a (recursively
factored) two-term Laurent polynomial in the initial data.  Whenever all
atom exponents of an iterate are nonnegative, the iterate is manifestly
a product of Laurent polynomials times a unit — a sound Laurent-property
certificate that never expands anything.  Negative atom exponents prove
nothing (the certificate is one-sided); callers fall back to the
expanding engine for those points.

Exactness: every step is an identity in the rational function field, so
factored values agree with expanded iterates wherever both exist; tests
cross-validate the two engines symbolically on small windows and
numerically on large ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .domains import Domain, DomainError
from .equations import LatticeEquation
from .lattice import Point
from .poly import Coeff, LaurentPoly, VarId

ExpMap = Tuple[Tuple[object, int], ...]  # sorted ((key, exponent), ...), exp != 0


class CascadeUnsupported(ValueError):
    """The rule is not a two-term numerator over a monomial denominator."""


class CascadeInconclusive(ArithmeticError):
    """A degenerate step (numerator halves cancel) stops the cascade."""

    def __init__(self, point: Point, detail: str):
        super().__init__("cascade inconclusive at %r: %s" % (point, detail))
        self.point = point
        self.detail = detail


def _exp_combine(*parts: Sequence[Tuple[dict, int]]) -> dict:
    out: dict = {}
    for d, scale in parts:
        for k, e in d.items():
            n = out.get(k, 0) + scale * e
            if n:
                out[k] = n
            elif k in out:
                del out[k]
    return out


def _freeze(d: dict) -> ExpMap:
    return tuple(sorted(d.items(), key=lambda kv: _key_of(kv[0])))


def _key_of(k) -> tuple:
    if isinstance(k, VarId):
        return (0, k.key)
    return (1, k)


@dataclass(frozen=True)
class FactoredValue:
    """A Laurent monomial over initial variables (``mono``) times a
    product of atom powers (``atoms``: sorted (atom id, exponent))."""

    mono: ExpMap
    atoms: ExpMap

    def laurent_exponents_ok(self) -> bool:
        return all(e >= 0 for _, e in self.atoms)

    def is_unit(self) -> bool:
        return not self.atoms


class CascadeEvolution:
    """Factored evolution over a light-cone regular domain.

    Supports rules whose stored numerator has exactly two terms (the
    denominator is a monomial by construction).  Atom identity is
    syntactic on canonicalized definitions, so repeated subexpressions
    share an atom and later denominators cancel by bookkeeping.
    """

    def __init__(self, eq: LatticeEquation, domain: Domain):
        if domain.system.shifts != eq.system.shifts or domain.lattice != eq.lattice:
            raise DomainError("domain and equation use different shift systems")
        if eq.phi_num.term_count() != 2:
            raise CascadeUnsupported("cascade needs a two-term numerator")
        self.eq = eq
        self.domain = domain
        self.lattice = eq.lattice
        self.system = eq.system
        terms = sorted(eq.phi_num.terms.items(), key=lambda mc: mc[0])
        (self._mono_a, self._coeff_a), (self._mono_b, self._coeff_b) = terms
        den = eq.phi_den.terms
        ((dmono, dcoeff),) = den.items()
        if not dcoeff.is_one():
            raise CascadeUnsupported("denominator coefficient must be one")
        self._den_slots: Tuple[Tuple[int, int], ...] = tuple(
            (v.coords[0], e) for v, e in dmono
        )
        self._cache: Dict[Point, FactoredValue] = {}
        self._atom_ids: Dict[tuple, int] = {}
        self._atom_defs: List[tuple] = []
        self._atom_points: List[Point] = []

    # -- atoms

    def _atom(self, definition: tuple, point: Point) -> int:
        got = self._atom_ids.get(definition)
        if got is not None:
            return got
        aid = len(self._atom_defs)
        self._atom_ids[definition] = aid
        self._atom_defs.append(definition)
        self._atom_points.append(point)
        return aid

    def atom_definition(self, aid: int) -> tuple:
        """(coeff_a, mono_a, atoms_a, coeff_b, mono_b, atoms_b)."""
        return self._atom_defs[aid]

    def atom_count(self) -> int:
        return len(self._atom_defs)

    # -- evolution

    def _product(self, mono_slots, args: Dict[int, FactoredValue]):
        mono_parts = []
        atom_parts = []
        for v, e in mono_slots:
            val = args[v.coords[0]]
            mono_parts.append((dict(val.mono), e))
            atom_parts.append((dict(val.atoms), e))
        return _exp_combine(*mono_parts), _exp_combine(*atom_parts)

    def _step(self, p: Point, args: Dict[int, FactoredValue]) -> FactoredValue:
        mono_a, atoms_a = self._product(self._mono_a, args)
        mono_b, atoms_b = self._product(self._mono_b, args)
        gm = {
            k: min(mono_a.get(k, 0), mono_b.get(k, 0))
            for k in set(mono_a) | set(mono_b)
        }
        ga = {
            k: min(atoms_a.get(k, 0), atoms_b.get(k, 0))
            for k in set(atoms_a) | set(atoms_b)
        }
        ra_m, ra_a = _exp_combine((mono_a, 1), (gm, -1)), _exp_combine((atoms_a, 1), (ga, -1))
        rb_m, rb_a = _exp_combine((mono_b, 1), (gm, -1)), _exp_combine((atoms_b, 1), (ga, -1))
        half_a = (self._coeff_a, _freeze(ra_m), _freeze(ra_a))
        half_b = (self._coeff_b, _freeze(rb_m), _freeze(rb_a))
        num_mono, num_atoms = gm, ga
        if half_a[1:] == half_b[1:]:
            # the halves coincide: the numerator is a single monomial
            merged = self._coeff_a + self._coeff_b
            if merged.is_zero():
                raise CascadeInconclusive(p, "the two numerator terms cancel")
            if not (merged.is_int() and abs(merged.as_int()) == 1):
                raise CascadeInconclusive(
                    p, "merged numerator has a non-unit coefficient"
                )
            if merged.as_int() == -1:
                raise CascadeInconclusive(p, "merged numerator is a negated monomial")
            num_mono = _exp_combine((gm, 1), (dict(half_a[1]), 1))
            num_atoms = _exp_combine((ga, 1), (dict(half_a[2]), 1))
        else:
            ka, kb = sorted(
                [half_a, half_b],
                key=lambda h: (h[1], h[2], h[0].sorted_terms()),
            )
            aid = self._atom((ka[0], ka[1], ka[2], kb[0], kb[1], kb[2]), p)
            num_atoms = dict(num_atoms)
            num_atoms[aid] = num_atoms.get(aid, 0) + 1
        den_m_parts = []
        den_a_parts = []
        for slot, e in self._den_slots:
            val = args[slot]
            den_m_parts.append((dict(val.mono), -e))
            den_a_parts.append((dict(val.atoms), -e))
        mono = _exp_combine((num_mono, 1), *den_m_parts)
        atoms = _exp_combine((num_atoms, 1), *den_a_parts)
        return FactoredValue(_freeze(mono), _freeze(atoms))

    def iterate(self, h: Sequence[int]) -> FactoredValue:
        lat = self.lattice
        h = lat.normalize(h)
        got = self._cache.get(h)
        if got is not None:
            return got
        if not self.domain.contains(h):
            raise DomainError("point %r is outside the domain" % (h,))
        plan = sorted(self.domain.past_cone(h), key=lambda p: (self.system.weight(p), p))
        for p in plan:
            if p in self._cache:
                continue
            if self.domain.on_initial_boundary(p):
                self._cache[p] = FactoredValue(((VarId.point(p), 1),), ())
                continue
            args = {
                i: self._cache[lat.add(p, v)]
                for i, v in enumerate(self.system.shifts, start=1)
            }
            self._cache[p] = self._step(p, args)
        return self._cache[h]

    def laurent_certificate(self, h: Sequence[int]) -> Optional[dict]:
        """A sound "is Laurent" certificate, or None (inconclusive).

        The certificate records the factored shape; nonnegative atom
        exponents exhibit the iterate as a unit times a product of
        (recursively two-term) Laurent polynomials.
        """
        try:
            val = self.iterate(h)
        except CascadeInconclusive:
            return None
        if not val.laurent_exponents_ok():
            return None
        return {
            "method": "cascade",
            "atom_factors": len(val.atoms),
            "max_exponent": max((e for _, e in val.atoms), default=0),
        }

    # -- expansion (cross-validation and small windows only)

    def atom_poly(self, aid: int, _memo: Optional[dict] = None) -> LaurentPoly:
        memo = _memo if _memo is not None else {}
        if aid in memo:
            return memo[aid]
        ca, ma, aa, cb, mb, ab = self._atom_defs[aid]
        pa = self._part_poly(ca, ma, aa, memo)
        pb = self._part_poly(cb, mb, ab, memo)
        out = pa + pb
        memo[aid] = out
        return out

    def _part_poly(self, c: Coeff, mono: ExpMap, atoms: ExpMap, memo: dict) -> LaurentPoly:
        out = LaurentPoly.monomial({v: e for v, e in mono}, c)
        for aid, e in atoms:
            base = self.atom_poly(aid, memo)
            if e < 0:
                raise CascadeInconclusive(
                    self._atom_points[aid], "negative atom exponent inside a definition"
                )
            for _ in range(e):
                out = out * base
        return out

    def expand(self, h: Sequence[int]) -> LaurentPoly:
        """The iterate as an expanded Laurent polynomial (use only where
        the expansion is known to be small)."""
        val = self.iterate(h)
        if not val.laurent_exponents_ok():
            raise CascadeInconclusive(
                self.lattice.normalize(h), "negative atom exponent; expand via Evolution"
            )
        memo: dict = {}
        out = LaurentPoly.monomial({v: e for v, e in val.mono}, 1)
        for aid, e in val.atoms:
            base = self.atom_poly(aid, memo)
            for _ in range(e):
                out = out * base
        return out


def cascade_for(eq: LatticeEquation, domain: Domain) -> Optional[CascadeEvolution]:
    """A cascade engine when the rule shape allows one, else None."""
    try:
        return CascadeEvolution(eq, domain)
    except CascadeUnsupported:
        return None
