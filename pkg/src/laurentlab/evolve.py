"""Symbolic and numeric evolution of a recurrence over a regular domain.

The iterate at an interior point is obtained by substituting the (already
computed) iterates at the argument points into the step rule and dividing
exactly by the monomial denominator's arguments.  Initial-boundary points
stay free variables, named by their lattice point, so every iterate is a
Laurent polynomial over ``Z[params]`` in the boundary data — when the
division is exact.  A failed division is the *witness* that the recurrence
is not Laurent on this domain, and is reported with the point, the
offending divisor, and the exact remainder information.

Determinism: variables are identified by their lattice points (no session
counters), and the past cone is processed in ascending certificate-weight
order with lexicographic tie-breaks, so the computed polynomials — and
their canonical text forms — are identical across runs and process
layouts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .domains import Domain, DomainError
from .equations import LatticeEquation
from .lattice import Point
from .poly import LaurentPoly, NotDivisibleError, VarId, exact_div


class NonLaurentError(ArithmeticError):
    """The recurrence left the Laurent ring: at ``point`` the numerator is
    not exactly divisible by the iterate at ``divisor_point``."""

    def __init__(self, point: Point, divisor_point: Point, divisor: LaurentPoly, detail: str):
        super().__init__(
            "non-Laurent step at %r: numerator not divisible by the iterate at %r (%s)"
            % (point, divisor_point, detail)
        )
        self.point = point
        self.divisor_point = divisor_point
        self.divisor = divisor
        self.detail = detail


class SingularEvaluation(ArithmeticError):
    """A numeric run hit a zero denominator at ``point`` (special initial
    data); redraw and retry."""

    def __init__(self, point: Point):
        super().__init__("zero denominator at %r for these initial values" % (point,))
        self.point = point


def boundary_var(point: Sequence[int]) -> VarId:
    """The free variable carrying the initial value at a boundary point."""
    return VarId.point(point)


class Evolution:
    """Memoized symbolic iterates of one equation over one domain."""

    def __init__(self, eq: LatticeEquation, domain: Domain):
        if domain.system.shifts != eq.system.shifts or domain.lattice != eq.lattice:
            raise DomainError("domain and equation use different shift systems")
        self.eq = eq
        self.domain = domain
        self.lattice = eq.lattice
        self.system = eq.system
        self._cache: Dict[Point, LaurentPoly] = {}
        # the monomial denominator as (slot, exponent) pairs
        ((mono, coeff),) = eq.phi_den.terms.items()
        if not coeff.is_one():
            raise DomainError("rule denominator must be a plain monomial")
        self._den_slots: Tuple[Tuple[int, int], ...] = tuple(
            (v.coords[0], e) for v, e in mono
        )

    # -- symbolic

    def _plan(self, h: Point) -> List[Point]:
        """The past cone in computation order (ascending weight, then lex)."""
        cone = self.domain.past_cone(h)
        return sorted(cone, key=lambda p: (self.system.weight(p), p))

    def iterate(self, h: Sequence[int]) -> LaurentPoly:
        """The value at ``h`` as a Laurent polynomial in the boundary data.

        Raises :class:`NonLaurentError` (with a first-failure witness) when
        some step of the recursion leaves the Laurent ring, and
        :class:`~laurentlab.domains.DomainError` for points outside the
        domain.
        """
        lat = self.lattice
        h = lat.normalize(h)
        got = self._cache.get(h)
        if got is not None:
            return got
        if not self.domain.contains(h):
            raise DomainError("point %r is not in the domain" % (h,))
        for p in self._plan(h):
            if p in self._cache:
                continue
            if self.domain.on_initial_boundary(p):
                self._cache[p] = LaurentPoly.var(boundary_var(p))
                continue
            args = [self._cache[lat.add(p, v)] for v in self.system.shifts]
            self._cache[p] = self._step(p, args)
        return self._cache[h]

    def _step(self, p: Point, args: Sequence[LaurentPoly]) -> LaurentPoly:
        value = self.eq.phi_num.compose(args)
        for slot, e in self._den_slots:
            divisor = args[slot - 1]
            for _ in range(e):
                try:
                    value = exact_div(value, divisor)
                except NotDivisibleError as err:
                    raise NonLaurentError(
                        p,
                        self.lattice.add(p, self.system.shifts[slot - 1]),
                        divisor,
                        str(err),
                    ) from None
        return value

    def initial_points(self, targets: Iterable[Sequence[int]]) -> List[Point]:
        """Boundary points feeding the given targets (their free variables)."""
        lat = self.lattice
        return self.domain.initial_data_for([lat.normalize(t) for t in targets])

    # -- numeric

    def numeric_iterate(
        self,
        h: Sequence[int],
        initial: Mapping[Point, Fraction],
        params: Optional[Mapping[str, Fraction]] = None,
        _cache: Optional[Dict[Point, Fraction]] = None,
    ) -> Fraction:
        """Exact rational evolution from concrete initial data.

        ``initial`` maps boundary points to values.  Raises
        :class:`SingularEvaluation` when a zero denominator appears (the
        initial data is special; redraw).
        """
        lat = self.lattice
        h = lat.normalize(h)
        if not self.domain.contains(h):
            raise DomainError("point %r is not in the domain" % (h,))
        vals: Dict[Point, Fraction] = {} if _cache is None else _cache
        pnum, pden = self.eq.phi_num, self.eq.phi_den
        for p in self._plan(h):
            if p in vals:
                continue
            if self.domain.on_initial_boundary(p):
                try:
                    vals[p] = Fraction(initial[p])
                except KeyError:
                    raise DomainError("no initial value for boundary point %r" % (p,)) from None
                continue
            assign = {
                VarId.placeholder(i + 1): vals[lat.add(p, v)]
                for i, v in enumerate(self.system.shifts)
            }
            den = pden.evaluate(assign, params, allow_zero=True)
            if den == 0:
                raise SingularEvaluation(p)
            vals[p] = pnum.evaluate(assign, params, allow_zero=True) / den
        return vals[h]


def support_points(p: LaurentPoly) -> List[Point]:
    """The lattice points whose variables occur in ``p``."""
    return sorted({v.coords for v in p.variables() if v.kind == 0})
