"""Finitely generated abelian lattices and shift systems.

A lattice is ``Z^rank  x  Z/a_1 x ... x Z/a_s``; points are integer tuples
of length ``rank + s`` with the torsion coordinates kept reduced.  A shift
system is the tuple of distinct nonzero shifts ``v_1..v_N`` a recurrence
reads from, with ``v_N`` playing the role of the minimum shift (the slot
the recurrence is solved for when stepping backward).

The load-bearing property is *positive independence* of the shifts: no
nontrivial nonnegative integer combination vanishes.  On the free parts
this is equivalent (LP duality) to the existence of an integer functional
``w`` with ``w . v_i <= -1`` for all ``i``; torsion cannot rescue a free
dependency because scaling by the torsion exponent kills it.  The
functional is the termination certificate for every cone computation here:
walking backward through the shifts strictly increases ``w``, so searches
bottom out.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .intlinalg import SeparationResult, cokernel_trivial, separating_functional

Point = Tuple[int, ...]


@dataclass(frozen=True)
class LatticeSpec:
    """Shape of the lattice: free rank plus torsion moduli (each >= 1)."""

    rank: int
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        if any(a < 1 for a in self.torsion):
            raise ValueError("torsion moduli must be positive")
        object.__setattr__(self, "torsion", tuple(int(a) for a in self.torsion))

    @property
    def dimension(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def zero(self) -> Point:
        return (0,) * self.dimension

    def normalize(self, p: Sequence[int]) -> Point:
        p = tuple(int(x) for x in p)
        if len(p) != self.dimension:
            raise ValueError(
                "point %r has %d coordinates; lattice needs %d" % (p, len(p), self.dimension)
            )
        if not self.torsion:
            return p
        free = p[: self.rank]
        tor = tuple(x % a for x, a in zip(p[self.rank :], self.torsion))
        return free + tor

    def add(self, a: Sequence[int], b: Sequence[int]) -> Point:
        return self.normalize(tuple(x + y for x, y in zip(a, b)))

    def sub(self, a: Sequence[int], b: Sequence[int]) -> Point:
        return self.normalize(tuple(x - y for x, y in zip(a, b)))

    def neg(self, a: Sequence[int]) -> Point:
        return self.normalize(tuple(-x for x in a))

    def scale(self, a: Sequence[int], c: int) -> Point:
        return self.normalize(tuple(c * x for x in a))

    def free_part(self, p: Sequence[int]) -> Tuple[int, ...]:
        return tuple(p[: self.rank])

    def torsion_part(self, p: Sequence[int]) -> Tuple[int, ...]:
        return self.normalize(p)[self.rank :]

    def real_embedding(self, p: Sequence[int]) -> Tuple[int, ...]:
        """Projection to R^rank; torsion dies (it is bounded)."""
        return self.free_part(p)

    def torsion_exponent(self) -> int:
        out = 1
        for a in self.torsion:
            out = out * a // _gcd(out, a)
        return out

    def points_with_free(self, free: Sequence[int]) -> Iterable[Point]:
        """All lattice points with the given free part (torsion fibers)."""
        ranges = [range(a) for a in self.torsion]
        for tor in itertools.product(*ranges):
            yield tuple(free) + tor


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


class ShiftSystemError(ValueError):
    pass


@dataclass
class ShiftAnalysis:
    """Result of analyzing a shift system.

    ``functional``: integer w on the free part with w . v_i <= -1 for all
    shifts (present iff the shifts are positively independent).
    ``dependency``: nonnegative integers, not all zero, combining the
    shifts to zero in the lattice (present otherwise; scaled by the torsion
    exponent so it kills torsion too).
    ``minimum_index``: index of a shift below all others in the monoid
    order, or None.
    """

    functional: Optional[Tuple[int, ...]]
    dependency: Optional[Tuple[int, ...]]
    minimum_index: Optional[int]
    generates: bool


class ShiftSystem:
    """Distinct nonzero shifts with the last one designated as minimum."""

    def __init__(self, lattice: LatticeSpec, shifts: Sequence[Sequence[int]]):
        self.lattice = lattice
        self.shifts: Tuple[Point, ...] = tuple(lattice.normalize(v) for v in shifts)
        if not self.shifts:
            raise ShiftSystemError("a shift system needs at least one shift")
        if len(set(self.shifts)) != len(self.shifts):
            raise ShiftSystemError("shifts must be distinct: %r" % (self.shifts,))
        if any(v == lattice.zero for v in self.shifts):
            raise ShiftSystemError("the zero shift is not allowed")
        sep = separating_functional([lattice.free_part(v) for v in self.shifts])
        self._functional = sep.functional
        if sep.dependency is None:
            self._dependency = None
        else:
            # lift the free dependency to the lattice by killing torsion
            exp = lattice.torsion_exponent()
            self._dependency = tuple(c * exp for c in sep.dependency)
        self._monoid_cache: Dict[Point, bool] = {lattice.zero: True}
        # for members: index of a shift whose subtraction stays in the monoid
        self._via: Dict[Point, int] = {}

    # -- certificates

    @property
    def functional(self) -> Optional[Tuple[int, ...]]:
        return self._functional

    @property
    def dependency(self) -> Optional[Tuple[int, ...]]:
        return self._dependency

    def positively_independent(self) -> bool:
        return self._functional is not None

    def analyze(self) -> ShiftAnalysis:
        return ShiftAnalysis(
            functional=self._functional,
            dependency=self._dependency,
            minimum_index=self.find_minimum(),
            generates=self.generates_lattice(),
        )

    def _require_functional(self) -> Tuple[int, ...]:
        if self._functional is None:
            raise ShiftSystemError(
                "shifts admit a nonnegative dependency %r; cone searches would not terminate"
                % (self._dependency,)
            )
        return self._functional

    def weight(self, p: Sequence[int]) -> int:
        """w . free_part(p) for the certificate functional."""
        w = self._require_functional()
        free = self.lattice.free_part(p)
        return sum(a * b for a, b in zip(w, free))

    # -- monoid membership and the induced order

    def in_monoid(self, p: Sequence[int]) -> bool:
        """Is ``p`` a nonnegative integer combination of the shifts?

        Memoized search over ``node -> node - v_i`` edges.  Subtracting a
        shift strictly increases the weight, which is <= 0 everywhere on
        the monoid, so the reachable states form a finite DAG.
        """
        self._require_functional()
        lat = self.lattice
        start = lat.normalize(p)
        cache = self._monoid_cache
        if start in cache:
            return cache[start]
        if self.weight(start) > 0:
            cache[start] = False
            return False
        stack = [start]
        while stack:
            node = stack[-1]
            if node in cache:
                stack.pop()
                continue
            children = []
            for v in self.shifts:
                c = lat.sub(node, v)
                if c not in cache and self.weight(c) > 0:
                    cache[c] = False
                children.append(c)
            hit = next((i for i, c in enumerate(children) if cache.get(c) is True), None)
            if hit is not None:
                cache[node] = True
                self._via[node] = hit
                stack.pop()
                continue
            pending = [c for c in children if c not in cache]
            if not pending:
                cache[node] = False
                stack.pop()
            else:
                stack.extend(pending)
        return cache[start]

    def order_certificate(self, p: Sequence[int]) -> Optional[Tuple[int, ...]]:
        """Coefficients ``a_i >= 0`` with ``sum a_i v_i = p``, or None.

        Extracted from the membership search: every member's ``_via`` entry
        names a shift whose subtraction stays in the monoid, and following
        those edges strictly raises the certificate weight until 0.
        """
        lat = self.lattice
        node = lat.normalize(p)
        if not self.in_monoid(node):
            return None
        coeffs = [0] * len(self.shifts)
        while node != lat.zero:
            i = self._via[node]
            coeffs[i] += 1
            node = lat.sub(node, self.shifts[i])
        recombined = lat.zero
        for i, a in enumerate(coeffs):
            recombined = lat.add(recombined, lat.scale(self.shifts[i], a))
        if recombined != lat.normalize(p):
            raise ShiftSystemError("certificate extraction failed for %r" % (tuple(p),))
        return tuple(coeffs)

    def leq(self, a: Sequence[int], b: Sequence[int]) -> bool:
        """Monoid order: a <= b iff a - b lies in the monoid."""
        return self.in_monoid(self.lattice.sub(a, b))

    def find_minimum(self) -> Optional[int]:
        """Index of a shift that is <= every other shift, if one exists."""
        if self._functional is None:
            return None
        for j, vj in enumerate(self.shifts):
            if all(i == j or self.leq(vj, vi) for i, vi in enumerate(self.shifts)):
                return j
        return None

    def check_minimum_shift(self) -> bool:
        """Is the designated (last) shift a minimum of the whole system?

        Also checks ``v_N <= 0`` (automatic — the zero difference is the
        empty combination — but part of the stated contract).
        """
        if self._functional is None:
            return False
        vn = self.shifts[-1]
        if not self.leq(vn, self.lattice.zero):
            return False
        return all(self.leq(vn, v) for v in self.shifts[:-1])

    # -- group-level checks

    def generates_lattice(self) -> bool:
        """Do the shifts generate the full lattice as a group?"""
        lat = self.lattice
        dim = lat.dimension
        cols: List[List[int]] = [list(v) for v in self.shifts]
        for i, a in enumerate(lat.torsion):
            col = [0] * dim
            col[lat.rank + i] = a
            cols.append(col)
        matrix = [[col[i] for col in cols] for i in range(dim)]
        return cokernel_trivial(matrix)

    def monoid_elements_up_to_weight(self, bound: int) -> List[Point]:
        """All monoid elements with weight >= -bound (finite set)."""
        self._require_functional()
        lat = self.lattice
        seen = {lat.zero}
        frontier = [lat.zero]
        while frontier:
            nxt = []
            for p in frontier:
                for v in self.shifts:
                    q = lat.add(p, v)
                    if q not in seen and self.weight(q) >= -bound:
                        seen.add(q)
                        nxt.append(q)
            frontier = nxt
        return sorted(seen)

    def __repr__(self) -> str:
        return "ShiftSystem(%r, %r)" % (self.lattice, list(self.shifts))


@dataclass(frozen=True)
class IndependenceResult:
    """Outcome of the positive-independence check.

    Exactly one of ``functional`` (certifying independence: ``w . v_i <= -1``
    on free parts) and ``dependency`` (nonnegative coefficients, not all
    zero, with ``sum c_i v_i = 0`` in the lattice, torsion included) is set.
    """

    independent: bool
    functional: Optional[Tuple[int, ...]] = None
    dependency: Optional[Tuple[int, ...]] = None


def check_znn_independence(
    lattice: LatticeSpec, shifts: Sequence[Sequence[int]]
) -> IndependenceResult:
    """Decide whether the shifts are independent over the nonnegative integers.

    A dependency on free parts lifts to the whole lattice after scaling by
    the torsion exponent, so working on free parts loses nothing.
    """
    pts = [lattice.normalize(v) for v in shifts]
    sep = separating_functional([lattice.free_part(v) for v in pts])
    if sep.functional is not None:
        return IndependenceResult(independent=True, functional=sep.functional)
    exp = lattice.torsion_exponent()
    dep = tuple(c * exp for c in sep.dependency)
    combo = lattice.zero
    for c, v in zip(dep, pts):
        combo = lattice.add(combo, lattice.scale(v, c))
    if combo != lattice.zero or not any(dep):
        raise ShiftSystemError("dependency witness failed to recombine to zero")
    return IndependenceResult(independent=False, dependency=dep)
