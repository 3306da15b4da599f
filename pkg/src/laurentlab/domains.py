"""Evolution domains: subsets of the lattice that recurrences run on.

A domain ``H`` is *regular* for a shift system when

1. every past cone ``H ∩ (h + S)`` is finite (``S`` the shift monoid), and
2. ``H`` is future-closed: ``h in H`` and ``h <= h'`` imply ``h' in H``.

Under the monoid order (``h1 <= h2`` iff ``h1 - h2 in S``) shifts point
into the past, so the recurrence recurses over finite cones and the
*initial boundary* ``H0 = {h in H : h + v_N not in H}`` carries the free
initial data; everything else ("interior") is determined.  Note that
``h + v_N in H`` already forces every other argument ``h + v_i`` into
``H``: ``v_N`` is a minimum shift, so ``h + v_i >= h + v_N``, and ``H`` is
future-closed.

The concrete domain shapes:

- :class:`FutureConeUnion` — union of future cones of finitely many seed
  points.  Structurally regular for every properly-posed system (weights
  are sandwiched on past cones, futures are cones by construction).
- :class:`HalfSpace` — ``{h : u . free(h) >= c}``; structurally regular
  when ``u`` strictly decreases along every shift.
- :class:`Intersection` — intersection of domains; structural when every
  factor is structural and a witness point confirms nonemptiness, or (for
  half-space factors) when each functional is nonincreasing along every
  shift and the sum strictly decreases.  Not enumerable by depth (no
  canonical minimal points); use box windows.
- :class:`MutatedDomain` — a regular domain minus a sequence of points,
  each minimal at the time of its removal.  This is the elementary move
  that reshapes initial boundaries while preserving regularity.
- :class:`TranslatedDomain` — a shifted copy.
- :class:`LiftedDomain` — preimage of a domain under a group map to a
  smaller lattice (built by the reduction machinery).
- :class:`OracleDomain` — membership by arbitrary predicate; regularity
  can only be sampled, never certified.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .lattice import LatticeSpec, Point, ShiftSystem

DEFAULT_CONE_CAP = 200_000


class DomainError(ValueError):
    pass


class NotEnumerableError(DomainError):
    """The domain has no finite seed description for depth enumeration."""


class Domain:
    """Base: membership plus the shared cone/boundary/enumeration logic."""

    def __init__(self, system: ShiftSystem):
        self.system = system
        self.lattice = system.lattice

    # -- to override

    def contains(self, p: Sequence[int]) -> bool:
        raise NotImplementedError

    def structurally_regular(self) -> bool:
        """True when regularity holds by construction (with the argument
        recorded in :meth:`regularity_argument`)."""
        return False

    def regularity_argument(self) -> str:
        return "no structural argument; sample with validate_regular"

    def seed_members(self) -> List[Point]:
        """A finite superset of the minimal elements (for enumeration)."""
        raise NotEnumerableError("%s has no seed description" % type(self).__name__)

    def describe(self) -> dict:
        return {"kind": type(self).__name__}

    # -- shared machinery

    def past_cone(self, h: Sequence[int], cap: int = DEFAULT_CONE_CAP) -> List[Point]:
        """``H ∩ (h + S)`` via breadth-first search through shift steps.

        Every point of the cone is reachable from ``h`` through
        intermediate points that stay in ``H`` (they sit above the target,
        and ``H`` is future-closed), so in-domain search is complete.
        """
        lat = self.lattice
        start = lat.normalize(h)
        if not self.contains(start):
            return []
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for p in frontier:
                for v in self.system.shifts:
                    q = lat.add(p, v)
                    if q not in seen and self.contains(q):
                        seen.add(q)
                        nxt.append(q)
                        if len(seen) > cap:
                            raise DomainError(
                                "past cone of %r exceeded %d points; domain likely irregular"
                                % (tuple(h), cap)
                            )
            frontier = nxt
        return sorted(seen)

    def depth(self, h: Sequence[int]) -> int:
        """``d_H(h)``: the size of the past cone (0 when h is outside)."""
        return len(self.past_cone(h))

    def on_initial_boundary(self, h: Sequence[int]) -> bool:
        lat = self.lattice
        h = lat.normalize(h)
        vn = self.system.shifts[-1]
        return self.contains(h) and not self.contains(lat.add(h, vn))

    def is_interior(self, h: Sequence[int]) -> bool:
        lat = self.lattice
        h = lat.normalize(h)
        vn = self.system.shifts[-1]
        return self.contains(h) and self.contains(lat.add(h, vn))

    def is_minimal(self, h: Sequence[int]) -> bool:
        """Minimal element: its past cone is just itself."""
        return self.contains(h) and self.past_cone(h) == [self.lattice.normalize(h)]

    def enumerate_by_depth(self, max_d: int) -> List[Tuple[Point, int]]:
        """All ``(h, d_H(h))`` with depth <= max_d, sorted by (depth, h).

        Walks future-ward from the seed members; depth is monotone along
        the order, so pruning at ``max_d`` is exhaustive.
        """
        if max_d < 1:
            return []
        lat = self.lattice
        seeds = [lat.normalize(s) for s in self.seed_members()]
        depth_of: Dict[Point, int] = {}
        frontier: List[Point] = []
        for s in seeds:
            if s in depth_of or not self.contains(s):
                continue
            d = self.depth(s)
            if d <= max_d:
                depth_of[s] = d
                frontier.append(s)
        while frontier:
            nxt = []
            for p in frontier:
                for v in self.system.shifts:
                    q = lat.sub(p, v)
                    if q in depth_of or not self.contains(q):
                        continue
                    d = self.depth(q)
                    if d <= max_d:
                        depth_of[q] = d
                        nxt.append(q)
            frontier = nxt
        return sorted(depth_of.items(), key=lambda kv: (kv[1], kv[0]))

    def enumerate_box(self, lo: Sequence[int], hi: Sequence[int]) -> List[Point]:
        """Domain points whose free coordinates lie in [lo, hi] (torsion
        coordinates range over their full fibers)."""
        lat = self.lattice
        if len(lo) != lat.rank or len(hi) != lat.rank:
            raise DomainError("box bounds must have one entry per free coordinate")
        out = []

        def rec(i: int, prefix: Tuple[int, ...]):
            if i == lat.rank:
                for p in lat.points_with_free(prefix):
                    if self.contains(p):
                        out.append(p)
                return
            for x in range(lo[i], hi[i] + 1):
                rec(i + 1, prefix + (x,))

        rec(0, ())
        return sorted(out)

    def initial_data_for(self, points: Iterable[Point]) -> List[Point]:
        """The boundary points among the union of past cones of ``points``."""
        seen = set()
        for h in points:
            seen.update(self.past_cone(h))
        return sorted(p for p in seen if self.on_initial_boundary(p))


# ---------------------------------------------------------------------------


class FutureConeUnion(Domain):
    """Union of future cones: ``h in H`` iff ``h >= g`` for some seed g."""

    def __init__(self, system: ShiftSystem, seeds: Sequence[Sequence[int]]):
        super().__init__(system)
        if not seeds:
            raise DomainError("need at least one seed point")
        system._require_functional()
        self.seeds = tuple(sorted({self.lattice.normalize(s) for s in seeds}))

    def contains(self, p: Sequence[int]) -> bool:
        lat = self.lattice
        p = lat.normalize(p)
        return any(self.system.in_monoid(lat.sub(g, p)) for g in self.seeds)

    def structurally_regular(self) -> bool:
        return True

    def regularity_argument(self) -> str:
        return (
            "future-cone union: future closure holds by construction; on a past "
            "cone of h the certificate weight is sandwiched between the seed "
            "weights and w(h), and each weight level is finite"
        )

    def seed_members(self) -> List[Point]:
        return list(self.seeds)

    def describe(self) -> dict:
        return {"kind": "future_cone_union", "seeds": [list(s) for s in self.seeds]}


class HalfSpace(Domain):
    """``H = {h : u . free(h) >= c}`` for one integer functional.

    Structurally regular iff ``u . free(v_i) <= -1`` strictly for every
    shift: future steps then increase ``u`` (closure), and on a past cone
    ``u`` is sandwiched between ``c`` and its start value with every step
    moving it by at least 1, so cones are finite.
    """

    def __init__(self, system: ShiftSystem, functional: Sequence[int], c: int):
        super().__init__(system)
        self.functional = tuple(int(x) for x in functional)
        self.c = int(c)
        if len(self.functional) != self.lattice.rank:
            raise DomainError(
                "functional %r must have %d entries" % (self.functional, self.lattice.rank)
            )
        frees = [self.lattice.free_part(v) for v in self.system.shifts]
        self._strict = all(
            sum(a * b for a, b in zip(self.functional, f)) <= -1 for f in frees
        )

    def contains(self, p: Sequence[int]) -> bool:
        free = self.lattice.free_part(self.lattice.normalize(p))
        return sum(a * b for a, b in zip(self.functional, free)) >= self.c

    def structurally_regular(self) -> bool:
        return self._strict

    def regularity_argument(self) -> str:
        if self._strict:
            return (
                "half-space with a functional strictly decreasing along every "
                "shift: future closure and finite past cones both follow"
            )
        return (
            "half-space functional does not strictly decrease along every "
            "shift; regularity is not structural (sample with validate_regular)"
        )

    def seed_members(self) -> List[Point]:
        # A strict rank-1 half-space has a finite minimal band: a minimal
        # point satisfies c <= u.h < c + min_i(-u.v_i), so the band up to
        # the largest drop is a finite superset of the minimal elements.
        if self.lattice.rank != 1 or self.functional[0] == 0 or not self._strict:
            raise NotEnumerableError(
                "only strict rank-1 half-spaces have a finite seed band; "
                "use box windows"
            )
        w = self.functional[0]
        drops = [
            -sum(a * b for a, b in zip(self.functional, self.lattice.free_part(v)))
            for v in self.system.shifts
        ]
        out: List[Point] = []
        for t in range(self.c, self.c + max(drops)):
            if t % w == 0:
                out.extend(self.lattice.points_with_free((t // w,)))
        return sorted(out)

    def describe(self) -> dict:
        return {"kind": "halfspace", "w": list(self.functional), "c": self.c}


class Intersection(Domain):
    """Intersection of domains over one shift system.

    Future closure and finite cones are inherited from any factor, so the
    intersection of regular domains is regular *when nonempty* (the stated
    policy tags it structural only when every factor is structural and a
    membership witness confirms nonemptiness).  As an extra structural
    route, an intersection of half-spaces is tagged regular when each
    functional is nonincreasing along every shift and their sum strictly
    decreases — that is the classic cone-shaped-domain criterion.
    """

    def __init__(self, parts: Sequence[Domain], witness: Optional[Sequence[int]] = None):
        if not parts:
            raise DomainError("intersection needs at least one factor")
        super().__init__(parts[0].system)
        for d in parts[1:]:
            if (
                d.system.shifts != parts[0].system.shifts
                or d.system.lattice != parts[0].system.lattice
            ):
                raise DomainError("intersection factors must share one shift system")
        self.parts = tuple(parts)
        self.witness = None if witness is None else self.lattice.normalize(witness)
        if self.witness is None:
            for d in self.parts:
                try:
                    for s in d.seed_members():
                        if self.contains(s):
                            self.witness = s
                            break
                except NotEnumerableError:
                    continue
                if self.witness is not None:
                    break
        if self.witness is not None and not self.contains(self.witness):
            raise DomainError("witness %r is not in the intersection" % (self.witness,))

    def contains(self, p: Sequence[int]) -> bool:
        return all(d.contains(p) for d in self.parts)

    def _halfspace_criterion(self) -> bool:
        if not all(isinstance(d, HalfSpace) for d in self.parts):
            return False
        frees = [self.lattice.free_part(v) for v in self.system.shifts]
        each_weak = all(
            sum(a * b for a, b in zip(d.functional, f)) <= 0
            for d in self.parts
            for f in frees
        )
        total = [sum(d.functional[i] for d in self.parts) for i in range(self.lattice.rank)]
        sum_strict = all(sum(a * b for a, b in zip(total, f)) <= -1 for f in frees)
        return each_weak and sum_strict

    def structurally_regular(self) -> bool:
        if all(d.structurally_regular() for d in self.parts) and self.witness is not None:
            return True
        return self._halfspace_criterion()

    def regularity_argument(self) -> str:
        if all(d.structurally_regular() for d in self.parts) and self.witness is not None:
            return (
                "nonempty intersection of structurally regular domains: closure "
                "and finite cones pass to subsets"
            )
        if self._halfspace_criterion():
            return (
                "half-space intersection: each functional is nonincreasing along "
                "every shift (future closure) and their sum strictly decreases "
                "(past cones are weight-bounded, hence finite)"
            )
        return "no structural argument for this intersection; sample with validate_regular"

    def seed_members(self) -> List[Point]:
        raise NotEnumerableError(
            "intersections have no canonical seed description; use box windows"
        )

    def describe(self) -> dict:
        return {"kind": "intersection", "parts": [d.describe() for d in self.parts]}


def half_space_intersection(
    system: ShiftSystem, constraints: Sequence[Tuple[Sequence[int], int]]
) -> Domain:
    """Convenience: ``{h : u_k . free(h) >= c_k for all k}``."""
    parts = [HalfSpace(system, u, c) for u, c in constraints]
    return parts[0] if len(parts) == 1 else Intersection(parts)


class MutatedDomain(Domain):
    """A base domain with a sequence of minimal points removed."""

    def __init__(self, base: Domain, removed: Sequence[Sequence[int]], _validate: bool = True):
        super().__init__(base.system)
        if isinstance(base, MutatedDomain):
            removed = list(base.removed) + list(removed)
            base = base.base
        self.base = base
        self.removed: Tuple[Point, ...] = tuple(self.lattice.normalize(r) for r in removed)
        if len(set(self.removed)) != len(self.removed):
            raise DomainError("duplicate removed points")
        if _validate:
            self._validate_minimality()

    def _validate_minimality(self):
        stage_removed: set = set()

        class _Stage(Domain):
            def __init__(inner, outer_base, removed_set):
                super().__init__(outer_base.system)
                inner._base = outer_base
                inner._removed = removed_set

            def contains(inner, p):
                p = inner.lattice.normalize(p)
                return p not in inner._removed and inner._base.contains(p)

        stage = _Stage(self.base, stage_removed)
        for r in self.removed:
            if not stage.contains(r):
                raise DomainError("cannot remove %r: not in the current domain" % (r,))
            if not stage.is_minimal(r):
                raise DomainError(
                    "cannot remove %r: not minimal (past cone %r)" % (r, stage.past_cone(r))
                )
            stage_removed.add(r)

    def contains(self, p: Sequence[int]) -> bool:
        p = self.lattice.normalize(p)
        return p not in self.removed and self.base.contains(p)

    def structurally_regular(self) -> bool:
        return self.base.structurally_regular()

    def regularity_argument(self) -> str:
        return (
            "mutation of a regular domain: removing a minimal point keeps past "
            "cones finite (they only shrink) and cannot break future closure "
            "(nothing in the remaining domain lies below the removed point); "
            "base argument: " + self.base.regularity_argument()
        )

    def seed_members(self) -> List[Point]:
        lat = self.lattice
        seeds = set(self.base.seed_members())
        for r in self.removed:
            for v in self.system.shifts:
                seeds.add(lat.sub(r, v))
        return sorted(s for s in seeds if self.contains(s))

    def describe(self) -> dict:
        return {
            "kind": "mutated",
            "base": self.base.describe(),
            "removed": [list(r) for r in self.removed],
        }


def mutate(domain: Domain, point: Sequence[int]) -> MutatedDomain:
    """Remove one minimal point (validated) from the domain."""
    return MutatedDomain(domain, [point])


class TranslatedDomain(Domain):
    def __init__(self, base: Domain, offset: Sequence[int]):
        super().__init__(base.system)
        self.base = base
        self.offset = self.lattice.normalize(offset)

    def contains(self, p: Sequence[int]) -> bool:
        return self.base.contains(self.lattice.sub(p, self.offset))

    def structurally_regular(self) -> bool:
        return self.base.structurally_regular()

    def regularity_argument(self) -> str:
        return "translate of: " + self.base.regularity_argument()

    def seed_members(self) -> List[Point]:
        lat = self.lattice
        return sorted(lat.add(s, self.offset) for s in self.base.seed_members())

    def describe(self) -> dict:
        return {"kind": "translated", "offset": list(self.offset), "base": self.base.describe()}


class LiftedDomain(Domain):
    """Preimage ``{h : phi(h) in base}`` of a domain downstairs.

    ``phi`` must send the system's shifts onto the base system's monoid
    generators (the reduction construction guarantees this); then future
    closure and cone finiteness lift, and the minimal points upstairs sit
    in the (finite, when the kernel is finite) preimages of the minimal
    points downstairs.
    """

    def __init__(
        self,
        system: ShiftSystem,
        base: Domain,
        phi: Callable[[Point], Point],
        kernel_elements: Optional[List[Point]] = None,
        section: Optional[Callable[[Point], Optional[Point]]] = None,
        label: str = "lifted",
    ):
        super().__init__(system)
        self.base = base
        self.phi = phi
        self.kernel_elements = kernel_elements
        self.section = section
        self.label = label

    def contains(self, p: Sequence[int]) -> bool:
        return self.base.contains(self.phi(self.lattice.normalize(p)))

    def structurally_regular(self) -> bool:
        return self.base.structurally_regular()

    def regularity_argument(self) -> str:
        return (
            "preimage of a regular domain under a shift-compatible group map; "
            "base argument: " + self.base.regularity_argument()
        )

    def seed_members(self) -> List[Point]:
        if self.kernel_elements is None or self.section is None:
            raise NotEnumerableError(
                "lifted domain with infinite kernel: use box windows instead"
            )
        lat = self.lattice
        out = set()
        for g in self.base.seed_members():
            x0 = self.section(g)
            if x0 is None:
                continue
            for k in self.kernel_elements:
                cand = lat.add(x0, k)
                if self.contains(cand):
                    out.add(cand)
        return sorted(out)

    def describe(self) -> dict:
        return {"kind": "lifted", "label": self.label, "base": self.base.describe()}


class OracleDomain(Domain):
    """Membership from a user predicate; nothing is structural."""

    def __init__(
        self,
        system: ShiftSystem,
        predicate: Callable[[Point], bool],
        seeds: Optional[Sequence[Sequence[int]]] = None,
        label: str = "oracle",
    ):
        super().__init__(system)
        self.predicate = predicate
        self._seeds = (
            None if seeds is None else [self.lattice.normalize(s) for s in seeds]
        )
        self.label = label

    def contains(self, p: Sequence[int]) -> bool:
        return bool(self.predicate(self.lattice.normalize(p)))

    def seed_members(self) -> List[Point]:
        if self._seeds is None:
            raise NotEnumerableError("oracle domain without seeds cannot be enumerated")
        return list(self._seeds)

    def describe(self) -> dict:
        return {"kind": "oracle", "label": self.label}


# ---------------------------------------------------------------------------
# Regularity validation


@dataclass
class RegularityReport:
    """Outcome of :func:`validate_regular`.

    ``structural`` — the domain type carries a by-construction argument.
    ``checked`` — points actually sampled for the two conditions.
    ``violations`` — list of (point, reason) pairs; empty means the sample
    found nothing wrong (which certifies nothing for oracle domains).
    """

    structural: bool
    argument: str
    checked: int = 0
    violations: List[Tuple[Point, str]] = None

    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "structural": self.structural,
            "argument": self.argument,
            "checked": self.checked,
            "violations": [[list(p), r] for p, r in (self.violations or [])],
        }


def validate_regular(
    domain: Domain,
    window_points: Optional[Iterable[Point]] = None,
    cone_cap: int = 5000,
) -> RegularityReport:
    """Check regularity: structural when possible, else sampled.

    For sampled checks: one-step future closure (``h - v_i`` stays in the
    domain) and capped past-cone searches on every window point.
    """
    violations: List[Tuple[Point, str]] = []
    structural = domain.structurally_regular()
    checked = 0
    if window_points is not None:
        lat = domain.lattice
        for h in window_points:
            h = lat.normalize(h)
            if not domain.contains(h):
                continue
            checked += 1
            for v in domain.system.shifts:
                fut = lat.sub(h, v)
                if not domain.contains(fut):
                    violations.append((h, "future step %r leaves the domain" % (fut,)))
            try:
                domain.past_cone(h, cap=cone_cap)
            except DomainError as e:
                violations.append((h, str(e)))
    return RegularityReport(
        structural=structural,
        argument=domain.regularity_argument(),
        checked=checked,
        violations=violations,
    )


def origin_future_cone(system: ShiftSystem) -> FutureConeUnion:
    """Future cones of the origin, one seed per torsion fiber.

    For systems whose monoid spans the nonpositive coordinate cone (all
    the worked square-lattice examples) this is exactly the coordinate
    quadrant; in general it is still a structurally regular corner domain.
    """
    lat = system.lattice
    return FutureConeUnion(system, lat.points_with_free((0,) * lat.rank))


def translation_embedding(
    domain: Domain, points: Iterable[Point], max_shift: int = 10_000
) -> int:
    """The smallest ``l >= 0`` with every point inside ``H + l*v_N``.

    Translating by the minimum shift only grows the domain (``g - v_N``
    lies in the future of ``g``), so the predicate is monotone in ``l``
    and a linear search finds the threshold exactly.
    """
    lat = domain.lattice
    vn = domain.system.shifts[-1]
    pts = [lat.normalize(p) for p in points]
    missing = [p for p in pts]
    for ell in range(max_shift + 1):
        off = lat.scale(vn, ell)
        missing = [p for p in missing if not domain.contains(lat.sub(p, off))]
        if not missing:
            return ell
    raise DomainError(
        "no translate by up to %d minimum shifts covers %r" % (max_shift, missing[:3])
    )
