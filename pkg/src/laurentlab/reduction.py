"""Reductions: surjective lattice maps that push an equation to a smaller
lattice and pull domains back.

A reduction is a group homomorphism from the equation's lattice onto a
target lattice, given by an integer matrix on the free part plus an image
point for each torsion generator.  Pushing forward an equation replaces
every shift by its image; shifts with coincident images merge into one
argument slot (permitted, but flagged — merging can break irreducibility
of the defining polynomial).  Pulling back a regular domain along the map
gives a regular domain upstream, which is what makes the construction
useful: campaigns can run on either side and numeric evaluations commute
with the map on fiber-constant data.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .domains import Domain, LiftedDomain
from .equations import LatticeEquation
from .evolve import Evolution, SingularEvaluation
from .factor import certify_irreducible, gcd_canonical
from .intlinalg import kernel_basis, mat_vec, snf, cokernel_trivial
from .lattice import LatticeSpec, Point, ShiftSystem, ShiftSystemError
from .poly import C_ONE, LaurentPoly, VarId
from .textform import format_poly


class ReductionError(ValueError):
    """The map is not a valid reduction for the given equation."""


@dataclass(frozen=True)
class ReductionMap:
    """A homomorphism source -> target.

    ``matrix`` has one row per target coordinate (free then torsion) and
    one column per *free* source coordinate; ``torsion_images`` lists the
    target image of each source torsion generator, in order.
    """

    source: LatticeSpec
    target: LatticeSpec
    matrix: Tuple[Tuple[int, ...], ...]
    torsion_images: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        rows = [tuple(int(x) for x in row) for row in self.matrix]
        object.__setattr__(self, "matrix", tuple(rows))
        imgs = [tuple(int(x) for x in img) for img in self.torsion_images]
        object.__setattr__(self, "torsion_images", tuple(imgs))
        dim = self.target.dimension
        if len(self.matrix) != dim:
            raise ReductionError(
                "matrix has %d rows but the target has %d coordinates"
                % (len(self.matrix), dim)
            )
        for row in self.matrix:
            if len(row) != self.source.rank:
                raise ReductionError(
                    "matrix row %r does not match the source rank %d"
                    % (row, self.source.rank)
                )
        if len(self.torsion_images) != len(self.source.torsion):
            raise ReductionError(
                "expected %d torsion images, got %d"
                % (len(self.source.torsion), len(self.torsion_images))
            )
        for img in self.torsion_images:
            if len(img) != dim:
                raise ReductionError("torsion image %r has the wrong dimension" % (img,))

    def apply(self, p: Sequence[int]) -> Point:
        q = self.source.normalize(p)
        free = q[: self.source.rank]
        acc = list(mat_vec(self.matrix, free)) if self.matrix else [0] * self.target.dimension
        for residue, img in zip(q[self.source.rank :], self.torsion_images):
            for j, x in enumerate(img):
                acc[j] += residue * x
        return self.target.normalize(acc)

    def well_defined(self) -> bool:
        """Each torsion generator of order a must map to an a-torsion point."""
        for order, img in zip(self.source.torsion, self.torsion_images):
            scaled = [order * x for x in img]
            if self.target.normalize(scaled) != self.target.zero:
                return False
        return True

    def surjective(self) -> bool:
        """Do the generator images span the target modulo its relations?"""
        dim = self.target.dimension
        cols: List[Tuple[int, ...]] = []
        for j in range(self.source.rank):
            cols.append(self.apply(tuple(1 if i == j else 0 for i in range(self.source.dimension))))
        for k in range(len(self.source.torsion)):
            g = [0] * self.source.dimension
            g[self.source.rank + k] = 1
            cols.append(self.apply(g))
        for k, order in enumerate(self.target.torsion):
            rel = [0] * dim
            rel[self.target.rank + k] = order
            cols.append(tuple(rel))
        rows = [tuple(col[i] for col in cols) for i in range(dim)]
        return cokernel_trivial(rows)

    def kernel_sample(self) -> Optional[List[Point]]:
        """All kernel elements when the kernel is finite, else None."""
        free_ker = kernel_basis(self.matrix) if self.matrix else [
            tuple(1 if i == j else 0 for i in range(self.source.rank))
            for j in range(self.source.rank)
        ]
        # a free-kernel vector may still be nonzero in the target through
        # normalization only when torsion rows exist; treat any nonzero
        # free kernel as infinite
        nontrivial = [v for v in free_ker if any(v)]
        if nontrivial:
            return None
        out = []
        for combo in itertools.product(*(range(a) for a in self.source.torsion)):
            p = self.source.normalize(tuple([0] * self.source.rank) + tuple(combo))
            if self.apply(p) == self.target.zero:
                out.append(p)
        if not out or self.source.torsion == ():
            out = [self.source.zero]
        return sorted(set(out))

    def section(self, g: Sequence[int]) -> Optional[Point]:
        """Some source point mapping to ``g``, or None."""
        t = self.target.normalize(g)
        ranges = [range(a) for a in self.source.torsion]
        for combo in itertools.product(*ranges) if ranges else [()]:
            torso = tuple(
                sum(r * img[j] for r, img in zip(combo, self.torsion_images))
                for j in range(self.target.dimension)
            )
            residual = self.target.sub(t, self.target.normalize(torso))
            # solve the free part exactly; torsion coordinates of the
            # residual must be reproducible by integer combinations too,
            # which solve_integer handles once relations are adjoined
            sol = self._solve_with_relations(residual)
            if sol is not None:
                cand = self.source.normalize(tuple(sol) + tuple(combo))
                if self.apply(cand) == t:
                    return cand
        return None

    def _solve_with_relations(self, t: Point) -> Optional[Tuple[int, ...]]:
        from .intlinalg import solve_integer

        dim = self.target.dimension
        cols = [tuple(row) for row in zip(*self.matrix)] if self.source.rank else []
        for k, order in enumerate(self.target.torsion):
            rel = [0] * dim
            rel[self.target.rank + k] = order
            cols.append(tuple(rel))
        if not cols:
            return tuple() if all(x == 0 for x in t) else None
        rows = [tuple(col[i] for col in cols) for i in range(dim)]
        sol = solve_integer(rows, t)
        if sol is None:
            return None
        return tuple(sol[: self.source.rank])

    def describe(self) -> dict:
        return {
            "matrix": [list(r) for r in self.matrix],
            "torsion_images": [list(i) for i in self.torsion_images],
            "source": {"rank": self.source.rank, "torsion": list(self.source.torsion)},
            "target": {"rank": self.target.rank, "torsion": list(self.target.torsion)},
        }


def check_reduction(rmap: ReductionMap, eq: LatticeEquation) -> dict:
    """Assumption report for pushing ``eq`` through ``rmap``.

    ``ok`` requires: a well-defined surjective map, no shift image zero,
    and image shifts that still admit a separating functional (so the
    reduced system has a designated minimum).  Coincident images are
    permitted and listed under ``merges``.
    """
    report: dict = {"map": rmap.describe(), "equation": eq.name}
    problems: List[str] = []
    if eq.lattice != rmap.source:
        problems.append("equation lattice does not match the map's source")
        report["problems"] = problems
        report["ok"] = False
        return report
    report["well_defined"] = rmap.well_defined()
    if not report["well_defined"]:
        problems.append("torsion image not killed by its generator's order")
    report["surjective"] = rmap.surjective()
    if not report["surjective"]:
        problems.append("generator images do not span the target")
    images = [rmap.apply(v) for v in eq.system.shifts]
    report["shift_images"] = [list(p) for p in images]
    if any(p == rmap.target.zero for p in images):
        problems.append("a shift maps to zero (its argument would sit at the point itself)")
    merges: List[List[int]] = []
    seen: Dict[Point, List[int]] = {}
    for i, p in enumerate(images, start=1):
        seen.setdefault(p, []).append(i)
    for p, slots in seen.items():
        if len(slots) > 1:
            merges.append(slots)
    report["merges"] = sorted(merges)
    if not any(p == rmap.target.zero for p in images):
        try:
            reduced = _reduced_system(rmap, eq)
            report["reduced_shifts"] = [list(v) for v in reduced.shifts]
            if not reduced.check_minimum_shift():
                problems.append("the image of the minimum shift is no longer the minimum")
        except ShiftSystemError as e:
            problems.append("image shifts are invalid: %s" % e)
    report["problems"] = problems
    report["ok"] = not problems
    return report


def reduced_shift_system(rmap: ReductionMap, eq: LatticeEquation) -> ShiftSystem:
    """The target-side shift system (distinct shift images, minimum last)."""
    return _reduced_system(rmap, eq)


def _reduced_system(rmap: ReductionMap, eq: LatticeEquation) -> ShiftSystem:
    images = [rmap.apply(v) for v in eq.system.shifts]
    vmin = images[-1]
    ordered: List[Point] = []
    for p in images[:-1]:
        if p != vmin and p not in ordered:
            ordered.append(p)
    ordered.append(vmin)
    return ShiftSystem(rmap.target, ordered)


def reduce_equation(
    rmap: ReductionMap, eq: LatticeEquation, name: Optional[str] = None
) -> Tuple[LatticeEquation, dict]:
    """Push ``eq`` through ``rmap``; returns the reduced equation and a
    flags report (merged slots, reduced-numerator irreducibility).

    Raises :class:`ReductionError` when the check report has problems or
    the merged numerator degenerates (zero or a single term).
    """
    report = check_reduction(rmap, eq)
    if not report["ok"]:
        raise ReductionError("; ".join(report["problems"]))
    reduced_sys = _reduced_system(rmap, eq)
    images = [rmap.apply(v) for v in eq.system.shifts]
    slot_of = {p: j for j, p in enumerate(reduced_sys.shifts, start=1)}
    values = [LaurentPoly.var(VarId.placeholder(slot_of[p])) for p in images]
    num = eq.phi_num.compose(values)
    den = eq.phi_den.compose(values)
    if num.is_zero():
        raise ReductionError("merged terms cancel: the reduced numerator is zero")
    phi = num * den.invert()
    mins = {i: min(0, phi.min_exp(VarId.placeholder(i))) for i in range(1, len(reduced_sys.shifts) + 1)}
    new_den = LaurentPoly.monomial({VarId.placeholder(i): -e for i, e in mins.items() if e}, 1)
    new_num = phi * new_den
    if new_num.is_monomial():
        raise ReductionError("the reduced equation degenerates to a monomial rule")
    # the backward rule transports through the same slot merge (applying a
    # ring homomorphism to the round-trip identity preserves it) as long as
    # no non-minimum shift lands on the reduced minimum slot
    new_backward = None
    if eq.backward is not None:
        reduced_min = reduced_sys.shifts[-1]
        if all(p != reduced_min for p in images[:-1]):
            bw_lookup = {0: LaurentPoly.var(VarId.placeholder(0))}
            for i, p in enumerate(images[:-1], start=1):
                bw_lookup[i] = LaurentPoly.var(VarId.placeholder(slot_of[p]))
            new_backward = eq.backward.compose(bw_lookup)
    reduced = LatticeEquation(
        name=name or (eq.name + "_reduced"),
        lattice=rmap.target,
        system=reduced_sys,
        phi_num=new_num,
        phi_den=new_den,
        params=eq.params,
        params_coprime=eq.params_coprime,
        backward=new_backward,
        meta={"reduced_from": eq.name},
    )
    verdict = certify_irreducible(new_num, 12, 16)
    flags = {
        "merges": report["merges"],
        "shift_images": report["shift_images"],
        "numerator_status": verdict.status,
    }
    if verdict.status == "Reducible":
        flags["numerator_factors"] = [
            format_poly(reduced._point_form(gcd_canonical(f))) for f in verdict.factors
        ]
    # irreducibility is judged up to Laurent units; a nontrivial monomial
    # factor picked up by term merging is still worth flagging, since it is
    # exactly how reductions break polynomial-sense irreducibility
    mono = LaurentPoly({new_num.monomial_part(): C_ONE})
    if not mono.is_one():
        flags["numerator_monomial"] = format_poly(reduced._point_form(mono))
    return reduced, flags


def lift_domain(rmap: ReductionMap, eq: LatticeEquation, base: Domain) -> LiftedDomain:
    """The preimage of a regular target domain, as a domain for ``eq``."""
    if base.lattice != rmap.target:
        raise ReductionError("base domain lives on the wrong lattice")
    return LiftedDomain(
        system=eq.system,
        base=base,
        phi=rmap.apply,
        kernel_elements=rmap.kernel_sample(),
        section=rmap.section,
        label="lift of " + str([list(r) for r in rmap.matrix]),
    )


# ---------------------------------------------------------------------------
# Numeric commutation oracle


def _draw(rng: random.Random) -> Fraction:
    n = rng.randint(1, 9)
    return Fraction(n if rng.random() < 0.5 else -n)


def commutation_oracle(
    rmap: ReductionMap,
    eq: LatticeEquation,
    reduced: LatticeEquation,
    base: Domain,
    targets: Sequence[Sequence[int]],
    seeds: Sequence[int] = (0, 1, 2),
    max_redraws: int = 8,
) -> dict:
    """Exact numeric check that evolution commutes with the reduction.

    For each seed: draw nonzero rationals on the reduced initial boundary,
    lift them as fiber-constant data (a source boundary point takes the
    value at its image), and compare the source evaluation at a lifted
    point with the reduced evaluation at the target, as exact rationals.
    Singular draws (a zero denominator on either side) are redrawn a
    bounded number of times and counted.
    """
    lifted = lift_domain(rmap, eq, base)
    evo_src = Evolution(eq, lifted)
    evo_red = Evolution(reduced, base)
    results = []
    redraws = 0
    for t in targets:
        t = rmap.target.normalize(t)
        if not base.contains(t):
            raise ReductionError("target point %r is outside the base domain" % (t,))
        h = rmap.section(t)
        if h is None:
            raise ReductionError("no source point maps to %r" % (t,))
        for seed in seeds:
            attempt = 0
            while True:
                rng = random.Random("commute:%d:%d:%r" % (seed, attempt, tuple(t)))
                gvals: Dict[Point, Fraction] = {}
                for q in sorted(evo_red.initial_points([t])):
                    gvals[q] = _draw(rng)
                fvals: Dict[Point, Fraction] = {}
                for p in sorted(evo_src.initial_points([h])):
                    fvals[p] = gvals.setdefault(rmap.apply(p), _draw(rng))
                pvals = {s: _draw(rng) for s in eq.params}
                try:
                    lhs = evo_src.numeric_iterate(h, fvals, pvals)
                    rhs = evo_red.numeric_iterate(t, gvals, pvals)
                    results.append(
                        {
                            "target": list(t),
                            "lifted": list(h),
                            "seed": seed,
                            "match": lhs == rhs,
                        }
                    )
                    break
                except (SingularEvaluation, ZeroDivisionError):
                    attempt += 1
                    redraws += 1
                    if attempt > max_redraws:
                        results.append(
                            {
                                "target": list(t),
                                "lifted": list(h),
                                "seed": seed,
                                "match": False,
                                "singular": True,
                            }
                        )
                        break
    ok = all(r["match"] for r in results)
    return {"checks": results, "redraws": redraws, "ok": ok}
