"""Verification campaigns over finite windows of a domain.

Four checks, each producing a JSON-able report section:

- ``laurent``      — every window iterate is an exact Laurent polynomial;
  a failure carries the witness (point, offending divisor, remainder).
- ``units``        — unit iterates are compared against initial-boundary
  membership.  Discrepancies are *reported, never failed*: off-boundary
  units are the expected signature of broken coprimeness (periodic
  fixtures), not a verification error.
- ``coprime``      — pairwise GCDs over unordered window pairs; any
  non-unit gcd is reported in canonical form.
- ``irreducible``  — one-sided certificates per point; ``Unknown`` is kept
  apart from ``Reducible`` (a certification gap is not a counterexample).

Windows resolve to finite sorted point lists (explicit points, a depth
bound, or a coordinate box restricted to the interior ``H \\ H0``), with
size caps because the pair stage is quadratic.

Determinism: results are pure functions of (equation, domain, point,
settings); parallel runs chunk the sorted point list, run the same pure
computation per chunk in worker processes, and merge by point order, so
reports are byte-identical for every ``--jobs`` value.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .domains import Domain, DomainError
from .equations import LatticeEquation
from .evolve import Evolution, NonLaurentError
from .factor import certify_irreducible, gcd_canonical, poly_gcd
from .lattice import Point
from .poly import LaurentPoly
from .textform import format_poly

MAX_D_CAP = 30
POINT_CAP = 200


class WindowError(ValueError):
    """Malformed or oversized window specification."""


@dataclass
class Window:
    """A finite verification window: exactly one selector must be set.

    ``points``: explicit lattice points (must lie in the domain).
    ``max_d``: all points with past-cone size at most the bound.
    ``box``: free-coordinate box ``lo..hi`` intersected with the domain's
    *interior* (the initial boundary is excluded — boundary iterates are
    bare variables and carry no information for the box use case).
    ``allow_large`` lifts the size caps (depth 30 / 200 points).
    """

    points: Optional[Sequence[Sequence[int]]] = None
    max_d: Optional[int] = None
    box: Optional[Tuple[Sequence[int], Sequence[int]]] = None
    allow_large: bool = False

    def describe(self) -> dict:
        if self.points is not None:
            return {"points": [list(p) for p in self.points]}
        if self.max_d is not None:
            return {"max_d": self.max_d}
        lo, hi = self.box
        return {"box": [list(lo), list(hi)]}

    def resolve(self, domain: Domain) -> List[Point]:
        picked = [x for x in (self.points, self.max_d, self.box) if x is not None]
        if len(picked) != 1:
            raise WindowError("window needs exactly one of points=, max_d=, box=")
        lat = domain.lattice
        if self.points is not None:
            out = []
            for p in self.points:
                q = lat.normalize(p)
                if not domain.contains(q):
                    raise WindowError("window point %r is not in the domain" % (q,))
                out.append(q)
            pts = sorted(set(out))
        elif self.max_d is not None:
            if self.max_d > MAX_D_CAP and not self.allow_large:
                raise WindowError(
                    "max_d %d exceeds the cap %d (set allow_large to override)"
                    % (self.max_d, MAX_D_CAP)
                )
            pts = [p for p, _ in domain.enumerate_by_depth(self.max_d)]
        else:
            lo, hi = self.box
            pts = [p for p in domain.enumerate_box(lo, hi) if domain.is_interior(p)]
        if len(pts) > POINT_CAP and not self.allow_large:
            raise WindowError(
                "window resolved to %d points, over the cap %d (set allow_large "
                "to override)" % (len(pts), POINT_CAP)
            )
        return pts


# ---------------------------------------------------------------------------
# Property sections (single-process kernels)


def _cascade_of(evo: Evolution):
    """A factored-cascade engine for the evolution, built once per
    Evolution instance (None when the rule shape is unsupported)."""
    memo = getattr(evo, "_cascade_memo", None)
    if memo is None:
        from .factored import cascade_for

        memo = (cascade_for(evo.eq, evo.domain),)
        evo._cascade_memo = memo
    return memo[0]


def _laurent_entry(evo: Evolution, p: Point) -> dict:
    # fast path: a factored certificate avoids expanding the iterate; the
    # emitted entry is identical either way, so parallel chunking and the
    # fallback expansion stay byte-compatible
    cas = _cascade_of(evo)
    if cas is not None and cas.laurent_certificate(p) is not None:
        return {"point": list(p), "ok": True}
    try:
        evo.iterate(p)
        return {"point": list(p), "ok": True}
    except NonLaurentError as e:
        return {
            "point": list(p),
            "ok": False,
            "witness": {
                "at": list(e.point),
                "divisor_point": list(e.divisor_point),
                "divisor": format_poly(e.divisor),
                "detail": e.detail,
            },
        }


def verify_laurent(evo: Evolution, points: Sequence[Point], jobs: int = 1) -> dict:
    entries = _map_points(evo, points, "laurent", jobs)
    failures = [e for e in entries if not e["ok"]]
    return {
        "property": "laurent",
        "checked": len(entries),
        "points": entries,
        "failures": len(failures),
        "pass": not failures,
    }


def _units_entry(evo: Evolution, p: Point) -> dict:
    boundary = evo.domain.on_initial_boundary(p)
    unit = evo.iterate(p).is_unit()
    return {"point": list(p), "boundary": boundary, "unit": unit, "match": boundary == unit}


def classify_units(evo: Evolution, points: Sequence[Point], jobs: int = 1) -> dict:
    entries = _map_points(evo, points, "units", jobs)
    discrepancies = [e["point"] for e in entries if not e["match"]]
    return {
        "property": "units",
        "checked": len(entries),
        "points": entries,
        "discrepancies": discrepancies,
        # discrepancies are reported, not failed: off-boundary units are a
        # finding about the system (broken coprimeness), not a check error
        "pass": True,
    }


def verify_coprime(evo: Evolution, points: Sequence[Point], jobs: int = 1) -> dict:
    pairs = list(itertools.combinations(sorted(set(points)), 2))
    entries = _map_pairs(evo, pairs, jobs)
    bad = [e for e in entries if e is not None]
    return {
        "property": "coprime",
        "pairs_checked": len(pairs),
        "noncoprime": bad,
        "pass": not bad,
    }


def _coprime_entry(evo: Evolution, pair: Tuple[Point, Point]) -> Optional[dict]:
    a, b = pair
    g = poly_gcd(evo.iterate(a), evo.iterate(b))
    if g.is_unit():
        return None
    return {"points": [list(a), list(b)], "gcd": format_poly(g)}


def _irreducible_entry(evo: Evolution, p: Point, trials: int, degree_cap: int) -> dict:
    verdict = certify_irreducible(evo.iterate(p), trials, degree_cap)
    entry: dict = {"point": list(p), "status": verdict.status}
    if verdict.status == "Reducible":
        entry["factors"] = [format_poly(gcd_canonical(f)) for f in verdict.factors]
    elif verdict.status == "Irreducible" and verdict.certificate:
        entry["certificate"] = verdict.certificate
    if verdict.detail:
        entry["detail"] = verdict.detail
    return entry


def verify_irreducible(
    evo: Evolution,
    points: Sequence[Point],
    trials: int = 20,
    degree_cap: int = 12,
    jobs: int = 1,
) -> dict:
    entries = _map_points(evo, points, "irreducible", jobs, trials=trials, degree_cap=degree_cap)
    counts: Dict[str, int] = {}
    for e in entries:
        counts[e["status"]] = counts.get(e["status"], 0) + 1
    reducible = counts.get("Reducible", 0)
    unknown = counts.get("Unknown", 0)
    return {
        "property": "irreducible",
        "checked": len(entries),
        "points": entries,
        "counts": dict(sorted(counts.items())),
        "pass": reducible == 0,
        "unknown": unknown,
    }


# ---------------------------------------------------------------------------
# Parallel plumbing: chunk the sorted tasks, recompute per worker, merge.
# Entries are pure functions of (equation, domain, task, settings), so the
# merged output is independent of the chunking.


def _entry_for(evo: Evolution, kind: str, task, settings: dict):
    if kind == "laurent":
        return _laurent_entry(evo, task)
    if kind == "units":
        return _units_entry(evo, task)
    if kind == "coprime":
        return _coprime_entry(evo, task)
    if kind == "irreducible":
        return _irreducible_entry(evo, task, settings["trials"], settings["degree_cap"])
    raise ValueError(kind)


def _run_chunk(args):
    eq, domain, kind, chunk, settings = args
    evo = Evolution(eq, domain)
    return [_entry_for(evo, kind, task, settings) for task in chunk]


def _parallel_entries(evo: Evolution, kind: str, tasks: list, jobs: int, settings: dict):
    if jobs <= 1 or len(tasks) < 2:
        return [_entry_for(evo, kind, t, settings) for t in tasks]
    import multiprocessing as mp
    import pickle

    try:
        payload = (evo.eq, evo.domain)
        pickle.dumps(payload)
    except Exception:
        # unpicklable domain (oracle predicates etc.): sequential fallback,
        # same results by purity
        return [_entry_for(evo, kind, t, settings) for t in tasks]
    n = min(jobs, len(tasks))
    chunks = [tasks[i::n] for i in range(n)]
    argses = [(evo.eq, evo.domain, kind, chunk, settings) for chunk in chunks]
    with mp.get_context("fork").Pool(n) as pool:
        results = pool.map(_run_chunk, argses)
    merged = {}
    for chunk, out in zip(chunks, results):
        for task, entry in zip(chunk, out):
            merged[task] = entry
    return [merged[t] for t in tasks]


def _map_points(evo: Evolution, points: Sequence[Point], kind: str, jobs: int, **settings):
    tasks = sorted(set(evo.lattice.normalize(p) for p in points))
    return _parallel_entries(evo, kind, tasks, jobs, settings)


def _map_pairs(evo: Evolution, pairs, jobs: int):
    return _parallel_entries(evo, "coprime", list(pairs), jobs, {})


# ---------------------------------------------------------------------------
# Campaigns

ALL_PROPERTIES = ("laurent", "units", "coprime", "irreducible")


def run_campaign(
    eq: LatticeEquation,
    domain: Domain,
    window: Window,
    properties: Sequence[str] = ALL_PROPERTIES,
    *,
    trials: int = 20,
    degree_cap: int = 12,
    jobs: int = 1,
) -> dict:
    """Resolve the window and run the requested property sections.

    The overall ``pass`` is the conjunction of the requested sections'
    passes; ``unknown_present`` surfaces inconclusive irreducibility so
    callers can apply their own strictness policy.
    """
    for prop in properties:
        if prop not in ALL_PROPERTIES:
            raise WindowError("unknown property %r (known: %s)" % (prop, ", ".join(ALL_PROPERTIES)))
    points = window.resolve(domain)
    evo = Evolution(eq, domain)
    results: dict = {}
    laurent_ok = True
    if "laurent" in properties:
        results["laurent"] = verify_laurent(evo, points, jobs)
        laurent_ok = results["laurent"]["pass"]
    # the other properties presuppose Laurent iterates; restrict to points
    # that evolve cleanly (NonLaurent points are outside their domain)
    good_points = points
    if not laurent_ok:
        good = set()
        for e in results["laurent"]["points"]:
            if e["ok"]:
                good.add(tuple(e["point"]))
        good_points = [p for p in points if p in good]
    if "units" in properties:
        results["units"] = classify_units(evo, good_points, jobs)
    if "coprime" in properties:
        results["coprime"] = verify_coprime(evo, good_points, jobs)
    if "irreducible" in properties:
        results["irreducible"] = verify_irreducible(evo, good_points, trials, degree_cap, jobs)
    report = {
        "equation": eq.describe(),
        "domain": domain.describe(),
        "window": window.describe(),
        "points": [list(p) for p in points],
        "properties": list(properties),
        "results": results,
        "pass": all(results[p]["pass"] for p in results),
        "unknown_present": bool(results.get("irreducible", {}).get("unknown", 0)),
    }
    return report


def overall_verdicts(report: dict) -> dict:
    """The per-property verdict summary used for cross-domain agreement."""
    out = {}
    for prop, section in report["results"].items():
        if prop == "irreducible":
            if not section["pass"]:
                out[prop] = "fail"
            elif section["unknown"]:
                out[prop] = "pass-with-unknowns"
            else:
                out[prop] = "pass"
        elif prop == "units":
            out[prop] = "clean" if not section["discrepancies"] else "discrepancies"
        else:
            out[prop] = "pass" if section["pass"] else "fail"
    return dict(sorted(out.items()))


def cross_domain_check(
    eq: LatticeEquation,
    domain_windows: Sequence[Tuple[Domain, Window]],
    properties: Sequence[str] = ("laurent", "coprime", "irreducible"),
    *,
    trials: int = 20,
    degree_cap: int = 12,
    jobs: int = 1,
) -> dict:
    """Run matched campaigns over several domains and compare verdicts.

    This is the finite-instance consistency check of domain independence:
    the three properties' overall verdicts must agree across light-cone
    regular domains (an instance check, not a proof).
    """
    campaigns = []
    verdicts = []
    for domain, window in domain_windows:
        rep = run_campaign(
            eq, domain, window, properties, trials=trials, degree_cap=degree_cap, jobs=jobs
        )
        campaigns.append(rep)
        verdicts.append(overall_verdicts(rep))
    identical = all(v == verdicts[0] for v in verdicts[1:])
    return {
        "equation": eq.describe(),
        "domains": [d.describe() for d, _ in domain_windows],
        "verdicts": verdicts,
        "identical": identical,
        "campaigns": campaigns,
    }


# ---------------------------------------------------------------------------
# Serialization


def report_json(report: dict) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def report_text(report: dict) -> str:
    """Terse human-readable summary, one line per section."""
    lines = []
    eq = report.get("equation", {})
    lines.append("equation: %s" % eq.get("name", "?"))
    if "domain" in report:
        lines.append("domain: %s" % json.dumps(report["domain"], sort_keys=True))
    if "window" in report:
        lines.append(
            "window: %s (%d points)"
            % (json.dumps(report["window"], sort_keys=True), len(report.get("points", ())))
        )
    for prop, section in report.get("results", {}).items():
        if prop == "laurent":
            lines.append(
                "laurent: %s (%d checked, %d failures)"
                % ("pass" if section["pass"] else "FAIL", section["checked"], section["failures"])
            )
        elif prop == "units":
            d = section["discrepancies"]
            lines.append(
                "units: %d checked, %d discrepancies%s"
                % (section["checked"], len(d), (" at " + json.dumps(d) if d else ""))
            )
        elif prop == "coprime":
            lines.append(
                "coprime: %s (%d pairs, %d non-coprime)"
                % (
                    "pass" if section["pass"] else "FAIL",
                    section["pairs_checked"],
                    len(section["noncoprime"]),
                )
            )
        elif prop == "irreducible":
            lines.append(
                "irreducible: %s (counts %s)"
                % (
                    "pass" if section["pass"] else "FAIL",
                    json.dumps(section["counts"], sort_keys=True),
                )
            )
    if "verdicts" in report:
        lines.append("cross-domain verdicts identical: %s" % report["identical"])
    if "pass" in report:
        lines.append("overall: %s" % ("pass" if report["pass"] else "FAIL"))
    return "\n".join(lines) + "\n"
