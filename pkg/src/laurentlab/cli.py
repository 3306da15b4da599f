"""Command-line front end.

Subcommands::

    validate  — assumption report for an equation file
    iterate   — print symbolic iterates at requested points
    verify    — property campaign over a window (laurent/units/coprime/irreducible)
    mutate    — remove a minimal point; report boundary/depth changes on a box
    reduce    — push an equation through a reduction map; emit + verify it
    oracle    — numeric/closed-form consistency oracles
    diagram   — ASCII or SVG picture of a domain over a box

Exit codes: 0 = requested checks pass; 2 = a property failed; 3 =
inconclusive (Unknown) results under ``--strict`` (or without
``--allow-unknown`` for verify); 4 = configuration or assumption error.

Reports are canonical JSON (sorted keys) and are byte-identical for a
fixed config and seed, regardless of ``--jobs`` or repetition; elapsed
times go to stderr, never into reports.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import List, Optional, Sequence, Tuple

try:
    import tomllib as _toml
except ImportError:  # Python < 3.11
    import tomli as _toml

from .domains import Domain, DomainError, NotEnumerableError, mutate
from .equations import EquationError, equation_to_text, validate_equation
from .evolve import Evolution, NonLaurentError
from .lattice import ShiftSystemError
from .reduction import ReductionError, check_reduction, reduce_equation
from .runconfig import (
    ConfigError,
    RunConfig,
    load_config,
    load_equation_and_domain,
    parse_domain,
    parse_reduction_map,
    parse_window,
)
from .textform import format_poly
from .verify import (
    ALL_PROPERTIES,
    Window,
    WindowError,
    report_json,
    report_text,
    run_campaign,
)

EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 2
EXIT_UNKNOWN = 3
EXIT_CONFIG = 4


class CliError(Exception):
    """A configuration-level failure (exit code 4)."""


# ---------------------------------------------------------------------------
# Argument plumbing


def _parse_point(text: str) -> Tuple[int, ...]:
    s = text.strip().strip("()[]")
    if not s:
        raise CliError("empty point %r" % text)
    try:
        return tuple(int(x) for x in s.split(","))
    except ValueError:
        raise CliError("malformed point %r" % text) from None


def _parse_literal_arg(text: str, what: str) -> dict:
    """An inline literal: TOML table syntax ``{ k = v }`` or JSON."""
    s = text.strip()
    if s.startswith("{") and "=" in s and '"' not in s.split("=")[0]:
        try:
            return _toml.loads("%s = %s" % (what, s))[what]
        except _toml.TOMLDecodeError:
            pass
    try:
        return json.loads(s)
    except json.JSONDecodeError:
        pass
    try:
        return _toml.loads("%s = %s" % (what, s))[what]
    except _toml.TOMLDecodeError as e:
        raise CliError("cannot parse %s literal %r: %s" % (what, text, e)) from None


def _domain_literal(arg: Optional[str], embedded: Optional[dict]) -> Optional[dict]:
    """Resolve --domain: inline literal, or ``mutate@(p)`` layered on the
    equation's embedded domain."""
    if arg is None:
        return embedded
    s = arg.strip()
    if s.startswith("mutate@"):
        if embedded is None:
            raise CliError("mutate@ shorthand needs a domain in the equation file")
        return {"kind": "mutate", "base": embedded, "at": list(_parse_point(s[len("mutate@"):]))}
    return _parse_literal_arg(s, "domain")


def _window_from_args(args) -> Optional[Window]:
    if getattr(args, "max_d", None) is not None and getattr(args, "window", None):
        raise CliError("give either --max-d or --window, not both")
    if getattr(args, "max_d", None) is not None:
        return Window(max_d=args.max_d, allow_large=bool(getattr(args, "allow_large", False)))
    if getattr(args, "window", None):
        lit = _parse_literal_arg(args.window, "window")
        if getattr(args, "allow_large", False):
            lit = dict(lit)
            lit["allow_large"] = True
        return parse_window(lit)
    return None


def _load_context(args, need_domain: bool = True):
    """(equation, domain) from the equation file and --domain override."""
    if not args.equation:
        raise CliError("an equation file is required")
    eq, embedded = load_equation_and_domain(args.equation)
    literal = _domain_literal(getattr(args, "domain", None), embedded)
    if literal is None:
        if need_domain:
            raise CliError(
                "no domain: give --domain or embed a [domain] table in the equation file"
            )
        return eq, None
    return eq, parse_domain(literal, eq.system, eq)


def _emit(report: dict, out: Optional[str], text_summary: str) -> None:
    payload = report_json(report)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
        sys.stdout.write(text_summary)
    else:
        sys.stdout.write(payload)
        sys.stderr.write(text_summary)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_validate(args) -> int:
    eq, _ = _load_context(args, need_domain=False)
    rep = validate_equation(eq)
    _emit(rep, args.out, "validate %s: %s\n" % (eq.name, "ok" if rep["ok"] else "PROBLEMS"))
    if not rep["ok"]:
        return EXIT_CONFIG
    if rep["warnings"]:
        for w in rep["warnings"]:
            sys.stderr.write("warning: %s\n" % w)
        if args.strict:
            return EXIT_UNKNOWN
    return EXIT_OK


def cmd_iterate(args) -> int:
    eq, domain = _load_context(args)
    evo = Evolution(eq, domain)
    points = [_parse_point(p) for p in args.points]
    entries = []
    code = EXIT_OK
    for p in points:
        try:
            entries.append({"point": list(p), "value": format_poly(evo.iterate(p))})
        except NonLaurentError as e:
            entries.append(
                {
                    "point": list(p),
                    "error": "NonLaurent",
                    "witness": {
                        "at": list(e.point),
                        "divisor_point": list(e.divisor_point),
                        "divisor": format_poly(e.divisor),
                    },
                }
            )
            code = EXIT_PROPERTY_FAILURE
    rep = {"equation": eq.describe(), "domain": domain.describe(), "iterates": entries}
    lines = []
    for e in entries:
        if "value" in e:
            lines.append("f%s = %s" % (tuple(e["point"]), e["value"]))
        else:
            lines.append("f%s: NON-LAURENT at %s" % (tuple(e["point"]), e["witness"]["at"]))
    _emit(rep, args.out, "\n".join(lines) + "\n")
    return code


def cmd_verify(args) -> int:
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = RunConfig(equation=args.equation)
    if args.equation:
        cfg.equation = args.equation
    if not cfg.equation:
        raise CliError("an equation file is required (positional or via --config)")
    eq, embedded = load_equation_and_domain(cfg.equation, cfg.domain)
    literal = _domain_literal(args.domain, embedded)
    if literal is None:
        raise CliError("no domain: give --domain, config domain, or embed one")
    domain = parse_domain(literal, eq.system, eq)
    window = _window_from_args(args)
    if window is None:
        if cfg.window is None:
            raise CliError("no window: give --max-d/--window or a config window")
        window = parse_window(cfg.window)
    properties = tuple(
        s.strip() for s in (args.properties or ",".join(cfg.properties)).split(",") if s.strip()
    )
    trials = args.trials if args.trials is not None else cfg.trials
    degree_cap = args.degree_cap if args.degree_cap is not None else cfg.degree_cap
    jobs = args.jobs if args.jobs is not None else cfg.jobs
    t0 = time.time()
    report = run_campaign(
        eq, domain, window, properties, trials=trials, degree_cap=degree_cap, jobs=jobs
    )
    report["config"] = {
        "equation": cfg.equation,
        "properties": list(properties),
        "trials": trials,
        "degree_cap": degree_cap,
        "jobs": jobs,
        "seed": cfg.seed,
    }
    elapsed = time.time() - t0
    _emit(report, args.out or cfg.out, report_text(report))
    sys.stderr.write("elapsed: %.2fs\n" % elapsed)
    if not report["pass"]:
        return EXIT_PROPERTY_FAILURE
    if report["unknown_present"] and not args.allow_unknown:
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_mutate(args) -> int:
    eq, domain = _load_context(args)
    point = _parse_point(args.at)
    try:
        mutated = mutate(domain, point)
    except DomainError as e:
        sys.stderr.write("cannot mutate: %s\n" % e)
        return EXIT_CONFIG
    window = _window_from_args(args)
    entries = []
    if window is not None:
        # the box selector keeps interior points only; for the boundary
        # comparison we want every member, so resolve against membership
        if window.box is not None:
            lo, hi = window.box
            pts = domain.enumerate_box(lo, hi)
        else:
            pts = window.resolve(domain)
        for h in pts:
            entries.append(
                {
                    "point": list(h),
                    "in_before": domain.contains(h),
                    "in_after": mutated.contains(h),
                    "boundary_before": domain.on_initial_boundary(h),
                    "boundary_after": mutated.on_initial_boundary(h),
                    "d_before": domain.depth(h),
                    "d_after": mutated.depth(h),
                }
            )
    rep = {
        "equation": eq.describe(),
        "domain": domain.describe(),
        "mutated": mutated.describe(),
        "removed": [list(point)],
        "window": None if window is None else window.describe(),
        "points": entries,
    }
    _emit(rep, args.out, "mutated %s at %s (%d window points)\n"
          % (eq.name, tuple(point), len(entries)))
    return EXIT_OK


def cmd_reduce(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        map_literal = cfg.map
        if args.equation:
            cfg.equation = args.equation
    else:
        cfg = RunConfig(equation=args.equation)
        map_literal = None
    if args.map:
        map_literal = _parse_literal_arg(args.map, "map")
    if map_literal is None:
        raise CliError("no reduction map: give --map or a config map")
    if not cfg.equation:
        raise CliError("an equation file is required (positional or via --config)")
    eq, _ = load_equation_and_domain(cfg.equation, cfg.domain)
    rmap = parse_reduction_map(map_literal, eq.lattice)
    check = check_reduction(rmap, eq)
    if not check["ok"]:
        sys.stderr.write("invalid reduction: %s\n" % "; ".join(check["problems"]))
        return EXIT_CONFIG
    reduced, flags = reduce_equation(rmap, eq)
    emitted = equation_to_text(reduced)
    rep = {
        "source": eq.describe(),
        "map": {
            "matrix": [list(r) for r in rmap.matrix],
            "torsion_images": [list(t) for t in rmap.torsion_images],
        },
        "check": check,
        "reduced": reduced.describe(),
        "reduced_text": emitted,
        "flags": flags,
    }
    window = _window_from_args(args)
    if window is not None:
        target_literal = {"kind": "halfspace", "w": [1] * rmap.target.rank, "c": 0}
        tdomain = parse_domain(target_literal, reduced.system, reduced)
        campaign = run_campaign(reduced, tdomain, window, ("laurent",), jobs=args.jobs or 1)
        rep["target_verification"] = campaign
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(emitted)
        sys.stdout.write(report_json(rep))
    else:
        sys.stdout.write(report_json(rep))
    ok = rep.get("target_verification", {}).get("pass", True)
    return EXIT_OK if ok else EXIT_PROPERTY_FAILURE


def cmd_oracle(args) -> int:
    from . import dynamics

    if args.closed_form is not None:
        rep = dynamics.verify_monomial_formula(args.closed_form)
        _emit(rep, args.out, "closed-form check to n=%d: %s\n"
              % (args.closed_form, "pass" if rep["pass"] else "FAIL"))
        return EXIT_OK if rep["pass"] else EXIT_PROPERTY_FAILURE
    if args.lyness is not None:
        rep = dynamics.lyness_reduction_check(args.lyness)
        _emit(rep, args.out, "periodic-reduction identity to n=%d: %s\n"
              % (args.lyness, "pass" if rep["pass"] else "FAIL"))
        return EXIT_OK if rep["pass"] else EXIT_PROPERTY_FAILURE
    if args.substitution:
        rep = dynamics.substitution_step_check(seed=args.seed)
        _emit(rep, args.out, "substitution-vs-matrix: %s\n" % ("pass" if rep["pass"] else "FAIL"))
        return EXIT_OK if rep["pass"] else EXIT_PROPERTY_FAILURE
    eq, domain = _load_context(args)
    window = _window_from_args(args)
    if window is None:
        raise CliError("numeric consistency needs --max-d or --window")
    points = window.resolve(domain)
    rep = dynamics.numeric_consistency(eq, domain, points, seed=args.seed)
    _emit(rep, args.out, "numeric consistency (%d points, seed %d): %s\n"
          % (len(points), args.seed, "pass" if rep["pass"] else "FAIL"))
    return EXIT_OK if rep["pass"] else EXIT_PROPERTY_FAILURE


def _diagram_grid(domain: Domain, lo, hi, cone_of=None):
    lat = domain.lattice
    if lat.rank not in (1, 2):
        raise CliError("diagrams need a rank-1 or rank-2 lattice")
    cone = set()
    if cone_of is not None:
        cone = set(domain.past_cone(cone_of))
    rows = []
    if lat.rank == 1:
        xs = range(lo[0], hi[0] + 1)
        cells = []
        for x in xs:
            cells.append(_cell(domain, (x,), cone))
        rows.append(cells)
    else:
        for y in range(hi[1], lo[1] - 1, -1):
            cells = []
            for x in range(lo[0], hi[0] + 1):
                cells.append(_cell(domain, (x, y), cone))
            rows.append(cells)
    return rows


def _cell(domain: Domain, p, cone) -> str:
    # precedence: cone membership > boundary > interior > outside
    pt = domain.lattice.normalize(p)
    if not domain.contains(pt):
        return "."
    if pt in cone:
        return "#" if domain.on_initial_boundary(pt) else "*"
    if domain.on_initial_boundary(pt):
        return "O"
    return "+"


def cmd_diagram(args) -> int:
    eq, domain = _load_context(args)
    lo = _parse_point(args.box_lo)
    hi = _parse_point(args.box_hi)
    if len(lo) != eq.lattice.rank or len(hi) != eq.lattice.rank:
        raise CliError("box corners need one entry per free coordinate")
    if any(a > b for a, b in zip(lo, hi)):
        sys.stdout.write("(empty box)\n")
        return EXIT_OK
    cone_of = _parse_point(args.cone) if args.cone else None
    rows = _diagram_grid(domain, lo, hi, cone_of)
    legend = "legend: O boundary, + interior, . outside"
    if cone_of is not None:
        count = len(domain.past_cone(cone_of))
        legend += ", * past cone of %s (%d points, # = cone boundary)" % (tuple(cone_of), count)
    if args.svg:
        out = _render_svg(rows)
    else:
        out = "\n".join(" ".join(r) for r in rows) + "\n" + legend + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


_SVG_COLORS = {"O": "#222222", "+": "#bbbbbb", ".": "#ffffff", "*": "#d86a22", "#": "#a8321a"}


def _render_svg(rows: List[List[str]]) -> str:
    cell = 22
    h = len(rows) * cell
    w = len(rows[0]) * cell if rows else 0
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (w, h, w, h)
    ]
    for i, row in enumerate(rows):
        for j, ch in enumerate(row):
            parts.append(
                '<rect x="%d" y="%d" width="%d" height="%d" fill="%s" '
                'stroke="#888888" stroke-width="1"/>'
                % (j * cell, i * cell, cell, cell, _SVG_COLORS[ch])
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# Parser


def _add_common(p, with_domain=True):
    p.add_argument("equation", nargs="?", help="equation file (.eq)")
    if with_domain:
        p.add_argument("--domain", help="domain literal, file, or mutate@(p) shorthand")
    p.add_argument("--out", help="write the JSON report (or artifact) here")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="laurentlab",
        description="symbolic workbench for lattice equations with the Laurent property",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the structural assumptions of an equation")
    _add_common(p, with_domain=False)
    p.add_argument("--strict", action="store_true", help="Unknown certificates exit 3")

    p = sub.add_parser("iterate", help="print symbolic iterates")
    _add_common(p)
    p.add_argument("points", nargs="+", help="points like (3,2)")

    p = sub.add_parser("verify", help="run a property campaign over a window")
    _add_common(p)
    p.add_argument("--config", help="run-config file (TOML or JSON)")
    p.add_argument("--window", help="window literal, e.g. { max_d = 12 }")
    p.add_argument("--max-d", type=int, dest="max_d", help="depth-bound window")
    p.add_argument("--allow-large", action="store_true", dest="allow_large")
    p.add_argument("--properties", help="comma list: laurent,units,coprime,irreducible")
    p.add_argument("--trials", type=int, help="irreducibility specialization budget")
    p.add_argument("--degree-cap", type=int, dest="degree_cap")
    p.add_argument("--jobs", type=int, help="worker processes (reports stay identical)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--allow-unknown", action="store_true", dest="allow_unknown")

    p = sub.add_parser("mutate", help="remove a minimal point and report the changes")
    _add_common(p)
    p.add_argument("--at", required=True, help="minimal point to remove, like (0,1)")
    p.add_argument("--window", help="window literal for the comparison report")
    p.add_argument("--max-d", type=int, dest="max_d")
    p.add_argument("--allow-large", action="store_true", dest="allow_large")

    p = sub.add_parser("reduce", help="apply a reduction map and emit the reduced equation")
    _add_common(p, with_domain=False)
    p.add_argument("--config", help="run-config file carrying the map literal")
    p.add_argument("--map", help="map literal, e.g. { matrix = [[2,3]], torsion_images = [] }")
    p.add_argument("--window", help="laurent-verification window on the target")
    p.add_argument("--max-d", type=int, dest="max_d")
    p.add_argument("--allow-large", action="store_true", dest="allow_large")
    p.add_argument("--jobs", type=int)

    p = sub.add_parser("oracle", help="independent consistency oracles")
    _add_common(p)
    p.add_argument("--window", help="window for numeric consistency")
    p.add_argument("--max-d", type=int, dest="max_d")
    p.add_argument("--allow-large", action="store_true", dest="allow_large")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--closed-form", type=int, dest="closed_form",
                   help="check the closed-form exponent formula up to n")
    p.add_argument("--lyness", type=int, help="check the periodic-reduction identity up to n")
    p.add_argument("--substitution", action="store_true",
                   help="check the step matrix against its defining substitution")

    p = sub.add_parser("diagram", help="draw a domain over a box")
    _add_common(p)
    p.add_argument("--box-lo", required=True, dest="box_lo", help="low corner, like (0,0)")
    p.add_argument("--box-hi", required=True, dest="box_hi", help="high corner, like (6,5)")
    p.add_argument("--cone", help="mark the past cone of this point")
    p.add_argument("--svg", action="store_true", help="emit SVG instead of ASCII")
    return ap


_HANDLERS = {
    "validate": cmd_validate,
    "iterate": cmd_iterate,
    "verify": cmd_verify,
    "mutate": cmd_mutate,
    "reduce": cmd_reduce,
    "oracle": cmd_oracle,
    "diagram": cmd_diagram,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (CliError, ConfigError, EquationError, WindowError, DomainError,
            ReductionError, ShiftSystemError, NotEnumerableError, FileNotFoundError) as e:
        sys.stderr.write("error: %s\n" % e)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
