"""Run configuration: structured literals for domains, windows, and
reduction maps, plus the top-level config file for campaign runs.

Configs are TOML (preferred) with JSON accepted as an alternative input
encoding; both decode to the same nested dict shape.  Domain literals::

    domain = { kind = "halfspace", w = [1, 1], c = 0 }
    domain = { kind = "future_cone", seeds = [[0, 0]] }
    domain = { kind = "intersection", parts = [ ... ], witness = [0, 0] }
    domain = { kind = "mutate", base = { ... }, at = [0, 1] }
    domain = { kind = "translate", base = { ... }, offset = [1, 0] }
    domain = { kind = "lift", map = { ... }, base = { ... } }

Window literals::

    window = { points = [[3, 3], [4, 2]] }
    window = { max_d = 30 }
    window = { box = [[0, 0], [6, 5]] }

Reduction-map literal::

    map = { matrix = [[2, 3]], torsion_images = [] }

with an optional ``target = { rank = 1, torsion = [] }`` table when the
target lattice is not the default (one free coordinate per matrix row,
no torsion).  Every field of a parsed config is explicit in
:func:`resolved`, so emitted reports never depend on hidden defaults.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Optional, Tuple

try:
    import tomllib as _toml
except ImportError:  # Python < 3.11
    import tomli as _toml

from .domains import (
    Domain,
    FutureConeUnion,
    HalfSpace,
    Intersection,
    MutatedDomain,
    TranslatedDomain,
)
from .equations import EquationError, LatticeEquation, load_equation
from .lattice import LatticeSpec, ShiftSystem
from .reduction import ReductionMap, lift_domain, reduced_shift_system
from .verify import ALL_PROPERTIES, Window


class ConfigError(ValueError):
    """Malformed run configuration or literal."""


# ---------------------------------------------------------------------------
# Literal parsers


def parse_reduction_map(literal: dict, source: LatticeSpec) -> ReductionMap:
    if not isinstance(literal, dict):
        raise ConfigError("reduction map literal must be a table")
    unknown = set(literal) - {"matrix", "torsion_images", "target"}
    if unknown:
        raise ConfigError("unknown reduction-map keys: %s" % sorted(unknown))
    matrix = literal.get("matrix")
    if not isinstance(matrix, list) or not matrix or not all(isinstance(r, list) for r in matrix):
        raise ConfigError("map.matrix must be a nonempty list of integer rows")
    torsion_images = literal.get("torsion_images", [])
    target_lit = literal.get("target")
    if target_lit is None:
        target = LatticeSpec(len(matrix), ())
    else:
        target = LatticeSpec(
            int(target_lit["rank"]), tuple(int(a) for a in target_lit.get("torsion", ()))
        )
    try:
        return ReductionMap(source, target, tuple(tuple(int(x) for x in r) for r in matrix),
                            tuple(tuple(int(x) for x in t) for t in torsion_images))
    except ValueError as e:
        raise ConfigError("bad reduction map: %s" % e) from None


def parse_domain(
    literal: dict, system: ShiftSystem, eq: Optional[LatticeEquation] = None
) -> Domain:
    """Build a domain from its literal.  ``eq`` is needed only for the
    ``lift`` kind (the reduction is applied to that equation)."""
    if not isinstance(literal, dict) or "kind" not in literal:
        raise ConfigError("domain literal must be a table with a kind")
    kind = literal["kind"]
    if kind == "halfspace":
        return HalfSpace(system, literal["w"], int(literal.get("c", 0)))
    if kind in ("future_cone", "future_cone_union"):
        return FutureConeUnion(system, literal["seeds"])
    if kind == "intersection":
        parts = [parse_domain(p, system, eq) for p in literal["parts"]]
        return Intersection(parts, witness=literal.get("witness"))
    if kind in ("mutate", "mutated"):
        base = parse_domain(literal["base"], system, eq)
        removed = literal.get("removed")
        if removed is None:
            removed = [literal["at"]]
        return MutatedDomain(base, removed)
    if kind in ("translate", "translated"):
        base = parse_domain(literal["base"], system, eq)
        return TranslatedDomain(base, literal["offset"])
    if kind in ("lift", "lifted"):
        if eq is None:
            raise ConfigError("lifted domains need the equation context")
        rmap = parse_reduction_map(literal["map"], eq.lattice)
        red_sys = reduced_shift_system(rmap, eq)
        base = parse_domain(literal["base"], red_sys, None)
        return lift_domain(rmap, eq, base)
    raise ConfigError("unknown domain kind %r" % kind)


def parse_window(literal: dict) -> Window:
    if not isinstance(literal, dict):
        raise ConfigError("window literal must be a table")
    unknown = set(literal) - {"points", "max_d", "box", "allow_large"}
    if unknown:
        raise ConfigError("unknown window keys: %s" % sorted(unknown))
    selectors = [k for k in ("points", "max_d", "box") if k in literal]
    if len(selectors) != 1:
        raise ConfigError("window needs exactly one of points=, max_d=, box=")
    allow_large = bool(literal.get("allow_large", False))
    if "points" in literal:
        return Window(points=[tuple(int(x) for x in p) for p in literal["points"]],
                      allow_large=allow_large)
    if "max_d" in literal:
        return Window(max_d=int(literal["max_d"]), allow_large=allow_large)
    lo, hi = literal["box"]
    return Window(box=(tuple(int(x) for x in lo), tuple(int(x) for x in hi)),
                  allow_large=allow_large)


# ---------------------------------------------------------------------------
# Run configuration


@dataclass
class RunConfig:
    """One campaign: equation file, domain/window literals, settings.

    ``seed`` feeds the randomized certificate searches; ``trials`` and
    ``degree_cap`` bound irreducibility certification; ``jobs`` is the
    worker count (reports are byte-identical for every value); ``out``
    is the report path (None = stdout).
    """

    equation: str
    domain: Optional[dict] = None
    window: Optional[dict] = None
    properties: Tuple[str, ...] = ALL_PROPERTIES
    seed: int = 0
    trials: int = 20
    degree_cap: int = 12
    jobs: int = 1
    out: Optional[str] = None
    map: Optional[dict] = None

    def resolved(self) -> dict:
        """Every setting, defaults included, for embedding in reports."""
        return {
            "equation": self.equation,
            "domain": self.domain,
            "window": self.window,
            "properties": list(self.properties),
            "seed": self.seed,
            "trials": self.trials,
            "degree_cap": self.degree_cap,
            "jobs": self.jobs,
            "out": self.out,
            "map": self.map,
        }


_CONFIG_KEYS = {
    "equation", "domain", "window", "properties", "seed", "trials",
    "degree_cap", "jobs", "out", "map",
}


def parse_config(data: dict, base_dir: str = ".") -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must decode to a table")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError("unknown config keys: %s" % sorted(unknown))
    if "equation" not in data:
        raise ConfigError("config needs an equation file path")
    path = data["equation"]
    if not os.path.isabs(path):
        path = os.path.normpath(os.path.join(base_dir, path))
    props = data.get("properties", list(ALL_PROPERTIES))
    if isinstance(props, str):
        props = [s.strip() for s in props.split(",") if s.strip()]
    return RunConfig(
        equation=path,
        domain=data.get("domain"),
        window=data.get("window"),
        properties=tuple(props),
        seed=int(data.get("seed", 0)),
        trials=int(data.get("trials", 20)),
        degree_cap=int(data.get("degree_cap", 12)),
        jobs=int(data.get("jobs", 1)),
        out=data.get("out"),
        map=data.get("map"),
    )


def load_config(path: str) -> RunConfig:
    """TOML config, with JSON accepted as an alternative encoding."""
    with open(path, "rb") as fh:
        raw = fh.read()
    text = raw.decode("utf-8")
    data = None
    if path.endswith(".json") or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("%s: not valid JSON: %s" % (path, e)) from None
    else:
        try:
            data = _toml.loads(text)
        except _toml.TOMLDecodeError as e:
            raise ConfigError("%s: not valid TOML: %s" % (path, e)) from None
    return parse_config(data, base_dir=os.path.dirname(os.path.abspath(path)))


def load_equation_and_domain(
    path: str, domain_literal: Optional[dict] = None
) -> Tuple[LatticeEquation, Optional[dict]]:
    """Load an equation file; an embedded ``domain`` literal (top-level
    table in the same file) is returned unless overridden by the caller's
    literal."""
    eq = load_equation(path)
    if domain_literal is not None:
        return eq, domain_literal
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError:
        return eq, None
    dom = data.get("domain")
    return eq, dom if isinstance(dom, dict) else None
