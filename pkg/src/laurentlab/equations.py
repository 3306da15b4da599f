"""Recurrence definitions and their on-disk format.

An equation defines the value at a point from the values at shifted
points: ``f[h] = Phi(f[h+v_1], ..., f[h+v_N])`` with ``Phi = P/Q`` a
rational expression over integer-and-parameter coefficients.  Internally
``P`` and ``Q`` live over placeholder variables ``Y1..YN`` (slot ``i``
stands for the value at ``h + v_i``); the shifts are stored sorted with
the minimum shift last, which is the slot a backward step solves for.
The backward map ``Psi`` is a Laurent polynomial over slot 0 (``Y0``, the
value at the point itself) and the non-minimum slots ``Y1..Y_{N-1}``.

File format (TOML)::

    name = "dkdv"

    [lattice]
    rank = 2
    torsion = []

    [params]
    names = ["a", "b"]
    coprime = true

    [equation]
    rule = "f[0,0] = (a*f[-2,0]*f[0,-1] + b*f[-1,0]*f[-1,-1]) / f[-2,-1]"
    backward = "..."        # optional; f[0,..] refers to the point itself

The rule is written in *point form* with an explicit left-hand side:
``f[c1,..,ck]`` on the right refers to the value at ``(c1..ck)``; the
offsets relative to the left-hand point are the shift system (a nonzero
left-hand point just translates every reference).  Division is accepted
only by single-term subexpressions, keeping everything inside the Laurent
ring.  ``params`` may also be a bare array of names; ``coprime`` records
the pairwise-coprimality declaration for the coefficient parameters
(trusted, not checked — independent symbols are coprime, but substituted
values may not be).
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

try:
    import tomllib as _toml
except ModuleNotFoundError:  # Python < 3.11
    import tomli as _toml

from .factor import certify_irreducible
from .lattice import LatticeSpec, Point, ShiftSystem
from .poly import LaurentPoly, VarId
from .ratfunc import RationalFunction, poly_substitute_rf
from .textform import ExprParser, ParseError, format_poly


class EquationError(ValueError):
    pass


class NoAutoSolve(EquationError):
    """The step rule does not match either invertible shape (a pure
    ``YN^-1`` slice, or linear in ``YN`` with a unit-monomial leading
    coefficient), and no explicit backward rule was given."""


class RoundTripFailed(EquationError):
    """A backward rule (explicit or derived) failed the symbolic round
    trip against the step rule."""


@dataclass
class LatticeEquation:
    """A recurrence on a lattice: shifts plus the rational step rule."""

    name: str
    lattice: LatticeSpec
    system: ShiftSystem
    phi_num: LaurentPoly  # over placeholders Y1..YN
    phi_den: LaurentPoly  # a pure monomial over Y1..YN, coefficient 1
    params: Tuple[str, ...] = ()
    params_coprime: bool = True
    backward: Optional[LaurentPoly] = None  # over Y0 (self) and Y1..Y_{N-1}
    meta: Dict[str, str] = field(default_factory=dict)

    @property
    def arity(self) -> int:
        return len(self.system.shifts)

    @property
    def minimum_shift(self) -> Point:
        return self.system.shifts[-1]

    def placeholder(self, slot: int) -> VarId:
        return VarId.placeholder(slot)

    def phi_laurent(self) -> LaurentPoly:
        """The step rule as one Laurent polynomial: ``P * Q^-1``."""
        return self.phi_num * self.phi_den.invert()

    def _point_form(self, p: LaurentPoly) -> LaurentPoly:
        sub = {
            VarId.placeholder(i + 1): LaurentPoly.var(VarId.point(v))
            for i, v in enumerate(self.system.shifts)
        }
        sub[VarId.placeholder(0)] = LaurentPoly.var(VarId.point(self.lattice.zero))
        return p.substitute(sub)

    def rule_text(self) -> str:
        """Canonical point form of the rule, left-hand side included."""
        lhs = "f[%s]" % ",".join("0" for _ in range(self.lattice.dimension))
        num = self._point_form(self.phi_num)
        den = self._point_form(self.phi_den)
        if den.is_one():
            return "%s = %s" % (lhs, format_poly(num))
        return "%s = (%s) / (%s)" % (lhs, format_poly(num), format_poly(den))

    def backward_text(self) -> Optional[str]:
        if self.backward is None:
            return None
        return format_poly(self._point_form(self.backward))

    def describe(self) -> dict:
        return {
            "name": self.name,
            "lattice": {"rank": self.lattice.rank, "torsion": list(self.lattice.torsion)},
            "shifts": [list(v) for v in self.system.shifts],
            "params": list(self.params),
            "params_coprime": self.params_coprime,
            "rule": self.rule_text(),
            "has_backward": self.backward is not None,
        }


# ---------------------------------------------------------------------------
# Parsing


def _point_ref_factory(lattice: LatticeSpec, where: str, base: Optional[Point] = None):
    def on_ref(coords: tuple, pos: int) -> VarId:
        if len(coords) != lattice.dimension:
            raise ParseError(
                "%s: point reference f[%s] has %d coordinates, lattice needs %d"
                % (where, ",".join(map(str, coords)), len(coords), lattice.dimension),
                pos,
            )
        p = lattice.normalize(coords)
        if base is not None:
            p = lattice.sub(p, base)
        return VarId.point(p)

    return on_ref


def _split_rule(rule_poly: LaurentPoly) -> Tuple[LaurentPoly, LaurentPoly]:
    """Separate a Laurent expression into (numerator, monomial denominator)."""
    mp, stripped = rule_poly.strip_monomial()
    pos = tuple((v, e) for v, e in mp if e > 0)
    neg = tuple((v, -e) for v, e in mp if e < 0)
    num = stripped.mul_monomial(pos) if pos else stripped
    den = LaurentPoly.monomial(neg) if neg else LaurentPoly.one()
    return num, den


_LHS_RE = re.compile(r"^\s*f\[\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\]\s*=(?![=])")


def _split_lhs(rule: str) -> Tuple[Tuple[int, ...], str]:
    m = _LHS_RE.match(rule)
    if not m:
        raise EquationError(
            'rule must have the shape "f[c1,...,ck] = <expression>"; got %r' % rule
        )
    coords = tuple(int(x) for x in m.group(1).split(","))
    return coords, rule[m.end():]


def equation_from_rule(
    name: str,
    lattice: LatticeSpec,
    rule: str,
    params: Optional[Sequence[str]] = None,
    params_coprime: bool = True,
    backward: Optional[str] = None,
    meta: Optional[Dict[str, str]] = None,
) -> LatticeEquation:
    """Build an equation from point-form rule text with a left-hand side."""
    lhs_coords, rhs = _split_lhs(rule)
    if len(lhs_coords) != lattice.dimension:
        raise EquationError(
            "left-hand point f[%s] has %d coordinates, lattice needs %d"
            % (",".join(map(str, lhs_coords)), len(lhs_coords), lattice.dimension)
        )
    base = lattice.normalize(lhs_coords)
    if all(c == 0 for c in base):
        base = None  # avoid needless translation work
    parser = ExprParser(rhs, on_ref=_point_ref_factory(lattice, "rule", base))
    expr = parser.parse()
    seen_params = set(parser.params_seen)
    num, den = _split_rule(expr)
    if den.is_zero():
        raise EquationError("rule denominator is identically zero")
    if num.is_zero():
        raise EquationError("rule numerator is identically zero")

    offsets = sorted(
        {v.coords for v in (num.variables() | den.variables()) if v.kind == 0}
    )
    if not offsets:
        raise EquationError("the rule references no shifted points")
    zero = lattice.zero
    if zero in offsets:
        raise EquationError("the rule may not reference f at the point being defined")
    system = ShiftSystem(lattice, offsets)
    order: List[Point] = list(system.shifts)
    if system.positively_independent():
        mi = system.find_minimum()
        if mi is not None:
            order = [v for i, v in enumerate(system.shifts) if i != mi] + [system.shifts[mi]]
            system = ShiftSystem(lattice, order)
    # rebind point references to placeholder slots
    slot_of = {VarId.point(v): LaurentPoly.var(VarId.placeholder(i + 1)) for i, v in enumerate(order)}
    phi_num = num.substitute(slot_of)
    phi_den = den.substitute(slot_of)
    # clear shared negative exponents so both parts are honest polynomials
    lows: Dict[VarId, int] = {}
    for part in (phi_num, phi_den):
        for v in part.variables():
            lows[v] = min(lows.get(v, 0), part.min_exp(v))
    clear = tuple(sorted(((v, -e) for v, e in lows.items() if e < 0), key=lambda t: t[0].key))
    if clear:
        phi_num = phi_num.mul_monomial(clear)
        phi_den = phi_den.mul_monomial(clear)

    declared = tuple(sorted(params)) if params is not None else None
    bw = None
    if backward is not None:
        bw = _parse_backward(backward, lattice, order, seen_params, base)
    if declared is not None:
        missing = seen_params - set(declared)
        if missing:
            raise EquationError("rule uses undeclared parameters: %s" % sorted(missing))
        final_params = declared
    else:
        final_params = tuple(sorted(seen_params))
    return LatticeEquation(
        name=name,
        lattice=lattice,
        system=system,
        phi_num=phi_num,
        phi_den=phi_den,
        params=final_params,
        params_coprime=params_coprime,
        backward=bw,
        meta=dict(meta or {}),
    )


def _parse_backward(
    text: str,
    lattice: LatticeSpec,
    order: Sequence[Point],
    seen_params: set,
    base: Optional[Point],
) -> LaurentPoly:
    """Backward rule text -> Laurent polynomial over Y0 and Y1..Y_{N-1}.

    References use the same frame as the rule: ``f[lhs]`` is the point
    itself (slot 0), other references must be non-minimum shifts.
    """
    parser = ExprParser(text, on_ref=_point_ref_factory(lattice, "backward", base))
    expr = parser.parse()
    seen_params |= parser.params_seen
    zero = lattice.zero
    allowed = {VarId.point(zero): LaurentPoly.var(VarId.placeholder(0))}
    for i, v in enumerate(order[:-1]):
        allowed[VarId.point(v)] = LaurentPoly.var(VarId.placeholder(i + 1))
    for v in expr.variables():
        if v.kind == 0 and v not in allowed:
            raise EquationError(
                "backward rule may only reference the point itself and the "
                "non-minimum shifts; got f[%s]" % ",".join(map(str, v.coords))
            )
    return expr.substitute(allowed)


def _params_from_data(data: dict):
    raw = data.get("params")
    if raw is None:
        return None, True
    if isinstance(raw, list):
        return [str(s) for s in raw], True
    if isinstance(raw, dict):
        unknown = set(raw) - {"names", "coprime"}
        if unknown:
            raise EquationError("unknown [params] keys: %s" % sorted(unknown))
        names = raw.get("names")
        if names is not None and not isinstance(names, list):
            raise EquationError("[params] names must be an array of strings")
        coprime = raw.get("coprime", True)
        if not isinstance(coprime, bool):
            raise EquationError("[params] coprime must be a boolean")
        return (None if names is None else [str(s) for s in names]), coprime
    raise EquationError("params must be an array of names or a table")


def parse_equation_text(text: str, default_name: str = "equation") -> LatticeEquation:
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError as e:
        raise EquationError("not valid TOML: %s" % e) from None
    name = data.get("name", default_name)
    lat = data.get("lattice")
    if not isinstance(lat, dict) or "rank" not in lat:
        raise EquationError("missing [lattice] section with a rank")
    lattice = LatticeSpec(int(lat["rank"]), tuple(int(a) for a in lat.get("torsion", ())))
    eq = data.get("equation")
    if not isinstance(eq, dict):
        raise EquationError("missing [equation] section")
    known = {"rule", "backward"}
    unknown = set(eq) - known
    if unknown:
        raise EquationError("unknown [equation] keys: %s" % sorted(unknown))
    if "rule" not in eq:
        raise EquationError("the [equation] section needs a rule")
    names, coprime = _params_from_data(data)
    return equation_from_rule(
        name,
        lattice,
        rule=eq["rule"],
        params=names,
        params_coprime=coprime,
        backward=eq.get("backward"),
    )


def load_equation(path) -> LatticeEquation:
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    return parse_equation_text(text, default_name=os.path.splitext(os.path.basename(path))[0])


def equation_to_text(eq: LatticeEquation) -> str:
    """Canonical TOML serialization; load -> serialize is idempotent."""
    lines = ['name = "%s"' % eq.name, ""]
    lines += [
        "[lattice]",
        "rank = %d" % eq.lattice.rank,
        "torsion = [%s]" % ", ".join(str(a) for a in eq.lattice.torsion),
        "",
    ]
    if eq.params:
        lines += [
            "[params]",
            "names = [%s]" % ", ".join('"%s"' % s for s in eq.params),
            "coprime = %s" % ("true" if eq.params_coprime else "false"),
            "",
        ]
    lines += ["[equation]", 'rule = "%s"' % eq.rule_text()]
    bw = eq.backward_text()
    if bw is not None:
        lines.append('backward = "%s"' % bw)
    lines.append("")
    return "\n".join(lines)


def save_equation(eq: LatticeEquation, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(equation_to_text(eq))


# ---------------------------------------------------------------------------
# Backward maps


def _auto_backward(eq: LatticeEquation) -> LaurentPoly:
    """Derive the backward map for the two invertible rule shapes.

    With ``Z`` the value at the point itself and ``Y1..Y_{N-1}`` the
    non-minimum arguments:

    - ``Phi = A * YN^-1`` (single ``-1`` slice) inverts to ``YN = A * Z^-1``;
    - ``Phi = M * YN + B`` with ``M`` a signed monomial inverts to
      ``YN = (Z - B) * M^-1``.

    Anything else raises :class:`NoAutoSolve`.
    """
    n = eq.arity
    yn = VarId.placeholder(n)
    phi = eq.phi_laurent()
    slices = phi.slices(yn)
    exps = sorted(slices)
    z = LaurentPoly.var(VarId.placeholder(0))
    if exps == [-1]:
        return slices[-1] * z.invert()
    if 1 in slices and set(exps) <= {0, 1}:
        m = slices[1]
        if m.is_unit():
            b = slices.get(0, LaurentPoly.zero())
            return (z - b) * m.invert()
    raise NoAutoSolve(
        "the rule is neither a pure YN^-1 slice nor linear in YN with a "
        "unit-monomial coefficient; supply an explicit backward rule"
    )


def solve_backward(eq: LatticeEquation) -> LaurentPoly:
    """The backward map as a Laurent polynomial, round-trip verified.

    Prefers the explicit backward rule when the equation carries one;
    otherwise derives it from the rule shape.  Either way the result is
    checked symbolically against the step rule before being returned.
    """
    if eq.backward is not None:
        if not verify_backward(eq, eq.backward):
            raise RoundTripFailed(
                "the explicit backward rule does not invert the step rule"
            )
        return eq.backward
    psi = _auto_backward(eq)
    if not verify_backward(eq, psi):  # pragma: no cover - defensive
        raise RoundTripFailed("derived backward rule failed the round-trip check")
    return psi


def verify_backward(eq: LatticeEquation, psi: Optional[LaurentPoly] = None) -> bool:
    """Both symbolic round trips:

    - substituting ``Psi`` for ``YN`` in the rule reproduces ``Y0``;
    - substituting the rule for ``Y0`` in ``Psi`` reproduces ``YN``.
    """
    if psi is None:
        psi = eq.backward if eq.backward is not None else _auto_backward(eq)
    yn = VarId.placeholder(eq.arity)
    y0 = VarId.placeholder(0)
    psi_rf = RationalFunction.from_poly(psi)
    num_rf = poly_substitute_rf(eq.phi_num, {yn: psi_rf})
    den_rf = poly_substitute_rf(eq.phi_den, {yn: psi_rf})
    if den_rf.is_zero():
        return False
    if num_rf / den_rf != LaurentPoly.var(y0):
        return False
    phi_rf = RationalFunction(eq.phi_num, eq.phi_den)
    back = poly_substitute_rf(psi, {y0: phi_rf})
    return back == LaurentPoly.var(yn)


# ---------------------------------------------------------------------------
# Validation


def validate_equation(eq: LatticeEquation, trials: int = 20, degree_cap: int = 12) -> dict:
    """Structured report on the standing assumptions; ``ok`` summarizes.

    ``problems`` are genuine violations (dependent shifts, no minimum, a
    monomial rule, failed backward round trip, reducible rule numerator);
    ``warnings`` are inconclusive certificates (irreducibility Unknown).
    """
    problems: List[str] = []
    warnings: List[str] = []
    analysis = eq.system.analyze()
    report: dict = {
        "name": eq.name,
        "lattice": {"rank": eq.lattice.rank, "torsion": list(eq.lattice.torsion)},
        "shifts": [list(v) for v in eq.system.shifts],
        "params": list(eq.params),
        "params_coprime": eq.params_coprime,
        "positively_independent": analysis.functional is not None,
        "generates_lattice": analysis.generates,
    }
    if analysis.functional is not None:
        report["functional"] = list(analysis.functional)
    if analysis.dependency is not None:
        report["dependency"] = list(analysis.dependency)
        problems.append(
            "shifts admit a nonnegative dependency; evolution cones are infinite"
        )
    if not analysis.generates:
        problems.append("the shifts generate a proper subgroup of the lattice")
    if analysis.minimum_index is None:
        problems.append("no shift lies below all others (no minimum shift)")
        report["minimum_shift"] = None
    else:
        report["minimum_shift"] = list(eq.system.shifts[-1])
        if analysis.minimum_index != len(eq.system.shifts) - 1:
            problems.append("internal ordering error: minimum shift is not last")
    # rule shape
    report["phi_nonmonomial"] = not eq.phi_num.is_monomial()
    if eq.phi_num.is_monomial():
        problems.append("the rule is a single monomial (degenerate evolution)")
    missing_slots = [
        i + 1
        for i in range(eq.arity)
        if VarId.placeholder(i + 1) not in (eq.phi_num.variables() | eq.phi_den.variables())
    ]
    report["phi_uses_every_argument"] = not missing_slots
    if missing_slots:
        problems.append("the rule ignores argument slots %s" % missing_slots)
    # rule irreducibility (up to the unit monomial denominator)
    verdict = certify_irreducible(eq.phi_num, trials, degree_cap)
    report["phi_irreducible"] = verdict.status
    if verdict.status == "Reducible":
        problems.append("the rule numerator factors (irreducibility assumption fails)")
    elif verdict.status == "Unknown":
        warnings.append("rule irreducibility could not be certified: %s" % verdict.detail)
    # backward consistency
    if eq.backward is not None:
        ok = verify_backward(eq, eq.backward)
        report["backward"] = "explicit"
        report["backward_verified"] = ok
        if not ok:
            problems.append("the explicit backward rule does not invert the step rule")
    else:
        try:
            bw = _auto_backward(eq)
            report["backward"] = "derived"
            report["backward_verified"] = verify_backward(eq, bw)
            if not report["backward_verified"]:
                problems.append("derived backward rule failed the round-trip check")
        except NoAutoSolve as e:
            bw = None
            report["backward"] = "unavailable"
            report["backward_verified"] = False
            problems.append("no backward rule: %s" % e)
    if report["backward_verified"]:
        psi = eq.backward if eq.backward is not None else _auto_backward(eq)
        pv = certify_irreducible(psi, trials, degree_cap)
        report["backward_irreducible"] = pv.status
        if pv.status == "Reducible":
            problems.append("the backward rule factors (irreducibility assumption fails)")
        elif pv.status == "Unknown":
            warnings.append("backward irreducibility could not be certified: %s" % pv.detail)
    report["problems"] = problems
    report["warnings"] = warnings
    report["ok"] = not problems
    return report
