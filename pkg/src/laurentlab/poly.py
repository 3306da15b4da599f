"""Exact sparse arithmetic for Laurent polynomials over Z[parameters].

Values are Laurent polynomials: finite sums ``c * x1^e1 * ... * xk^ek`` where
exponents may be negative and each coefficient ``c`` is an ordinary
(non-Laurent) polynomial with integer coefficients in a set of named
parameter symbols.  Parameters are never inverted.  The units of this ring
are exactly the single-term elements with coefficient +1 or -1 (signed
monomials); several routines below rely on that fact.

Representation:

- variables (:class:`VarId`) are interned and totally ordered; a variable
  either names a lattice point (printed ``f[coords]``) or a placeholder slot
  of an equation right-hand side (printed ``Y<k>``);
- a monomial is a sorted tuple of ``(VarId, exponent)`` pairs with no zero
  exponents; the empty tuple is the trivial monomial;
- a coefficient (:class:`Coeff`) maps sorted tuples of
  ``(parameter name, positive exponent)`` pairs to nonzero integers;
- a polynomial (:class:`LaurentPoly`) maps monomials to nonzero coefficients.

The canonical term order compares exponent vectors lexicographically in
increasing :class:`VarId` order, missing exponents read as 0, larger
exponent winning.  It is a total order on Laurent monomials, and a proper
monomial order (compatible with multiplication, well-founded) once all
exponents are nonnegative, which is how exact division uses it.  Terms of a
polynomial are enumerated in *increasing* canonical order everywhere
(serialization, normal forms); "lexicographically first" below always means
first in that enumeration.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence


# ---------------------------------------------------------------------------
# Variables


class VarId:
    """An interned, totally ordered identifier for one Laurent variable.

    Two kinds exist: variables bound to lattice points (``kind == 0``,
    ``coords`` is the flattened point, free coordinates first, torsion
    residues last) and placeholder slots ``Y1..YN`` used while an equation's
    right-hand side is not yet bound to points (``kind == 1``, ``coords`` is
    ``(slot,)``).  Point variables sort before placeholders; within a kind
    the coordinate tuples sort lexicographically.
    """

    __slots__ = ("kind", "coords", "key", "text", "_hash")

    _interned: dict = {}

    def __new__(cls, kind: int, coords: tuple):
        cached = cls._interned.get((kind, coords))
        if cached is not None:
            return cached
        self = object.__new__(cls)
        self.kind = kind
        self.coords = coords
        self.key = (kind, coords)
        if kind == 0:
            self.text = "f[" + ",".join(str(c) for c in coords) + "]"
        else:
            self.text = "Y%d" % coords[0]
        self._hash = hash(self.key)
        cls._interned[(kind, coords)] = self
        return self

    @staticmethod
    def point(coords: Iterable[int]) -> "VarId":
        return VarId(0, tuple(int(c) for c in coords))

    @staticmethod
    def placeholder(slot: int) -> "VarId":
        """Slot ``i >= 1`` stands for the value at the i-th shift; slot 0 is
        reserved for the value at the point itself (backward rules)."""
        if slot < 0:
            raise ValueError("placeholder slots are nonnegative")
        return VarId(1, (slot,))

    def __lt__(self, other: "VarId") -> bool:
        return self.key < other.key

    def __le__(self, other: "VarId") -> bool:
        return self.key <= other.key

    def __hash__(self) -> int:
        return self._hash

    def __reduce__(self):
        # interning happens in __new__, so unpickling re-interns
        return (VarId, (self.kind, self.coords))

    def __repr__(self) -> str:
        return self.text


# ---------------------------------------------------------------------------
# Monomials: sorted tuples of (VarId, exp), exp != 0

Monomial = tuple  # tuple[tuple[VarId, int], ...]

MONO_ONE: Monomial = ()


def mono_from_dict(d: Mapping[VarId, int]) -> Monomial:
    return tuple(sorted(((v, int(e)) for v, e in d.items() if e), key=lambda p: p[0].key))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        va, ea = a[i]
        vb, eb = b[j]
        if va is vb:
            e = ea + eb
            if e:
                out.append((va, e))
            i += 1
            j += 1
        elif va.key < vb.key:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_inv(a: Monomial) -> Monomial:
    return tuple((v, -e) for v, e in a)


def mono_pow(a: Monomial, k: int) -> Monomial:
    if k == 0:
        return MONO_ONE
    return tuple((v, e * k) for v, e in a)


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return mono_mul(a, mono_inv(b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True iff a | b in the ordinary polynomial sense (componentwise <=)."""
    exps = dict(b)
    return all(v in exps and e <= exps[v] for v, e in a)


def mono_cmp(a: Monomial, b: Monomial) -> int:
    """Canonical term order: lex on exponent vectors, increasing VarId order,
    missing exponent = 0, larger exponent = larger monomial."""
    i = j = 0
    la, lb = len(a), len(b)
    while i < la or j < lb:
        if i < la and (j >= lb or a[i][0].key < b[j][0].key):
            # variable present only in a: compare exp(a) vs 0
            if a[i][1] != 0:
                return 1 if a[i][1] > 0 else -1
            i += 1
        elif j < lb and (i >= la or b[j][0].key < a[i][0].key):
            if b[j][1] != 0:
                return -1 if b[j][1] > 0 else 1
            j += 1
        else:
            if a[i][1] != b[j][1]:
                return 1 if a[i][1] > b[j][1] else -1
            i += 1
            j += 1
    return 0


# ---------------------------------------------------------------------------
# Coefficients: integer polynomials in parameter symbols

ParamMono = tuple  # tuple[tuple[str, int], ...], exponents > 0

PM_ONE: ParamMono = ()


def _pm_mul(a: ParamMono, b: ParamMono) -> ParamMono:
    if not a:
        return b
    if not b:
        return a
    d: dict = dict(a)
    for s, e in b:
        n = d.get(s, 0) + e
        if n:
            d[s] = n
        else:
            del d[s]
    return tuple(sorted(d.items()))


class Coeff:
    """An integer-coefficient polynomial in parameter symbols (never inverted)."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[ParamMono, int]):
        self.terms = {pm: c for pm, c in terms.items() if c}
        self._hash = None

    @staticmethod
    def of(n: int) -> "Coeff":
        return _SMALL_INTS.get(n) or Coeff({PM_ONE: n})

    @staticmethod
    def param(name: str, exp: int = 1, c: int = 1) -> "Coeff":
        if exp < 0:
            raise ValueError("parameters are never inverted")
        if exp == 0:
            return Coeff.of(c)
        return Coeff({((name, exp),): c})

    # -- predicates

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {PM_ONE: 1}

    def is_unit(self) -> bool:
        """Units of Z[params] are +1 and -1."""
        return len(self.terms) == 1 and self.terms.get(PM_ONE) in (1, -1)

    def is_int(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and PM_ONE in self.terms)

    def as_int(self) -> int:
        if not self.terms:
            return 0
        if self.is_int():
            return self.terms[PM_ONE]
        raise ValueError("coefficient involves parameters: %r" % (self,))

    def params(self) -> set:
        return {s for pm in self.terms for s, _ in pm}

    # -- arithmetic

    def __add__(self, other: "Coeff") -> "Coeff":
        d = dict(self.terms)
        for pm, c in other.terms.items():
            n = d.get(pm, 0) + c
            if n:
                d[pm] = n
            else:
                del d[pm]
        return Coeff(d)

    def __neg__(self) -> "Coeff":
        return Coeff({pm: -c for pm, c in self.terms.items()})

    def __sub__(self, other: "Coeff") -> "Coeff":
        return self + (-other)

    def __mul__(self, other: "Coeff") -> "Coeff":
        a, b = self.terms, other.terms
        if not a or not b:
            return C_ZERO
        if len(a) == 1 and PM_ONE in a:
            n = a[PM_ONE]
            return Coeff({pm: n * c for pm, c in b.items()})
        if len(b) == 1 and PM_ONE in b:
            n = b[PM_ONE]
            return Coeff({pm: n * c for pm, c in a.items()})
        d: dict = {}
        for pma, ca in a.items():
            for pmb, cb in b.items():
                pm = _pm_mul(pma, pmb)
                n = d.get(pm, 0) + ca * cb
                if n:
                    d[pm] = n
                elif pm in d:
                    del d[pm]
        return Coeff(d)

    def scale(self, n: int) -> "Coeff":
        if n == 0:
            return C_ZERO
        if n == 1:
            return self
        return Coeff({pm: n * c for pm, c in self.terms.items()})

    # -- order helpers

    def sorted_terms(self) -> list:
        """Terms in increasing lex order on parameter exponent vectors."""
        return sorted(self.terms.items(), key=_pm_sort_key)

    def lead_int(self) -> int:
        """Integer coefficient of the lexicographically first term (0 if zero)."""
        if not self.terms:
            return 0
        return self.sorted_terms()[0][1]

    # -- evaluation

    def evaluate(self, params: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for pm, c in self.terms.items():
            v = Fraction(c)
            for s, e in pm:
                if s not in params:
                    raise KeyError("no value supplied for parameter %r" % s)
                v *= Fraction(params[s]) ** e
            total += v
        return total

    # -- value semantics

    def __eq__(self, other) -> bool:
        return isinstance(other, Coeff) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        from . import textform

        return textform.format_coeff(self, standalone=True)


def _pm_cmp(a: ParamMono, b: ParamMono) -> int:
    """Lex order on parameter exponent vectors (names ascending, missing
    exponent = 0, larger exponent = larger monomial).  Like the term order on
    monomials this needs an explicit merge walk: naive tuple comparison of
    sparse pairs is not multiplication-compatible."""
    i = j = 0
    la, lb = len(a), len(b)
    while i < la or j < lb:
        if i < la and (j >= lb or a[i][0] < b[j][0]):
            return 1
        if j < lb and (i >= la or b[j][0] < a[i][0]):
            return -1
        if a[i][1] != b[j][1]:
            return 1 if a[i][1] > b[j][1] else -1
        i += 1
        j += 1
    return 0


def _pm_sort_key(item):
    return _PM_KEY(item[0])


class _PM_KEY:
    __slots__ = ("pm",)

    def __init__(self, pm):
        self.pm = pm

    def __lt__(self, other):
        return _pm_cmp(self.pm, other.pm) < 0

    def __eq__(self, other):
        return self.pm == other.pm


C_ZERO = Coeff({})
C_ONE = Coeff({PM_ONE: 1})
_SMALL_INTS = {n: Coeff({PM_ONE: n}) for n in range(-8, 9) if n}
_SMALL_INTS[0] = C_ZERO


def coeff_int_content(c: Coeff) -> int:
    """gcd of the integer coefficients of ``c`` (0 for the zero coefficient)."""
    g = 0
    for n in c.terms.values():
        g = math.gcd(g, n)
        if g == 1:
            return 1
    return g


def _coeff_exact_div(a: Coeff, b: Coeff):
    """Exact division in Z[params]; returns the quotient or None."""
    if b.is_zero():
        raise ZeroDivisionError("coefficient division by zero")
    if a.is_zero():
        return C_ZERO
    if b.is_unit():
        return a.scale(b.terms[PM_ONE])
    if b.is_int():
        n = b.as_int()
        out = {}
        for pm, c in a.terms.items():
            q, r = divmod(c, n)
            if r:
                return None
            out[pm] = q
        return Coeff(out)
    # polynomial division by the leading term, exact or fail
    rem = dict(a.terms)
    bl = sorted(b.terms.items(), key=_pm_sort_key)
    bpm, bc = bl[-1]  # leading (largest) term of b
    quot: dict = {}
    while rem:
        rl = max(rem.items(), key=_pm_sort_key)
        rpm, rc = rl
        # does the leading param monomial of b divide that of the remainder?
        db = dict(bpm)
        dd = dict(rpm)
        if not all(s in dd and e <= dd[s] for s, e in db.items()):
            return None
        q, r = divmod(rc, bc)
        if r:
            return None
        qpm = tuple(sorted((s, e) for s, e in ((s, dd.get(s, 0) - db.get(s, 0)) for s in dd) if e))
        quot[qpm] = quot.get(qpm, 0) + q
        for pm, c in (Coeff({qpm: q}) * b).terms.items():
            n = rem.get(pm, 0) - c
            if n:
                rem[pm] = n
            elif pm in rem:
                del rem[pm]
    return Coeff(quot)


def coeff_gcd(a: Coeff, b: Coeff) -> Coeff:
    """GCD in Z[params], sign-normalized so the first term is positive.

    Integer pairs short-circuit to ``math.gcd``; otherwise a primitive
    pseudo-remainder sequence recurses one parameter at a time.  Parameter
    counts and degrees are tiny in practice, so no sophistication is needed.
    """
    if a.is_zero():
        return _coeff_pospm(b)
    if b.is_zero():
        return _coeff_pospm(a)
    if a.is_int() and b.is_int():
        return Coeff.of(math.gcd(a.as_int(), b.as_int()))
    if a.is_unit() or b.is_unit():
        return C_ONE
    sym = sorted(a.params() | b.params())[0]
    ca, pa = _coeff_split(a, sym)
    cb, pb = _coeff_split(b, sym)
    cont = coeff_gcd(ca, cb)
    g = _coeff_prs(pa, pb, sym)
    return _coeff_pospm(cont * g)


def _coeff_pospm(c: Coeff) -> Coeff:
    return -c if c.lead_int() < 0 else c


def _coeff_univar(c: Coeff, sym: str) -> dict:
    """View ``c`` as a univariate polynomial in ``sym``: {exp: Coeff}."""
    out: dict = {}
    for pm, n in c.terms.items():
        e = 0
        rest = []
        for s, k in pm:
            if s == sym:
                e = k
            else:
                rest.append((s, k))
        key = tuple(rest)
        cur = out.setdefault(e, {})
        cur[key] = cur.get(key, 0) + n
    return {e: Coeff(d) for e, d in out.items()}


def _coeff_from_univar(u: Mapping[int, Coeff], sym: str) -> Coeff:
    d: dict = {}
    for e, c in u.items():
        for pm, n in c.terms.items():
            full = _pm_mul(pm, ((sym, e),) if e else PM_ONE)
            d[full] = d.get(full, 0) + n
    return Coeff(d)


def _coeff_split(c: Coeff, sym: str):
    """(content, primitive part) of ``c`` with respect to ``sym``."""
    u = _coeff_univar(c, sym)
    cont = C_ZERO
    for cc in u.values():
        cont = coeff_gcd(cont, cc)
        if cont.is_one():
            break
    prim = {e: _coeff_exact_div(cc, cont) for e, cc in u.items()}
    return cont, _coeff_from_univar(prim, sym)


def _coeff_prs(a: Coeff, b: Coeff, sym: str) -> Coeff:
    """Primitive PRS gcd of two polynomials primitive w.r.t. ``sym``."""
    ua, ub = _coeff_univar(a, sym), _coeff_univar(b, sym)
    if max(ua) < max(ub):
        ua, ub = ub, ua
    while True:
        if not ub:
            break
        db = max(ub)
        if db == 0:
            # primitive and constant in sym => the gcd in sym is trivial
            return C_ONE
        da = max(ua)
        if da < db:
            ua, ub = ub, ua
            continue
        # pseudo-remainder of ua by ub
        lead_b = ub[db]
        rem = dict(ua)
        for _ in range(da - db + 1):
            if not rem:
                break
            dr = max(rem)
            if dr < db:
                break
            lead_r = rem[dr]
            rem = {e: c * lead_b for e, c in rem.items()}
            for e, c in ub.items():
                tgt = e + dr - db
                n = rem.get(tgt, C_ZERO) - c * lead_r
                if n.is_zero():
                    rem.pop(tgt, None)
                else:
                    rem[tgt] = n
        ua = ub
        if rem:
            c = _coeff_from_univar(rem, sym)
            _, prim = _coeff_split(c, sym)
            ub = _coeff_univar(prim, sym)
        else:
            ub = {}
    g = _coeff_from_univar(ua, sym)
    _, prim = _coeff_split(g, sym)
    return prim


# ---------------------------------------------------------------------------
# Laurent polynomials


class NotDivisibleError(ArithmeticError):
    """Raised by :func:`exact_div` when the division is not exact.

    ``witness`` is the first obstructing remainder term (monomial, coeff)
    under the canonical term order; ``reason`` says whether the monomial or
    the coefficient blocked the step.
    """

    def __init__(self, witness, reason: str):
        self.witness = witness
        self.reason = reason
        super().__init__("not divisible (%s) at term %r" % (reason, witness))


class LaurentPoly:
    """Immutable sparse Laurent polynomial over Z[parameters]."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Coeff]):
        self.terms = {m: c for m, c in terms.items() if not c.is_zero()}
        self._hash = None

    # -- constructors

    @staticmethod
    def zero() -> "LaurentPoly":
        return P_ZERO

    @staticmethod
    def one() -> "LaurentPoly":
        return P_ONE

    @staticmethod
    def const(c) -> "LaurentPoly":
        if isinstance(c, int):
            c = Coeff.of(c)
        return LaurentPoly({MONO_ONE: c})

    @staticmethod
    def var(v: VarId, exp: int = 1) -> "LaurentPoly":
        if exp == 0:
            return P_ONE
        return LaurentPoly({((v, exp),): C_ONE})

    @staticmethod
    def monomial(mono, c=C_ONE) -> "LaurentPoly":
        if isinstance(mono, dict):
            mono = mono_from_dict(mono)
        if isinstance(c, int):
            c = Coeff.of(c)
        return LaurentPoly({mono: c})

    @staticmethod
    def param(name: str) -> "LaurentPoly":
        return LaurentPoly({MONO_ONE: Coeff.param(name)})

    # -- predicates / views

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {MONO_ONE: C_ONE}

    def is_monomial(self) -> bool:
        """Single-term test; the coefficient may be any nonzero element of R."""
        return len(self.terms) == 1

    def is_unit(self) -> bool:
        """Units are single monomials with integer coefficient +1 or -1."""
        if len(self.terms) != 1:
            return False
        ((_, c),) = self.terms.items()
        return c.is_unit()

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def parameters(self) -> set:
        out: set = set()
        for c in self.terms.values():
            out |= c.params()
        return out

    def term_count(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list:
        """Terms in increasing canonical order."""
        import functools

        return sorted(self.terms.items(), key=functools.cmp_to_key(lambda x, y: mono_cmp(x[0], y[0])))

    def constant_value(self) -> Coeff:
        """The coefficient of the trivial monomial (whole value must be constant)."""
        if not self.terms:
            return C_ZERO
        if len(self.terms) == 1 and MONO_ONE in self.terms:
            return self.terms[MONO_ONE]
        raise ValueError("not a constant: %r" % self)

    # -- arithmetic

    @staticmethod
    def _coerce(other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Coeff)):
            return LaurentPoly.const(other)
        return NotImplemented

    def __add__(self, other) -> "LaurentPoly":
        other = LaurentPoly._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        d = dict(self.terms)
        for m, c in other.terms.items():
            cur = d.get(m)
            if cur is None:
                d[m] = c
            else:
                n = cur + c
                if n.is_zero():
                    del d[m]
                else:
                    d[m] = n
        return LaurentPoly(d)

    def __radd__(self, other) -> "LaurentPoly":
        return self.__add__(other)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        other = LaurentPoly._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        other = LaurentPoly._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "LaurentPoly":
        other = LaurentPoly._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.terms, other.terms
        if not a or not b:
            return P_ZERO
        if len(a) > len(b):
            a, b = b, a
        if len(a) == 1:
            ((ma, ca),) = a.items()
            if ma == MONO_ONE and ca.is_one():
                return LaurentPoly(b) if b is not self.terms else self
            return LaurentPoly({mono_mul(ma, m): ca * c for m, c in b.items()})
        d: dict = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = mono_mul(ma, mb)
                cur = d.get(m)
                if cur is None:
                    d[m] = ca * cb
                else:
                    n = cur + ca * cb
                    if n.is_zero():
                        del d[m]
                    else:
                        d[m] = n
        return LaurentPoly(d)

    def __rmul__(self, other) -> "LaurentPoly":
        return self.__mul__(other)

    def scale(self, c) -> "LaurentPoly":
        if isinstance(c, int):
            c = Coeff.of(c)
        if c.is_zero():
            return P_ZERO
        if c.is_one():
            return self
        return LaurentPoly({m: cc * c for m, cc in self.terms.items()})

    def mul_monomial(self, mono: Monomial, c=C_ONE) -> "LaurentPoly":
        if mono == MONO_ONE and c is C_ONE:
            return self
        return LaurentPoly({mono_mul(m, mono): cc * c for m, cc in self.terms.items()})

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            return self.invert() ** (-k)
        result = P_ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base_needed = k > 1
            k >>= 1
            if base_needed and k:
                base = base * base
        return result

    def invert(self) -> "LaurentPoly":
        """Inverse of a unit (signed monomial); error otherwise."""
        if not self.is_unit():
            raise ValueError("only signed monomials are invertible: %r" % self)
        ((m, c),) = self.terms.items()
        return LaurentPoly({mono_inv(m): c})

    # -- structure

    def monomial_part(self) -> Monomial:
        """Componentwise minimum exponent over all terms; factoring it out
        leaves a polynomial with nonnegative exponents in which every
        variable attains exponent 0 in some term."""
        if not self.terms:
            return MONO_ONE
        allvars = self.variables()
        mins = None
        for m in self.terms:
            d = dict(m)
            if mins is None:
                mins = {v: d.get(v, 0) for v in allvars}
            else:
                for v in allvars:
                    e = d.get(v, 0)
                    if e < mins[v]:
                        mins[v] = e
        return mono_from_dict(mins)

    def strip_monomial(self):
        """(monomial part, polynomial part): ``self == mono * poly`` with the
        polynomial part having nonnegative exponents, each variable hitting 0."""
        mp = self.monomial_part()
        if mp == MONO_ONE:
            return MONO_ONE, self
        inv = mono_inv(mp)
        return mp, LaurentPoly({mono_mul(m, inv): c for m, c in self.terms.items()})

    def content_and_primitive(self):
        """(content, primitive part).

        The content is the GCD in Z[params] of all coefficients,
        sign-normalized so its first term is positive; the primitive part
        keeps the sign and the monomial part of the input, so
        ``input == content * primitive`` exactly.
        """
        if not self.terms:
            raise ValueError("the zero polynomial has no content")
        cont = C_ZERO
        for c in self.terms.values():
            cont = coeff_gcd(cont, c)
            if cont.is_one():
                return C_ONE, self
        cont = _coeff_pospm(cont)
        prim = {m: _coeff_exact_div(c, cont) for m, c in self.terms.items()}
        return cont, LaurentPoly(prim)

    def max_exp(self, v: VarId) -> int:
        return max((dict(m).get(v, 0) for m in self.terms), default=0)

    def min_exp(self, v: VarId) -> int:
        return min((dict(m).get(v, 0) for m in self.terms), default=0)

    def slices(self, v: VarId) -> dict:
        """Decompose by the exponent of ``v``: {exp: coefficient polynomial
        free of v} with ``self == sum(slice * v^exp)``."""
        out: dict = {}
        for m, c in self.terms.items():
            e = 0
            rest = []
            for vv, ee in m:
                if vv is v:
                    e = ee
                else:
                    rest.append((vv, ee))
            out.setdefault(e, {})[tuple(rest)] = c
        return {e: LaurentPoly(d) for e, d in out.items()}

    # -- evaluation / substitution

    def evaluate(self, values: Mapping[VarId, Fraction], params: Mapping[str, Fraction] = None,
                 allow_zero: bool = False) -> Fraction:
        """Exact rational evaluation.

        Every variable occurring in the polynomial needs a value.  Zero
        values are rejected: a zero at a negative exponent is a genuine
        error, and the default contract requires all values nonzero unless
        ``allow_zero`` is set (in which case zeros are fine wherever the
        exponent is nonnegative).
        """
        params = params or {}
        total = Fraction(0)
        for m, c in self.terms.items():
            prod = c.evaluate(params)
            for var, e in m:
                if var not in values:
                    raise KeyError("no value supplied for variable %s" % var.text)
                x = Fraction(values[var])
                if x == 0:
                    if e < 0:
                        raise ZeroDivisionError("zero value for %s at negative exponent" % var.text)
                    if not allow_zero:
                        raise ValueError("zero value for %s (pass allow_zero=True to permit)" % var.text)
                prod *= x ** e
            total += prod
        return total

    def compose(self, values) -> "LaurentPoly":
        """Substitute a value for each placeholder ``Yi``.

        ``values`` is either a sequence (``values[i-1]`` replaces ``Yi``) or
        a mapping keyed by slot number.  Negative placeholder exponents
        require the corresponding value to be a unit.  Any non-placeholder
        variable in ``self`` is an error.
        """
        if isinstance(values, Mapping):
            lookup = dict(values)
        else:
            lookup = {i + 1: v for i, v in enumerate(values)}
        cache: dict = {}

        def power(i: int, e: int) -> "LaurentPoly":
            got = cache.get((i, e))
            if got is None:
                base = lookup[i]
                got = base ** e if e >= 0 else base.invert() ** (-e)
                cache[(i, e)] = got
            return got

        total = P_ZERO
        for m, c in self.terms.items():
            prod = LaurentPoly.const(c)
            for v, e in m:
                if v.kind != 1:
                    raise ValueError("compose expects placeholder variables only, got %s" % v.text)
                i = v.coords[0]
                if i not in lookup:
                    raise ValueError("no value for placeholder %s" % v.text)
                prod = prod * power(i, e)
            total = total + prod
        return total

    def substitute(self, mapping: Mapping[VarId, "LaurentPoly"]) -> "LaurentPoly":
        """Replace variables by polynomial values (units required wherever a
        replaced variable occurs with a negative exponent)."""
        total = P_ZERO
        for m, c in self.terms.items():
            prod = LaurentPoly.const(c)
            for v, e in m:
                if v in mapping:
                    val = mapping[v]
                    prod = prod * (val ** e if e >= 0 else val.invert() ** (-e))
                else:
                    prod = prod.mul_monomial(((v, e),))
            total = total + prod
        return total

    # -- value semantics

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        from . import textform

        return textform.format_poly(self)


P_ZERO = LaurentPoly({})
P_ONE = LaurentPoly({MONO_ONE: C_ONE})


# ---------------------------------------------------------------------------
# Exact division


def exact_div(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Exact division: returns r with ``q * r == p``; raises
    :class:`NotDivisibleError` (carrying the first obstructing remainder term
    under the canonical order) if no such Laurent polynomial exists.

    Monomial parts are stripped first, so division by any signed monomial
    (unit) always succeeds; what remains is ordinary multivariate polynomial
    division by the leading term.  For exact division the division loop may
    fail fast: if the leading term of the remainder is not reducible by the
    leading term of the divisor it can never be cancelled later, because
    every subsequent reduction only introduces strictly smaller terms.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return P_ZERO
    mp, pp = p.strip_monomial()
    mq, qq = q.strip_monomial()
    shift = mono_div(mp, mq)
    if len(qq.terms) == 1:
        ((m, c),) = qq.terms.items()
        # m is trivial here (single-term polynomial part); coefficient division
        out = {}
        for mm, cc in pp.terms.items():
            d = _coeff_exact_div(cc, c)
            if d is None:
                raise NotDivisibleError((mono_mul(mm, shift), cc), "coefficient not divisible")
            out[mono_mul(mm, shift)] = d
        return LaurentPoly(out)
    return _poly_exact_div(pp, qq, shift)


def try_exact_div(p: LaurentPoly, q: LaurentPoly):
    try:
        return exact_div(p, q)
    except NotDivisibleError:
        return None


def divides(q: LaurentPoly, p: LaurentPoly) -> bool:
    return try_exact_div(p, q) is not None


def _dense_key(universe_index: Mapping[VarId, int], m: Monomial, width: int) -> tuple:
    exps = [0] * width
    for v, e in m:
        exps[universe_index[v]] = e
    return tuple(exps)


def _poly_exact_div(pp: LaurentPoly, qq: LaurentPoly, shift: Monomial) -> LaurentPoly:
    """Division loop on dense exponent tuples over the joint variable set.

    Dense tuples make the canonical lex order the plain tuple order, so a
    heap (with lazy deletion) can track the remainder's leading term.
    """
    import heapq

    universe = sorted(pp.variables() | qq.variables(), key=lambda v: v.key)
    index = {v: i for i, v in enumerate(universe)}
    width = len(universe)

    rem: dict = {}
    heap: list = []
    for m, c in pp.terms.items():
        k = _dense_key(index, m, width)
        rem[k] = c
        heapq.heappush(heap, tuple(-e for e in k))
    qterms = sorted(
        ((_dense_key(index, m, width), c) for m, c in qq.terms.items()), reverse=True
    )
    qlead, qlead_c = qterms[0]
    quot: dict = {}

    while rem:
        k = None
        while heap:
            neg = heap[0]
            k = tuple(-e for e in neg)
            if k in rem:
                break
            heapq.heappop(heap)
        if k is None or k not in rem:
            raise AssertionError("heap lost track of the remainder")
        lead = k
        lead_c = rem[lead]
        qk = tuple(a - b for a, b in zip(lead, qlead))
        if any(e < 0 for e in qk):
            raise NotDivisibleError((_sparse_from_dense(universe, lead, shift), lead_c), "monomial not divisible")
        qc = _coeff_exact_div(lead_c, qlead_c)
        if qc is None:
            raise NotDivisibleError((_sparse_from_dense(universe, lead, shift), lead_c), "coefficient not divisible")
        quot[qk] = qc
        for mk, mc in qterms:
            tgt = tuple(a + b for a, b in zip(qk, mk))
            cur = rem.get(tgt)
            sub = qc * mc
            if cur is None:
                n = -sub
                rem[tgt] = n
                heapq.heappush(heap, tuple(-e for e in tgt))
            else:
                n = cur - sub
                if n.is_zero():
                    del rem[tgt]
                else:
                    rem[tgt] = n
    return LaurentPoly({mono_mul(_sparse_from_dense_raw(universe, k), shift): c for k, c in quot.items()})


def _sparse_from_dense_raw(universe, key) -> Monomial:
    return tuple((v, e) for v, e in zip(universe, key) if e)


def _sparse_from_dense(universe, key, shift: Monomial) -> Monomial:
    return mono_mul(_sparse_from_dense_raw(universe, key), shift)


# ---------------------------------------------------------------------------
# Monomial lemmas (exponent combinatorics)


def exponent_vector(p: LaurentPoly, universe: Sequence[VarId]) -> tuple:
    """The dense exponent tuple of a single-term polynomial over ``universe``."""
    if len(p.terms) != 1:
        raise ValueError("not a monomial: %r" % p)
    ((m, _),) = p.terms.items()
    d = dict(m)
    return tuple(d.get(v, 0) for v in universe)


def monomials_zdep_test(monomials: Sequence[LaurentPoly]) -> bool:
    """Linear independence over the coefficient field for a family of
    monomials: it holds exactly when their exponent vectors are pairwise
    distinct (two equal exponent vectors give an obvious dependency, and
    distinct monomials are independent because each spans its own degree)."""
    universe = sorted({v for p in monomials for v in p.variables()}, key=lambda v: v.key)
    vecs = [exponent_vector(p, universe) for p in monomials]
    return len(set(vecs)) == len(vecs)


def _fraction_rank(rows: Sequence[Sequence[int]]) -> int:
    mat = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        r += 1
        rank += 1
    return rank


class CompositionPreconditionError(ValueError):
    """A violated precondition of :func:`compose_is_monomial_check`.

    ``reason`` is ``"not-monomial"`` (some substituted value is zero or has
    several terms) or ``"dependent"`` (the exponent vectors are linearly
    dependent, so the values are algebraically dependent).
    """

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


def compose_is_monomial_check(phi: LaurentPoly, gs: Sequence[LaurentPoly]) -> bool:
    """Substitute monomials ``gs`` for the placeholders of ``phi`` and report
    whether the composition is a single monomial.

    Preconditions (checked): every ``gs[i]`` is a nonzero single-term value,
    and the family is algebraically independent, which for monomials means
    the integer matrix of exponent vectors has full row rank.  Under these
    preconditions the answer equals "``phi`` itself is a monomial": distinct
    Z-independent exponents keep distinct terms of ``phi`` distinct after
    substitution, so no cross-term cancellation can collapse the sum.
    """
    for g in gs:
        if g.is_zero() or not g.is_monomial():
            raise CompositionPreconditionError(
                "not-monomial", "compose_is_monomial_check expects nonzero monomials"
            )
    universe = sorted({v for g in gs for v in g.variables()}, key=lambda v: v.key)
    vecs = [exponent_vector(g, universe) for g in gs]
    if universe and _fraction_rank(vecs) != len(gs):
        raise CompositionPreconditionError(
            "dependent", "monomials are not algebraically independent (exponent rank deficit)"
        )
    if not universe and len(gs) > 0:
        # constants are never algebraically independent
        raise CompositionPreconditionError(
            "dependent", "monomials are not algebraically independent (all constant)"
        )
    return phi.compose(gs).is_monomial()
