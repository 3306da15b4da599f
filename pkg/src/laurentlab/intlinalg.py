"""Exact integer linear algebra for small matrices.

Everything here works on plain ``list[list[int]]`` matrices and
``tuple[int, ...]`` vectors; sizes in this package are tiny (lattice ranks
up to ~4, shift systems up to ~10 vectors), so clarity beats asymptotics.

The two workhorses:

- :func:`snf` computes a Smith normal form with explicit unimodular
  transforms ``U @ A @ V == D``, powering exact linear solves, kernels and
  cokernel (surjectivity) tests over the integers;
- :func:`separating_functional` decides, with a certificate either way,
  whether integer vectors ``v_1..v_N`` admit ``w`` with ``w . v_i <= -1``
  for all ``i`` — or instead a nontrivial nonnegative integer dependency
  ``sum c_i v_i = 0``.  (Exactly one of the two exists, by LP duality; the
  implementation is Fourier–Motzkin elimination with Farkas multiplier
  tracking, all in exact rational arithmetic.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple


Matrix = List[List[int]]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def mat_vec(a: Matrix, x: Sequence[int]) -> Tuple[int, ...]:
    return tuple(sum(row[j] * x[j] for j in range(len(x))) for row in a)


def det_int(a: Matrix) -> int:
    """Exact determinant (fraction-free Gaussian elimination, Bareiss)."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass
class SNFResult:
    """``U @ A @ V == D`` with unimodular U, V; D diagonal, each diagonal
    entry nonnegative and dividing the next; ``rank`` nonzero entries."""

    U: Matrix
    D: Matrix
    V: Matrix
    rank: int

    def diagonal(self) -> Tuple[int, ...]:
        return tuple(self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0)))


def snf(a: Matrix) -> SNFResult:
    m = len(a)
    n = len(a[0]) if m else 0
    D = [list(row) for row in a]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):  # row[dst] += c * row[src]
        D[dst] = [x + c * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for row in D:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    def negate_row(i):
        D[i] = [-x for x in D[i]]
        U[i] = [-x for x in U[i]]

    t = 0
    while t < min(m, n):
        # find the nonzero pivot of least magnitude in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] != 0 and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        # clear row and column t; restart if a reduction creates smaller entries
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if D[i][t] != 0:
                    q = D[i][t] // D[t][t]
                    add_row(i, t, -q)
                    if D[i][t] != 0:  # remainder smaller than pivot: swap up
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j] != 0:
                    q = D[t][j] // D[t][t]
                    add_col(j, t, -q)
                    if D[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
        # divisibility: pivot must divide every later entry
        fixed = False
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if D[i][j] % D[t][t] != 0:
                    add_row(t, i, 1)
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue  # re-run the clearing loop with the new row
        if D[t][t] < 0:
            negate_row(t)
        t += 1
    rank = sum(1 for i in range(min(m, n)) if D[i][i] != 0)
    return SNFResult(U, D, V, rank)


def solve_integer(a: Matrix, b: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """One integer solution of ``A x = b``, or None."""
    m = len(a)
    n = len(a[0]) if m else 0
    if m == 0:
        return tuple([0] * n)
    res = snf(a)
    ub = mat_vec(res.U, list(b))
    y = [0] * n
    for i in range(m):
        d = res.D[i][i] if i < min(m, n) else 0
        if d == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % d != 0:
                return None
            y[i] = ub[i] // d
    return mat_vec(res.V, y)


def kernel_basis(a: Matrix) -> List[Tuple[int, ...]]:
    """A basis of the integer kernel of ``A`` (columns of V past the rank)."""
    m = len(a)
    n = len(a[0]) if m else 0
    if m == 0:
        return [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    res = snf(a)
    out = []
    for j in range(res.rank, n):
        out.append(tuple(res.V[i][j] for i in range(n)))
    return out


def cokernel_trivial(a: Matrix) -> bool:
    """Is ``coker(A) = Z^m / col-span(A)`` trivial?  True iff the SNF
    diagonal has m ones."""
    m = len(a)
    if m == 0:
        return True
    res = snf(a)
    diag = res.diagonal()
    return res.rank == m and all(d == 1 for d in diag[:m])


# ---------------------------------------------------------------------------
# Separating functionals (Fourier–Motzkin with Farkas certificates)


@dataclass
class SeparationResult:
    """Outcome of :func:`separating_functional`.

    ``functional`` set: integer w with ``w . v_i <= -1`` for every input.
    ``dependency`` set: nonnegative integers c, not all zero, with
    ``sum c_i v_i = 0``.  Exactly one of the two is set.
    """

    functional: Optional[Tuple[int, ...]] = None
    dependency: Optional[Tuple[int, ...]] = None


def _scale_to_int(fracs: Sequence[Fraction]) -> Tuple[int, ...]:
    denom = 1
    for f in fracs:
        denom = denom * f.denominator // math.gcd(denom, f.denominator)
    ints = [int(f * denom) for f in fracs]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


def separating_functional(vectors: Sequence[Sequence[int]]) -> SeparationResult:
    """Decide ``exists w: w . v_i <= -1 for all i`` with a certificate.

    Infeasibility yields the dual witness: a nonnegative, nontrivial integer
    combination of the ``v_i`` summing to zero.
    """
    vecs = [tuple(v) for v in vectors]
    nv = len(vecs)
    if nv == 0:
        return SeparationResult(functional=tuple())
    r = len(vecs[0])
    # inequalities a . w <= b, with Farkas multipliers over the originals
    ineqs = [
        (tuple(Fraction(x) for x in v), Fraction(-1), tuple(Fraction(1 if k == i else 0) for k in range(nv)))
        for i, v in enumerate(vecs)
    ]
    bounds_stack = []
    for var in range(r):
        pos = [q for q in ineqs if q[0][var] > 0]
        neg = [q for q in ineqs if q[0][var] < 0]
        rest = [q for q in ineqs if q[0][var] == 0]
        bounds_stack.append((var, pos, neg))
        new = list(rest)
        for ap, bp, lp in pos:
            for an, bn, ln in neg:
                cp, cn = ap[var], -an[var]
                # cn * (ap.w) + cp * (an.w) <= cn*bp + cp*bn  eliminates var
                coeffs = tuple(cn * x + cp * y for x, y in zip(ap, an))
                rhs = cn * bp + cp * bn
                lam = tuple(cn * x + cp * y for x, y in zip(lp, ln))
                new.append((coeffs, rhs, lam))
        ineqs = new
    # all variables eliminated: constraints are 0 <= b
    for coeffs, rhs, lam in ineqs:
        if rhs < 0:
            dep = _scale_to_int(lam)
            return SeparationResult(dependency=dep)
    # feasible: back-substitute, var by var in reverse order
    w = [Fraction(0)] * r
    for var, pos, neg in reversed(bounds_stack):
        # pos: a[var] > 0 gives upper bounds; neg gives lower bounds
        hi = None
        lo = None
        for a_, b_, _ in pos:
            rest = b_ - sum(a_[j] * w[j] for j in range(r) if j != var)
            bound = rest / a_[var]
            hi = bound if hi is None else min(hi, bound)
        for a_, b_, _ in neg:
            rest = b_ - sum(a_[j] * w[j] for j in range(r) if j != var)
            bound = rest / a_[var]
            lo = bound if lo is None else max(lo, bound)
        if hi is None and lo is None:
            w[var] = Fraction(0)
        elif hi is None:
            w[var] = lo
        elif lo is None:
            w[var] = hi
        else:
            w[var] = (lo + hi) / 2
    denom = 1
    for f in w:
        denom = denom * f.denominator // math.gcd(denom, f.denominator)
    wi = tuple(int(f * denom) for f in w)
    assert all(sum(a * b for a, b in zip(wi, v)) <= -1 for v in vecs)
    return SeparationResult(functional=wi)
