"""Exact integer and rational linear algebra.

Everything here works on Python integers and ``fractions.Fraction``; there is
no floating point anywhere.  The subdeterminant routines are exponential and
meant for auditing small matrices.
"""

from __future__ import annotations

import operator
from fractions import Fraction
from itertools import combinations
from math import gcd, isqrt, prod
from typing import Iterable, Sequence


class DimensionError(ValueError):
    """Raised on shape mismatches."""


class ExactMatrix:
    """Immutable dense integer matrix.

    ``cols`` must be given explicitly when there are no rows, otherwise it is
    inferred from the first row.
    """

    __slots__ = ("_data", "rows", "cols")

    def __init__(self, data: Iterable[Iterable[int]] = (), cols: int | None = None):
        rows = tuple(tuple(operator.index(x) for x in r) for r in data)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for i, r in enumerate(rows):
            if len(r) != cols:
                raise DimensionError(f"row {i} has length {len(r)}, expected {cols}")
        object.__setattr__(self, "_data", rows)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", cols)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    def __reduce__(self):
        return ExactMatrix, (self._data, self.cols)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx):
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry {idx} outside {self.rows}x{self.cols}")
        return self._data[i][j]

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return self.rows

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.cols == other.cols and self._data == other._data

    def __hash__(self):
        return hash((self.cols, self._data))

    def __repr__(self):
        return f"ExactMatrix({[list(r) for r in self._data]!r}, cols={self.cols})"

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def transpose(self) -> "ExactMatrix":
        if self.rows == 0:
            return ExactMatrix([()] * self.cols, cols=0)
        return ExactMatrix(zip(*self._data), cols=self.rows)

    T = property(transpose)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix([[self._data[i][j] for j in cols] for i in rows], cols=len(cols))

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if other.cols != self.cols:
            raise DimensionError("vstack needs equal column counts")
        return ExactMatrix(self._data + other._data, cols=self.cols)

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if other.rows != self.rows:
            raise DimensionError("hstack needs equal row counts")
        return ExactMatrix([a + b for a, b in zip(self._data, other._data)], cols=self.cols + other.cols)

    def matvec(self, x: Sequence[int]) -> tuple[int, ...]:
        if len(x) != self.cols:
            raise DimensionError(f"vector length {len(x)} != {self.cols}")
        return tuple(sum(a * v for a, v in zip(r, x)) for r in self._data)

    def max_abs_entry(self) -> int:
        return max((abs(v) for r in self._data for v in r), default=0)


def as_matrix(M) -> ExactMatrix:
    return M if isinstance(M, ExactMatrix) else ExactMatrix(M)


# --------------------------------------------------------------------------
# determinants
# --------------------------------------------------------------------------

def _bareiss(a: list[list[int]]) -> int:
    # a is consumed
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det(M) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination.

    The 0x0 determinant is 1.
    """
    M = as_matrix(M)
    if M.rows != M.cols:
        raise DimensionError(f"determinant of non-square {M.rows}x{M.cols} matrix")
    return _bareiss([list(r) for r in M])


# --------------------------------------------------------------------------
# maximum absolute subdeterminant
# --------------------------------------------------------------------------

def _canon(vec: tuple[int, ...]) -> tuple[int, ...]:
    # representative of {vec, -vec}
    for v in vec:
        if v:
            return vec if v > 0 else tuple(-x for x in vec)
    return vec


def _is_unit(vec) -> bool:
    nz = [v for v in vec if v]
    return len(nz) == 1 and abs(nz[0]) == 1


def _kernel(rows: list[tuple[int, ...]]) -> tuple[list[tuple[int, ...]], int]:
    """Strip rows/columns that cannot raise the maximum beyond 1.

    Zero rows/columns and sign-duplicates never matter.  A unit row or unit
    column can be removed at the cost of remembering that 1 is attained.
    Returns the core matrix and that floor value.
    """
    floor = 0
    changed = True
    while changed and rows and rows[0]:
        changed = False
        seen = set()
        kept = []
        for r in rows:
            if not any(r):
                continue
            if _is_unit(r):
                floor = 1
                changed = True
                continue
            key = _canon(r)
            if key in seen:
                changed = True
                continue
            seen.add(key)
            kept.append(r)
        if len(kept) != len(rows):
            changed = True
        rows = kept
        if not rows:
            break
        cols = list(zip(*rows))
        seen = set()
        keep_cols = []
        for j, col in enumerate(cols):
            if not any(col):
                continue
            if _is_unit(col):
                floor = 1
                continue
            key = _canon(col)
            if key in seen:
                continue
            seen.add(key)
            keep_cols.append(j)
        if len(keep_cols) != len(cols):
            changed = True
            rows = [tuple(r[j] for j in keep_cols) for r in rows]
            if not keep_cols:
                rows = []
    return rows, floor


def _hadamard_sq(rows: list[tuple[int, ...]], s: int) -> int:
    # squared Hadamard bound for any s x s submatrix drawn from these rows
    norms = sorted((sum(v * v for v in r) for r in rows), reverse=True)
    return prod(norms[:s])


def max_abs_subdet(M, cap: int | None = None) -> int:
    """Largest ``|det|`` over all square submatrices of ``M``.

    Exponential in the matrix size: intended for auditing desk-scale
    matrices.  Sizes are scanned from large to small and the scan stops once
    the Hadamard bound of the remaining sizes cannot beat the best value.
    With ``cap`` the search also stops as soon as a value ``>= cap`` is seen,
    in which case only that lower bound is returned.

    Empty and all-zero matrices give 0.
    """
    M = as_matrix(M)
    core, best = _kernel([r for r in M])
    if not core:
        return best
    best = max(best, max(abs(v) for r in core for v in r))
    if cap is not None and best >= cap:
        return best
    # enumerate column subsets of the smaller side
    if len(core[0]) > len(core):
        core = [tuple(c) for c in zip(*core)]
    m, n = len(core), len(core[0])
    col_norms = [sum(core[i][j] ** 2 for i in range(m)) for j in range(n)]
    for s in range(min(m, n), 1, -1):
        bound_sq = min(_hadamard_sq(core, s), prod(sorted(col_norms, reverse=True)[:s]))
        if bound_sq <= best * best:
            break
        for cols in combinations(range(n), s):
            if prod(col_norms[j] for j in cols) <= best * best:
                continue
            # A unit row or unit column only reproduces an (s-1)-minor, which the
            # smaller sizes cover, so such rows are dropped and such column
            # sets skipped.
            seen = set()
            restricted = []
            for r in core:
                rr = tuple(r[j] for j in cols)
                if not any(rr) or _is_unit(rr):
                    continue
                key = _canon(rr)
                if key not in seen:
                    seen.add(key)
                    restricted.append(rr)
            if len(restricted) < s:
                continue
            if any(_is_unit(col) or not any(col) for col in zip(*restricted)):
                continue
            best = _best_rowset(restricted, s, best, cap)
            if cap is not None and best >= cap:
                return best
    return best


def _best_rowset(rows: list[tuple[int, ...]], s: int, best: int, cap: int | None) -> int:
    """Max ``|det|`` over ``s``-row subsets of ``rows`` (each of length ``s``).

    Depth-first over row subsets, tracking the Gram determinants
    ``g_j = prod |b_i*|^2`` of the chosen prefix with the integral
    Gram-Schmidt recurrence (all divisions exact).  Since ``|b*| <= |b|``,
    ``g_j`` times the largest remaining squared norms bounds ``det^2``.
    """
    rows = sorted(rows, key=lambda r: -sum(v * v for v in r))
    norms = [sum(v * v for v in r) for r in rows]
    nr = len(rows)
    best_sq = best * best
    limit = None if cap is None else cap * cap
    vecs: list = []
    lams: list = []
    gram = [1]

    def dfs(start):
        nonlocal best_sq
        depth = len(vecs)
        need = s - depth
        g = gram[depth]
        for i in range(start, nr - need + 1):
            if g * prod(norms[i:i + need]) <= best_sq:
                return
            r = rows[i]
            lam = []
            u = 0
            for q in range(depth + 1):
                other = vecs[q] if q < depth else r
                lq = lams[q] if q < depth else lam
                u = sum(a * b for a, b in zip(r, other))
                for t in range(q):
                    u = (gram[t + 1] * u - lq[t] * lam[t]) // gram[t]
                if q < depth:
                    lam.append(u)
            if u == 0:
                continue
            if need == 1:
                if u > best_sq:
                    best_sq = u
                    if limit is not None and best_sq >= limit:
                        return
                continue
            if u * prod(norms[i + 1:i + need]) <= best_sq:
                continue
            vecs.append(r)
            lams.append(lam)
            gram.append(u)
            dfs(i + 1)
            vecs.pop()
            lams.pop()
            gram.pop()
            if limit is not None and best_sq >= limit:
                return

    dfs(0)
    root = isqrt(best_sq)
    assert root * root == best_sq
    return max(best, root)


def is_totally_delta_modular(M, delta: int) -> bool:
    """True iff every square subdeterminant of ``M`` lies in ``[-delta, delta]``."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    return max_abs_subdet(M, cap=delta + 1) <= delta


# --------------------------------------------------------------------------
# row normalisation
# --------------------------------------------------------------------------

def gcd_normalize_row(row: Sequence[int], rhs: int) -> tuple[tuple[int, ...], int]:
    """Divide an integer ``<=``-row by the gcd of its entries.

    Over the integers ``a.x <= rhs`` is equivalent to ``(a/g).x <= floor(rhs/g)``.
    """
    g = 0
    for v in row:
        g = gcd(g, v)
    if g == 0:
        raise ValueError("cannot normalize an all-zero row")
    return tuple(v // g for v in row), rhs // g


# --------------------------------------------------------------------------
# rational elimination
# --------------------------------------------------------------------------

def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (rows, pivot columns)."""
    a = [[Fraction(v) for v in r] for r in rows]
    if ncols is None:
        ncols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        a[r] = [v / pv for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{y : rows @ y = 0}`` in exact rationals."""
    red, pivots = rref(rows, ncols)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        y = [Fraction(0)] * ncols
        y[f] = Fraction(1)
        for i, p in enumerate(pivots):
            y[p] = -red[i][f]
        basis.append(y)
    return basis
