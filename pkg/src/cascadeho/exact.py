"""Exact integer and rational linear algebra.

Everything here runs on arbitrary-precision ``int`` and ``fractions.Fraction``
only; no floating point is used anywhere.  The centrepiece is a Smith normal
form with unimodular transforms, used to compute homology of finitely
generated chain complexes over Z including torsion.

>>> m = IntMatrix.from_rows([[2, 4], [6, 8]])
>>> u, s, v = smith_normal_form(m)
>>> s.diagonal()
[2, 4]
>>> (u * m * v) == s
True
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import SquareNonzero


class IntMatrix:
    """Immutable sparse integer matrix.

    Entries are stored as a dict mapping (row, col) to a nonzero int.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        cleaned = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise IndexError(f"entry {(i, j)} outside {rows}x{cols}")
                if v:
                    cleaned[(i, j)] = int(v)
        self.entries = cleaned

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        data = [list(r) for r in rows]
        ncols = len(data[0]) if data else 0
        entries = {}
        for i, row in enumerate(data):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = int(v)
        return cls(len(data), ncols, entries)

    def get(self, i: int, j: int) -> int:
        return self.entries.get((i, j), 0)

    def to_rows(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()}
        )

    def diagonal(self):
        n = min(self.rows, self.cols)
        return [self.get(i, i) for i in range(n)]

    def is_zero(self) -> bool:
        return not self.entries

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        # index other's entries by row for sparse multiply
        by_row = {}
        for (i, j), v in other.entries.items():
            by_row.setdefault(i, []).append((j, v))
        acc = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                acc[(i, j)] = acc.get((i, j), 0) + a * b
        return IntMatrix(self.rows, other.cols, acc)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        acc = dict(self.entries)
        for key, v in other.entries.items():
            acc[key] = acc.get(key, 0) + v
        return IntMatrix(self.rows, self.cols, acc)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self):
        return f"IntMatrix({self.rows}x{self.cols}, {len(self.entries)} nonzero)"


# ---------------------------------------------------------------------------
# Smith normal form


def _swap_rows(a, i, j):
    a[i], a[j] = a[j], a[i]


def _add_row(a, dst, src, mult):
    """row[dst] += mult * row[src]"""
    ad, asrc = a[dst], a[src]
    for k in range(len(ad)):
        ad[k] += mult * asrc[k]


def _swap_cols(a, i, j):
    for row in a:
        row[i], row[j] = row[j], row[i]


def _add_col(a, dst, src, mult):
    """col[dst] += mult * col[src]"""
    for row in a:
        row[dst] += mult * row[src]


def _smith_dense(a, rows, cols):
    """In-place SNF of the dense list-of-lists ``a``.

    Returns (u, v, vinv) as dense matrices with u @ original @ v = a and
    vinv = v^-1.  The pivot at each step is a minimal-|value| nonzero entry
    of the remaining submatrix, which keeps intermediate coefficients small.
    """
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]
    vinv = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def col_op(dst, src, mult):
        # a.col[dst] += mult * a.col[src];  v tracks the same op,
        # vinv tracks the inverse (a row op with -mult, transposed order).
        _add_col(a, dst, src, mult)
        _add_col(v, dst, src, mult)
        _add_row(vinv, src, dst, -mult)

    def col_swap(i, j):
        _swap_cols(a, i, j)
        _swap_cols(v, i, j)
        _swap_rows(vinv, i, j)

    def row_op(dst, src, mult):
        _add_row(a, dst, src, mult)
        _add_row(u, dst, src, mult)

    def row_swap(i, j):
        _swap_rows(a, i, j)
        _swap_rows(u, i, j)

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # minimal-absolute-value pivot in the trailing submatrix
        piv = None
        for i in range(t, rows):
            for j in range(t, cols):
                val = a[i][j]
                if val and (piv is None or abs(val) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        row_swap(t, piv[0])
        col_swap(t, piv[1])

        while True:
            # clear column t below the pivot (Euclid on each pair)
            for i in range(t + 1, rows):
                while a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, -q)
                    if a[i][t]:
                        row_swap(t, i)
            # clear row t right of the pivot
            for j in range(t + 1, cols):
                while a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, -q)
                    if a[t][j]:
                        col_swap(t, j)
            if any(a[i][t] for i in range(t + 1, rows)):
                continue
            # pivot must divide the whole trailing submatrix, or the
            # divisibility chain can fail; fold a violating row in and redo.
            viol = next(
                (
                    i
                    for i in range(t + 1, rows)
                    for j in range(t + 1, cols)
                    if a[i][j] % a[t][t]
                ),
                None,
            )
            if viol is None:
                break
            row_op(t, viol, 1)
        t += 1

    for i in range(limit):
        if a[i][i] < 0:
            _add_row(a, i, i, -2)  # negate row i
            _add_row(u, i, i, -2)
    return u, v, vinv


def smith_with_inverse(m: IntMatrix):
    """SNF plus the inverse of the right transform.

    Returns (u, s, v, vinv) with u*m*v = s, u and v unimodular, s diagonal
    with non-negative entries in a divisibility chain, and vinv = v^-1.
    """
    a = m.to_rows()
    u, v, vinv = _smith_dense(a, m.rows, m.cols)
    return (
        IntMatrix.from_rows(u) if m.rows else IntMatrix.zero(0, 0),
        IntMatrix.from_rows(a) if m.rows else IntMatrix.zero(0, m.cols),
        IntMatrix.from_rows(v) if m.cols else IntMatrix.zero(0, 0),
        IntMatrix.from_rows(vinv) if m.cols else IntMatrix.zero(0, 0),
    )


def smith_normal_form(m: IntMatrix):
    """Return (u, s, v) with u*m*v = s in Smith normal form."""
    u, s, v, _ = smith_with_inverse(m)
    return u, s, v


def invariant_factors(m: IntMatrix):
    """Nonzero diagonal of the SNF of ``m``."""
    _, s, _ = smith_normal_form(m)
    return [d for d in s.diagonal() if d]


def rational_rank(m: IntMatrix) -> int:
    """Rank of ``m`` over Q by fraction-free-ish Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in m.to_rows()]
    rank = 0
    col = 0
    while rank < m.rows and col < m.cols:
        piv = next((i for i in range(rank, m.rows) if a[i][col]), None)
        if piv is None:
            col += 1
            continue
        a[rank], a[piv] = a[piv], a[rank]
        pr = a[rank]
        for i in range(rank + 1, m.rows):
            if a[i][col]:
                f = a[i][col] / pr[col]
                for j in range(col, m.cols):
                    a[i][j] -= f * pr[j]
        rank += 1
        col += 1
    return rank


# ---------------------------------------------------------------------------
# Chain complexes


@dataclass(frozen=True)
class ChainGenerator:
    """One basis element of a chain group."""

    gid: str
    grading: int
    homotopy_class: str = ""
    action: Fraction = Fraction(0)
    orbit: str = ""


@dataclass(frozen=True)
class ChainComplex:
    """Finitely generated complex over Z.

    ``differential`` columns are sources: entry (i, j) is the coefficient of
    generator i in d(generator j).  ``grading_modulus`` is 0 for a Z-grading
    or an even N >= 2 for a Z/N-grading (parity complexes use N = 2 with
    gradings 0/1).
    """

    generators: tuple
    differential: IntMatrix
    grading_modulus: int = 0

    def __post_init__(self):
        n = len(self.generators)
        if self.differential.rows != n or self.differential.cols != n:
            raise ValueError("differential shape does not match generators")
        if self.grading_modulus and (
            self.grading_modulus < 2 or self.grading_modulus % 2
        ):
            raise ValueError("grading modulus must be 0 or an even integer >= 2")

    def index_of(self, gid: str) -> int:
        for k, g in enumerate(self.generators):
            if g.gid == gid:
                return k
        raise KeyError(gid)

    def degree_key(self, grading: int):
        return grading % self.grading_modulus if self.grading_modulus else grading

    def check_structure(self):
        """Structural sanity: grading drop 1, class preserved, action drops.

        Returns a list of human-readable violation strings (empty if clean).
        """
        out = []
        gens = self.generators
        for (i, j), val in sorted(self.differential.entries.items()):
            src, tgt = gens[j], gens[i]
            dg = src.grading - 1 - tgt.grading
            if self.grading_modulus:
                dg %= self.grading_modulus
            if dg != 0:
                out.append(f"grading: <d {src.gid}, {tgt.gid}> = {val}")
            if src.homotopy_class != tgt.homotopy_class:
                out.append(f"class: <d {src.gid}, {tgt.gid}> = {val}")
            same_orbit = src.orbit and src.orbit == tgt.orbit
            if not same_orbit and not tgt.action < src.action:
                out.append(f"action: <d {src.gid}, {tgt.gid}> = {val}")
        return out


def verify_square_zero(complex_: ChainComplex):
    """Raise SquareNonzero (with a witness pair) unless d o d = 0."""
    sq = complex_.differential * complex_.differential
    if sq.entries:
        (i, j), val = min(sq.entries.items())
        gens = complex_.generators
        raise SquareNonzero(gens[j].gid, gens[i].gid, val)


@dataclass(frozen=True)
class HomologyResult:
    """Homology groups split by (homotopy class, grading).

    ``groups`` maps (class, grading) to (free_rank, torsion) where torsion is
    a tuple of invariant factors > 1 in a divisibility chain.  Only nonzero
    groups are stored.
    """

    groups: dict = field(default_factory=dict)
    grading_modulus: int = 0

    def group(self, homotopy_class: str, grading: int):
        if self.grading_modulus:
            grading %= self.grading_modulus
        return self.groups.get((homotopy_class, grading), (0, ()))

    def rationalize(self):
        """Free ranks only — the result over Q."""
        out = {}
        for key, (free, _tors) in self.groups.items():
            if free:
                out[key] = free
        return out

    def restricted(self, max_grading: int):
        """Drop groups above ``max_grading`` (Z-graded results only)."""
        return HomologyResult(
            {k: v for k, v in self.groups.items() if k[1] <= max_grading},
            self.grading_modulus,
        )

    def describe(self):
        """Sorted human-readable lines like 'c | 2: Z^2 + Z/3'."""
        lines = []
        for (cls, grading), (free, tors) in sorted(
            self.groups.items(), key=lambda kv: (kv[0][0], kv[0][1])
        ):
            parts = []
            if free == 1:
                parts.append("Z")
            elif free:
                parts.append(f"Z^{free}")
            parts.extend(f"Z/{t}" for t in tors)
            label = f"{cls} | " if cls else ""
            lines.append(f"{label}{grading}: " + (" + ".join(parts) or "0"))
        return lines


def _block_homology(a: IntMatrix, b: IntMatrix):
    """Homology at the middle of  upper --b--> middle --a--> lower.

    Returns (free_rank, torsion_tuple).  Assumes im b is contained in ker a,
    i.e. d^2 = 0 was checked beforehand.
    """
    n = a.cols
    _, s, _, vinv = smith_with_inverse(a)
    diag = s.diagonal()
    rank_a = sum(1 for d in diag if d)
    kernel_cols = [j for j in range(n) if j >= len(diag) or diag[j] == 0]
    # express the columns of b in kernel coordinates
    coords = vinv * b
    for (i, _j), val in coords.entries.items():
        if i < len(diag) and diag[i] and val:
            raise ValueError("image not contained in kernel (d^2 != 0?)")
    reindex = {row: k for k, row in enumerate(kernel_cols)}
    m = IntMatrix(
        len(kernel_cols),
        b.cols,
        {
            (reindex[i], j): val
            for (i, j), val in coords.entries.items()
            if i in reindex
        },
    )
    factors = invariant_factors(m)
    free = len(kernel_cols) - len(factors)
    # independent cross-check over Q
    assert free == n - rank_a - rational_rank(b), "rank cross-check failed"
    return free, tuple(f for f in factors if f > 1)


def homology(complex_: ChainComplex, max_workers: Optional[int] = None) -> HomologyResult:
    """Integral homology of the complex, split by (class, grading)."""
    verify_square_zero(complex_)
    gens = complex_.generators
    modulus = complex_.grading_modulus
    blocks = {}
    for idx, g in enumerate(gens):
        key = (g.homotopy_class, complex_.degree_key(g.grading))
        blocks.setdefault(key, []).append(idx)

    d = complex_.differential
    by_col = {}
    for (i, j), v in d.entries.items():
        by_col.setdefault(j, []).append((i, v))

    def block_matrix(row_key, col_key):
        rows = blocks.get(row_key, [])
        cols = blocks.get(col_key, [])
        rmap = {idx: k for k, idx in enumerate(rows)}
        entries = {}
        for cj, idx in enumerate(cols):
            for i, v in by_col.get(idx, ()):
                if i in rmap:
                    entries[(rmap[i], cj)] = v
        return IntMatrix(len(rows), len(cols), entries)

    def one_block(key):
        cls, deg = key
        below = (cls, complex_.degree_key(deg - 1))
        above = (cls, complex_.degree_key(deg + 1))
        a = block_matrix(below, key)
        b = block_matrix(key, above)
        return key, _block_homology(a, b)

    keys = sorted(blocks)
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(one_block, keys))
    else:
        results = [one_block(k) for k in keys]

    groups = {}
    for key, (free, tors) in results:
        if free or tors:
            groups[key] = (free, tors)
    return HomologyResult(groups, modulus)


def determinantal_divisors(m: IntMatrix):
    """gcd of all i x i minors, i = 1..min(rows, cols); 0 once all vanish.

    Brute force; intended as an independent oracle for SNF (invariant factor
    i equals d_i / d_{i-1}).  Only usable for small matrices.
    """
    import math

    rows = m.to_rows()
    nmax = min(m.rows, m.cols)
    out = []
    for size in range(1, nmax + 1):
        g = 0
        for rsel in itertools.combinations(range(m.rows), size):
            for csel in itertools.combinations(range(m.cols), size):
                sub = [[rows[i][j] for j in csel] for i in rsel]
                g = math.gcd(g, _det(sub))
        out.append(g)
    return out


def _det(a):
    """Integer determinant by cofactor expansion (tiny matrices only)."""
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0]
    total = 0
    for j in range(n):
        if a[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in a[1:]]
            total += (-1) ** j * a[0][j] * _det(minor)
    return total
