"""Exact rational matrices: rank, kernel bases, products, span membership."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence


class LabelMismatch(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class RationalMatrix:
    """Dense matrix of :class:`~fractions.Fraction` with labelled rows/columns."""

    rows: tuple[tuple[Fraction, ...], ...]
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.rows) != len(self.row_labels):
            raise ValueError("row label count does not match row count")
        for row in self.rows:
            if len(row) != len(self.col_labels):
                raise ValueError("column label count does not match row width")
        if len(set(self.row_labels)) != len(self.row_labels):
            raise ValueError("row labels must be unique")
        if len(set(self.col_labels)) != len(self.col_labels):
            raise ValueError("column labels must be unique")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], row_labels=None, col_labels=None):
        data = tuple(tuple(_frac(x) for x in row) for row in rows)
        ncols = len(data[0]) if data else (len(col_labels) if col_labels else 0)
        if row_labels is None:
            row_labels = tuple(f"r{i}" for i in range(len(data)))
        if col_labels is None:
            col_labels = tuple(f"c{j}" for j in range(ncols))
        return cls(data, tuple(row_labels), tuple(col_labels))

    @classmethod
    def zeros(cls, row_labels, col_labels):
        z = Fraction(0)
        return cls(tuple(tuple(z for _ in col_labels) for _ in row_labels),
                   tuple(row_labels), tuple(col_labels))

    @classmethod
    def identity(cls, labels):
        labels = tuple(labels)
        n = len(labels)
        return cls.from_rows([[1 if i == j else 0 for j in range(n)]
                              for i in range(n)], labels, labels)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_labels), len(self.col_labels)

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.rows)

    def entry(self, row_label: str, col_label: str) -> Fraction:
        return self.rows[self.row_labels.index(row_label)][
            self.col_labels.index(col_label)]

    def transpose(self) -> "RationalMatrix":
        cols = tuple(self.column(j) for j in range(len(self.col_labels)))
        return RationalMatrix(cols, self.col_labels, self.row_labels)

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != len(self.col_labels):
            raise LabelMismatch("vector length does not match column count")
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0))
                     for row in self.rows)

    def select_columns(self, cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix(tuple(tuple(row[j] for j in cols) for row in self.rows),
                              self.row_labels,
                              tuple(self.col_labels[j] for j in cols))

    def to_lists(self) -> list[list[Fraction]]:
        return [list(row) for row in self.rows]

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        return multiply(self, other)


def multiply(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    if a.col_labels != b.row_labels:
        raise LabelMismatch(
            f"cannot multiply: columns {a.col_labels} vs rows {b.row_labels}")
    bcols = [b.column(j) for j in range(len(b.col_labels))]
    rows = tuple(
        tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bcols)
        for row in a.rows)
    return RationalMatrix(rows, a.row_labels, b.col_labels)


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators; rank is unchanged."""
    out = []
    for row in rows:
        den = reduce(lcm, (Fraction(x).denominator for x in row), 1)
        out.append([int(Fraction(x) * den) for x in row])
    return out


def rank_of_rows(rows: Sequence[Sequence]) -> int:
    """Rank by Bareiss fraction-free elimination.

    The pivot is the first nonzero entry of the current column, lowest row
    index first.
    """
    m = _integer_rows(rows)
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        pivot = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        for i in range(r + 1, nrows):
            f = m[i][c]
            for j in range(c, ncols):
                # exact by Sylvester's identity
                m[i][j] = (p * m[i][j] - f * m[r][j]) // prev
        prev = p
        r += 1
    return r


def rank(m: RationalMatrix) -> int:
    return rank_of_rows(m.rows)


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and the list of pivot columns."""
    a = [[_frac(x) for x in row] for row in rows]
    if not a:
        return a, []
    nrows, ncols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def normalize_integer(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers, first nonzero positive."""
    v = [_frac(x) for x in v]
    den = reduce(lcm, (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, ints, 0)
    if g == 0:
        return tuple(ints)
    ints = [x // g for x in ints]
    first = next(x for x in ints if x)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def scale_to_integers(v: Sequence) -> tuple[int, ...]:
    """Like :func:`normalize_integer` but never flips the sign."""
    v = [_frac(x) for x in v]
    den = reduce(lcm, (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, ints, 0)
    return tuple(x // g for x in ints) if g else tuple(ints)


def kernel_basis_of_rows(rows: Sequence[Sequence], ncols: int) -> list[tuple[int, ...]]:
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    a, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -a[r][f]
        basis.append(normalize_integer(v))
    return basis


def kernel_basis(m: RationalMatrix) -> list[tuple[int, ...]]:
    """Right null space basis in canonical integer form.

    One vector per free column of the reduced echelon form (free entry 1),
    then scaled to coprime integers with the first nonzero entry positive.
    """
    return kernel_basis_of_rows(m.rows, len(m.col_labels))


def left_kernel_basis(m: RationalMatrix) -> list[tuple[int, ...]]:
    return kernel_basis(m.transpose())


def in_span(v: Sequence, basis: Sequence[Sequence]) -> bool:
    if all(_frac(x) == 0 for x in v):
        return True
    if not basis:
        return False
    if any(len(b) != len(v) for b in basis):
        raise LabelMismatch("vector and basis dimensions differ")
    return rank_of_rows(list(basis)) == rank_of_rows(list(basis) + [list(v)])


def same_span(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    ra = rank_of_rows(list(a)) if a else 0
    rb = rank_of_rows(list(b)) if b else 0
    if ra != rb:
        return False
    if ra == 0:
        return True
    return rank_of_rows(list(a) + list(b)) == ra
