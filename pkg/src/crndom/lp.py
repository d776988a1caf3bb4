"""Exact feasibility of homogeneous systems.

Decides whether some rational ``v`` satisfies::

    A v = 0,  v >= 0,  v[i] = 0 for i in zero_set,  v[j] >= 1 for j in one_set

Strict positivity ``v[j] > 0`` is always encoded as ``v[j] >= 1``: the
solution set without the one_set bounds is a cone, so any solution with
``v[j] > 0`` scales to one with ``v[j] >= 1``.

The engine is a phase-1 simplex over :class:`fractions.Fraction` with
Bland's rule. Infeasible answers come with a Farkas certificate ``y``:
``y . A[:, j] <= 0`` for every column not in zero_set and
``sum_{j in one_set} y . A[:, j] < 0``, which no admissible ``v`` can meet
because ``y . A v`` would then be negative.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .linalg import RationalMatrix, scale_to_integers


class Status(enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class FeasibilityQuery:
    matrix: RationalMatrix
    zero_set: frozenset = frozenset()
    one_set: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "zero_set", frozenset(self.zero_set))
        object.__setattr__(self, "one_set", frozenset(self.one_set))
        n = self.matrix.shape[1]
        if self.zero_set & self.one_set:
            raise ValueError("zero_set and one_set overlap")
        for j in self.zero_set | self.one_set:
            if not 0 <= j < n:
                raise ValueError(f"column index {j} out of range")


@dataclass(frozen=True)
class FeasibilityResult:
    status: Status
    witness: Optional[tuple[int, ...]] = None
    certificate: Optional[tuple[int, ...]] = None
    pivots: int = field(default=0, compare=False)

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE


def check_witness(q: FeasibilityQuery, v) -> bool:
    """Exact re-check of a claimed solution."""
    n = q.matrix.shape[1]
    if v is None or len(v) != n:
        return False
    if any(x < 0 for x in v):
        return False
    if any(v[i] != 0 for i in q.zero_set):
        return False
    if any(v[j] < 1 for j in q.one_set):
        return False
    return all(x == 0 for x in q.matrix.apply(v))


def check_certificate(q: FeasibilityQuery, y) -> bool:
    """Exact re-check of a Farkas certificate of infeasibility."""
    m, n = q.matrix.shape
    if y is None or len(y) != m:
        return False
    yA = q.matrix.transpose().apply(y)
    if any(yA[j] > 0 for j in range(n) if j not in q.zero_set):
        return False
    return sum((yA[j] for j in q.one_set), Fraction(0)) < 0


def _phase_one(M: list[list[Fraction]], b: list[Fraction]):
    """Minimize the sum of artificials for ``M u = b, u >= 0`` (b >= 0).

    Returns ``(objective, x, y)`` where ``x`` is the basic solution for the
    structural variables and ``y`` the simplex multipliers of the final basis.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    width = n + m
    # tableau rows: structural columns, artificial columns, rhs
    T = [M[i] + [Fraction(1 if k == i else 0) for k in range(m)] + [b[i]]
         for i in range(m)]
    basis = [n + i for i in range(m)]
    cost = [Fraction(0)] * n + [Fraction(1)] * m
    pivots = 0

    def reduced_costs():
        rc = []
        for j in range(width):
            z = sum((cost[basis[i]] * T[i][j] for i in range(m)), Fraction(0))
            rc.append(cost[j] - z)
        return rc

    rc = reduced_costs()
    while True:
        entering = next((j for j in range(width) if rc[j] < 0), None)
        if entering is None:
            break
        best = None
        for i in range(m):
            a = T[i][entering]
            if a > 0:
                ratio = T[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            # cannot happen for a phase-1 problem (objective bounded below by 0)
            raise RuntimeError("phase-1 objective unbounded")
        r = best[1]
        p = T[r][entering]
        T[r] = [x / p for x in T[r]]
        for i in range(m):
            if i != r and T[i][entering] != 0:
                f = T[i][entering]
                T[i] = [x - f * y for x, y in zip(T[i], T[r])]
        f = rc[entering]
        rc = [x - f * y for x, y in zip(rc, T[r][:width])]
        basis[r] = entering
        pivots += 1

    objective = sum((cost[basis[i]] * T[i][-1] for i in range(m)), Fraction(0))
    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[i][-1]
    # artificial columns started as the identity, so they now hold B^-1
    y = [sum((cost[basis[i]] * T[i][n + k] for i in range(m)), Fraction(0))
         for k in range(m)]
    return objective, x, y, pivots


def solve(q: FeasibilityQuery) -> FeasibilityResult:
    A = q.matrix
    m, n = A.shape
    keep = [j for j in range(n) if j not in q.zero_set]
    # v_j = 1 + u_j on one_set, v_j = u_j elsewhere
    M = [[A.rows[i][j] for j in keep] for i in range(m)]
    b = [-sum((A.rows[i][j] for j in q.one_set), Fraction(0)) for i in range(m)]
    signs = [1 if bi >= 0 else -1 for bi in b]
    M = [[s * x for x in row] for s, row in zip(signs, M)]
    b = [s * bi for s, bi in zip(signs, b)]

    if m == 0:
        objective, u, y, pivots = Fraction(0), [Fraction(0)] * len(keep), [], 0
    elif not keep:
        objective = sum(b, Fraction(0))
        u, y, pivots = [], [Fraction(1)] * m, 0
    else:
        objective, u, y, pivots = _phase_one(M, b)

    if objective == 0:
        v = [Fraction(0)] * n
        for pos, j in enumerate(keep):
            v[j] = u[pos] + (1 if j in q.one_set else 0)
        return FeasibilityResult(Status.FEASIBLE, witness=scale_to_integers(v),
                                 pivots=pivots)
    cert = scale_to_integers([s * yi for s, yi in zip(signs, y)])
    return FeasibilityResult(Status.INFEASIBLE, certificate=cert, pivots=pivots)


def full_support_feasible(a: RationalMatrix, side: str = "columns") -> FeasibilityResult:
    """Is there an invariant with full support?

    ``side="columns"``: ``A v = 0`` with ``v >= 1`` (T-invariant style);
    ``side="rows"``: ``v^T A = 0`` with ``v >= 1`` (P-invariant style).
    """
    if side == "rows":
        a = a.transpose()
    elif side != "columns":
        raise ValueError("side must be 'rows' or 'columns'")
    return solve(FeasibilityQuery(a, frozenset(), frozenset(range(a.shape[1]))))
