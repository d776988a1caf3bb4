"""Random generators and independent oracles shared by the test modules.

Oracles here deliberately avoid the package's own linear algebra and LP code:
they lean on sympy and networkx, or on brute force.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import networkx as nx
import sympy

from crndom.model import Crn


def random_complex(rng: random.Random, n_species: int, max_coeff: int,
                   allow_zero: bool = True) -> dict[int, int]:
    while True:
        k = rng.randint(0 if allow_zero else 1, min(3, n_species))
        chosen = rng.sample(range(n_species), k)
        c = {s: rng.randint(1, max_coeff) for s in chosen}
        if c or allow_zero:
            return c


def random_crn(rng: random.Random, max_species: int = 6, max_reactions: int = 8,
               max_coeff: int = 3) -> Crn:
    """Arbitrary CRN; reactant and product always differ."""
    n_s = rng.randint(1, max_species)
    n_r = rng.randint(1, max_reactions)
    species = [f"S{i}" for i in range(n_s)]
    reactions = []
    while len(reactions) < n_r:
        lhs = random_complex(rng, n_s, max_coeff)
        rhs = random_complex(rng, n_s, max_coeff)
        if lhs == rhs:
            continue
        reactions.append((f"r{len(reactions)}", _named(species, lhs), _named(species, rhs)))
    return Crn.build(species, reactions)


def random_conservative_crn(rng: random.Random, max_species: int = 4,
                            max_reactions: int = 5, max_coeff: int = 2) -> Crn:
    """CRN preserving a random positive species weighting.

    Reactions also reuse complexes now and then so reaction graphs get
    non-trivial SCCs.
    """
    n_s = rng.randint(2, max_species)
    n_r = rng.randint(1, max_reactions)
    weights = [rng.randint(1, 2) for _ in range(n_s)]
    species = [f"S{i}" for i in range(n_s)]
    by_weight: dict[int, list[dict]] = {}
    for counts in itertools.product(range(max_coeff + 1), repeat=n_s):
        if 0 < sum(counts) <= 3:
            w = sum(a * b for a, b in zip(counts, weights))
            by_weight.setdefault(w, []).append(
                {i: c for i, c in enumerate(counts) if c})
    pools = [v for v in by_weight.values() if len(v) > 1]
    reactions = []
    seen = set()
    attempts = 0
    while len(reactions) < n_r and attempts < 200 and pools:
        attempts += 1
        pool = rng.choice(pools)
        if reactions and rng.random() < 0.4:
            # reuse an existing complex to close cycles
            _, lhs_prev, rhs_prev = rng.choice(reactions)
            lhs = _unnamed(species, rng.choice([lhs_prev, rhs_prev]))
            w = sum(weights[s] * c for s, c in lhs.items())
            pool = by_weight[w]
            if len(pool) < 2:
                continue
        else:
            lhs = rng.choice(pool)
        rhs = rng.choice(pool)
        key = (tuple(sorted(lhs.items())), tuple(sorted(rhs.items())))
        if lhs == rhs or key in seen:
            continue
        seen.add(key)
        reactions.append((f"r{len(reactions)}", _named(species, lhs), _named(species, rhs)))
    if not reactions:
        lhs, rhs = rng.sample(pools[0], 2)
        reactions.append(("r0", _named(species, lhs), _named(species, rhs)))
    return Crn.build(species, reactions)


def _named(species, c):
    return {species[s]: k for s, k in c.items()}


def _unnamed(species, c):
    return {species.index(s): k for s, k in c.items()}


# --- sympy / networkx oracles -------------------------------------------

def sympy_matrix(rows, ncols=None):
    if not rows:
        return sympy.zeros(0, ncols or 0)
    return sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator)
                          for x in row] for row in rows])


def incidence_oracle(crn: Crn):
    n = crn.num_species
    return [[r.product[s] - r.reactant[s] for r in crn.reactions] for s in range(n)]


def complexes_oracle(crn: Crn) -> list[tuple]:
    seen = []
    for r in crn.reactions:
        for c in (r.reactant, r.product):
            t = c.to_tuple(crn.num_species)
            if t not in seen:
                seen.append(t)
    return seen


def reaction_digraph(crn: Crn) -> nx.MultiDiGraph:
    g = nx.MultiDiGraph()
    n = crn.num_species
    for c in complexes_oracle(crn):
        g.add_node(c)
    for i, r in enumerate(crn.reactions):
        g.add_edge(r.reactant.to_tuple(n), r.product.to_tuple(n), key=i)
    return g


def linkage_classes(crn: Crn) -> int:
    return nx.number_weakly_connected_components(reaction_digraph(crn))


def scc_partition(crn: Crn) -> set[frozenset]:
    return {frozenset(c) for c in nx.strongly_connected_components(reaction_digraph(crn))}


# --- brute-force LP oracles ---------------------------------------------

def vertex_enumeration_feasible(A: list[list], zero_set, one_set) -> bool:
    """Decide ``A v = 0, v >= 0, v_zero = 0, v_one >= 1`` by enumerating
    basic solutions.

    Substituting ``v_j = 1 + u_j`` on one_set gives a polyhedron in standard
    form ``{x >= 0 : A' x = b}``. A non-empty one has a basic feasible
    solution, so trying every column subset of size at most the row count
    (solved exactly with sympy) is complete.
    """
    m = len(A)
    n = len(A[0]) if A else 0
    free = [j for j in range(n) if j not in zero_set]
    b = [-sum(Fraction(A[i][j]) for j in one_set) for i in range(m)]
    if all(x == 0 for x in b):
        return True
    for k in range(1, min(m, len(free)) + 1):
        for cols in itertools.combinations(free, k):
            M = sympy_matrix([[A[i][j] for j in cols] for i in range(m)])
            if M.rank() < k:
                continue
            sol, params = M.gauss_jordan_solve(sympy_matrix([[x] for x in b]))[:2] \
                if _consistent(M, b) else (None, None)
            if sol is None:
                continue
            if all(x >= 0 for x in sol):
                return True
    return False


def _consistent(M, b) -> bool:
    aug = M.row_join(sympy_matrix([[x] for x in b]))
    return aug.rank() == M.rank()


def grid_search_feasible(A: list[list], zero_set, one_set,
                         max_value: int = 2, max_denominator: int = 3):
    """Search rationals ``p/q`` with ``q <= max_denominator`` in
    ``[0, max_value]`` for a solution; returns it or None.

    Incomplete (solutions may need larger entries), so a hit proves
    feasibility but a miss proves nothing.
    """
    n = len(A[0]) if A else 0
    values = sorted({Fraction(p, q) for q in range(1, max_denominator + 1)
                     for p in range(0, max_value * q + 1)})
    choices = []
    for j in range(n):
        if j in zero_set:
            choices.append([Fraction(0)])
        elif j in one_set:
            choices.append([x for x in values if x >= 1])
        else:
            choices.append(values)
    for v in itertools.product(*choices):
        if all(sum(a * x for a, x in zip(row, v)) == 0 for row in A):
            return v
    return None
