"""Reaction graph of a CRN and its SCC structure.

Covers complexes, the digraph incidence matrix, strongly connected
components, bridges, the dominance order between SCCs, the minimal
non-terminal SCCs, exit sets, and the two "dominated" sets (by reaction and
by vertex).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .linalg import RationalMatrix
from .model import ComplexVector, Crn


class NotAPartialOrder(Exception):
    """Dominance is not antisymmetric (the CRN is not structurally bounded)."""


class CapExceeded(Exception):
    """More exit sets exist than the enumeration cap allows."""


def tarjan_scc(n: int, successors: Callable[[int], Iterable[int]]) -> list[list[int]]:
    """Strongly connected components of the graph on ``range(n)``.

    Iterative Tarjan; components come out in reverse topological order
    (sinks first).
    """
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


@dataclass(frozen=True)
class ReactionGraph:
    crn: Crn
    vertices: tuple[ComplexVector, ...]
    edges: tuple[tuple[int, int], ...]  # per reaction: (source, target) vertex ids
    incidence: RationalMatrix

    def vertex_label(self, v: int) -> str:
        return self.crn.format_complex(self.vertices[v])

    @property
    def vertex_labels(self) -> tuple[str, ...]:
        return tuple(self.vertex_label(v) for v in range(len(self.vertices)))

    def successors(self, v: int) -> list[int]:
        return [t for s, t in self.edges if s == v]


def build_reaction_graph(crn: Crn) -> ReactionGraph:
    ids: dict[ComplexVector, int] = {}
    for r in crn.reactions:
        for c in (r.reactant, r.product):
            ids.setdefault(c, len(ids))
    vertices = tuple(ids)
    edges = tuple((ids[r.reactant], ids[r.product]) for r in crn.reactions)
    labels = tuple(c.format(crn.species_names) for c in vertices)
    rows = [[0] * len(edges) for _ in vertices]
    for e, (s, t) in enumerate(edges):
        if s != t:
            rows[s][e] = -1
            rows[t][e] = 1
    incidence = RationalMatrix.from_rows(rows, labels, crn.reaction_names) \
        if vertices else RationalMatrix.zeros((), crn.reaction_names)
    return ReactionGraph(crn, vertices, edges, incidence)


@dataclass(frozen=True)
class Scc:
    id: int
    vertices: tuple[int, ...]
    edges: tuple[int, ...]       # reactions with both endpoints inside
    out_edges: tuple[int, ...]   # bridges leaving this SCC, declaration order
    terminal: bool


@dataclass(frozen=True)
class SccDecomposition:
    scc_of: tuple[int, ...]          # per vertex
    components: tuple[Scc, ...]
    bridges: frozenset[int]
    condensation: frozenset[tuple[int, int]]

    def is_terminal_vertex(self, v: int) -> bool:
        return self.components[self.scc_of[v]].terminal

    def nonterminal(self) -> list[int]:
        return [c.id for c in self.components if not c.terminal]


def scc_decompose(g: ReactionGraph) -> SccDecomposition:
    n = len(g.vertices)
    succ = [[] for _ in range(n)]
    for s, t in g.edges:
        succ[s].append(t)
    raw = tarjan_scc(n, lambda v: succ[v])
    raw.sort(key=min)
    scc_of = [0] * n
    for cid, comp in enumerate(raw):
        for v in comp:
            scc_of[v] = cid
    inner = [[] for _ in raw]
    outs = [[] for _ in raw]
    bridges = set()
    cond = set()
    for e, (s, t) in enumerate(g.edges):
        if scc_of[s] == scc_of[t]:
            inner[scc_of[s]].append(e)
        else:
            outs[scc_of[s]].append(e)
            bridges.add(e)
            cond.add((scc_of[s], scc_of[t]))
    comps = tuple(
        Scc(cid, tuple(sorted(comp)), tuple(inner[cid]), tuple(outs[cid]),
            not outs[cid])
        for cid, comp in enumerate(raw))
    return SccDecomposition(tuple(scc_of), comps, frozenset(bridges),
                            frozenset(cond))


@dataclass(frozen=True)
class DominanceOrder:
    pairs: frozenset[tuple[int, int]]
    antisymmetry_violation: Optional[tuple[int, int]] = None

    def leq(self, x: int, y: int) -> bool:
        return (x, y) in self.pairs

    def strictly_below(self, x: int, y: int) -> bool:
        return x != y and (x, y) in self.pairs


def dominance_order(g: ReactionGraph, sccs: SccDecomposition) -> DominanceOrder:
    k = len(sccs.components)
    rel = [[i == j for j in range(k)] for i in range(k)]
    for x, y in itertools.product(range(len(g.vertices)), repeat=2):
        if g.vertices[x] <= g.vertices[y]:
            rel[sccs.scc_of[x]][sccs.scc_of[y]] = True
    # Warshall closure
    for m in range(k):
        for i in range(k):
            if rel[i][m]:
                row_m = rel[m]
                row_i = rel[i]
                for j in range(k):
                    if row_m[j]:
                        row_i[j] = True
    violation = None
    for i in range(k):
        for j in range(i + 1, k):
            if rel[i][j] and rel[j][i]:
                violation = (i, j)
                break
        if violation:
            break
    pairs = frozenset((i, j) for i in range(k) for j in range(k) if rel[i][j])
    return DominanceOrder(pairs, violation)


def minimal_nonterminal_sccs(d: DominanceOrder, sccs: SccDecomposition) -> tuple[int, ...]:
    if d.antisymmetry_violation is not None:
        x, y = d.antisymmetry_violation
        raise NotAPartialOrder(f"SCCs {x} and {y} dominate each other")
    nt = sccs.nonterminal()
    return tuple(x for x in nt
                 if not any(d.strictly_below(y, x) for y in nt))


def count_exit_sets(minimal: Sequence[int], sccs: SccDecomposition) -> int:
    total = 1
    for x in minimal:
        total *= len(sccs.components[x].out_edges)
    return total


def enumerate_exit_sets(minimal: Sequence[int], sccs: SccDecomposition,
                        cap: int = 10_000) -> Iterator[tuple[int, ...]]:
    """Yield exit sets as tuples of reactions, one per SCC of ``minimal``.

    Order is the lexicographic product of each SCC's outgoing bridges in
    declaration order. Raises :class:`CapExceeded` instead of yielding the
    ``cap + 1``-th set.
    """
    choices = [sccs.components[x].out_edges for x in minimal]
    for count, z in enumerate(itertools.product(*choices)):
        if count >= cap:
            raise CapExceeded(f"more than {cap} exit sets")
        yield z


def l_reactions(g: ReactionGraph, sccs: SccDecomposition) -> frozenset[int]:
    """Non-terminal reactions whose reactant strictly dominates the reactant
    of another non-terminal reaction."""
    nt = [e for e, (s, _) in enumerate(g.edges)
          if not sccs.is_terminal_vertex(s)]
    reactants = {e: g.vertices[g.edges[e][0]] for e in nt}
    return frozenset(e for e in nt
                     if any(reactants[f] < reactants[e] for f in nt))


def l_vertices(g: ReactionGraph, sccs: SccDecomposition) -> frozenset[int]:
    nt = [v for v in range(len(g.vertices)) if not sccs.is_terminal_vertex(v)]
    return frozenset(v for v in nt
                     if any(g.vertices[u] < g.vertices[v] for u in nt))


@dataclass(frozen=True)
class GraphStructure:
    """Everything the checkers need to know about the reaction graph."""

    graph: ReactionGraph
    sccs: SccDecomposition
    dominance: DominanceOrder
    minimal: Optional[tuple[int, ...]]   # None when dominance is not a partial order
    l_reactions: frozenset[int]
    l_vertices: frozenset[int]

    def is_terminal_reaction(self, r: int) -> bool:
        s, t = self.graph.edges[r]
        return self.sccs.is_terminal_vertex(s)

    def is_terminal_vertex(self, v: int) -> bool:
        return self.sccs.is_terminal_vertex(v)

    def exit_set_count(self) -> int:
        if self.minimal is None:
            return 0
        return count_exit_sets(self.minimal, self.sccs)

    def exit_sets(self, cap: int = 10_000) -> Iterator[tuple[int, ...]]:
        if self.minimal is None:
            raise NotAPartialOrder("dominance order is not antisymmetric")
        return enumerate_exit_sets(self.minimal, self.sccs, cap)


def analyze_graph(crn: Crn) -> GraphStructure:
    g = build_reaction_graph(crn)
    sccs = scc_decompose(g)
    dom = dominance_order(g, sccs)
    try:
        minimal = minimal_nonterminal_sccs(dom, sccs)
    except NotAPartialOrder:
        minimal = None
    return GraphStructure(g, sccs, dom, minimal,
                          l_reactions(g, sccs), l_vertices(g, sccs))
