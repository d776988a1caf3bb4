"""Explicit-state ground truth: configuration graphs and recurrence.

Configurations are count tuples in species order. Exploration is FIFO and
tries reactions in declaration order, so graphs are reproducible.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .analysis import DominanceVerdict, Verdict
from .graph import GraphStructure, analyze_graph, tarjan_scc
from .model import ComplexVector, Crn

log = logging.getLogger(__name__)

DEFAULT_MAX_STATES = 200_000
DEFAULT_MAX_COUNT = 64
DEFAULT_MAX_LENGTH = 32

Config = tuple


class Truncated(Exception):
    """The exploration hit a cap, so recurrence cannot be certified."""


@dataclass
class ConfigurationGraph:
    crn: Crn
    nodes: list            # configuration tuples, discovery order
    index: dict            # tuple -> node id
    arcs: list             # (src id, reaction index, dst id)
    roots: tuple
    truncated: bool = False
    truncation_reason: str = ""

    @property
    def root(self) -> int:
        return self.roots[0]

    def successors(self, u: int) -> list[tuple[int, int]]:
        return self._succ[u]

    def __post_init__(self):
        self._succ = [[] for _ in self.nodes]
        for s, r, t in self.arcs:
            self._succ[s].append((r, t))

    def config(self, u: int) -> ComplexVector:
        return ComplexVector.from_tuple(self.nodes[u])

    def format_config(self, u: int) -> str:
        return self.crn.format_complex(self.config(u))

    def dump_lines(self) -> list[str]:
        names = self.crn.reaction_names
        return [f"{self.format_config(s)}\t{names[r]}\t{self.format_config(t)}"
                for s, r, t in self.arcs]


def _as_tuple(crn: Crn, c) -> tuple:
    if isinstance(c, ComplexVector):
        return c.to_tuple(crn.num_species)
    return tuple(c)


def explore(crn: Crn, c0, max_states: int = DEFAULT_MAX_STATES,
            max_count: int = DEFAULT_MAX_COUNT) -> ConfigurationGraph:
    """Breadth-first closure of the configurations reachable from ``c0``.

    ``c0`` may be one configuration or a list of them (one graph rooted at
    all of them). Configurations with a count above ``max_count`` are
    recorded but not expanded; either cap marks the graph truncated.
    """
    if max_states < 1 or max_count < 1:
        raise ValueError("caps must be positive")
    if isinstance(c0, (list, tuple, set, frozenset)) and c0 and \
            not isinstance(next(iter(c0)), int):
        starts = [_as_tuple(crn, c) for c in c0]
    else:
        starts = [_as_tuple(crn, c0)]
    n = crn.num_species
    moves = []
    for r in crn.reactions:
        need = r.reactant.to_tuple(n)
        delta = r.displacement(n)
        moves.append((tuple(i for i in range(n) if need[i]), need, delta))

    nodes, index, arcs = [], {}, []
    truncated, reason = False, ""
    queue = deque()
    roots = []
    for s in starts:
        if s not in index:
            index[s] = len(nodes)
            nodes.append(s)
            queue.append(index[s])
        roots.append(index[s])
    while queue:
        u = queue.popleft()
        c = nodes[u]
        if max(c, default=0) > max_count:
            truncated, reason = True, f"count above {max_count}"
            continue
        for ridx, (sup, need, delta) in enumerate(moves):
            if any(c[i] < need[i] for i in sup):
                continue
            d = tuple(a + b for a, b in zip(c, delta))
            v = index.get(d)
            if v is None:
                if len(nodes) >= max_states:
                    truncated, reason = True, f"more than {max_states} states"
                    queue.clear()
                    break
                v = index[d] = len(nodes)
                nodes.append(d)
                queue.append(v)
            arcs.append((u, ridx, v))
    return ConfigurationGraph(crn, nodes, index, arcs, tuple(roots),
                              truncated, reason)


@dataclass(frozen=True)
class RecurrentConfig:
    node: int
    configuration: tuple
    bottom_scc: int
    enabled: tuple[tuple[int, bool], ...]   # (reaction, is_terminal)

    @property
    def nonterminal_enabled(self) -> tuple[int, ...]:
        return tuple(r for r, term in self.enabled if not term)


@dataclass(frozen=True)
class RecurrenceReport:
    recurrent: tuple[RecurrentConfig, ...]
    bottom_sccs: tuple[tuple[int, ...], ...]
    any_nonterminal_fires: bool
    scc_of: tuple[int, ...]

    def first_counterexample(self) -> Optional[RecurrentConfig]:
        return next((rc for rc in self.recurrent if rc.nonterminal_enabled), None)

    def recurrent_nodes(self) -> frozenset[int]:
        return frozenset(rc.node for rc in self.recurrent)


def configuration_sccs(g: ConfigurationGraph) -> tuple[list[int], list[list[int]]]:
    comps = tarjan_scc(len(g.nodes), lambda u: [t for _, t in g.successors(u)])
    comps.sort(key=min)
    scc_of = [0] * len(g.nodes)
    for cid, comp in enumerate(comps):
        for u in comp:
            scc_of[u] = cid
    return scc_of, comps


def recurrent_configurations(g: ConfigurationGraph,
                             structure: GraphStructure | None = None) -> RecurrenceReport:
    if g.truncated:
        raise Truncated(g.truncation_reason)
    structure = structure or analyze_graph(g.crn)
    scc_of, comps = configuration_sccs(g)
    bottom = [True] * len(comps)
    for s, _, t in g.arcs:
        if scc_of[s] != scc_of[t]:
            bottom[scc_of[s]] = False
    recurrent = []
    any_nt = False
    for cid, comp in enumerate(comps):
        if not bottom[cid]:
            continue
        for u in sorted(comp):
            enabled = tuple((r, structure.is_terminal_reaction(r))
                            for r, _ in g.successors(u))
            rc = RecurrentConfig(u, g.nodes[u], cid, enabled)
            any_nt = any_nt or bool(rc.nonterminal_enabled)
            recurrent.append(rc)
    recurrent.sort(key=lambda rc: rc.node)
    bottoms = tuple(tuple(sorted(c)) for cid, c in enumerate(comps) if bottom[cid])
    return RecurrenceReport(tuple(recurrent), bottoms, any_nt, tuple(scc_of))


def configurations_up_to(n_species: int, total: int) -> list[tuple]:
    """All configurations with total molecule count at most ``total``."""
    out = []
    for size in range(total + 1):
        for combo in itertools.combinations_with_replacement(range(n_species), size):
            c = [0] * n_species
            for i in combo:
                c[i] += 1
            out.append(tuple(c))
    return out


@dataclass(frozen=True)
class ValidationOutcome:
    passed: bool
    checked: int
    skipped: int
    counterexample: Optional[tuple] = None
    counterexample_reactions: tuple[int, ...] = ()
    vacuous: bool = False


def validate_prediction(crn: Crn, verdict: DominanceVerdict, inits: Iterable,
                        max_states: int = DEFAULT_MAX_STATES,
                        max_count: int = DEFAULT_MAX_COUNT,
                        structure: GraphStructure | None = None,
                        joint: bool = True) -> ValidationOutcome:
    """Check ``Holds`` against the oracle from every initial configuration.

    With ``joint`` the inits are explored as one multi-rooted graph; the SCC
    structure of a successor-closed set does not depend on the roots, so
    this gives the same recurrent sets as exploring each init alone.
    """
    inits = [_as_tuple(crn, c) for c in inits]
    if verdict.status is not Verdict.HOLDS:
        return ValidationOutcome(True, 0, 0, vacuous=True)
    structure = structure or analyze_graph(crn)
    batches = [inits] if joint else [[c] for c in inits]
    checked = skipped = 0
    for batch in batches:
        g = explore(crn, batch, max_states, max_count)
        if g.truncated and joint and len(batch) > 1:
            sub = validate_prediction(crn, verdict, batch, max_states, max_count,
                                      structure, joint=False)
            return sub
        if g.truncated:
            skipped += len(batch)
            log.info("skipping %s: %s", batch, g.truncation_reason)
            continue
        rep = recurrent_configurations(g, structure)
        checked += len(batch)
        bad = rep.first_counterexample()
        if bad is not None:
            return ValidationOutcome(False, checked, skipped, bad.configuration,
                                     bad.nonterminal_enabled)
    return ValidationOutcome(True, checked, skipped)


@dataclass(frozen=True)
class Theorem1Witness:
    node: int
    configuration: tuple
    sequence: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]      # the pi_i blocks
    tails: tuple[tuple[int, ...], ...]      # the sigma_i blocks


_NEED_PI = -1
_SIGMA = -2


def find_theorem1_witness(crn: Crn, g: ConfigurationGraph, exit_set: Sequence[int],
                          structure: GraphStructure | None = None,
                          max_length: int = DEFAULT_MAX_LENGTH,
                          require_recurrent: bool = True,
                          within: Optional[Iterable[int]] = None
                          ) -> Optional[Theorem1Witness]:
    """Search for a cycle c' -> ... -> c' whose labels avoid the excluded
    reactions and split as pi_1 sigma_1 ... pi_n sigma_n (n >= 1).

    Each pi_i is a reaction-graph walk from a non-terminal complex that stops
    at the first terminal complex; each sigma_i uses terminal reactions only.
    Candidates c' are the recurrent configurations (or all nodes when
    ``require_recurrent`` is false, or the given ``within`` nodes), tried in
    node order; the shortest cycle for the first successful c' is returned.
    ``None`` means "not found within ``max_length``", not non-existence.
    """
    if g.truncated:
        raise Truncated(g.truncation_reason)
    structure = structure or analyze_graph(crn)
    graph = structure.graph
    excluded = (structure.sccs.bridges - set(exit_set)) | structure.l_reactions
    allowed = [r not in excluded for r in range(crn.num_reactions)]

    if within is not None:
        candidates = sorted(set(within))
    elif require_recurrent:
        rep = recurrent_configurations(g, structure)
        candidates = [rc.node for rc in rep.recurrent]
    else:
        candidates = list(range(len(g.nodes)))

    def step(state, r):
        """Automaton transition; ``None`` rejects."""
        src, dst = graph.edges[r]
        terminal_r = structure.is_terminal_reaction(r)
        if state in (_NEED_PI, _SIGMA):
            if terminal_r:
                return _SIGMA if state == _SIGMA else None
        elif src != state:
            return None
        # r continues (or starts) a walk through non-terminal complexes
        return _SIGMA if structure.is_terminal_vertex(dst) else dst

    for start in candidates:
        origin = (start, _NEED_PI)
        parent = {origin: None}
        frontier = [origin]
        found = None
        for _ in range(max_length):
            nxt = []
            for node, state in frontier:
                for r, t in g.successors(node):
                    if not allowed[r]:
                        continue
                    ns = step(state, r)
                    if ns is None:
                        continue
                    key = (t, ns)
                    if key in parent:
                        continue
                    parent[key] = ((node, state), r)
                    if t == start and ns == _SIGMA:
                        found = key
                        break
                    nxt.append(key)
                if found:
                    break
            if found or not nxt:
                break
            frontier = nxt
        if found is None:
            continue
        seq = []
        key = found
        while parent[key] is not None:
            prev, r = parent[key]
            seq.append(r)
            key = prev
        seq.reverse()
        paths, tails = _split_blocks(seq, structure)
        return Theorem1Witness(start, g.nodes[start], tuple(seq), paths, tails)
    return None


def _split_blocks(seq, structure):
    paths, tails = [], []
    cur: list[int] = []
    in_pi = False
    for r in seq:
        terminal_r = structure.is_terminal_reaction(r)
        if not in_pi and not terminal_r:
            if paths:
                tails.append(tuple(cur))
            cur = [r]
            in_pi = True
        elif in_pi:
            cur.append(r)
        else:
            cur.append(r)
        if in_pi and structure.is_terminal_vertex(structure.graph.edges[r][1]):
            paths.append(tuple(cur))
            cur = []
            in_pi = False
    tails.append(tuple(cur))
    return tuple(paths), tuple(tails)
