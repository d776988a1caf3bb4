"""Structural analyses and the three recurrence checkers.

All three checkers answer the same question: can a non-terminal reaction
fire at some recurrent configuration? ``Holds`` means "no, never";
``Inconclusive`` means the sufficient condition did not apply;
``NotApplicable`` means a hypothesis of the condition is unmet.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .graph import CapExceeded, GraphStructure, analyze_graph
from .linalg import RationalMatrix, kernel_basis, multiply, rank
from .lp import FeasibilityQuery, FeasibilityResult, full_support_feasible, solve
from .model import Crn, ParikhVector


class Verdict(enum.Enum):
    HOLDS = "Holds"
    INCONCLUSIVE = "Inconclusive"
    NOT_APPLICABLE = "NotApplicable"


class Boundedness(enum.Enum):
    PROVED_BY_CONSERVATIVITY = "ProvedByConservativity"
    PROVED_EXACT = "ProvedExact"
    REFUTED_EXACT = "RefutedExact"
    UNKNOWN = "Unknown"

    @property
    def bounded(self) -> bool:
        return self in (Boundedness.PROVED_BY_CONSERVATIVITY,
                        Boundedness.PROVED_EXACT)


class NotATInvariant(ValueError):
    pass


class InvalidRates(ValueError):
    pass


@dataclass(frozen=True)
class MatrixBundle:
    incidence_I: RationalMatrix   # species x reactions
    complex_Y: RationalMatrix     # species x complexes
    graph_R: RationalMatrix       # complexes x reactions
    rank_I: int
    rank_R: int

    @property
    def deficiency(self) -> int:
        return self.rank_R - self.rank_I


def build_matrices(crn: Crn, structure: GraphStructure | None = None) -> MatrixBundle:
    g = (structure or analyze_graph(crn)).graph
    n = crn.num_species
    I = RationalMatrix.from_rows(
        [[r.displacement(n)[s] for r in crn.reactions] for s in range(n)],
        crn.species_names, crn.reaction_names) if n else \
        RationalMatrix.zeros((), crn.reaction_names)
    labels = g.vertex_labels
    Y = RationalMatrix.from_rows(
        [[c[s] for c in g.vertices] for s in range(n)],
        crn.species_names, labels) if n else RationalMatrix.zeros((), labels)
    R = g.incidence
    return MatrixBundle(I, Y, R, rank(I), rank(R))


@dataclass(frozen=True)
class StructuralProfile:
    conservative: bool
    p_invariant: Optional[tuple[int, ...]]
    consistent: bool
    t_invariant: Optional[tuple[int, ...]]
    structurally_bounded: Boundedness
    boundedness_witness: Optional[tuple[int, ...]]
    deficiency: int


def _boundedness_query(I: RationalMatrix) -> FeasibilityQuery:
    # y^T I <= 0, y >= 1  <=>  [I^T | Id] (y, s) = 0 with slack s >= 0
    n_s, n_r = I.shape
    rows = [list(I.column(j)) + [1 if k == j else 0 for k in range(n_r)]
            for j in range(n_r)]
    cols = tuple(I.row_labels) + tuple(f"slack:{c}" for c in I.col_labels)
    m = RationalMatrix.from_rows(rows, I.col_labels, cols) if n_r else \
        RationalMatrix.zeros((), cols)
    return FeasibilityQuery(m, frozenset(), frozenset(range(n_s)))


def structural_profile(crn: Crn, bundle: MatrixBundle) -> StructuralProfile:
    """Conservativity, consistency, structural boundedness and deficiency.

    Boundedness beyond conservativity uses the classical characterization:
    a net is structurally bounded iff some ``y >= 1`` has ``y^T I <= 0``.
    """
    I = bundle.incidence_I
    p = full_support_feasible(I, "rows")
    t = full_support_feasible(I, "columns")
    if p.feasible:
        bounded, bw = Boundedness.PROVED_BY_CONSERVATIVITY, p.witness
    else:
        res = solve(_boundedness_query(I))
        if res.feasible:
            bounded, bw = Boundedness.PROVED_EXACT, res.witness[:crn.num_species]
        else:
            bounded, bw = Boundedness.REFUTED_EXACT, None
    return StructuralProfile(p.feasible, p.witness, t.feasible, t.witness,
                             bounded, bw, bundle.deficiency)


def is_closed_t_invariant(v, bundle: MatrixBundle) -> bool:
    counts = v.counts if isinstance(v, ParikhVector) else tuple(v)
    if any(x < 0 for x in counts) or any(bundle.incidence_I.apply(counts)):
        raise NotATInvariant("vector is not a T-invariant")
    return not any(bundle.graph_R.apply(counts))


@dataclass(frozen=True)
class ExitSetEvidence:
    exit_set: tuple[int, ...]
    zero_set: frozenset[int]
    # one result per z in exit_set, in order (stops at the first feasible one)
    results: tuple[tuple[int, FeasibilityResult], ...]

    @property
    def refuted(self) -> bool:
        return all(not r.feasible for _, r in self.results) and \
            len(self.results) == len(self.exit_set)


@dataclass(frozen=True)
class DominanceVerdict:
    status: Verdict
    reason: str = ""
    witness_exit_set: Optional[tuple[int, ...]] = None
    zero_set: Optional[frozenset[int]] = None
    evidence: tuple = ()
    witness: Optional[tuple] = None     # feasible vector behind Inconclusive
    hypotheses: tuple[str, ...] = ()
    cap_reached: bool = False
    extra: Mapping = field(default_factory=dict)


def _flow_rows(structure: GraphStructure, n_r: int) -> list[list[int]]:
    """Per non-terminal vertex: outflow minus inflow over non-terminal reactions.

    A multiset of non-terminal edges that splits into walks ending at terminal
    vertices never has more inflow than outflow at a non-terminal vertex.
    """
    g = structure.graph
    rows = []
    for v in range(len(g.vertices)):
        if structure.is_terminal_vertex(v):
            continue
        row = [0] * n_r
        for e, (s, t) in enumerate(g.edges):
            if structure.is_terminal_reaction(e) or s == t:
                continue
            if s == v:
                row[e] += 1
            if t == v:
                row[e] -= 1
        rows.append(row)
    return rows


def _dominance_matrix(bundle: MatrixBundle, structure: GraphStructure,
                      strengthened: bool) -> RationalMatrix:
    I = bundle.incidence_I
    if not strengthened:
        return I
    n_r = I.shape[1]
    flow = _flow_rows(structure, n_r)
    k = len(flow)
    rows = [list(row) + [0] * k for row in I.rows]
    for i, frow in enumerate(flow):
        rows.append(list(frow) + [-1 if j == i else 0 for j in range(k)])
    cols = tuple(I.col_labels) + tuple(f"flow:{i}" for i in range(k))
    rlabels = tuple(I.row_labels) + tuple(f"flowrow:{i}" for i in range(k))
    return RationalMatrix.from_rows(rows, rlabels, cols)


def dominance_check(crn: Crn, bundle: MatrixBundle | None = None,
                    structure: GraphStructure | None = None,
                    profile: StructuralProfile | None = None,
                    cap: int = 10_000, strengthened: bool = False) -> DominanceVerdict:
    """Exit-set / T-invariant sufficient condition.

    For an exit set Z, ask for each z in Z whether a T-invariant v exists
    with v = 0 on (bridges minus Z) and on the dominated reactions L, and
    v(z) >= 1. If all such queries fail for one Z, no non-terminal reaction
    fires at any recurrent configuration.

    ``strengthened`` additionally requires that the non-terminal part of v
    passes a necessary flow condition for splitting into walks that end at
    terminal vertices (outflow >= inflow at each non-terminal vertex).
    """
    structure = structure or analyze_graph(crn)
    bundle = bundle or build_matrices(crn, structure)
    profile = profile or structural_profile(crn, bundle)
    if not profile.structurally_bounded.bounded:
        return DominanceVerdict(Verdict.NOT_APPLICABLE,
                                "not structurally bounded")
    if structure.minimal is None:
        return DominanceVerdict(Verdict.NOT_APPLICABLE,
                                "dominance is not a partial order")
    if not structure.sccs.nonterminal():
        return DominanceVerdict(Verdict.HOLDS, "no non-terminal reactions",
                                witness_exit_set=(), zero_set=frozenset())

    A = _dominance_matrix(bundle, structure, strengthened)
    bridges = structure.sccs.bridges
    L = structure.l_reactions
    evidence = []
    first_witness = None
    cap_reached = False
    try:
        for Z in structure.exit_sets(cap):
            zero = (bridges - set(Z)) | L
            results = []
            for z in Z:
                if z in zero:
                    continue
                res = solve(FeasibilityQuery(A, zero, frozenset({z})))
                results.append((z, res))
                if res.feasible:
                    if first_witness is None:
                        first_witness = res.witness[:crn.num_reactions]
                    break
            ev = ExitSetEvidence(tuple(Z), frozenset(zero), tuple(results))
            evidence.append(ev)
            if all(not r.feasible for _, r in results):
                return DominanceVerdict(
                    Verdict.HOLDS, "no qualifying T-invariant for this exit set",
                    witness_exit_set=tuple(Z), zero_set=frozenset(zero),
                    evidence=(ev,), extra={"strengthened": strengthened})
    except CapExceeded:
        cap_reached = True
    reason = "exit-set cap reached" if cap_reached else \
        "every exit set admits a qualifying T-invariant"
    return DominanceVerdict(Verdict.INCONCLUSIVE, reason,
                            evidence=tuple(evidence), witness=first_witness,
                            cap_reached=cap_reached,
                            extra={"strengthened": strengthened})


def deficiency_one_check(crn: Crn, bundle: MatrixBundle | None = None,
                         structure: GraphStructure | None = None,
                         profile: StructuralProfile | None = None) -> DominanceVerdict:
    structure = structure or analyze_graph(crn)
    bundle = bundle or build_matrices(crn, structure)
    profile = profile or structural_profile(crn, bundle)
    if not profile.structurally_bounded.bounded:
        return DominanceVerdict(Verdict.NOT_APPLICABLE, "not structurally bounded")
    if not profile.consistent:
        return DominanceVerdict(Verdict.NOT_APPLICABLE, "not consistent")
    if profile.deficiency != 1:
        return DominanceVerdict(Verdict.NOT_APPLICABLE,
                                f"deficiency is {profile.deficiency}, not 1")
    g = structure.graph
    nt = [v for v in range(len(g.vertices)) if not structure.is_terminal_vertex(v)]
    pair = next(((x, y) for x in nt for y in nt
                 if g.vertices[x] < g.vertices[y]), None)
    if pair is None:
        return DominanceVerdict(Verdict.NOT_APPLICABLE,
                                "no pair of non-terminal complexes x < y")
    x, y = pair
    return DominanceVerdict(
        Verdict.HOLDS, "deficiency-one hypotheses met",
        hypotheses=("structurally bounded", "consistent", "deficiency 1",
                    f"{g.vertex_label(x)} < {g.vertex_label(y)}"))


RateVector = dict  # reaction name -> positive Fraction


def check_rates(crn: Crn, rates: Mapping[str, Fraction]) -> dict[str, Fraction]:
    out = {}
    for r in crn.reactions:
        if r.name not in rates:
            raise InvalidRates(f"missing rate for reaction {r.name!r}")
        k = Fraction(rates[r.name])
        if k <= 0:
            raise InvalidRates(f"rate for {r.name!r} must be positive")
        out[r.name] = k
    extra = set(rates) - set(out)
    if extra:
        raise InvalidRates(f"rates given for unknown reactions: {sorted(extra)}")
    return out


def parse_rates(text: str, crn: Crn, uniform_fill: bool = False) -> dict[str, Fraction]:
    """Read ``name = rational`` lines (``#`` comments allowed)."""
    rates: dict[str, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise InvalidRates(f"line {lineno}: expected 'reaction = rate'")
        try:
            rates[name.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidRates(f"line {lineno}: bad rate {value.strip()!r}") from None
    if uniform_fill:
        for r in crn.reactions:
            rates.setdefault(r.name, Fraction(1))
    return check_rates(crn, rates)


def uniform_rates(crn: Crn) -> dict[str, Fraction]:
    return {r.name: Fraction(1) for r in crn.reactions}


def random_rates(crn: Crn, rng: random.Random, max_value: int = 100) -> dict[str, Fraction]:
    return {r.name: Fraction(rng.randint(1, max_value), rng.randint(1, max_value))
            for r in crn.reactions}


def build_k_matrix(crn: Crn, rates: Mapping[str, Fraction],
                   structure: GraphStructure | None = None) -> RationalMatrix:
    rates = check_rates(crn, rates)
    g = (structure or analyze_graph(crn)).graph
    n = crn.num_species
    cols = [[Fraction(0)] * n for _ in g.vertices]
    for e, r in enumerate(crn.reactions):
        src = g.edges[e][0]
        k = rates[r.name]
        for s, d in enumerate(r.displacement(n)):
            cols[src][s] += k * d
    labels = g.vertex_labels
    if not n:
        return RationalMatrix.zeros((), labels)
    return RationalMatrix.from_rows(
        [[cols[v][s] for v in range(len(g.vertices))] for s in range(n)],
        crn.species_names, labels)


def anderson_check(crn: Crn, rates: Mapping[str, Fraction],
                   structure: GraphStructure | None = None,
                   profile: StructuralProfile | None = None) -> DominanceVerdict:
    """Rate-weighted condition for one rate vector.

    Holds when no nonnegative kernel vector of the rate matrix avoids the
    dominated complexes while covering a non-terminal complex.
    """
    structure = structure or analyze_graph(crn)
    if profile is None:
        profile = structural_profile(crn, build_matrices(crn, structure))
    if not profile.conservative:
        return DominanceVerdict(Verdict.NOT_APPLICABLE, "not conservative")
    LV = structure.l_vertices
    if not LV:
        return DominanceVerdict(Verdict.NOT_APPLICABLE,
                                "no dominated non-terminal complex")
    K = build_k_matrix(crn, rates, structure)
    g = structure.graph
    results = []
    for y in range(len(g.vertices)):
        if structure.is_terminal_vertex(y) or y in LV:
            continue
        res = solve(FeasibilityQuery(K, LV, frozenset({y})))
        results.append((y, res))
        if res.feasible:
            return DominanceVerdict(
                Verdict.INCONCLUSIVE, f"kernel vector covers {g.vertex_label(y)}",
                witness=res.witness, evidence=tuple(results))
    return DominanceVerdict(Verdict.HOLDS, "no admissible kernel vector",
                            evidence=tuple(results))


@dataclass(frozen=True)
class AndersonSweep:
    runs: tuple[tuple[str, dict, DominanceVerdict], ...]   # (label, rates, verdict)

    def count(self, status: Verdict) -> int:
        return sum(1 for _, _, v in self.runs if v.status is status)

    @property
    def aggregate(self) -> str:
        n = len(self.runs)
        if n and all(v.status is Verdict.NOT_APPLICABLE for _, _, v in self.runs):
            return "NotApplicable"
        return f"Holds for {self.count(Verdict.HOLDS)}/{n} sampled rates"


def anderson_sweep(crn: Crn, rates: Mapping[str, Fraction] | None = None,
                   uniform: bool = True, samples: int = 0, seed: int = 0,
                   structure: GraphStructure | None = None,
                   profile: StructuralProfile | None = None) -> AndersonSweep:
    """Evaluate the rate condition at user, all-ones and seeded random rates.

    A per-rate Holds already settles the question; the condition quantifies
    over all rates, which sampling cannot decide.
    """
    structure = structure or analyze_graph(crn)
    if profile is None:
        profile = structural_profile(crn, build_matrices(crn, structure))
    runs = []
    if rates is not None:
        runs.append(("user", dict(rates)))
    if uniform:
        runs.append(("uniform", uniform_rates(crn)))
    rng = random.Random(seed)
    for i in range(samples):
        runs.append((f"sample{i}", random_rates(crn, rng)))
    return AndersonSweep(tuple(
        (label, k, anderson_check(crn, k, structure, profile)) for label, k in runs))


def t_invariant_cover(bundle: MatrixBundle) -> frozenset[int]:
    """Reactions lying in the support of some T-invariant."""
    I = bundle.incidence_I
    return frozenset(j for j in range(I.shape[1])
                     if solve(FeasibilityQuery(I, frozenset(), frozenset({j}))).feasible)


def p_invariant_cover(bundle: MatrixBundle) -> frozenset[int]:
    It = bundle.incidence_I.transpose()
    return frozenset(j for j in range(It.shape[1])
                     if solve(FeasibilityQuery(It, frozenset(), frozenset({j}))).feasible)


def t_invariant_basis(bundle: MatrixBundle) -> list[tuple[int, ...]]:
    return kernel_basis(bundle.incidence_I)


def closed_t_invariant_basis(bundle: MatrixBundle) -> list[tuple[int, ...]]:
    return kernel_basis(bundle.graph_R)


def check_factorization(bundle: MatrixBundle) -> bool:
    return multiply(bundle.complex_Y, bundle.graph_R).rows == bundle.incidence_I.rows
