"""Acceptance suite: one test per criterion, each summarized at the end of
the run as a single pass/fail line."""

import math
import random
import time
from fractions import Fraction

import networkx as nx
import pytest

from crndom import corpus
from crndom.analysis import (Verdict, anderson_check, anderson_sweep, build_matrices,
                             deficiency_one_check, dominance_check, random_rates,
                             structural_profile, t_invariant_basis, uniform_rates)
from crndom.graph import analyze_graph
from crndom.linalg import RationalMatrix, same_span
from crndom.lp import FeasibilityQuery, check_certificate, check_witness, solve
from crndom.model import ComplexVector, fire_sequence, parikh
from crndom.oracle import (configurations_up_to, explore, find_theorem1_witness,
                           recurrent_configurations, validate_prediction)
from crndom.parser import parse_configuration

from helpers import (complexes_oracle, grid_search_feasible, incidence_oracle,
                     linkage_classes, random_conservative_crn, random_crn,
                     scc_partition, sympy_matrix, vertex_enumeration_feasible)


def _names(crn, idxs):
    return [crn.reaction_names[i] for i in sorted(idxs)]


def _witness_for(name, init):
    crn = corpus.load(name)
    s = analyze_graph(crn)
    g = explore(crn, parse_configuration(init, crn))
    (z,) = list(s.exit_sets())
    w = find_theorem1_witness(crn, g, z, s)
    return crn, w


# 1 -------------------------------------------------------------------------

@pytest.mark.criterion(1, "golden corpus verdicts (exact, under 5 s)")
def test_golden_corpus(manifest):
    start = time.perf_counter()

    crn = corpus.load("shinar_toy")
    s = analyze_graph(crn)
    b = build_matrices(crn, s)
    p = structural_profile(crn, b)
    assert (p.deficiency, p.conservative, p.consistent) == (1, True, True)
    assert deficiency_one_check(crn, b, s, p).status is Verdict.HOLDS
    v = dominance_check(crn, b, s, p)
    assert v.status is Verdict.HOLDS
    assert _names(crn, v.witness_exit_set) == ["b"]
    assert _names(crn, v.zero_set) == ["a"]

    crn = corpus.load("from_lit")
    s = analyze_graph(crn)
    b = build_matrices(crn, s)
    assert b.deficiency == 2
    assert [_names(crn, z) for z in s.exit_sets()] == [["e", "f"]]
    assert _names(crn, s.l_reactions) == ["g", "h"]
    assert dominance_check(crn, b, s).status is Verdict.HOLDS

    crn = corpus.load("two_out")
    v = dominance_check(crn)
    assert v.status is Verdict.HOLDS and _names(crn, v.witness_exit_set) == ["a"]

    crn = corpus.load("not_silent")
    assert dominance_check(crn).status is Verdict.HOLDS
    sweep = anderson_sweep(crn, uniform=True, samples=100, seed=0)
    assert len(sweep.runs) == 101
    assert all(verdict.status is Verdict.INCONCLUSIVE for _, _, verdict in sweep.runs)

    crn = corpus.load("no_converse")
    v = dominance_check(crn)
    assert v.status is Verdict.INCONCLUSIVE
    assert tuple(v.witness) == parikh(crn, "ab").counts

    crn = corpus.load("recurr")
    assert dominance_check(crn).status is Verdict.INCONCLUSIVE
    crn, w = _witness_for("recurr", "A + C")
    assert crn.format_complex(ComplexVector.from_tuple(w.configuration)) == "A + C"
    assert crn.format_sequence(w.sequence) == "abd"

    crn, w = _witness_for("recurr2", "A + C + D")
    assert crn.format_complex(ComplexVector.from_tuple(w.configuration)) == "A + C + D"
    assert crn.format_sequence(w.sequence) == "ab"

    crn = corpus.load("defic_nprime")
    p = structural_profile(crn, build_matrices(crn))
    assert p.deficiency == 1 and not p.consistent

    # the whole bundled corpus against its manifest
    for name, expected in manifest.items():
        crn = corpus.load(name)
        s = analyze_graph(crn)
        b = build_matrices(crn, s)
        p = structural_profile(crn, b)
        assert p.conservative == expected["conservative"], name
        assert p.consistent == expected["consistent"], name
        assert p.deficiency == expected["deficiency"], name
        v = dominance_check(crn, b, s, p)
        assert v.status.value == expected["dominance"]["status"], name
        if "exit_set" in expected["dominance"]:
            assert _names(crn, v.witness_exit_set) == expected["dominance"]["exit_set"]
            assert _names(crn, v.zero_set) == expected["dominance"]["zero_set"]
        if "witness" in expected["dominance"]:
            got = {crn.reaction_names[i]: x for i, x in enumerate(v.witness) if x}
            assert got == expected["dominance"]["witness"], name
        assert deficiency_one_check(crn, b, s, p).status.value == expected["deficiency_one"]
        assert anderson_check(crn, uniform_rates(crn), s, p).status.value \
            == expected["anderson_uniform"], name

    assert time.perf_counter() - start < 5.0


# 2 -------------------------------------------------------------------------

@pytest.mark.criterion(2, "from_lit T-invariant kernel reproduction")
def test_from_lit_kernel():
    crn = corpus.load("from_lit")
    b = build_matrices(crn)
    basis = t_invariant_basis(b)
    expected = [parikh(crn, tau).counts for tau in ("ab", "cd", "gfce", "hfce")]
    assert len(basis) == 4
    assert same_span(basis, expected)
    # independent: sympy nullspace has dimension 4 and the expected vectors
    # are independent kernel elements
    I = sympy_matrix(incidence_oracle(crn))
    assert len(I.nullspace()) == 4
    E = sympy_matrix(expected)
    assert E.rank() == 4
    assert (I * E.T).is_zero_matrix


# 3 -------------------------------------------------------------------------

def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


@pytest.mark.criterion(3, "matrix identities on 1000 random CRNs")
def test_matrix_identities():
    rng = random.Random(20260301)
    failures = []
    for trial in range(1000):
        crn = random_crn(rng, max_species=6, max_reactions=8, max_coeff=3)
        s = analyze_graph(crn)
        b = build_matrices(crn, s)
        I = [list(row) for row in b.incidence_I.rows]
        Y = [list(row) for row in b.complex_Y.rows]
        R = [list(row) for row in b.graph_R.rows]
        n_v = len(complexes_oracle(crn))
        if I != incidence_oracle(crn):
            failures.append((trial, "incidence"))
        if _matmul(Y, R) != I:
            failures.append((trial, "I != YR"))
        # ker R in ker I  <=>  rows of I lie in the row space of R
        sR = sympy_matrix(R)
        if sR.rank() != sR.col_join(sympy_matrix(I)).rank():
            failures.append((trial, "kernel containment"))
        if b.rank_R != sR.rank() or b.rank_R != n_v - linkage_classes(crn):
            failures.append((trial, "rank R"))
        if b.rank_I != sympy_matrix(I).rank() or b.deficiency < 0:
            failures.append((trial, "deficiency"))
        # bridges: edges joining different SCCs (networkx), never in a
        # nonnegative element of ker R
        comp = {}
        for k, c in enumerate(scc_partition(crn)):
            for x in c:
                comp[x] = k
        n = crn.num_species
        bridges = {i for i, r in enumerate(crn.reactions)
                   if comp[r.reactant.to_tuple(n)] != comp[r.product.to_tuple(n)]}
        if bridges != set(s.sccs.bridges):
            failures.append((trial, "bridges"))
        for e in bridges:
            q = FeasibilityQuery(b.graph_R, frozenset(), frozenset({e}))
            res = solve(q)
            if res.feasible or not check_certificate(q, res.certificate):
                failures.append((trial, f"closed T-invariant through bridge {e}"))
    assert failures == []


# 4 -------------------------------------------------------------------------

def _semantics_crns():
    rng = random.Random(4242)
    crns = [corpus.load(n) for n in corpus.names()]
    crns += [random_conservative_crn(rng) for _ in range(200)]
    return crns


@pytest.mark.criterion(4, "semantics properties on corpus and 200 conservative CRNs")
def test_semantics_properties():
    crns = _semantics_crns()
    rng = random.Random(99)
    per_crn = math.ceil(10_000 / len(crns))
    failures = []
    sequences = 0
    for k, crn in enumerate(crns):
        n = crn.num_species
        I = incidence_oracle(crn)
        b = build_matrices(crn)
        p = structural_profile(crn, b)
        if not p.conservative:
            failures.append((k, "generator produced a non-conservative CRN"))
            continue

        # displacement identity along random firing sequences
        for _ in range(per_crn):
            c0 = tuple(rng.randint(0, 3) for _ in range(n))
            c = list(c0)
            tau = []
            for _ in range(rng.randint(0, 15)):
                options = [i for i, r in enumerate(crn.reactions)
                           if all(c[s] >= r.reactant[s] for s in range(n))]
                if not options:
                    break
                i = rng.choice(options)
                tau.append(i)
                r = crn.reactions[i]
                c = [c[s] - r.reactant[s] + r.product[s] for s in range(n)]
            phi = parikh(crn, tau).counts
            predicted = [c0[s] + sum(I[s][j] * phi[j] for j in range(len(phi)))
                         for s in range(n)]
            fired = fire_sequence(crn, ComplexVector.from_tuple(c0), tau).to_tuple(n)
            if predicted != c or tuple(c) != fired:
                failures.append((k, "displacement", c0, tau))
            sequences += 1

        # configuration graph from every configuration of total <= 4
        g = explore(crn, configurations_up_to(n, 4))
        assert not g.truncated
        left = [v for v in sympy_matrix(I).T.nullspace()]
        weights = [p.p_invariant] + [[x for x in v] for v in left]
        for src, _, dst in g.arcs:
            for w in weights:
                if sum(a * x for a, x in zip(w, g.nodes[src])) != \
                        sum(a * x for a, x in zip(w, g.nodes[dst])):
                    failures.append((k, "P-invariant", g.nodes[src], g.nodes[dst]))

        rep = recurrent_configurations(g)
        rec = rep.recurrent_nodes()
        for u in rec:
            if any(t not in rec for _, t in g.successors(u)):
                failures.append((k, "recurrent set not closed", g.nodes[u]))
        dg = nx.DiGraph()
        dg.add_nodes_from(range(len(g.nodes)))
        dg.add_edges_from((s_, t) for s_, _, t in g.arcs)
        cond = nx.condensation(dg)
        bottom = {u for x in cond if cond.out_degree(x) == 0
                  for u in cond.nodes[x]["members"]}
        if bottom != set(rec):
            failures.append((k, "recurrent set differs from networkx"))

        # cycles: every arc inside an SCC closes into a cycle via a
        # shortest path back; its Parikh image must be a T-invariant
        label = {}
        for s_, r, t in g.arcs:
            label.setdefault((s_, t), r)
        scc = {u: x for x in cond for u in cond.nodes[x]["members"]}
        for s_, r, t in g.arcs:
            if scc[s_] != scc[t]:
                continue
            back = nx.shortest_path(dg, t, s_)
            cycle = [r] + [label[(a, z)] for a, z in zip(back, back[1:])]
            phi = parikh(crn, cycle).counts
            if any(sum(I[x][j] * phi[j] for j in range(len(phi))) for x in range(n)):
                failures.append((k, "cycle Parikh image", cycle))
    assert sequences >= 10_000
    assert failures == []


# 5 -------------------------------------------------------------------------

def _soundness_crns():
    rng = random.Random(555)
    crns = [(n, corpus.load(n)) for n in corpus.names()]
    crns += [(f"random{i}", random_crn(rng, 4, 5, 2)) for i in range(150)]
    crns += [(f"conservative{i}", random_conservative_crn(rng)) for i in range(150)]
    return crns


@pytest.mark.criterion(5, "soundness of every Holds verdict against the oracle")
def test_soundness():
    rng = random.Random(5)
    holds = 0
    problems = []
    for name, crn in _soundness_crns():
        s = analyze_graph(crn)
        b = build_matrices(crn, s)
        p = structural_profile(crn, b)
        verdicts = [("dominance", dominance_check(crn, b, s, p)),
                    ("deficiency-one", deficiency_one_check(crn, b, s, p))]
        for label, k in [("uniform", uniform_rates(crn))] + \
                [(f"kappa{i}", random_rates(crn, rng)) for i in range(3)]:
            verdicts.append((f"anderson {label}", anderson_check(crn, k, s, p)))
        positive = [(label, v) for label, v in verdicts if v.status is Verdict.HOLDS]
        if not positive:
            continue
        holds += 1
        inits = configurations_up_to(crn.num_species, 6)
        out = validate_prediction(crn, positive[0][1], inits, max_states=200_000,
                                  structure=s)
        if not out.passed:
            problems.append((name, [label for label, _ in positive], out.counterexample))
        if out.skipped:
            problems.append((name, "exploration truncated", out.skipped))
    assert holds >= 100
    assert problems == []


# 6 -------------------------------------------------------------------------

def _check_witness_shape(crn, s, z, w):
    excluded = (s.sccs.bridges - set(z)) | s.l_reactions
    assert not set(w.sequence) & excluded
    end = fire_sequence(crn, ComplexVector.from_tuple(w.configuration), w.sequence)
    assert end.to_tuple(crn.num_species) == tuple(w.configuration)
    flat = []
    assert len(w.paths) >= 1 and len(w.paths) == len(w.tails)
    for pi, sigma in zip(w.paths, w.tails):
        edges = [s.graph.edges[r] for r in pi]
        assert not s.is_terminal_vertex(edges[0][0])
        for (_, t), (u, _) in zip(edges, edges[1:]):
            assert t == u and not s.is_terminal_vertex(t)
        assert s.is_terminal_vertex(edges[-1][1])
        assert all(s.is_terminal_reaction(r) for r in sigma)
        flat += list(pi) + list(sigma)
    assert tuple(flat) == tuple(w.sequence)


@pytest.mark.criterion(6, "cycle witness found for every exit set (flag rate 0)")
def test_theorem1_completeness():
    cases = flagged = 0
    for name in corpus.names():
        crn = corpus.load(name)
        s = analyze_graph(crn)
        g = explore(crn, configurations_up_to(crn.num_species, 6))
        assert not g.truncated
        rep = recurrent_configurations(g, s)
        firing_sccs = {rc.bottom_scc for rc in rep.recurrent if rc.nonterminal_enabled}
        for scc in firing_sccs:
            members = [u for u, x in enumerate(rep.scc_of) if x == scc]
            for z in s.exit_sets():
                cases += 1
                w = find_theorem1_witness(crn, g, z, s, within=members)
                if w is None:
                    flagged += 1
                    continue
                _check_witness_shape(crn, s, z, w)
    assert cases > 0
    assert flagged == 0


# 7 -------------------------------------------------------------------------

@pytest.mark.criterion(7, "LP engine on 500 random queries")
def test_lp_engine():
    rng = random.Random(7)
    small = agree = grid_hits = 0
    for trial in range(500):
        if trial % 2 == 0:
            m, n = rng.randint(1, 3), rng.randint(1, 4)
        else:
            m, n = rng.randint(1, 5), rng.randint(1, 7)
        rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(m)]
        cols = list(range(n))
        rng.shuffle(cols)
        k0 = rng.randint(0, n // 2)
        zero = frozenset(cols[:k0])
        one = frozenset(cols[k0:k0 + rng.randint(0, 2)])
        q = FeasibilityQuery(RationalMatrix.from_rows(rows), zero, one)
        res = solve(q)
        if res.feasible:
            v = res.witness
            assert check_witness(q, v)
            assert all(sum(Fraction(a) * x for a, x in zip(row, v)) == 0 for row in rows)
            assert all(x >= 0 for x in v) and all(v[i] == 0 for i in zero)
            assert all(v[j] >= 1 for j in one)
        else:
            y = res.certificate
            assert check_certificate(q, y)
            col = [sum(y[i] * rows[i][j] for i in range(m)) for j in range(n)]
            assert all(col[j] <= 0 for j in range(n) if j not in zero)
            assert sum(col[j] for j in one) < 0
        if m <= 3 and n <= 4:
            small += 1
            assert vertex_enumeration_feasible(rows, zero, one) == res.feasible, (rows, zero, one)
            hit = grid_search_feasible(rows, zero, one)
            if hit is not None:
                grid_hits += 1
                assert res.feasible
            agree += 1
    assert small >= 200 and agree == small and grid_hits > 0
