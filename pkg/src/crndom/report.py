"""Machine-readable reports (canonical JSON) and their text rendering."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from . import __version__
from .analysis import (AndersonSweep, Boundedness, DominanceVerdict, MatrixBundle,
                       StructuralProfile, Verdict, anderson_sweep, build_matrices,
                       deficiency_one_check, dominance_check, structural_profile)
from .graph import GraphStructure, analyze_graph
from .model import Crn

SCHEMA_VERSION = 1


def q(x) -> Any:
    """Exact number for JSON: integers bare, other rationals as ``"p/q"``."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _named(labels, vec) -> dict:
    return {labels[i]: q(x) for i, x in enumerate(vec) if x}


def verdict_dict(crn: Crn, v: DominanceVerdict, structure: GraphStructure,
                 columns: str = "reactions") -> dict:
    names = crn.reaction_names
    out: dict[str, Any] = {"status": v.status.value, "reason": v.reason}
    if v.witness_exit_set is not None:
        out["exit_set"] = [names[i] for i in v.witness_exit_set]
    if v.zero_set is not None:
        out["zero_set"] = sorted((names[i] for i in v.zero_set),
                                 key=names.index)
    if v.hypotheses:
        out["hypotheses"] = list(v.hypotheses)
    labels = names if columns == "reactions" else structure.graph.vertex_labels
    if v.witness is not None:
        out["witness"] = _named(labels, v.witness)
    if v.cap_reached:
        out["cap_reached"] = True
    certs = []
    if v.status is Verdict.HOLDS:
        for item in v.evidence:
            results = item.results if hasattr(item, "results") else (item,)
            for target, res in results:
                if res.certificate is not None:
                    certs.append({"target": labels[target],
                                  "farkas": _cert_named(crn, res.certificate)})
    if certs:
        out["certificates"] = certs
    if v.status is not Verdict.NOT_APPLICABLE and columns == "reactions":
        out["exit_sets_examined"] = sum(1 for e in v.evidence if hasattr(e, "exit_set"))
    return out


def _cert_named(crn: Crn, cert) -> dict:
    species = crn.species_names
    n = len(species)
    named = {species[i]: q(x) for i, x in enumerate(cert[:n]) if x}
    extra = {f"flow{i}": q(x) for i, x in enumerate(cert[n:]) if x}
    named.update(extra)
    return named


def _structural(crn: Crn, bundle: MatrixBundle, profile: StructuralProfile) -> dict:
    method = {
        Boundedness.PROVED_BY_CONSERVATIVITY: "conservativity",
        Boundedness.PROVED_EXACT: "dual-lp",
        Boundedness.REFUTED_EXACT: "dual-lp",
        Boundedness.UNKNOWN: "none",
    }[profile.structurally_bounded]
    out = {
        "conservative": profile.conservative,
        "consistent": profile.consistent,
        "deficiency": profile.deficiency,
        "rank_incidence": bundle.rank_I,
        "rank_reaction_graph": bundle.rank_R,
        "structurally_bounded": {
            "status": profile.structurally_bounded.value,
            "method": method,
        },
    }
    if profile.p_invariant is not None:
        out["p_invariant"] = _named(crn.species_names, profile.p_invariant)
    if profile.t_invariant is not None:
        out["t_invariant"] = _named(crn.reaction_names, profile.t_invariant)
    if profile.boundedness_witness is not None and method == "dual-lp":
        out["structurally_bounded"]["witness"] = _named(
            crn.species_names, profile.boundedness_witness)
    return out


def _graph(crn: Crn, s: GraphStructure) -> dict:
    names = crn.reaction_names
    labels = s.graph.vertex_labels
    sccs = [{
        "id": c.id,
        "complexes": [labels[v] for v in c.vertices],
        "reactions": [names[e] for e in c.edges],
        "exits": [names[e] for e in c.out_edges],
        "terminal": c.terminal,
    } for c in s.sccs.components]
    return {
        "complexes": list(labels),
        "sccs": sccs,
        "bridges": [n for i, n in enumerate(names) if i in s.sccs.bridges],
        "dominance": sorted([x, y] for x, y in s.dominance.pairs if x != y),
        "antisymmetry_violation": list(s.dominance.antisymmetry_violation)
        if s.dominance.antisymmetry_violation else None,
        "minimal_nonterminal": list(s.minimal) if s.minimal is not None else None,
        "exit_set_count": s.exit_set_count(),
        "dominated_reactions": [n for i, n in enumerate(names) if i in s.l_reactions],
        "dominated_complexes": [labels[v] for v in sorted(s.l_vertices)],
    }


def anderson_dict(crn: Crn, sweep: AndersonSweep, structure: GraphStructure) -> dict:
    return {
        "runs": [{"label": label,
                  "rates": {k: q(v) for k, v in rates.items()},
                  "verdict": verdict_dict(crn, verdict, structure, "complexes")}
                 for label, rates, verdict in sweep.runs],
        "aggregate": sweep.aggregate,
        "holds": sweep.count(Verdict.HOLDS),
        "inconclusive": sweep.count(Verdict.INCONCLUSIVE),
        "not_applicable": sweep.count(Verdict.NOT_APPLICABLE),
    }


@dataclass
class AnalysisReport:
    crn: Crn
    structure: GraphStructure
    bundle: MatrixBundle
    profile: StructuralProfile
    dominance: DominanceVerdict
    deficiency_one: DominanceVerdict
    anderson: AndersonSweep
    source: Optional[str] = None
    source_digest: Optional[str] = None
    oracle: Optional[dict] = None
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        crn = self.crn
        out = {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "crndom", "version": __version__},
            "input": {"path": self.source, "sha256": self.source_digest},
            "crn": {
                "species": list(crn.species_names),
                "reactions": list(crn.reaction_names),
                "counts": {"species": crn.num_species,
                           "reactions": crn.num_reactions,
                           "complexes": len(self.structure.graph.vertices)},
            },
            "structural": _structural(crn, self.bundle, self.profile),
            "graph": _graph(crn, self.structure),
            "dominance_check": verdict_dict(crn, self.dominance, self.structure),
            "deficiency_one_check": verdict_dict(crn, self.deficiency_one,
                                                 self.structure),
            "anderson": anderson_dict(crn, self.anderson, self.structure),
            "options": self.options,
        }
        if self.oracle is not None:
            out["oracle"] = self.oracle
        return out

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    def to_text(self) -> str:
        return render_text(self.to_dict())


def analyze(crn: Crn, cap: int = 10_000, strengthened: bool = False,
            rates=None, samples: int = 0, seed: int = 0,
            source: str | None = None, data: bytes | None = None) -> AnalysisReport:
    structure = analyze_graph(crn)
    bundle = build_matrices(crn, structure)
    profile = structural_profile(crn, bundle)
    dom = dominance_check(crn, bundle, structure, profile, cap=cap,
                          strengthened=strengthened)
    d1 = deficiency_one_check(crn, bundle, structure, profile)
    sweep = anderson_sweep(crn, rates=rates, uniform=True, samples=samples,
                           seed=seed, structure=structure, profile=profile)
    return AnalysisReport(
        crn, structure, bundle, profile, dom, d1, sweep, source,
        digest(data) if data is not None else None,
        options={"max_exit_sets": cap, "strengthened": strengthened,
                 "samples": samples, "seed": seed})


def _fmt_vec(d: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in d.items()) or "0"


def _fmt_verdict(v: dict) -> list[str]:
    lines = [f"  status: {v['status']} ({v['reason']})"]
    if "exit_set" in v:
        lines.append(f"  exit set: {{{', '.join(v['exit_set'])}}}")
    if "zero_set" in v:
        lines.append(f"  forced zero: {{{', '.join(v['zero_set'])}}}")
    if "hypotheses" in v:
        lines.append("  hypotheses: " + "; ".join(v["hypotheses"]))
    if "witness" in v:
        lines.append(f"  witness: {_fmt_vec(v['witness'])}")
    return lines


def render_text(r: dict) -> str:
    c, s, g = r["crn"], r["structural"], r["graph"]
    lines = [
        f"crndom {r['tool']['version']}  {r['input']['path'] or ''}".rstrip(),
        f"species {c['counts']['species']}, reactions {c['counts']['reactions']}, "
        f"complexes {c['counts']['complexes']}",
        "",
        f"conservative: {'yes' if s['conservative'] else 'no'}"
        + (f"  [{_fmt_vec(s['p_invariant'])}]" if "p_invariant" in s else ""),
        f"consistent:   {'yes' if s['consistent'] else 'no'}"
        + (f"  [{_fmt_vec(s['t_invariant'])}]" if "t_invariant" in s else ""),
        f"structurally bounded: {s['structurally_bounded']['status']} "
        f"(method: {s['structurally_bounded']['method']})",
        f"deficiency: {s['deficiency']}  (rank R = {s['rank_reaction_graph']}, "
        f"rank I = {s['rank_incidence']})",
        "",
        "SCCs:",
    ]
    for scc in g["sccs"]:
        tag = "terminal" if scc["terminal"] else "non-terminal"
        exits = f" exits {{{', '.join(scc['exits'])}}}" if scc["exits"] else ""
        lines.append(f"  [{scc['id']}] {{{', '.join(scc['complexes'])}}} {tag}{exits}")
    lines += [
        f"bridges: {{{', '.join(g['bridges'])}}}",
        f"minimal non-terminal SCCs: {g['minimal_nonterminal']}",
        f"exit sets: {g['exit_set_count']}",
        f"dominated reactions: {{{', '.join(g['dominated_reactions'])}}}",
        f"dominated complexes: {{{', '.join(g['dominated_complexes'])}}}",
        "",
        "dominance check:",
        *_fmt_verdict(r["dominance_check"]),
        "deficiency-one check:",
        *_fmt_verdict(r["deficiency_one_check"]),
        f"rate condition: {r['anderson']['aggregate']}",
    ]
    for run in r["anderson"]["runs"]:
        lines.append(f"  {run['label']}: {run['verdict']['status']}")
    return "\n".join(lines) + "\n"
