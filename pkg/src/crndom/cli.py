"""Command-line front end.

Exit codes: 0 ok, 1 validation counterexample, 2 input error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .analysis import (InvalidRates, anderson_check, anderson_sweep, build_matrices,
                       closed_t_invariant_basis, deficiency_one_check,
                       dominance_check, is_closed_t_invariant, p_invariant_cover,
                       parse_rates, structural_profile, t_invariant_basis,
                       t_invariant_cover, uniform_rates)
from .graph import analyze_graph
from .linalg import left_kernel_basis
from .model import ComplexVector, Crn
from .oracle import (DEFAULT_MAX_COUNT, DEFAULT_MAX_STATES, configurations_up_to,
                     explore, recurrent_configurations, validate_prediction)
from .parser import ParseError, parse_configuration, parse_crn
from .report import (SCHEMA_VERSION, analyze, anderson_dict, canonical_json, digest,
                     render_text)

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load(path: str) -> tuple[Crn, bytes]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}", EXIT_IO) from None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CliError(f"{path}:1:1: input is not UTF-8 ({exc.reason})",
                       EXIT_INPUT) from None
    try:
        return parse_crn(text), data
    except ParseError as exc:
        raise CliError(exc.format(path), EXIT_INPUT) from None


def _read_rates(path: str, crn: Crn, uniform_fill: bool):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}", EXIT_IO) from None
    try:
        return parse_rates(text, crn, uniform_fill)
    except InvalidRates as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from None


def _header(command: str, path: str, data: bytes) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command,
            "tool": {"name": "crndom", "version": __version__},
            "input": {"path": path, "sha256": digest(data)}}


def _emit(args, report: dict, text: str) -> None:
    sys.stdout.write(canonical_json(report) if args.json else text)


def cmd_analyze(args) -> int:
    crn, data = _load(args.path)
    rates = _read_rates(args.rates, crn, args.uniform_fill) if args.rates else None
    rep = analyze(crn, cap=args.max_exit_sets, strengthened=args.strengthened,
                  rates=rates, samples=args.samples, seed=args.seed,
                  source=args.path, data=data)
    d = rep.to_dict()
    _emit(args, d, render_text(d))
    return EXIT_OK


def _vectors(labels, basis):
    return [{labels[i]: x for i, x in enumerate(v) if x} for v in basis]


def cmd_invariants(args) -> int:
    crn, data = _load(args.path)
    structure = analyze_graph(crn)
    bundle = build_matrices(crn, structure)
    profile = structural_profile(crn, bundle)
    out = _header("invariants", args.path, data)
    out["kind"] = args.kind
    lines = []
    if args.kind == "t":
        labels = crn.reaction_names
        basis = closed_t_invariant_basis(bundle) if args.closed_only \
            else t_invariant_basis(bundle)
        cover = t_invariant_cover(bundle)
        out["dimension"] = len(basis)
        out["basis"] = [{"vector": vec, "closed": not any(bundle.graph_R.apply(v))}
                        for vec, v in zip(_vectors(labels, basis), basis)]
        out["closed_dimension"] = len(closed_t_invariant_basis(bundle))
        out["semipositive_support"] = [labels[j] for j in sorted(cover)]
        out["nonnegative_cone_trivial"] = not cover
        out["consistent"] = profile.consistent
        if profile.t_invariant is not None:
            out["full_support_witness"] = _vectors(labels, [profile.t_invariant])[0]
            out["full_support_witness_closed"] = is_closed_t_invariant(
                profile.t_invariant, bundle)
        title = "closed T-invariant space" if args.closed_only else "T-invariant space"
        lines.append(f"{title}: dimension {len(basis)}")
        if args.basis or args.closed_only:
            for entry in out["basis"]:
                tag = "closed" if entry["closed"] else "non-closed"
                lines.append(f"  {_fmt(entry['vector'])}  ({tag})")
        if cover:
            lines.append("reactions covered by T-invariants: "
                         + ", ".join(out["semipositive_support"]))
        else:
            lines.append("nonnegative T-invariant cone is trivial (only 0)")
        lines.append(f"consistent: {'yes' if profile.consistent else 'no'}")
    else:
        labels = crn.species_names
        basis = left_kernel_basis(bundle.incidence_I)
        cover = p_invariant_cover(bundle)
        out["dimension"] = len(basis)
        out["basis"] = [{"vector": vec} for vec in _vectors(labels, basis)]
        out["semipositive_support"] = [labels[j] for j in sorted(cover)]
        out["conservative"] = profile.conservative
        if profile.p_invariant is not None:
            out["witness"] = _vectors(labels, [profile.p_invariant])[0]
        lines.append(f"P-invariant space: dimension {len(basis)}")
        if args.basis:
            for entry in out["basis"]:
                lines.append(f"  {_fmt(entry['vector'])}")
        lines.append(f"conservative: {'yes' if profile.conservative else 'no'}")
        if "witness" in out:
            lines.append(f"  witness: {_fmt(out['witness'])}")
    _emit(args, out, "\n".join(lines) + "\n")
    return EXIT_OK


def _fmt(d: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in d.items()) or "0"


def cmd_anderson(args) -> int:
    crn, data = _load(args.path)
    structure = analyze_graph(crn)
    rates = _read_rates(args.rates, crn, args.uniform_fill) if args.rates else None
    uniform = args.uniform or (rates is None and args.samples == 0)
    sweep = anderson_sweep(crn, rates=rates, uniform=uniform, samples=args.samples,
                           seed=args.seed, structure=structure)
    out = _header("anderson", args.path, data)
    out.update(anderson_dict(crn, sweep, structure))
    lines = [f"{label}: {v.status.value} ({v.reason})" for label, _, v in sweep.runs]
    lines.append(f"aggregate: {sweep.aggregate}")
    _emit(args, out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_reach(args) -> int:
    crn, data = _load(args.path)
    try:
        init = parse_configuration(args.init, crn)
    except ParseError as exc:
        raise CliError(exc.format("--init"), EXIT_INPUT) from None
    structure = analyze_graph(crn)
    g = explore(crn, init, args.max_states, args.max_count)
    out = _header("reach", args.path, data)
    out.update({"init": crn.format_complex(init), "states": len(g.nodes),
                "arcs": len(g.arcs), "truncated": g.truncated})
    lines = [f"init {out['init']}: {len(g.nodes)} states, {len(g.arcs)} arcs"]
    if args.dump:
        try:
            Path(args.dump).write_text("".join(l + "\n" for l in g.dump_lines()),
                                       encoding="utf-8")
        except OSError as exc:
            raise CliError(f"{args.dump}: {exc.strerror or exc}", EXIT_IO) from None
    if g.truncated:
        out["truncation_reason"] = g.truncation_reason
        lines.append(f"truncated ({g.truncation_reason}); recurrence not certified")
    else:
        rep = recurrent_configurations(g, structure)
        names = crn.reaction_names
        out["recurrent"] = [{
            "configuration": g.format_config(rc.node),
            "enabled": [{"reaction": names[r], "terminal": t} for r, t in rc.enabled],
        } for rc in rep.recurrent]
        out["bottom_scc_count"] = len(rep.bottom_sccs)
        out["any_nonterminal_fires"] = rep.any_nonterminal_fires
        lines.append(f"recurrent configurations ({len(rep.recurrent)}):")
        for entry in out["recurrent"]:
            en = ", ".join(e["reaction"] + ("" if e["terminal"] else "*")
                           for e in entry["enabled"])
            lines.append(f"  {entry['configuration']}" + (f"  enables {en}" if en else ""))
        lines.append("non-terminal reaction fires at a recurrent configuration: "
                     + ("yes" if rep.any_nonterminal_fires else "no"))
    _emit(args, out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    crn, data = _load(args.path)
    structure = analyze_graph(crn)
    bundle = build_matrices(crn, structure)
    profile = structural_profile(crn, bundle)
    verdicts = {
        "dominance_check": dominance_check(crn, bundle, structure, profile,
                                           cap=args.max_exit_sets),
        "deficiency_one_check": deficiency_one_check(crn, bundle, structure, profile),
        "anderson_uniform": anderson_check(crn, uniform_rates(crn), structure, profile),
    }
    inits = configurations_up_to(crn.num_species, args.inits_total_count)
    out = _header("validate", args.path, data)
    out["inits"] = len(inits)
    out["results"] = {}
    lines = []
    failed = False
    for name, verdict in verdicts.items():
        res = validate_prediction(crn, verdict, inits, args.max_states,
                                  args.max_count, structure)
        entry = {"verdict": verdict.status.value, "passed": res.passed,
                 "vacuous": res.vacuous, "checked": res.checked,
                 "skipped": res.skipped}
        if not res.passed:
            failed = True
            entry["counterexample"] = crn.format_complex(
                ComplexVector.from_tuple(res.counterexample))
            entry["enabled"] = [crn.reaction_names[r]
                                for r in res.counterexample_reactions]
        out["results"][name] = entry
        status = "pass" if res.passed else "FAIL"
        extra = " (vacuous)" if res.vacuous else \
            f" ({res.checked} checked, {res.skipped} skipped)"
        lines.append(f"{name}: {verdict.status.value} -> {status}{extra}")
        if not res.passed:
            lines.append(f"  counterexample: {entry['counterexample']} enables "
                         + ", ".join(entry["enabled"]))
    out["passed"] = not failed
    _emit(args, out, "\n".join(lines) + "\n")
    return EXIT_COUNTEREXAMPLE if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="crndom",
        description="Structural recurrence analysis for discrete CRNs / Petri nets")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("path", help=".crn file")
        sp.add_argument("--json", action="store_true", help="canonical JSON output")

    a = sub.add_parser("analyze", help="run every structural check")
    common(a)
    a.add_argument("--max-exit-sets", type=int, default=10_000)
    a.add_argument("--strengthened", action="store_true",
                   help="experimental: add a walk-decomposition flow condition")
    a.add_argument("--rates", help="rate file (name = rational per line)")
    a.add_argument("--uniform-fill", action="store_true",
                   help="missing rates default to 1")
    a.add_argument("--samples", type=int, default=0)
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_analyze)

    i = sub.add_parser("invariants", help="T- or P-invariant bases")
    common(i)
    i.add_argument("--kind", choices=("t", "p"), default="t")
    i.add_argument("--basis", action="store_true", help="print basis vectors")
    i.add_argument("--closed-only", action="store_true",
                   help="closed T-invariants only (kernel of the graph incidence)")
    i.set_defaults(func=cmd_invariants)

    k = sub.add_parser("anderson", help="rate-weighted condition per rate vector")
    common(k)
    k.add_argument("--rates")
    k.add_argument("--uniform", action="store_true")
    k.add_argument("--uniform-fill", action="store_true")
    k.add_argument("--samples", type=int, default=0)
    k.add_argument("--seed", type=int, default=0)
    k.set_defaults(func=cmd_anderson)

    r = sub.add_parser("reach", help="explicit-state recurrence report")
    common(r)
    r.add_argument("--init", required=True, help='initial configuration, e.g. "2A + B"')
    r.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    r.add_argument("--max-count", type=int, default=DEFAULT_MAX_COUNT)
    r.add_argument("--dump", help="write arcs as 'src<TAB>reaction<TAB>dst'")
    r.set_defaults(func=cmd_reach)

    v = sub.add_parser("validate", help="check Holds verdicts against the oracle")
    common(v)
    v.add_argument("--inits-total-count", type=int, default=6)
    v.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    v.add_argument("--max-count", type=int, default=DEFAULT_MAX_COUNT)
    v.add_argument("--max-exit-sets", type=int, default=10_000)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(exc, file=sys.stderr)
        return exc.code
    except ValueError as exc:
        # caps and similar argument problems
        print(f"crndom: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
