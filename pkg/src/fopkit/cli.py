"""Command-line front end.

Wires parsing, evaluation, the deciders, the named reductions and the
universality checks into reproducible runs.  Exit codes are stable:

    0   accepting verdict / passing check
    1   rejecting verdict / failed check
    2   malformed input or usage error
    3   budget exhausted

Stdout is byte-deterministic for a fixed invocation (no timestamps in
report bodies); timing goes to stderr.
"""

from __future__ import annotations

import argparse
import random
import re
import sys
import time
from dataclasses import dataclass

from .errors import (BudgetExceededError, EvalError, FopkitError,
                     InstanceError, StructureError, WitnessError)
from .evaluate import eval_fo, eval_pi2, eval_so2
from .formulas import SOExists, SOForall, free_vars, parse_formula
from .limits import (DEFAULT_EXCLUSIVITY_BOUND, MAX_CLIQUES,
                     MAX_COLORING_NODES, MAX_GRAPH_SEARCH, MAX_STRUCTURES)
from .problems import (SIGMA_CNF, SIGMA_DNF, SIGMA_G, TAU, decide_2cc,
                       decide_2cc_n, decide_qsat2, decide_qsat2_witness,
                       decide_qunsat2, decide_unique_ext_witness,
                       decide_vcsat_witness, decode_cnf, decode_dnf,
                       decode_graph, decode_vcsat, encode_cnf, encode_dnf,
                       encode_graph, encode_vcsat, format_graph, format_qcnf,
                       format_vcsat, parse_graph, parse_qcnf, parse_qdnf,
                       parse_vcsat)
from .queries import apply_query, serialize_fop, validate_projection
from .reductions import (generic_to_qsat2, get_reduction, problem_oracle,
                         reduction_names, verify_reduction)
from .structures import (Structure, parse_structures, structure_at,
                         structure_count)
from .universality import (check_universality, parse_condition, witness_2cc,
                           witness_2cc_complement)

BUILTIN_VOCABS = {v.name: v for v in (SIGMA_G, SIGMA_DNF, SIGMA_CNF, TAU)}


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by all subcommands, resolved from the global flags."""

    command: str
    budget: int | None = None  # None: each command picks its own default cap
    bound: int = DEFAULT_EXCLUSIVITY_BOUND
    fidelity: str = "corrected"
    out_format: str = "text"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.budget is not None and self.budget <= 0:
            raise InstanceError("budget must be positive")
        if self.bound < 1:
            raise InstanceError("bound must be at least 1")


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _bool_word(value: bool) -> str:
    return "true" if value else "false"


def _threshold_of(tag: str) -> int:
    try:
        value = int(tag.split(":", 1)[1])
    except (IndexError, ValueError):
        raise InstanceError(f"bad padded problem tag {tag!r}, want 2cc-n:<size>")
    if value < 1:
        raise InstanceError("padding threshold must be >= 1")
    return value


def _parse_for_tag(tag: str, text: str):
    if tag == "qsat2":
        return parse_qdnf(text)
    if tag in ("qunsat2", "unique"):
        return parse_qcnf(text)
    if tag == "vcsat":
        return parse_vcsat(text)
    if tag == "2cc" or tag.startswith("2cc-n:"):
        return parse_graph(text)[1]
    raise InstanceError(f"unknown problem tag {tag!r}")


def _encode_for_tag(tag: str, inst):
    if tag == "qsat2":
        return encode_dnf(inst)
    if tag in ("qunsat2", "unique"):
        return encode_cnf(inst)
    if tag == "vcsat":
        return encode_vcsat(inst)
    return encode_graph(inst)


def _format_image(tag: str, B) -> str:
    if tag in ("qunsat2", "unique"):
        return format_qcnf(decode_cnf(B))
    if tag == "vcsat":
        return format_vcsat(decode_vcsat(B))
    return format_graph(decode_graph(B))


def _assignment_line(label: str, assignment: dict) -> str:
    parts = " ".join(f"x{v}={int(assignment[v])}" for v in sorted(assignment))
    return f"{label}: {parts}" if parts else f"{label}: (empty)"


# --- subcommand bodies ------------------------------------------------------


# instance shorthands eval accepts besides plain structure files
_SHORTHAND_TAGS = {"graph": "2cc", "qdnf": "qsat2", "qcnf": "qunsat2",
                   "vcsat": "vcsat"}


def _load_structure(path: str, name: str | None) -> Structure:
    text = _read(path)
    head = text.split(None, 1)[0] if text.split() else ""
    if head in _SHORTHAND_TAGS:
        tag = _SHORTHAND_TAGS[head]
        return _encode_for_tag(tag, _parse_for_tag(tag, text))
    _, structs = parse_structures(text, BUILTIN_VOCABS)
    if not structs:
        raise StructureError(f"no structure declared in {path}")
    if name is not None:
        if name not in structs:
            raise StructureError(f"no structure named {name!r} in the file")
        return structs[name]
    if len(structs) == 1:
        return next(iter(structs.values()))
    names = " ".join(sorted(structs))
    raise StructureError(f"several structures declared ({names}); pick one with --name")


def _cmd_eval(cfg: RunConfig, args) -> int:
    A = _load_structure(args.structure, args.name)
    phi = parse_formula(_read(args.formula), A.vocab)
    loose = free_vars(phi)
    if loose:
        raise EvalError(f"not a sentence, free variables: {' '.join(sorted(loose))}")
    if isinstance(phi, SOForall):
        verdict = eval_pi2(A, phi)
    elif isinstance(phi, SOExists):
        verdict = eval_so2(A, phi)
    else:
        verdict = eval_fo(A, phi)
    print(_bool_word(verdict))
    return 0 if verdict else 1


def _cmd_decide(cfg: RunConfig, args) -> int:
    tag = args.problem
    if tag.startswith("2cc-n:"):
        _threshold_of(tag)  # validate early so a bad tag is a usage error
    inst = _parse_for_tag(tag, _read(args.instance))
    lines: list[str] = []
    if tag == "qsat2":
        verdict, witness = decide_qsat2_witness(inst)
        if witness is not None:
            lines.append(_assignment_line("witness", witness))
    elif tag == "qunsat2":
        verdict = decide_qunsat2(inst)
    elif tag == "unique":
        verdict, witness = decide_unique_ext_witness(inst)
        if witness is not None:
            lines.append(_assignment_line("witness", witness[0]))
            lines.append(_assignment_line("completion", witness[1]))
    elif tag == "vcsat":
        verdict, witness = decide_vcsat_witness(inst)
        if witness is not None:
            lines.append("subset: " + " ".join(str(v) for v in sorted(witness)))
    elif tag == "2cc":
        verdict, coloring = decide_2cc(inst, node_cap=args.cap,
                                       clique_budget=cfg.budget or MAX_CLIQUES)
        if coloring is not None:
            lines.append("coloring: " + " ".join(str(c) for c in coloring))
    else:
        verdict = decide_2cc_n(inst, _threshold_of(tag), node_cap=args.cap)
    print(_bool_word(verdict))
    for line in lines:
        print(line)
    return 0 if verdict else 1


def _cmd_reduce(cfg: RunConfig, args) -> int:
    red = get_reduction(args.reduction, cfg.fidelity)
    if args.emit == "fop":
        _emit(serialize_fop(red.query, name=re.sub(r"\W", "_", red.name)),
              args.output)
        return 0
    if args.instance is None:
        raise InstanceError("an instance file is required with --emit structure")
    inst = _parse_for_tag(red.source_tag, _read(args.instance))
    A = _encode_for_tag(red.source_tag, inst)
    _emit(_format_image(red.target_tag, apply_query(red.query, A)), args.output)
    return 0


def _resolve_vocab(spec: str):
    if spec in BUILTIN_VOCABS:
        return BUILTIN_VOCABS[spec]
    declared, _ = parse_structures(_read(spec), BUILTIN_VOCABS)
    if len(declared) != 1:
        raise StructureError(f"expected exactly one vocab declaration in {spec}")
    return next(iter(declared.values()))


def _cmd_compile(cfg: RunConfig, args) -> int:
    vocab = _resolve_vocab(args.vocab)
    phi = parse_formula(_read(args.sentence), vocab)
    query = generic_to_qsat2(phi, vocab)
    _emit(serialize_fop(query, name="compiled"), args.output)
    report = validate_projection(query, size_bound=cfg.bound)
    print(f"projection check: {'ok' if report.is_projection else 'FAILED'} "
          f"(bound {cfg.bound})")
    if not report.is_projection:
        for line in report.violations:
            print(f"  {line}")
        return 1
    if args.verify_size < 1:
        return 0
    size = args.verify_size
    tsv = cfg.out_format == "tsv"
    if tsv:
        print("size\tindex\tsource\ttarget\tagree")
    agreements = 0
    mismatches = 0
    count = structure_count(vocab, size)
    if count > (cfg.budget or MAX_STRUCTURES):
        raise BudgetExceededError(f"{count} structures at size {size}")
    for index in range(count):
        A = structure_at(vocab, size, index)
        src = eval_so2(A, phi)
        dst = decide_qsat2(decode_dnf(apply_query(query, A)))
        if src == dst:
            agreements += 1
        else:
            mismatches += 1
        if tsv:
            print(f"{size}\t{index}\t{_bool_word(src)}\t{_bool_word(dst)}"
                  f"\t{_bool_word(src == dst)}")
    print(f"verify n={size}: agreements={agreements} counterexamples={mismatches}")
    return 0 if mismatches == 0 else 1


def _cmd_verify(cfg: RunConfig, args) -> int:
    red = get_reduction(args.reduction, cfg.fidelity)
    src_oracle = problem_oracle(red.source_tag)
    dst_oracle = problem_oracle(red.target_tag)
    budget = cfg.budget or MAX_STRUCTURES
    if args.check_projection:
        report = validate_projection(red.query, size_bound=cfg.bound)
        print(f"projection check: {'ok' if report.is_projection else 'FAILED'} "
              f"(bound {cfg.bound})")
        if not report.is_projection:
            for line in report.violations:
                print(f"  {line}")
            return 1
    tsv = cfg.out_format == "tsv"
    if tsv:
        print("size\tindex\tsource\ttarget\tagree")

    def sink(size, index, src, dst):
        print(f"{size}\t{index}\t{_bool_word(src)}\t{_bool_word(dst)}"
              f"\t{_bool_word(src == dst)}")

    if args.sample is None:
        report = verify_reduction(red, src_oracle, dst_oracle, args.sizes,
                                  budget=budget, row_sink=sink if tsv else None)
        agreements = report.agreements
        counterexamples = list(report.counterexamples)
    else:
        # sampled sweep: a deterministic subset of enumeration ranks per size
        rng = random.Random(cfg.seed)
        agreements = 0
        counterexamples = []
        for size in args.sizes:
            count = structure_count(red.query.source_vocab, size)
            if args.sample >= count:
                indices = range(count)
            else:
                indices = sorted(rng.sample(range(count), args.sample))
            for index in indices:
                A = structure_at(red.query.source_vocab, size, index)
                src = src_oracle(A)
                dst = dst_oracle(apply_query(red.query, A))
                if src == dst:
                    agreements += 1
                else:
                    counterexamples.append((size, index, src, dst))
                if tsv:
                    sink(size, index, src, dst)
    if not tsv:
        for size, index, src, dst in counterexamples[:10]:
            print(f"counterexample size={size} index={index} "
                  f"source={_bool_word(src)} target={_bool_word(dst)}")
    print(f"agreements={agreements} counterexamples={len(counterexamples)}")
    return 0 if not counterexamples else 1


def _cmd_universality(cfg: RunConfig, args) -> int:
    problem = args.problem
    if problem == "2cc":
        oracle = lambda g: decide_2cc(g)[0]  # noqa: E731
        witness = witness_2cc
    elif problem == "2cc-c":
        oracle = lambda g: not decide_2cc(g)[0]  # noqa: E731
        witness = witness_2cc_complement
    elif problem.startswith("2cc-n:"):
        threshold = _threshold_of(problem)
        oracle = lambda g: decide_2cc_n(g, threshold)  # noqa: E731
        witness = witness_2cc
    else:
        raise InstanceError(f"unknown problem {problem!r}")
    if args.no_witness:
        witness = None
    report = check_universality(oracle, args.n, args.k, args.mmax,
                                witness=witness, problem=problem,
                                search_budget=cfg.budget or MAX_GRAPH_SEARCH)
    if report.counterexample is None:
        against = ""
    else:
        m, conds = report.counterexample
        against = f"m={m}: " + " ".join(str(c) for c in conds)
    if cfg.out_format == "tsv":
        print("problem\tn\tk\tmmax\tresult\tchecked\tfull\twitnesses\tcounterexample")
        print(f"{problem}\t{args.n}\t{args.k}\t{args.mmax}"
              f"\t{'pass' if report.passed else 'fail'}"
              f"\t{report.sequences_checked}\t{report.sequences_full}"
              f"\t{report.witnesses_validated}\t{against}")
    else:
        print(f"problem={problem} n={args.n} k={args.k} mmax={args.mmax}")
        print(f"sequences: checked={report.sequences_checked} "
              f"full={report.sequences_full} "
              f"witnesses={report.witnesses_validated}")
        print("pass" if report.passed else f"fail at {against}")
    return 0 if report.passed else 1


def _cmd_witness(cfg: RunConfig, args) -> int:
    conds = [parse_condition(text) for text in args.condition]
    try:
        if args.problem == "2cc":
            g, red = witness_2cc(conds, args.m)
            sys.stdout.write(format_graph(g))
            print("# red = " + " ".join(str(v) for v in sorted(red)))
        else:
            g = witness_2cc_complement(conds, args.m)
            sys.stdout.write(format_graph(g))
    except WitnessError as exc:
        print(f"no witness: {exc}", file=sys.stderr)
        return 1
    return 0


# --- argument plumbing ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, metavar="N",
                        help="enumeration / search cap (default: per command)")
    common.add_argument("--bound", type=int, default=DEFAULT_EXCLUSIVITY_BOUND,
                        metavar="N", help="size bound for guard exclusivity checks")
    common.add_argument("--fidelity", choices=("verbatim", "corrected"),
                        default="corrected",
                        help="which form of the transcription-sensitive fops to use")
    common.add_argument("--format", dest="out_format", choices=("text", "tsv"),
                        default="text", help="report style on stdout")
    common.add_argument("--seed", type=int, default=0, metavar="N",
                        help="random seed for sampled sweeps")

    parser = argparse.ArgumentParser(
        prog="fopkit",
        description="workbench for first-order projections between "
                    "exists-forall second-order problems")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("eval", parents=[common],
                       help="evaluate a sentence on a finite structure")
    p.add_argument("structure", help="structure file")
    p.add_argument("formula", help="sentence file")
    p.add_argument("--name", default=None,
                   help="structure to use when the file declares several")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("decide", parents=[common],
                       help="run a brute-force decider on an instance file")
    p.add_argument("problem",
                   help="qsat2 | qunsat2 | unique | vcsat | 2cc | 2cc-n:<size>")
    p.add_argument("instance", help="instance file in the tag's shorthand")
    p.add_argument("--cap", type=int, default=MAX_COLORING_NODES, metavar="N",
                   help="node cap for the coloring deciders")
    p.set_defaults(handler=_cmd_decide)

    p = sub.add_parser("reduce", parents=[common],
                       help="apply a named reduction, or export its fop")
    p.add_argument("reduction", help="one of: " + " ".join(reduction_names()))
    p.add_argument("instance", nargs="?", default=None,
                   help="source instance file (not needed with --emit fop)")
    p.add_argument("--emit", choices=("structure", "fop"), default="structure")
    p.add_argument("-o", "--output", default=None, metavar="FILE")
    p.set_defaults(handler=_cmd_reduce)

    p = sub.add_parser("compile", parents=[common],
                       help="compile a prenex-DNF sentence into a projection")
    p.add_argument("sentence", help="sentence file")
    p.add_argument("--vocab", default="sigma_g",
                   help="builtin vocabulary name or a file declaring one")
    p.add_argument("--verify-size", type=int, default=2, metavar="N",
                   help="check the image against direct evaluation at this "
                        "universe size (0 skips)")
    p.add_argument("-o", "--output", default=None, metavar="FILE")
    p.set_defaults(handler=_cmd_compile)

    p = sub.add_parser("verify", parents=[common],
                       help="sweep a reduction against both deciders")
    p.add_argument("reduction", help="one of: " + " ".join(reduction_names()))
    p.add_argument("--sizes", type=int, nargs="+", required=True, metavar="N")
    p.add_argument("--sample", type=int, default=None, metavar="N",
                   help="check only N random instances per size")
    p.add_argument("--check-projection", action="store_true",
                   help="also validate the fop's guard shape first")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("universality", parents=[common],
                       help="test (n,k)-universality over a size range")
    p.add_argument("--problem", required=True,
                   help="2cc | 2cc-c | 2cc-n:<size>")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mmax", type=int, required=True)
    p.add_argument("--no-witness", action="store_true",
                   help="skip the constructions and search exhaustively")
    p.set_defaults(handler=_cmd_universality)

    p = sub.add_parser("witness", parents=[common],
                       help="print a constructed witness graph for a literal set")
    p.add_argument("--problem", choices=("2cc", "2cc-c"), required=True)
    p.add_argument("--m", type=int, required=True, help="number of nodes")
    p.add_argument("condition", nargs="+",
                   help="edge literals like 'E(0,1)' or '!E(2,3)'")
    p.set_defaults(handler=_cmd_witness)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        cfg = RunConfig(command=args.command, budget=args.budget,
                        bound=args.bound, fidelity=args.fidelity,
                        out_format=args.out_format, seed=args.seed)
        return args.handler(cfg, args)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (FopkitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        print(f"elapsed {time.perf_counter() - start:.3f}s", file=sys.stderr)


if __name__ == "__main__":
    raise SystemExit(main())
