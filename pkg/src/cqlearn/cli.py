"""Command-line surface.

Thin adapters over the library: every subcommand maps 1:1 to a module
operation.  Exit codes: 0 success / positive decision, 1 negative decision,
2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from fractions import Fraction

from . import families, fitting, homs, learn, pac, protocol, report, textio
from .model import CQ, Example, Label, ModelError, UCQ
from .trees import quotient_to_tree

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _write(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load_labeled_set(path: str):
    return textio.parse_example_set(_read(path)).labeled_set()


def cmd_eval(args) -> int:
    query = textio.parse_query(_read(args.query))
    instance = textio.parse_instance(_read(args.instance))
    tup = textio.split_args(args.tuple) if args.tuple else ()
    example = Example(instance, tup)
    if args.tree:
        if not isinstance(query, CQ):
            raise ModelError("--tree applies to single CQs")
        label = homs.evaluate_tree(query, example)
    elif isinstance(query, UCQ):
        label = homs.evaluate_ucq(query, example)
    else:
        label = homs.evaluate(query, example)
    print(label.value)
    return EXIT_OK if label is Label.POSITIVE else EXIT_NEGATIVE


def _make_oracle(args, examples):
    if args.target:
        target = textio.parse_query(_read(args.target))
        return learn.TargetOracle(target)
    if args.oracle_cmd:
        return protocol.SubprocessOracle(shlex.split(args.oracle_cmd))
    raise ModelError("provide --target or --oracle-cmd")


def cmd_learn(args) -> int:
    examples = _load_labeled_set(args.examples)
    oracle = _make_oracle(args, examples)
    try:
        if args.variant == "cq":
            out = learn.learn_cq(examples, oracle)
        else:
            out = learn.learn_ucq(examples, oracle)
    finally:
        if isinstance(oracle, protocol.StreamOracle):
            oracle.close()
    print(textio.serialize_query(out.hypothesis))
    print(f"# oracle calls: {out.oracle_calls}", file=sys.stderr)
    return EXIT_OK


def cmd_fit(args) -> int:
    examples = _load_labeled_set(args.examples)
    result = fitting.fitting_exists(examples)
    if result.exists:
        print(textio.serialize_cq(result.witness))
        return EXIT_OK
    print("no fitting CQ exists")
    return EXIT_NEGATIVE


def cmd_fit_enum(args) -> int:
    examples = _load_labeled_set(args.examples)
    q = fitting.smallest_fitting_enumeration(examples, args.max_atoms)
    if q is None:
        print(f"no fitting CQ with at most {args.max_atoms} atoms")
        return EXIT_NEGATIVE
    print(textio.serialize_cq(q))
    return EXIT_OK


def cmd_gen_cnf(args) -> int:
    phi = textio.parse_dimacs(_read(args.dimacs))
    if args.pad:
        phi = phi.padded_to_width_3()
    _, examples = families.gen_cnf_reduction(phi)
    _write(args.out, textio.serialize_example_set(examples))
    return EXIT_OK


def cmd_gen_lasso(args) -> int:
    _, examples, query = families.gen_lasso_family(args.n)
    _write(args.out, textio.serialize_example_set(examples))
    if args.query_out:
        _write(args.query_out, textio.serialize_cq(query) + "\n")
    return EXIT_OK


def cmd_gen_vc(args) -> int:
    examples, query_for_subset = families.gen_vc_family(args.n)
    subset = {int(tok) for tok in args.subset.split(",") if tok} if args.subset else set()
    query = query_for_subset(subset)
    labeled = tuple(
        (e, homs.evaluate(query, e)) for e in examples
    )
    from .model import LabeledExampleSet

    _write(args.out, textio.serialize_example_set(LabeledExampleSet(labeled)))
    if args.query_out:
        _write(args.query_out, textio.serialize_cq(query) + "\n")
    return EXIT_OK


def cmd_gen_random(args) -> int:
    profile = families.RandomProfile(
        kind=args.kind,
        max_values=args.max_values,
        max_facts=args.max_facts,
        max_atoms=args.max_atoms,
        arity=args.arity,
        num_examples=args.num_examples,
    )
    value = families.gen_random(args.seed, profile)
    if args.kind in ("instance", "tree-instance"):
        _write(args.out, textio.serialize_instance(value))
    elif args.kind in ("cq", "tree-cq"):
        _write(args.out, textio.serialize_cq(value) + "\n")
    else:
        _write(args.out, textio.serialize_example_set(value))
    return EXIT_OK


def cmd_quotient(args) -> int:
    query = textio.parse_query(_read(args.query))
    if not isinstance(query, CQ):
        raise ModelError("quotient applies to single CQs")
    result = quotient_to_tree(query)
    if result.unsatisfiable_on_trees:
        print("unsatisfiable on tree-shaped instances")
        return EXIT_NEGATIVE
    print(textio.serialize_cq(result.query))
    return EXIT_OK


def cmd_pac_run(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    base = os.path.dirname(os.path.abspath(args.config))

    def resolve(path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(base, path)

    target = textio.parse_query(_read(resolve(config["target"])))
    instance = textio.parse_instance(_read(resolve(config["instance"])))
    support = []
    for entry in config["support"]:
        tup = tuple(entry["tuple"])
        weight = Fraction(entry.get("weight", 1))
        support.append((Example(instance, tup), weight))
    dist = pac.Distribution(tuple(support))
    from .model import bit_size

    params = pac.PacParams(
        delta=config["delta"],
        epsilon=config["epsilon"],
        n_bits=config.get("n_bits", bit_size(target)),
        alpha=config.get("alpha", 0.0),
        k_occam=config.get("k_occam", 1),
    )
    reports = pac.run_pac_experiment(
        target,
        dist,
        params,
        trials=config.get("trials", 10),
        seed=args.seed,
        ucq=config.get("ucq", False),
    )
    report.write_reports(args.out, reports)
    figure_path = args.figure or os.path.splitext(args.out)[0] + ".png"
    report.render_error_figure(figure_path, reports, epsilon=params.epsilon)
    hits = sum(1 for r in reports if r.empirical_error <= Fraction(params.epsilon).limit_denominator(10**9))
    print(f"{hits}/{len(reports)} trials with error <= {params.epsilon}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    target = textio.parse_query(_read(args.query))
    protocol.serve_oracle(target, sys.stdin, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqlearn",
        description="Conjunctive-query learning workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a query on an example")
    p.add_argument("query")
    p.add_argument("instance")
    p.add_argument("--tuple", default="", help="distinguished tuple, e.g. a,b")
    p.add_argument("--tree", action="store_true", help="use the tree-shaped evaluator")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("learn", help="learn a query with a membership oracle")
    p.add_argument("variant", choices=("cq", "ucq"))
    p.add_argument("examples")
    p.add_argument("--target", help="query file backing a built-in oracle")
    p.add_argument(
        "--oracle-cmd",
        help="external oracle command speaking the stdio protocol (one string)",
    )
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("fit", help="decide fitting via the product characterization")
    p.add_argument("examples")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("fit-enum", help="smallest fitting CQ by enumeration")
    p.add_argument("examples")
    p.add_argument("--max-atoms", type=int, required=True)
    p.set_defaults(func=cmd_fit_enum)

    pg = sub.add_parser("gen", help="generate instance families")
    gsub = pg.add_subparsers(dest="family", required=True)

    p = gsub.add_parser("cnf", help="satisfiability-reduction example set")
    p.add_argument("dimacs")
    p.add_argument("--out")
    p.add_argument("--pad", action="store_true", help="pad clauses to width 3")
    p.set_defaults(func=cmd_gen_cnf)

    p = gsub.add_parser("lasso", help="prime-length lasso family")
    p.add_argument("n", type=int)
    p.add_argument("--out")
    p.add_argument("--query-out")
    p.set_defaults(func=cmd_gen_lasso)

    p = gsub.add_parser("vc", help="shattered path-example family")
    p.add_argument("n", type=int)
    p.add_argument("--subset", default="", help="comma-separated indices")
    p.add_argument("--out")
    p.add_argument("--query-out")
    p.set_defaults(func=cmd_gen_vc)

    p = gsub.add_parser("random", help="seeded random test inputs")
    p.add_argument(
        "--kind",
        required=True,
        choices=("instance", "tree-instance", "cq", "tree-cq", "labeled-set"),
    )
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-values", type=int, default=10)
    p.add_argument("--max-facts", type=int, default=15)
    p.add_argument("--max-atoms", type=int, default=5)
    p.add_argument("--arity", type=int, default=1)
    p.add_argument("--num-examples", type=int, default=6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_random)

    p = sub.add_parser("quotient", help="normalize a CQ for tree-shaped instances")
    p.add_argument("query")
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("pac-run", help="run seeded PAC experiment trials")
    p.add_argument("config")
    p.add_argument("--out", required=True, help="TSV report path")
    p.add_argument("--figure", help="figure path (default: report path with .png)")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_pac_run)

    p = sub.add_parser("oracle", help="serve a membership oracle on stdio")
    p.add_argument("query")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (textio.ParseError, ModelError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
