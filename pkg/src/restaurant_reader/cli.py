"""Command-line front end.

Subcommands: solve, ask, gen-questions, bench, corpus-run, validate.
Exit codes: 0 success, 1 usage or input error, 2 no models, 3 timeout.
Hyphenated flag values (new-only, s-flat) map onto the underscored
internal names. Identical invocations print byte-identical JSON: model
order, JSON key order, and question order are all canonical, and timing
figures never appear in solve output.
"""

import argparse
import json
import sys
from typing import List, Optional, Sequence

from restaurant_reader.corpus import (
    CorpusError,
    bench,
    bench_csv,
    bench_json,
    bundled_corpus_path,
    distribution,
    load_corpus,
    run_entry,
)
from restaurant_reader.domain import DomainError, build_restaurant_domain
from restaurant_reader.logicform import StorySyntaxError, parse_story, validate_story
from restaurant_reader.queries import QueryError, answer, generate_queries, parse_query
from restaurant_reader.reasoner import (
    Config,
    SolveTimeout,
    default_max_steps,
    solve,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_MODELS = 2
EXIT_TIMEOUT = 3


class _Parser(argparse.ArgumentParser):
    """argparse with the documented usage exit code (1, not argparse's 2)."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="restaurant-reader",
        description="Mental-model construction and question answering "
        "for restaurant stories.",
    )
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def add_config_flags(p: _Parser) -> None:
        p.add_argument(
            "--ti",
            choices=["mixed", "new-only"],
            default="mixed",
            help="intention theory for staff agents (default mixed)",
        )
        p.add_argument(
            "--structure",
            choices=["s-flat", "s1", "s2"],
            default="s2",
            help="customer activity structure (default s2)",
        )
        p.add_argument("--max-steps", type=int, default=None, metavar="N")
        p.add_argument(
            "--max-interferences", type=int, default=2, metavar="N"
        )
        p.add_argument(
            "--timeout", type=float, default=None, metavar="SECONDS"
        )

    p_solve = sub.add_parser("solve", help="compute the cautious readings")
    p_solve.add_argument("--story", required=True, metavar="FILE")
    add_config_flags(p_solve)
    p_solve.add_argument("--json", metavar="OUT", help="also write JSON here")

    p_ask = sub.add_parser("ask", help="answer one question over the readings")
    p_ask.add_argument("--story", required=True, metavar="FILE")
    p_ask.add_argument("--query", required=True, metavar="QUERY")
    add_config_flags(p_ask)

    p_gen = sub.add_parser("gen-questions", help="generate questions for a story")
    p_gen.add_argument("--story", required=True, metavar="FILE")
    p_gen.add_argument("--n", type=int, default=1, metavar="N",
                       help="required candidates per question form")
    p_gen.add_argument("--m", type=int, default=3, metavar="M",
                       help="questions taken per form")

    p_bench = sub.add_parser("bench", help="time corpus entries per configuration")
    p_bench.add_argument("--corpus", default=None, metavar="FILE")
    p_bench.add_argument("--reps", type=int, default=10, metavar="R")
    p_bench.add_argument("--csv", metavar="OUT")
    p_bench.add_argument("--json", metavar="OUT")
    p_bench.add_argument(
        "--ids", metavar="ID,ID,...", help="restrict to these entry ids"
    )
    p_bench.add_argument("--timeout", type=float, default=None, metavar="SECONDS")

    p_run = sub.add_parser("corpus-run", help="solve every corpus entry")
    p_run.add_argument("--corpus", default=None, metavar="FILE")
    add_config_flags(p_run)
    p_run.set_defaults(timeout=60.0)
    p_run.add_argument("--json", metavar="OUT")

    p_val = sub.add_parser("validate", help="lint a story or a corpus file")
    p_val.add_argument("--story", metavar="FILE")
    p_val.add_argument("--corpus", metavar="FILE")

    return parser


def _config_from(args: argparse.Namespace) -> Config:
    return Config(
        ti_mode=args.ti.replace("-", "_"),
        customer_structure=args.structure.replace("-", "_"),
        max_steps=args.max_steps,
        max_interferences=args.max_interferences,
    )


def _load_story(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_story(fh.read(), story_id=path)


def _corpus_path(args: argparse.Namespace) -> str:
    return args.corpus or bundled_corpus_path()


# ============================================================================
# subcommands
# ============================================================================


def _cmd_solve(args: argparse.Namespace) -> int:
    story = _load_story(args.story)
    domain = build_restaurant_domain(story.entities)
    config = _config_from(args)
    result = solve(story, config, domain=domain, timeout_s=args.timeout)
    payload = {
        "config": {
            "ti_mode": config.ti_mode,
            "customer_structure": config.customer_structure,
            "max_steps": config.max_steps
            or default_max_steps(domain, story, config),
            "max_interferences": config.max_interferences,
        },
        "model_count": len(result.models),
        "reason": result.reason,
        "models": [m.to_json(domain) for m in result.models],
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if not result.models:
        return EXIT_NO_MODELS
    return EXIT_OK


def _cmd_ask(args: argparse.Namespace) -> int:
    story = _load_story(args.story)
    domain = build_restaurant_domain(story.entities)
    config = _config_from(args)
    query = parse_query(args.query)
    result = solve(story, config, domain=domain, timeout_s=args.timeout)
    if not result.models:
        sys.stderr.write("no models: %s\n" % (result.reason or "story rejected"))
        return EXIT_NO_MODELS
    ans = answer(query, result.models, domain)
    if ans.form == "yes_no":
        print(ans.verdict)
    elif ans.values:
        print("%s: %s" % (ans.verdict, ", ".join(ans.values)))
    else:
        print(ans.verdict)
    return EXIT_OK


def _cmd_gen_questions(args: argparse.Namespace) -> int:
    story = _load_story(args.story)
    domain = build_restaurant_domain(story.entities)
    for query in generate_queries(story, domain, args.n, args.m):
        print(query.render())
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    entries = load_corpus(_corpus_path(args))
    if args.ids:
        wanted = [s for s in args.ids.split(",") if s]
        by_id = {e.id: e for e in entries}
        missing = [w for w in wanted if w not in by_id]
        if missing:
            sys.stderr.write("unknown entry ids: %s\n" % ", ".join(missing))
            return EXIT_USAGE
        entries = [by_id[w] for w in wanted]
    configs = [Config(ti_mode="mixed"), Config(ti_mode="new_only")]
    rows = bench(entries, configs, repetitions=args.reps, timeout_s=args.timeout)
    header = "%-16s %-14s %10s %8s %7s %s" % (
        "entry", "config", "mean_time", "max_step", "models", "rel_increase"
    )
    print(header)
    for r in rows:
        rel = "" if r.relative_increase is None else "%+.1f%%" % (
            100.0 * r.relative_increase
        )
        print(
            "%-16s %-14s %9.3fs %8d %7d %s"
            % (r.entry_id, r.config_label, r.mean_time, r.max_step,
               r.model_count, rel)
        )
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(bench_csv(rows))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(bench_json(rows) + "\n")
    return EXIT_OK


def _cmd_corpus_run(args: argparse.Namespace) -> int:
    entries = load_corpus(_corpus_path(args))
    config = _config_from(args)
    results = []
    worst = EXIT_OK
    for entry in entries:
        r = run_entry(entry, config, timeout_s=args.timeout)
        results.append(r)
        note = ""
        if r.verdict != "models-found":
            if entry.limitation:
                note = "  (known limitation)"
            elif r.verdict == "timeout":
                note = "  <-- timeout"
                worst = max(worst, EXIT_TIMEOUT)
            else:
                note = "  <-- no models"
                worst = max(worst, EXIT_NO_MODELS)
        print(
            "%-16s %-10s models=%-4d max_step=%-3d %6.2fs  %s%s"
            % (entry.id, entry.scenario_type, r.model_count, r.max_step,
               r.wall_time, r.verdict, note)
        )
    if args.json:
        payload = [
            {
                "entry_id": r.entry_id,
                "ti_mode": r.ti_mode,
                "customer_structure": r.customer_structure,
                "model_count": r.model_count,
                "wall_time": r.wall_time,
                "verdict": r.verdict,
                "max_step": r.max_step,
            }
            for r in results
        ]
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return worst


def _cmd_validate(args: argparse.Namespace) -> int:
    if bool(args.story) == bool(args.corpus):
        sys.stderr.write("validate needs exactly one of --story or --corpus\n")
        return EXIT_USAGE
    if args.story:
        story = _load_story(args.story)
        domain = build_restaurant_domain(story.entities)
        diags = validate_story(story, domain)
        for d in diags:
            print(str(d))
        if diags:
            return EXIT_USAGE
        print("ok: %d entities, %d observations" % (
            len(story.entities), len(story.observations)
        ))
        return EXIT_OK
    entries = load_corpus(args.corpus)
    dist = distribution(entries)
    print("ok: %d entries" % len(entries))
    for key in sorted(dist["by_type"]):
        print("  %-10s %d" % (key, dist["by_type"][key]))
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "ask": _cmd_ask,
    "gen-questions": _cmd_gen_questions,
    "bench": _cmd_bench,
    "corpus-run": _cmd_corpus_run,
    "validate": _cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    cmd = _COMMANDS[args.subcommand]
    try:
        return cmd(args)
    except SolveTimeout as exc:
        sys.stderr.write("timeout: %s\n" % exc)
        return EXIT_TIMEOUT
    except (OSError, StorySyntaxError, DomainError, CorpusError,
            QueryError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
