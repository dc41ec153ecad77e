"""Command line entry point: ``formabench run|gen|score``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import (GeneratorConfig, GtUnsolvable, ManifestInvalid, ManifestMissing,
                    RejectionExhausted, generate_blocksworld, load_dataset, run_eval,
                    write_dataset)
from .client import HttpClient, OracleClient, OracleConfig, ScriptedClient
from .metrics import scene_scores
from .pddl import PDDLError, parse_domain, parse_problem
from .pipelines import PIPELINES, PromptCatalog
from .planner import SearchConfig


def _client(args, tasks, planner_config):
    choice = args.client
    if choice == "http":
        if not args.endpoint or not args.model:
            sys.exit("--client http needs --endpoint and --model")
        return HttpClient(args.endpoint, args.model, max_in_flight=args.max_in_flight)
    if choice.startswith("scripted:"):
        return ScriptedClient(Path(choice.split(":", 1)[1]))
    if choice == "oracle":
        config = OracleConfig(args.drop_init_rate, args.rename_rate, args.seed)
        return OracleClient(tasks, config, planner_config)
    sys.exit(f"unknown client {choice!r}; use http, scripted:DIR or oracle")


def _planner(choice: str, mode: str, max_nodes: int, max_seconds: float) -> SearchConfig:
    if choice == "builtin":
        return SearchConfig(mode, max_nodes, max_seconds)
    if choice.startswith("external:"):
        return SearchConfig(mode, max_nodes, max_seconds, external_command=choice.split(":", 1)[1])
    sys.exit(f"unknown planner {choice!r}; use builtin or external:CMD")


def cmd_run(args) -> int:
    planner_config = _planner(args.planner, args.search, args.max_nodes, args.max_seconds)
    tags = [t.strip() for t in args.pipelines.split(",") if t.strip()]
    for tag in tags:
        if tag not in PIPELINES:
            sys.exit(f"unknown pipeline {tag!r}; choose from {', '.join(PIPELINES)}")
    tasks = load_dataset(args.dataset, strict=args.strict, planner_config=planner_config)
    client = _client(args, tasks, planner_config)
    summary, records = run_eval(tasks, tags, client, planner_config, args.out,
                                catalog=PromptCatalog(args.prompt_catalog),
                                temperature=args.temperature, max_tokens=args.max_tokens)
    for tag, stats in summary.items():
        planner = stats["planner_success"]
        planner = "n/a" if planner is None else f"{planner:.3f}"
        print(f"{tag}: compilation {stats['compilation_success']:.3f}  planner {planner}  "
              f"simulation {stats['simulation_success']:.3f}  ({stats['tasks']} tasks)")
    print(f"report written to {args.out}")
    return 0


def cmd_gen(args) -> int:
    tasks = []
    for i in range(args.count):
        config = GeneratorConfig(args.blocks, args.seed + i, args.min_plan_length)
        tasks.append(generate_blocksworld(config))
    write_dataset(tasks, args.out, name=f"blocksworld-n{args.blocks}")
    print(f"wrote {len(tasks)} tasks to {args.out}")
    return 0


def cmd_score(args) -> int:
    domain = parse_domain(Path(args.domain).read_text(encoding="utf-8"))
    pred = parse_problem(Path(args.pred).read_text(encoding="utf-8"), domain)
    gt = parse_problem(Path(args.gt).read_text(encoding="utf-8"), domain)
    aliases = json.loads(Path(args.aliases).read_text()) if args.aliases else {}
    scores = scene_scores(pred, gt, aliases, match_types=not args.name_only)
    print(json.dumps(scores.flat(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="formabench")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate pipelines on a dataset")
    run.add_argument("--dataset", required=True, type=Path)
    run.add_argument("--pipelines", default=",".join(PIPELINES))
    run.add_argument("--client", default="oracle", help="http | scripted:DIR | oracle")
    run.add_argument("--endpoint", help="base URL of an OpenAI-compatible API")
    run.add_argument("--model")
    run.add_argument("--max-in-flight", type=int, default=4)
    run.add_argument("--planner", default="builtin", help="builtin | external:CMD")
    run.add_argument("--search", choices=("optimal", "satisficing"), default="optimal")
    run.add_argument("--max-nodes", type=int, default=2_000_000)
    run.add_argument("--max-seconds", type=float, default=60.0)
    run.add_argument("--prompt-catalog", type=Path)
    run.add_argument("--temperature", type=float, default=0.7)
    run.add_argument("--max-tokens", type=int, default=1024)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--drop-init-rate", type=float, default=0.0)
    run.add_argument("--rename-rate", type=float, default=0.0)
    run.add_argument("--out", required=True, type=Path)
    run.add_argument("--strict", action="store_true")
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("gen", help="generate Blocksworld tasks")
    gen.add_argument("--blocks", type=int, required=True)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--min-plan-length", type=int)
    gen.add_argument("--out", required=True, type=Path)
    gen.set_defaults(func=cmd_gen)

    score = sub.add_parser("score", help="scene-level scores of one predicted problem")
    score.add_argument("--pred", required=True)
    score.add_argument("--gt", required=True)
    score.add_argument("--domain", required=True)
    score.add_argument("--aliases")
    score.add_argument("--name-only", action="store_true")
    score.set_defaults(func=cmd_score)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ManifestMissing, ManifestInvalid, GtUnsolvable, RejectionExhausted,
            PDDLError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
