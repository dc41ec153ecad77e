"""Stand-in external planner: ``fake_planner.py [--mode=M] DOMAIN PROBLEM PLAN``.

Uses the built-in engine and writes a Fast Downward style plan file.
"""

import sys
from pathlib import Path

from formabench.pddl import parse_domain, parse_problem
from formabench.planner import SearchConfig, solve


def main(argv):
    args = argv[1:]
    behaviour = "ok"
    if args[0].startswith("--mode="):
        behaviour = args.pop(0).split("=", 1)[1]
    domain_path, problem_path, plan_path = args
    if behaviour == "crash":
        print("segfault", file=sys.stderr)
        return 3
    if behaviour == "garbage":
        Path(plan_path).write_text("this is not a plan\n")
        return 0
    domain = parse_domain(Path(domain_path).read_text())
    problem = parse_problem(Path(problem_path).read_text(), domain)
    result = solve(domain, problem, SearchConfig())
    if not result.found:
        return 12
    steps = list(result.plan)
    if behaviour == "invalid":
        steps = steps[1:]
    lines = [str(s).upper() for s in steps]
    lines.append(f"; cost = {len(steps)} (unit cost)")
    Path(plan_path).write_text("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
