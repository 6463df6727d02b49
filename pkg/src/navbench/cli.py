"""Command line: train, eval, compare, and replay subcommands."""

from __future__ import annotations

import argparse
import sys

from .harness import PLANNERS, compare, evaluate, format_comparison, replay, train
from .scenario import ScenarioError, load_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="navbench",
        description="Deterministic 2D navigation workbench: DWA, TD3, and their hybrid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the policy on a scenario")
    p_train.add_argument("--scenario", required=True, help="scenario JSON path or bundled name")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--episodes", type=int, default=None,
                         help="override the scenario's episode count")
    p_train.add_argument("--out", required=True, help="output directory")

    p_eval = sub.add_parser("eval", help="evaluate one planner over seeded trials")
    p_eval.add_argument("--scenario", required=True)
    p_eval.add_argument("--planner", choices=PLANNERS, default="dwa")
    p_eval.add_argument("--trials", type=int, default=100)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--checkpoint", default=None)
    p_eval.add_argument("--out", default=None, help="directory for trial CSVs and logs")

    p_cmp = sub.add_parser("compare", help="evaluate planners on identical paired trials")
    p_cmp.add_argument("--scenario", required=True)
    p_cmp.add_argument("--planner", action="append", choices=PLANNERS, default=None,
                       help="repeatable; default compares dwa and td3-dwa")
    p_cmp.add_argument("--trials", type=int, default=100)
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--checkpoint", default=None)
    p_cmp.add_argument("--out", default=None)

    p_replay = sub.add_parser("replay", help="convert a trial log into a trajectory CSV")
    p_replay.add_argument("--log", required=True)
    p_replay.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "train":
            scenario = load_scenario(args.scenario)
            checkpoint, curve = train(scenario, args.seed, args.episodes, args.out)
            print(f"checkpoint: {checkpoint}")
            print(f"training curve: {curve}")
        elif args.command == "eval":
            scenario = load_scenario(args.scenario)
            metrics, _ = evaluate(scenario, args.planner, args.trials, args.seed,
                                  checkpoint=args.checkpoint, out_dir=args.out)
            print(format_comparison([metrics]))
        elif args.command == "compare":
            scenario = load_scenario(args.scenario)
            planners = args.planner if args.planner else list(PLANNERS)
            metrics = compare(scenario, planners, args.trials, args.seed,
                              checkpoint=args.checkpoint, out_dir=args.out)
            print(format_comparison(metrics))
        elif args.command == "replay":
            out = replay(args.log, args.out)
            print(f"trajectory: {out}")
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
