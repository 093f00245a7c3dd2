"""repairbot command line.

    repairbot seed   --projects N --fail-rate R --flaky-rate F --seed S --out DIR
    repairbot run    --forge DIR [--config FILE] [--serve ADDR]
    repairbot replay --attempts FILE
    repairbot stats  --attempts FILE

`run` honors $REPAIRBOT_CONFIG when --config is omitted.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..curator import aggregate_stats, replay_attempts
from ..forge.seed import seed_corpus
from .config import ConfigInvalid, ForgeNotFound, resolve_config
from .pipeline import Pipeline


def _cmd_seed(args) -> int:
    if args.scenario == "canonical":
        from ..forge.scenarios import write_canonical_scenario
        write_canonical_scenario(args.out)
        print(f"canonical replay scenario written to {args.out}")
        return 0
    if args.scenario == "overfit":
        from ..forge.scenarios import write_overfit_scenario
        write_overfit_scenario(args.out)
        print(f"overfitting fixture written to {args.out}")
        return 0
    manifest = seed_corpus(
        args.out, args.projects, args.fail_rate, args.flaky_rate, args.seed,
        human_delay_range=(args.human_delay_min, args.human_delay_max))
    kinds = {}
    for entry in manifest.projects.values():
        kinds[entry.kind] = kinds.get(entry.kind, 0) + 1
    print(f"seeded {args.projects} projects into {args.out}: "
          + ", ".join(f"{k}={v}" for k, v in sorted(kinds.items())))
    return 0


def _cmd_run(args) -> int:
    config = resolve_config(
        args.config,
        forge_dir=args.forge,
        review_mode=args.review_mode,
        candidate_budget=args.candidate_budget,
        poll_interval=args.poll_interval,
        seed=args.seed,
        ui_dir=args.ui_dir,
    )
    pipeline = Pipeline(config)
    server = None
    if args.serve:
        from .api import serve_api
        server = serve_api(pipeline.curator, args.serve, ui_dir=config.ui_dir)
        print(f"api listening on {server.address} (dashboard at {server.address}/ui/)")
    summary = pipeline.run()
    print(json.dumps(summary, indent=2))
    if server is not None:
        print("pipeline done; serving until interrupted", flush=True)
        try:
            while True:
                import time
                time.sleep(3600)
        except KeyboardInterrupt:
            pass
        finally:
            server.stop()
    return 0


def _cmd_replay(args) -> int:
    attempts = replay_attempts(args.attempts)
    stats = aggregate_stats(attempts)
    print(json.dumps(stats, indent=2))
    return 0


def _cmd_stats(args) -> int:
    attempts = replay_attempts(args.attempts)
    stats = aggregate_stats(attempts)
    print(json.dumps(stats, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repairbot",
        description="CI repair bot over a simulated forge")
    sub = parser.add_subparsers(dest="command", required=True)

    seed = sub.add_parser("seed", help="generate a project corpus")
    seed.add_argument("--projects", type=int, default=100)
    seed.add_argument("--fail-rate", type=float, default=0.25)
    seed.add_argument("--flaky-rate", type=float, default=0.0)
    seed.add_argument("--seed", type=int, default=0)
    seed.add_argument("--out", required=True)
    seed.add_argument("--human-delay-min", type=int, default=60)
    seed.add_argument("--human-delay-max", type=int, default=2880)
    seed.add_argument("--scenario", choices=["canonical", "overfit"],
                      help="write a fixed fixture instead of a random corpus")
    seed.set_defaults(func=_cmd_seed)

    run = sub.add_parser("run", help="run the repair pipeline over a forge")
    run.add_argument("--forge", required=True)
    run.add_argument("--config", help="JSON config file (or $REPAIRBOT_CONFIG)")
    run.add_argument("--serve", metavar="ADDR", help="serve the review API on host:port")
    run.add_argument("--review-mode", choices=["auto", "human"])
    run.add_argument("--candidate-budget", type=int, dest="candidate_budget")
    run.add_argument("--poll-interval", type=int, dest="poll_interval")
    run.add_argument("--seed", type=int)
    run.add_argument("--ui-dir", dest="ui_dir")
    run.set_defaults(func=_cmd_run)

    replay = sub.add_parser("replay", help="recompute aggregates from an attempt log")
    replay.add_argument("--attempts", required=True)
    replay.set_defaults(func=_cmd_replay)

    stats = sub.add_parser("stats", help="print statistics from an attempt log")
    stats.add_argument("--attempts", required=True)
    stats.set_defaults(func=_cmd_stats)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigInvalid, ForgeNotFound) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
