"""Command-line entry point.

Subcommands: train, eval, transfer, gradcheck, enumerate-baseline.
Explicit flags override --config file values, which override defaults.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ..agent import GreedyPolicy
from ..baseline import DqnGreedyPolicy, describe_primitive, enumerate_discrete_primitives
from ..nn import gradcheck_suite
from .config import ALGOS, load_config_file, resolve_config
from .evaluate import evaluate, write_eval_report
from .oracle import OracleInsertPolicy, RandomPolicy
from .run import load_policy_checkpoint, run_training, transfer


def _add_common(p):
    p.add_argument("--config", help="JSON config file (flat keys)")
    p.add_argument("--seed", type=int)
    p.add_argument("--task")
    p.add_argument("--horizon", type=int)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pegprim",
        description="Parameterized-action peg-in-hole training harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a policy and write run artifacts")
    _add_common(p)
    p.add_argument("--algo", choices=ALGOS)
    p.add_argument("--episodes", type=int)
    p.add_argument("--eval-every", dest="eval_every", type=int)
    p.add_argument("--eval-trials", dest="eval_trials", type=int)
    p.add_argument("--checkpoint-every", dest="checkpoint_every", type=int)

    p = sub.add_parser("eval", help="evaluate a checkpoint or scripted policy")
    _add_common(p)
    p.add_argument("--checkpoint", help="policy checkpoint (.npz)")
    p.add_argument(
        "--policy",
        choices=("checkpoint", "oracle", "random"),
        default="checkpoint",
    )
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--report", help="write per-trial CSV here")

    p = sub.add_parser("transfer", help="direct or fine-tuned task transfer")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--mode", choices=("direct", "finetune"), default="direct")
    p.add_argument("--eval-trials", dest="eval_trials", type=int)
    p.add_argument("--phase1-episodes", dest="phase1_episodes", type=int)
    p.add_argument("--phase2-episodes", dest="phase2_episodes", type=int)

    p = sub.add_parser("gradcheck", help="finite-difference gradient suite")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    sub.add_parser("enumerate-baseline", help="print the 100-primitive catalogue")
    return parser


def _config_from_args(args, extra_keys=()):
    file_values = load_config_file(args.config) if args.config else {}
    keys = ["seed", "task", "horizon", "out"] + list(extra_keys)
    overrides = {k: getattr(args, k, None) for k in keys}
    return resolve_config(file_values, overrides)


def _cmd_train(args) -> int:
    config = _config_from_args(
        args,
        ("algo", "episodes", "eval_every", "eval_trials", "checkpoint_every"),
    )
    artifacts = run_training(config)
    report = artifacts.final_eval
    print(
        f"trained {config.algo} on {config.task}: "
        f"success_rate={report.success_rate:.3f} over {report.trials} trials "
        f"(artifacts in {artifacts.out_dir})"
    )
    return 0


def _cmd_eval(args) -> int:
    config = _config_from_args(args)
    if args.policy == "checkpoint":
        if not args.checkpoint:
            print("eval: --checkpoint is required unless --policy oracle/random",
                  file=sys.stderr)
            return 2
        kind, state, _cfg = load_policy_checkpoint(args.checkpoint)
        if kind == "dqn-discrete":
            policy = DqnGreedyPolicy(state, enumerate_discrete_primitives())
        else:
            policy = GreedyPolicy(state.networks)
    elif args.policy == "oracle":
        policy = OracleInsertPolicy()
    else:
        policy = RandomPolicy(np.random.default_rng(config.seed))
    report = evaluate(policy, config.task, args.trials, config.horizon, config.seed)
    print(
        f"task={config.task} policy={args.policy} trials={report.trials} "
        f"success_rate={report.success_rate:.3f} mean_primitives={report.mean_primitives:.2f}"
    )
    if args.report:
        write_eval_report(args.report, report)
    return 0


def _cmd_transfer(args) -> int:
    config = _config_from_args(
        args, ("eval_trials", "phase1_episodes", "phase2_episodes")
    )
    artifacts = transfer(args.checkpoint, config.task, args.mode, config)
    report = artifacts.final_eval
    print(
        f"transfer mode={args.mode} task={config.task}: "
        f"success_rate={report.success_rate:.3f} over {report.trials} trials"
    )
    return 0


def _cmd_gradcheck(args) -> int:
    worst = gradcheck_suite(n_instances=args.instances, seed=args.seed)
    print(f"max relative gradient error over {args.instances} instances: {worst:.3e}")
    return 0 if worst < 1e-4 else 1


def _cmd_enumerate(_args) -> int:
    for i, prim in enumerate(enumerate_discrete_primitives()):
        print(f"{i:3d}  {describe_primitive(prim)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "train": _cmd_train,
        "eval": _cmd_eval,
        "transfer": _cmd_transfer,
        "gradcheck": _cmd_gradcheck,
        "enumerate-baseline": _cmd_enumerate,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
