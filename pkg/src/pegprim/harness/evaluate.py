"""Greedy-policy evaluation over independently seeded trials."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ..sim import PegInHoleEnv


@dataclass
class TrialRecord:
    trial: int
    seed: int
    success: int
    primitives_used: int
    final_error_norm: float
    stop_reasons: list = field(default_factory=list)


@dataclass
class EvalReport:
    task: str
    horizon: int
    trials: int
    successes: int
    success_rate: float
    mean_primitives: float
    mean_return: float
    records: list = field(default_factory=list)


def trial_seed(seed: int, trial: int) -> int:
    """Stable per-trial seed; independent of how many trials run."""
    return int(np.random.SeedSequence((seed, trial)).generate_state(1)[0])


def evaluate(
    policy,
    task: str,
    trials: int,
    horizon: int,
    seed: int,
    backend: str | None = None,
) -> EvalReport:
    """Run `trials` episodes of at most `horizon` primitives each.

    The policy is queried greedily via policy.act(obs); policies that
    define begin_episode(env) get it called after each reset.
    Deterministic given (task, trials, horizon, seed).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    records = []
    returns = []
    for trial in range(trials):
        tseed = trial_seed(seed, trial)
        env = PegInHoleEnv(task, seed=tseed, backend=backend)
        obs = env.reset()
        if hasattr(policy, "begin_episode"):
            policy.begin_episode(env)
        ep_return = 0.0
        used = 0
        success = 0
        reasons = []
        last_obs = obs
        for _ in range(horizon):
            action = policy.act(last_obs)
            outcome = env.step(action)
            used += 1
            ep_return += outcome.reward
            reasons.append(outcome.stop_reason)
            last_obs = outcome.next_obs
            if outcome.done:
                success = 1
                break
        err = float(np.linalg.norm(last_obs.x - env.reward_spec.x_goal))
        records.append(
            TrialRecord(
                trial=trial,
                seed=tseed,
                success=success,
                primitives_used=used,
                final_error_norm=err,
                stop_reasons=reasons,
            )
        )
        returns.append(ep_return)
    successes = sum(r.success for r in records)
    used_on_success = [r.primitives_used for r in records if r.success]
    return EvalReport(
        task=task,
        horizon=horizon,
        trials=trials,
        successes=successes,
        success_rate=successes / trials if trials else 0.0,
        mean_primitives=float(np.mean(used_on_success)) if used_on_success else float("nan"),
        mean_return=float(np.mean(returns)) if returns else float("nan"),
        records=records,
    )


def write_eval_report(path, report: EvalReport) -> None:
    """Per-trial CSV: trial, seed, success, primitives_used,
    final_error_norm."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trial", "seed", "success", "primitives_used", "final_error_norm"])
        for r in report.records:
            writer.writerow(
                [r.trial, r.seed, r.success, r.primitives_used, repr(r.final_error_norm)]
            )


def read_eval_report(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [dict(row) for row in csv.DictReader(fh)]
