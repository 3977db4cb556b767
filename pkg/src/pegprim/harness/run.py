"""Training-run orchestration and transfer experiments.

A run directory holds run_manifest.json, train_log.csv, eval_log.csv,
checkpoints/ and a final eval_report.csv.  Everything is deterministic
given the manifest: the master seed derives separate env / noise /
replay / init streams, and periodic evaluation uses its own fixed seed
block so the learning curves of different algorithms line up on the
same evaluation episodes.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from ..agent import (
    GreedyPolicy,
    RngBundle,
    TrainState,
    load_agent,
    save_agent,
    train,
)
from ..baseline import (
    DqnGreedyPolicy,
    DqnState,
    dqn_train,
    enumerate_discrete_primitives,
    load_dqn,
    save_dqn,
)
from ..nn import AdamState, Mlp
from ..sim import PegInHoleEnv
from .config import RunConfig, write_manifest
from .evaluate import evaluate, write_eval_report

TRAIN_LOG_COLUMNS = (
    "episode",
    "env_primitive_steps",
    "return",
    "success",
    "sigma",
    "epsilon",
    "loss_q1",
    "loss_q2",
    "loss_actor",
)

EVAL_LOG_COLUMNS = (
    "episode_at_eval",
    "trials",
    "success_rate",
    "mean_primitives",
    "mean_return",
)


@dataclass
class RunArtifacts:
    out_dir: str
    manifest_path: str
    train_log_path: str
    eval_log_path: str
    eval_report_path: str
    final_checkpoint_path: str
    final_eval: object


class _CsvLog:
    """Line-buffered CSV writer with a fixed header."""

    def __init__(self, path, columns):
        self.path = path
        self.columns = columns
        self._fh = open(path, "w", newline="")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(columns)

    def row(self, values):
        self._writer.writerow([repr(v) if isinstance(v, float) else v for v in values])
        self._fh.flush()

    def close(self):
        self._fh.close()


def _train_log_row(log, writer: _CsvLog):
    writer.row(
        [
            log.episode,
            log.env_primitive_steps,
            log.ep_return,
            log.success,
            log.sigma,
            log.epsilon,
            log.loss_q1,
            log.loss_q2,
            log.loss_actor,
        ]
    )


def _eval_log_row(writer: _CsvLog, episode, report):
    writer.row(
        [
            episode,
            report.trials,
            report.success_rate,
            report.mean_primitives,
            report.mean_return,
        ]
    )


def _greedy_policy_for(config: RunConfig, state, primitives):
    if config.algo == "dqn-discrete":
        return DqnGreedyPolicy(state, primitives)
    return GreedyPolicy(state.networks)


def run_training(config: RunConfig) -> RunArtifacts:
    """Train per the config and emit the full artifact set."""
    out_dir = config.out
    ckpt_dir = os.path.join(out_dir, "checkpoints")
    os.makedirs(ckpt_dir, exist_ok=True)
    manifest_path = os.path.join(out_dir, "run_manifest.json")
    write_manifest(manifest_path, config)

    rngs = RngBundle.from_seed(config.seed)
    env = PegInHoleEnv(config.task, rng=rngs.env)
    cfg = config.train
    is_dqn = config.algo == "dqn-discrete"
    primitives = enumerate_discrete_primitives() if is_dqn else None
    if is_dqn:
        state = DqnState.fresh(cfg, rngs.init)
    else:
        state = TrainState.fresh(cfg, rngs.init)

    train_log = _CsvLog(os.path.join(out_dir, "train_log.csv"), TRAIN_LOG_COLUMNS)
    eval_log = _CsvLog(os.path.join(out_dir, "eval_log.csv"), EVAL_LOG_COLUMNS)

    def eval_hook(episode, _state):
        policy = _greedy_policy_for(config, state, primitives)
        report = evaluate(
            policy, config.task, config.eval_trials, config.horizon, config.seed
        )
        _eval_log_row(eval_log, episode, report)

    def checkpoint_hook(episode, st):
        path = os.path.join(ckpt_dir, f"ep{episode + 1:06d}.npz")
        if is_dqn:
            save_dqn(path, st, cfg, rngs)
        else:
            save_agent(path, st, cfg, rngs)

    common = dict(
        episodes=config.episodes,
        horizon=config.horizon,
        rngs=rngs,
        on_episode=lambda row: _train_log_row(row, train_log),
        eval_hook=eval_hook,
        eval_every=config.eval_every,
        checkpoint_hook=checkpoint_hook,
        checkpoint_every=config.checkpoint_every,
    )
    try:
        if is_dqn:
            dqn_train(env, state, cfg, primitives, **common)
        else:
            train(env, state, cfg, **common)
    finally:
        train_log.close()
        eval_log.close()

    final_ckpt = os.path.join(ckpt_dir, "final.npz")
    if is_dqn:
        save_dqn(final_ckpt, state, cfg, rngs)
    else:
        save_agent(final_ckpt, state, cfg, rngs)

    policy = _greedy_policy_for(config, state, primitives)
    final_eval = evaluate(
        policy, config.task, config.eval_trials, config.horizon, config.seed
    )
    report_path = os.path.join(out_dir, "eval_report.csv")
    write_eval_report(report_path, final_eval)
    return RunArtifacts(
        out_dir=out_dir,
        manifest_path=manifest_path,
        train_log_path=train_log.path,
        eval_log_path=eval_log.path,
        eval_report_path=report_path,
        final_checkpoint_path=final_ckpt,
        final_eval=final_eval,
    )


def load_policy_checkpoint(path):
    """Load either agent or DQN checkpoint; returns (kind, state, cfg)."""
    with np.load(path) as data:
        meta = json.loads(data["meta"].item().decode())
    if "n_actions" in meta:
        state, cfg, _ = load_dqn(path)
        return "dqn-discrete", state, cfg
    state, cfg, _ = load_agent(path)
    return "agent", state, cfg


def transfer(
    checkpoint_path,
    new_task: str,
    mode: str,
    config: RunConfig,
) -> RunArtifacts:
    """Evaluate a trained policy on a new task, directly or after the
    two-phase fine-tuning protocol.

    direct: the checkpoint is only read; no training happens.
    finetune: phase 1 reinitializes the actor and trains it against the
    frozen critics; phase 2 trains everything; then evaluate.
    """
    if mode not in ("direct", "finetune"):
        raise ValueError(f"transfer mode must be direct or finetune, got {mode!r}")
    kind, state, cfg = load_policy_checkpoint(checkpoint_path)
    if kind == "dqn-discrete":
        raise ValueError("transfer requires a parameterized-action checkpoint")

    out_dir = config.out
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(os.path.join(out_dir, "run_manifest.json"), config)

    if mode == "finetune":
        rngs = RngBundle.from_seed(config.seed)
        env = PegInHoleEnv(new_task, rng=rngs.env)
        # fresh actor, frozen critics; targets reset to the new actor
        nets = state.networks
        nets.actor = Mlp.build(18, 9, hidden=cfg.hidden, rng=rngs.init)
        nets.actor_t = nets.actor.copy()
        state.adam_actor = AdamState(nets.actor, lr=cfg.lr_actor)

        train_log = _CsvLog(os.path.join(out_dir, "train_log.csv"), TRAIN_LOG_COLUMNS)
        offset = state.episodes_done
        total = offset + config.phase1_episodes + config.phase2_episodes
        try:
            train(
                env,
                state,
                cfg,
                episodes=config.phase1_episodes,
                horizon=config.horizon,
                rngs=rngs,
                on_episode=lambda row: _train_log_row(row, train_log),
                critics_trainable=False,
                episode_offset=offset,
                total_episodes_for_schedule=total,
            )
            train(
                env,
                state,
                cfg,
                episodes=config.phase2_episodes,
                horizon=config.horizon,
                rngs=rngs,
                on_episode=lambda row: _train_log_row(row, train_log),
                episode_offset=offset + config.phase1_episodes,
                total_episodes_for_schedule=total,
            )
        finally:
            train_log.close()
        ckpt = os.path.join(out_dir, "finetuned.npz")
        save_agent(ckpt, state, cfg, rngs)
    else:
        ckpt = checkpoint_path

    report = evaluate(
        GreedyPolicy(state.networks),
        new_task,
        config.eval_trials,
        config.horizon,
        config.seed,
    )
    report_path = os.path.join(out_dir, "eval_report.csv")
    write_eval_report(report_path, report)
    return RunArtifacts(
        out_dir=out_dir,
        manifest_path=os.path.join(out_dir, "run_manifest.json"),
        train_log_path=os.path.join(out_dir, "train_log.csv"),
        eval_log_path="",
        eval_report_path=report_path,
        final_checkpoint_path=ckpt,
        final_eval=report,
    )
