"""Discrete-primitive DQN baseline.

Enumerates a fixed catalogue of 100 primitives (48 translations, 48
rotations, 4 insertions) and trains a plain DQN over their indices,
reusing the MLP machinery and the same replay/logging plumbing as the
parameterized-action agent.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .action import (
    DEFAULT_SPACE,
    INSERTION,
    ROTATION,
    TRANSLATION,
    ActionSpace,
    ParameterizedAction,
    to_velocity_command,
)
from .agent import (
    OBS_DIM,
    EpisodeLog,
    ReplayBuffer,
    RngBundle,
    TrainConfig,
    Transition,
    epsilon_at,
)
from .nn import AdamState, Mlp, adam_step, clip_grad_norm, polyak_update

SPEEDS = (0.2, 0.5)
FORCE_LIMITS = (1.0, 2.0, 3.0, float("inf"))

DQN_CHECKPOINT_VERSION = 1


def enumerate_discrete_primitives(
    space: ActionSpace = DEFAULT_SPACE,
) -> list[ParameterizedAction]:
    """The fixed 100-primitive catalogue, in canonical order.

    Translation block then rotation block then insertion block; within
    the directional blocks the order is direction-major (+X, -X, +Y,
    -Y, +Z, -Z), then speed, then force limit.  The infinite force
    limit is the "never stop on force" sentinel.
    """
    out = []
    for k in (TRANSLATION, ROTATION):
        for axis in range(3):
            for sign in (1.0, -1.0):
                for speed in SPEEDS:
                    for f_lim in FORCE_LIMITS:
                        params = np.zeros(4)
                        params[axis] = sign * speed
                        params[3] = f_lim
                        out.append(ParameterizedAction(k, params))
    for f_lim in FORCE_LIMITS:
        out.append(ParameterizedAction(INSERTION, np.array([f_lim])))
    return out


@dataclass
class DqnState:
    """Q-network, its Polyak target and optimizer state."""

    q: Mlp
    q_t: Mlp
    adam: AdamState
    n_actions: int
    episodes_done: int = 0
    env_steps: int = 0

    @classmethod
    def fresh(
        cls, cfg: TrainConfig, rng: np.random.Generator, n_actions: int = 100
    ) -> "DqnState":
        q = Mlp.build(OBS_DIM, n_actions, hidden=cfg.hidden, rng=rng)
        return cls(q=q, q_t=q.copy(), adam=AdamState(q, lr=cfg.lr_q), n_actions=n_actions)


def dqn_select(
    q: Mlp, s: np.ndarray, epsilon: float, n_actions: int, rng: np.random.Generator
) -> int:
    """Epsilon-greedy index over the Q heads; argmax ties break low."""
    if rng.random() < epsilon:
        return int(rng.integers(n_actions))
    values = q.forward(np.atleast_2d(np.asarray(s, dtype=float)))[0]
    return int(np.argmax(values))


def dqn_targets(q_t: Mlp, batch, gamma: float) -> np.ndarray:
    best = q_t.forward(batch.s2).max(axis=1)
    return batch.r + gamma * (1.0 - batch.d) * best


def dqn_update(state: DqnState, batch, targets: np.ndarray) -> float:
    """One MSE Adam step on the online Q-network."""
    n = len(batch.r)
    rows = np.arange(n)
    idx = batch.k
    out, cache = state.q.forward_cached(batch.s)
    diff = out[rows, idx] - targets
    loss = float(np.mean(diff * diff))
    if not math.isfinite(loss):
        raise FloatingPointError(f"non-finite DQN loss {loss}")
    gout = np.zeros_like(out)
    gout[rows, idx] = 2.0 * diff / n
    grads, _ = state.q.backward(cache, gout)
    clip_grad_norm(grads)
    adam_step(state.q, grads, state.adam)
    return loss


class DqnGreedyPolicy:
    """Evaluation-mode policy: greedy index mapped to its primitive."""

    def __init__(self, state: DqnState, primitives: list[ParameterizedAction]):
        self.state = state
        self.primitives = primitives

    def act(self, obs) -> ParameterizedAction:
        vec = obs.as_vector() if hasattr(obs, "as_vector") else np.asarray(obs)
        values = self.state.q.forward(np.atleast_2d(vec))[0]
        return self.primitives[int(np.argmax(values))]


def dqn_train(
    env,
    state: DqnState,
    cfg: TrainConfig,
    primitives: list[ParameterizedAction],
    episodes: int,
    horizon: int,
    rngs: RngBundle,
    on_episode=None,
    eval_hook=None,
    eval_every: int = 0,
    checkpoint_hook=None,
    checkpoint_every: int = 0,
    episode_offset: int = 0,
    total_episodes_for_schedule: int | None = None,
) -> list[EpisodeLog]:
    """Standard DQN loop sharing the agent's log-row schema; the twin
    and actor loss columns stay nan and sigma is always zero."""
    if len(primitives) != state.n_actions:
        raise ValueError("primitive set size does not match Q output width")
    replay = ReplayBuffer(cfg.replay_capacity, rng=rngs.replay)
    logs = []
    schedule_total = (
        total_episodes_for_schedule if total_episodes_for_schedule is not None else episodes
    )
    for ep_i in range(episodes):
        ep = episode_offset + ep_i
        epsilon = epsilon_at(cfg, ep, schedule_total)
        obs = env.reset()
        s = obs.as_vector()
        ep_return = 0.0
        success = 0
        losses = []
        for _ in range(horizon):
            idx = dqn_select(state.q, s, epsilon, state.n_actions, rngs.noise)
            action = primitives[idx]
            outcome = env.step(action)
            s2 = outcome.next_obs.as_vector()
            replay.push(Transition(s, idx, np.zeros(1), outcome.reward, s2, outcome.done))
            state.env_steps += 1
            ep_return += outcome.reward
            s = s2
            if len(replay) >= cfg.warmup:
                for _ in range(cfg.updates_per_env_step):
                    batch = replay.sample(cfg.batch_size)
                    y = dqn_targets(state.q_t, batch, cfg.gamma)
                    losses.append(dqn_update(state, batch, y))
                    polyak_update(state.q_t, state.q, cfg.tau)
            if outcome.done:
                success = 1
                break
        state.episodes_done = ep + 1
        logs.append(
            EpisodeLog(
                episode=ep,
                env_primitive_steps=state.env_steps,
                ep_return=ep_return,
                success=success,
                sigma=0.0,
                epsilon=epsilon,
                loss_q1=float(np.mean(losses)) if losses else float("nan"),
                loss_q2=float("nan"),
                loss_actor=float("nan"),
            )
        )
        if on_episode is not None:
            on_episode(logs[-1])
        if eval_hook is not None and eval_every > 0 and (ep_i + 1) % eval_every == 0:
            eval_hook(ep, state)
        if checkpoint_hook is not None and checkpoint_every > 0 and (
            ep_i + 1
        ) % checkpoint_every == 0:
            checkpoint_hook(ep, state)
    return logs


def save_dqn(path, state: DqnState, cfg: TrainConfig, rngs: RngBundle | None = None):
    arrays = {}
    arrays.update(state.q.to_arrays("q/"))
    arrays.update(state.q_t.to_arrays("qt/"))
    arrays.update(state.adam.to_arrays("adam/"))
    meta = {
        "version": DQN_CHECKPOINT_VERSION,
        "config": asdict(cfg),
        "n_actions": state.n_actions,
        "episodes_done": state.episodes_done,
        "env_steps": state.env_steps,
    }
    if rngs is not None:
        meta["rng"] = {
            name: json.dumps(getattr(rngs, name).bit_generator.state)
            for name in ("env", "noise", "replay", "init")
        }
    np.savez(path, meta=np.bytes_(json.dumps(meta).encode()), **arrays)


def load_dqn(path) -> tuple[DqnState, TrainConfig, RngBundle | None]:
    with np.load(path) as data:
        meta = json.loads(data["meta"].item().decode())
        if meta["version"] != DQN_CHECKPOINT_VERSION:
            raise ValueError(f"unsupported DQN checkpoint version {meta['version']}")
        cfg_dict = dict(meta["config"])
        cfg_dict["hidden"] = tuple(cfg_dict["hidden"])
        cfg = TrainConfig(**cfg_dict)
        q = Mlp.from_arrays(data, "q/")
        state = DqnState(
            q=q,
            q_t=Mlp.from_arrays(data, "qt/"),
            adam=AdamState.from_arrays(data, q, "adam/"),
            n_actions=meta["n_actions"],
            episodes_done=meta["episodes_done"],
            env_steps=meta["env_steps"],
        )
        rngs = None
        if "rng" in meta:
            kw = {}
            for name in ("env", "noise", "replay", "init"):
                gen = np.random.default_rng()
                gen.bit_generator.state = json.loads(meta["rng"][name])
                kw[name] = gen
            rngs = RngBundle(**kw)
        return state, cfg, rngs


def describe_primitive(action: ParameterizedAction) -> str:
    """One-line canonical description, used by the catalogue printer."""
    f_lim = action.params[-1]
    f_txt = "inf" if math.isinf(f_lim) else f"{f_lim:g}"
    if action.k == INSERTION:
        return f"insertion f_lim={f_txt}"
    v = to_velocity_command(action.k, action.params)
    if action.k == TRANSLATION:
        axis = int(np.argmax(np.abs(v[:3])))
        name = "xyz"[axis]
        speed = v[axis]
        kind = "translation"
    else:
        axis = int(np.argmax(np.abs(v[3:])))
        name = ("roll", "pitch", "yaw")[axis]
        speed = v[3 + axis]
        kind = "rotation"
    sign = "+" if speed > 0 else "-"
    return f"{kind} {sign}{name} v={abs(speed):g} f_lim={f_txt}"
