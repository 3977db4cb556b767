"""Parameterized-action Q-learning agent.

The agent picks a discrete primitive type and, through an actor network,
the continuous parameters of every type at once.  Q-values are computed
with a multi-pass scheme: one forward pass per type k, with every
parameter slot outside type k's slice zeroed, reading head k of pass k.
Two critics are trained against clipped double-Q targets built from a
smoothed target-actor output; disabling the twin critic and the
smoothing recovers the plain multi-pass baseline agent.

Observations enter the networks as raw 18-vectors; action parameters
enter normalized to [-1, 1].  The actor outputs tanh-squashed normalized
parameters, so the exploration/target noise and its clipping live in
normalized space and gradients chain through the tanh only.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .action import (
    DEFAULT_SPACE,
    ActionSpace,
    ParameterizedAction,
    denormalize,
    normalize,
)
from .nn import AdamState, Mlp, adam_step, clip_grad_norm, polyak_update

OBS_DIM = 18

AGENT_CHECKPOINT_VERSION = 1


@dataclass
class TrainConfig:
    """Hyperparameters of the training loop.

    ``twin_enabled`` and ``smoothing_enabled`` are the reduction flags:
    with both off the agent is the plain multi-pass baseline (single
    critic, deterministic actor output everywhere).
    """

    gamma: float = 0.95
    batch_size: int = 128
    replay_capacity: int = 10_000
    sigma_start: float = 0.2
    sigma_decay_trajectories: int = 10_000
    noise_clip: float = math.exp(-2.0)
    eps_start: float = 1.0
    eps_final: float = 0.05
    eps_fraction: float = 0.2
    tau: float = 0.01
    lr_q: float = 1e-3
    lr_actor: float = 1e-4
    warmup: int = 1000
    updates_per_env_step: int = 1
    twin_enabled: bool = True
    smoothing_enabled: bool = True
    hidden: tuple = (128, 128)

    def __post_init__(self):
        if isinstance(self.hidden, list):
            self.hidden = tuple(self.hidden)
        self.validate()

    def validate(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must be in (0,1), got {self.gamma}")
        if self.sigma_start < 0.0 or self.noise_clip < 0.0:
            raise ValueError("sigma and noise_clip must be non-negative")
        if self.batch_size > self.replay_capacity:
            raise ValueError("batch_size exceeds replay capacity")
        if self.warmup < self.batch_size:
            raise ValueError("warmup must cover at least one batch")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError(f"tau must be in (0,1], got {self.tau}")


def sigma_at(cfg: TrainConfig, trajectories: int) -> float:
    """Exploration/target noise scale after a number of collected
    trajectories; linear decay to zero, or zero when smoothing is off."""
    if not cfg.smoothing_enabled:
        return 0.0
    frac = 1.0 - trajectories / cfg.sigma_decay_trajectories
    return max(0.0, cfg.sigma_start * frac)


def epsilon_at(cfg: TrainConfig, episode: int, total_episodes: int) -> float:
    """Linear epsilon-greedy schedule over the first eps_fraction of the
    run, flat afterwards."""
    cut = max(1, int(round(cfg.eps_fraction * total_episodes)))
    if episode >= cut:
        return cfg.eps_final
    return cfg.eps_start + (cfg.eps_final - cfg.eps_start) * (episode / cut)


# ---------------------------------------------------------------------
# networks
# ---------------------------------------------------------------------


@dataclass
class AgentNetworks:
    """Main and target networks.  q2/q2t are None when the twin critic
    is disabled."""

    q1: Mlp
    q2: Mlp | None
    actor: Mlp
    q1t: Mlp = None
    q2t: Mlp = None
    actor_t: Mlp = None

    @classmethod
    def create(
        cls,
        cfg: TrainConfig,
        rng: np.random.Generator,
        obs_dim: int = OBS_DIM,
        space: ActionSpace = DEFAULT_SPACE,
    ) -> "AgentNetworks":
        # construction order is fixed: q1, q2 (if any), actor — the rng
        # draw sequence is part of run reproducibility
        q_in = obs_dim + space.joint_dim
        q1 = Mlp.build(q_in, space.num_types, hidden=cfg.hidden, rng=rng)
        q2 = (
            Mlp.build(q_in, space.num_types, hidden=cfg.hidden, rng=rng)
            if cfg.twin_enabled
            else None
        )
        actor = Mlp.build(obs_dim, space.joint_dim, hidden=cfg.hidden, rng=rng)
        return cls(
            q1=q1,
            q2=q2,
            actor=actor,
            q1t=q1.copy(),
            q2t=q2.copy() if q2 is not None else None,
            actor_t=actor.copy(),
        )

    def polyak(self, tau: float):
        polyak_update(self.q1t, self.q1, tau)
        if self.q2 is not None:
            polyak_update(self.q2t, self.q2, tau)
        polyak_update(self.actor_t, self.actor, tau)


# ---------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------


@dataclass
class Batch:
    s: np.ndarray
    k: np.ndarray
    xk: np.ndarray
    r: np.ndarray
    s2: np.ndarray
    d: np.ndarray


@dataclass
class Transition:
    s: np.ndarray
    k: int
    x_k: np.ndarray
    r: float
    s_next: np.ndarray
    d: bool


class ReplayBuffer:
    """Bounded FIFO transition store with uniform seeded sampling.

    Parameter slices are stored right-padded to the widest slice;
    ``k`` recovers the true length.
    """

    def __init__(
        self,
        capacity: int,
        rng: np.random.Generator,
        obs_dim: int = OBS_DIM,
        space: ActionSpace = DEFAULT_SPACE,
    ):
        self.capacity = int(capacity)
        self.rng = rng
        self.space = space
        width = max(space.param_dim(k) for k in range(space.num_types))
        self._s = np.zeros((capacity, obs_dim))
        self._k = np.zeros(capacity, dtype=np.int64)
        self._xk = np.zeros((capacity, width))
        self._r = np.zeros(capacity)
        self._s2 = np.zeros((capacity, obs_dim))
        self._d = np.zeros(capacity)
        self._next = 0
        self._size = 0

    def __len__(self):
        return self._size

    def push(self, tr: Transition):
        i = self._next
        self._s[i] = tr.s
        self._k[i] = tr.k
        self._xk[i] = 0.0
        self._xk[i, : len(tr.x_k)] = tr.x_k
        self._r[i] = tr.r
        self._s2[i] = tr.s_next
        self._d[i] = float(tr.d)
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, n: int) -> Batch:
        if self._size < n:
            raise ValueError(f"cannot sample {n} from buffer of {self._size}")
        idx = self.rng.integers(0, self._size, size=n)
        return Batch(
            s=self._s[idx],
            k=self._k[idx],
            xk=self._xk[idx],
            r=self._r[idx],
            s2=self._s2[idx],
            d=self._d[idx],
        )


# ---------------------------------------------------------------------
# Q evaluation and action selection
# ---------------------------------------------------------------------


def masked_joint_norm(ks: np.ndarray, xks: np.ndarray, space: ActionSpace) -> np.ndarray:
    """Normalized joint vectors with only each row's own slice filled."""
    n = len(ks)
    out = np.zeros((n, space.joint_dim))
    for k in range(space.num_types):
        sel = ks == k
        if not np.any(sel):
            continue
        sl = space.slice_of(k)
        low = space.bounds_low[sl]
        high = space.bounds_high[sl]
        vals = xks[sel][:, : sl.stop - sl.start]
        out[sel, sl] = (vals - low) / (high - low) * 2.0 - 1.0
    return out


def _multi_pass_norm(
    qnet: Mlp, s2d: np.ndarray, joint_norm: np.ndarray, space: ActionSpace
) -> np.ndarray:
    """Multi-pass Q on normalized joint parameters: pass k sees only
    slice k, and contributes only head k."""
    n = s2d.shape[0]
    q = np.empty((n, space.num_types))
    for k in range(space.num_types):
        sl = space.slice_of(k)
        masked = np.zeros((n, space.joint_dim))
        masked[:, sl] = joint_norm[:, sl]
        q[:, k] = qnet.forward(np.concatenate([s2d, masked], axis=1))[:, k]
    return q


def multi_pass_q(
    qnet: Mlp,
    s: np.ndarray,
    joint_params: np.ndarray,
    space: ActionSpace = DEFAULT_SPACE,
) -> np.ndarray:
    """Q-value per primitive type for physical joint parameters."""
    s = np.asarray(s, dtype=float)
    joint = np.asarray(joint_params, dtype=float)
    single = s.ndim == 1
    s2d = np.atleast_2d(s)
    q = _multi_pass_norm(qnet, s2d, np.atleast_2d(normalize(joint, space)), space)
    return q[0] if single else q


def _actor_tanh(actor: Mlp, s2d: np.ndarray):
    out, cache = actor.forward_cached(s2d)
    return np.tanh(out), cache


def _smoothed_norm(t: np.ndarray, sigma: float, c: float, rng, enabled: bool):
    """Clipped-noise smoothing in normalized space.

    Returns (clipped output, pre-clip sum).  No rng draw happens when
    smoothing is disabled or sigma is zero, which keeps the noise
    stream byte-reproducible across reduction modes.
    """
    if enabled and sigma > 0.0:
        eps = np.clip(rng.normal(0.0, sigma, size=t.shape), -c, c)
        pre = t + eps
    else:
        pre = t.copy()
    return np.clip(pre, -1.0, 1.0), pre


def smooth_params(
    actor: Mlp,
    s: np.ndarray,
    sigma: float,
    c: float,
    space: ActionSpace = DEFAULT_SPACE,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Physical joint parameters from the actor with clipped exploration
    noise; sigma=0 is the exact deterministic output."""
    s = np.asarray(s, dtype=float)
    single = s.ndim == 1
    t, _ = _actor_tanh(actor, np.atleast_2d(s))
    if sigma > 0.0 and rng is None:
        raise ValueError("sigma > 0 requires an rng")
    xn, _ = _smoothed_norm(t, sigma, c, rng, enabled=True)
    phys = denormalize(xn, space)
    return phys[0] if single else phys


def select_action(
    networks: AgentNetworks,
    s: np.ndarray,
    epsilon: float,
    sigma: float,
    cfg: TrainConfig,
    space: ActionSpace = DEFAULT_SPACE,
    rng: np.random.Generator | None = None,
) -> ParameterizedAction:
    """Epsilon-greedy type choice over smoothed actor parameters.

    The rng draw order is fixed: smoothing noise (when active), the
    epsilon uniform, then the random type (only when exploring).
    """
    s2d = np.atleast_2d(np.asarray(s, dtype=float))
    t, _ = _actor_tanh(networks.actor, s2d)
    xn, _ = _smoothed_norm(t, sigma, cfg.noise_clip, rng, cfg.smoothing_enabled)
    if rng.random() < epsilon:
        k = int(rng.integers(space.num_types))
    else:
        q = _multi_pass_norm(networks.q1, s2d, xn, space)
        k = int(np.argmax(q[0]))  # ties break toward the lowest index
    phys = denormalize(xn[0], space)
    return ParameterizedAction(k, phys[space.slice_of(k)].copy())


def greedy_action(
    networks: AgentNetworks, s: np.ndarray, space: ActionSpace = DEFAULT_SPACE
) -> ParameterizedAction:
    """Deterministic evaluation action: epsilon=0, sigma=0, no rng."""
    s2d = np.atleast_2d(np.asarray(s, dtype=float))
    t, _ = _actor_tanh(networks.actor, s2d)
    xn = np.clip(t, -1.0, 1.0)
    q = _multi_pass_norm(networks.q1, s2d, xn, space)
    k = int(np.argmax(q[0]))
    phys = denormalize(xn[0], space)
    return ParameterizedAction(k, phys[space.slice_of(k)].copy())


class GreedyPolicy:
    """Evaluation-mode policy wrapper around a trained agent."""

    def __init__(self, networks: AgentNetworks, space: ActionSpace = DEFAULT_SPACE):
        self.networks = networks
        self.space = space

    def act(self, obs) -> ParameterizedAction:
        vec = obs.as_vector() if hasattr(obs, "as_vector") else np.asarray(obs)
        return greedy_action(self.networks, vec, self.space)


# ---------------------------------------------------------------------
# updates
# ---------------------------------------------------------------------


def compute_targets(
    networks: AgentNetworks,
    batch: Batch,
    cfg: TrainConfig,
    sigma: float,
    space: ActionSpace = DEFAULT_SPACE,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Bootstrapped targets: r + gamma * (1-d) * min over critics of the
    best-type multi-pass Q at the smoothed target-actor output."""
    t2, _ = _actor_tanh(networks.actor_t, batch.s2)
    x2n, _ = _smoothed_norm(t2, sigma, cfg.noise_clip, rng, cfg.smoothing_enabled)
    best = _multi_pass_norm(networks.q1t, batch.s2, x2n, space).max(axis=1)
    if cfg.twin_enabled:
        best2 = _multi_pass_norm(networks.q2t, batch.s2, x2n, space).max(axis=1)
        best = np.minimum(best, best2)
    return batch.r + cfg.gamma * (1.0 - batch.d) * best


def update_critics(
    networks: AgentNetworks,
    adam_q1: AdamState,
    adam_q2: AdamState | None,
    batch: Batch,
    targets: np.ndarray,
    cfg: TrainConfig,
    space: ActionSpace = DEFAULT_SPACE,
    apply_updates: bool = True,
) -> tuple[float, float]:
    """MSE critic regression toward fixed targets; one Adam step each.

    Returns (loss_q1, loss_q2); loss_q2 is nan without the twin critic.
    With apply_updates=False the losses are computed but no parameters
    move (used by fine-tuning phases that freeze the critics).
    """
    n = len(batch.r)
    masked = masked_joint_norm(batch.k, batch.xk, space)
    inp = np.concatenate([batch.s, masked], axis=1)
    rows = np.arange(n)
    losses = []
    nets = [(networks.q1, adam_q1)]
    if cfg.twin_enabled:
        nets.append((networks.q2, adam_q2))
    for qnet, adam in nets:
        out, cache = qnet.forward_cached(inp)
        pred = out[rows, batch.k]
        diff = pred - targets
        loss = float(np.mean(diff * diff))
        if not math.isfinite(loss):
            raise FloatingPointError(f"non-finite critic loss {loss}")
        losses.append(loss)
        if apply_updates:
            gout = np.zeros_like(out)
            gout[rows, batch.k] = 2.0 * diff / n
            grads, _ = qnet.backward(cache, gout)
            clip_grad_norm(grads)
            adam_step(qnet, grads, adam)
    if len(losses) == 1:
        losses.append(float("nan"))
    return losses[0], losses[1]


def actor_loss_and_grads(
    networks: AgentNetworks,
    batch: Batch,
    cfg: TrainConfig,
    sigma: float,
    space: ActionSpace = DEFAULT_SPACE,
    rng: np.random.Generator | None = None,
) -> tuple[float, list]:
    """Deterministic-policy-gradient loss and actor parameter gradients.

    Loss = -mean over the batch of the sum over types of Q1 at the
    smoothed actor output.  Gradients flow through the critic's
    parameter-slot inputs, the noise clip gate (pass-through strictly
    inside [-1,1], zero outside) and the actor tanh; q1 itself stays
    frozen.
    """
    n = len(batch.r)
    out, actor_cache = networks.actor.forward_cached(batch.s)
    t = np.tanh(out)
    xn, pre = _smoothed_norm(t, sigma, cfg.noise_clip, rng, cfg.smoothing_enabled)

    d_xn = np.zeros((n, space.joint_dim))
    total = 0.0
    for k in range(space.num_types):
        sl = space.slice_of(k)
        masked = np.zeros((n, space.joint_dim))
        masked[:, sl] = xn[:, sl]
        q_in = np.concatenate([batch.s, masked], axis=1)
        q_out, q_cache = networks.q1.forward_cached(q_in)
        total += float(q_out[:, k].sum())
        gout = np.zeros_like(q_out)
        gout[:, k] = -1.0 / n
        _, gin = networks.q1.backward(q_cache, gout)
        d_xn[:, sl] += gin[:, OBS_DIM:][:, sl]
    loss = -total / n
    if not math.isfinite(loss):
        raise FloatingPointError(f"non-finite actor loss {loss}")

    gate = (pre > -1.0) & (pre < 1.0)
    d_tanh = d_xn * gate * (1.0 - t * t)
    grads, _ = networks.actor.backward(actor_cache, d_tanh)
    return loss, grads


def update_actor(
    networks: AgentNetworks,
    adam_actor: AdamState,
    batch: Batch,
    cfg: TrainConfig,
    sigma: float,
    space: ActionSpace = DEFAULT_SPACE,
    rng: np.random.Generator | None = None,
) -> float:
    """One clipped Adam step on the actor against the frozen q1."""
    loss, grads = actor_loss_and_grads(networks, batch, cfg, sigma, space, rng)
    clip_grad_norm(grads)
    adam_step(networks.actor, grads, adam_actor)
    return loss


# ---------------------------------------------------------------------
# training loop
# ---------------------------------------------------------------------


@dataclass
class RngBundle:
    """Independent named streams derived from one master seed."""

    env: np.random.Generator
    noise: np.random.Generator
    replay: np.random.Generator
    init: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RngBundle":
        env_ss, noise_ss, replay_ss, init_ss = np.random.SeedSequence(seed).spawn(4)
        return cls(
            env=np.random.default_rng(env_ss),
            noise=np.random.default_rng(noise_ss),
            replay=np.random.default_rng(replay_ss),
            init=np.random.default_rng(init_ss),
        )


@dataclass
class EpisodeLog:
    episode: int
    env_primitive_steps: int
    ep_return: float
    success: int
    sigma: float
    epsilon: float
    loss_q1: float
    loss_q2: float
    loss_actor: float


@dataclass
class TrainState:
    """Mutable loop state, checkpointable."""

    networks: AgentNetworks
    adam_q1: AdamState
    adam_q2: AdamState | None
    adam_actor: AdamState
    episodes_done: int = 0
    env_steps: int = 0

    @classmethod
    def fresh(cls, cfg: TrainConfig, rng_init: np.random.Generator,
              space: ActionSpace = DEFAULT_SPACE) -> "TrainState":
        nets = AgentNetworks.create(cfg, rng_init, space=space)
        return cls(
            networks=nets,
            adam_q1=AdamState(nets.q1, lr=cfg.lr_q),
            adam_q2=AdamState(nets.q2, lr=cfg.lr_q) if nets.q2 is not None else None,
            adam_actor=AdamState(nets.actor, lr=cfg.lr_actor),
        )


def train(
    env,
    state: TrainState,
    cfg: TrainConfig,
    episodes: int,
    horizon: int,
    rngs: RngBundle,
    space: ActionSpace = DEFAULT_SPACE,
    on_episode=None,
    eval_hook=None,
    eval_every: int = 0,
    checkpoint_hook=None,
    checkpoint_every: int = 0,
    critics_trainable: bool = True,
    episode_offset: int = 0,
    total_episodes_for_schedule: int | None = None,
) -> list[EpisodeLog]:
    """Run the training loop; returns one log row per episode.

    ``episode_offset`` continues schedules across phases (fine-tuning);
    ``critics_trainable=False`` computes critic losses without applying
    them.  ``eval_hook(episode_index, networks)`` and
    ``checkpoint_hook(episode_index, state)`` fire every ``*_every``
    episodes when set.
    """
    replay = ReplayBuffer(cfg.replay_capacity, rng=rngs.replay, space=space)
    logs = []
    schedule_total = (
        total_episodes_for_schedule if total_episodes_for_schedule is not None else episodes
    )
    for ep_i in range(episodes):
        ep = episode_offset + ep_i
        sigma = sigma_at(cfg, ep)
        epsilon = epsilon_at(cfg, ep, schedule_total)
        obs = env.reset()
        s = obs.as_vector()
        ep_return = 0.0
        success = 0
        l1s, l2s, las = [], [], []
        for _ in range(horizon):
            action = select_action(
                state.networks, s, epsilon, sigma, cfg, space, rngs.noise
            )
            outcome = env.step(action)
            s2 = outcome.next_obs.as_vector()
            replay.push(
                Transition(s, action.k, action.params, outcome.reward, s2, outcome.done)
            )
            state.env_steps += 1
            ep_return += outcome.reward
            s = s2
            if len(replay) >= cfg.warmup:
                for _ in range(cfg.updates_per_env_step):
                    batch = replay.sample(cfg.batch_size)
                    y = compute_targets(
                        state.networks, batch, cfg, sigma, space, rngs.noise
                    )
                    l1, l2 = update_critics(
                        state.networks,
                        state.adam_q1,
                        state.adam_q2,
                        batch,
                        y,
                        cfg,
                        space,
                        apply_updates=critics_trainable,
                    )
                    la = update_actor(
                        state.networks, state.adam_actor, batch, cfg, sigma, space,
                        rngs.noise,
                    )
                    state.networks.polyak(cfg.tau)
                    l1s.append(l1)
                    l2s.append(l2)
                    las.append(la)
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
                sigma=sigma,
                epsilon=epsilon,
                loss_q1=float(np.mean(l1s)) if l1s else float("nan"),
                loss_q2=float(np.mean(l2s)) if l2s and cfg.twin_enabled else float("nan"),
                loss_actor=float(np.mean(las)) if las else float("nan"),
            )
        )
        if on_episode is not None:
            on_episode(logs[-1])
        if eval_hook is not None and eval_every > 0 and (ep_i + 1) % eval_every == 0:
            eval_hook(ep, state.networks)
        if checkpoint_hook is not None and checkpoint_every > 0 and (
            ep_i + 1
        ) % checkpoint_every == 0:
            checkpoint_hook(ep, state)
    return logs


# ---------------------------------------------------------------------
# checkpointing
# ---------------------------------------------------------------------


def _rng_state_json(gen: np.random.Generator) -> str:
    return json.dumps(gen.bit_generator.state)


def _rng_from_json(payload: str) -> np.random.Generator:
    state = json.loads(payload)
    gen = np.random.default_rng()
    gen.bit_generator.state = state
    return gen


def save_agent(
    path,
    state: TrainState,
    cfg: TrainConfig,
    rngs: RngBundle | None = None,
) -> None:
    """Lossless checkpoint: all networks, Adam states, counters, config
    and (optionally) rng stream states.  The replay buffer is not
    persisted; resumed runs refill it before updates restart."""
    arrays = {}
    nets = state.networks
    arrays.update(nets.q1.to_arrays("q1/"))
    arrays.update(nets.actor.to_arrays("actor/"))
    arrays.update(nets.q1t.to_arrays("q1t/"))
    arrays.update(nets.actor_t.to_arrays("actor_t/"))
    arrays.update(state.adam_q1.to_arrays("adam_q1/"))
    arrays.update(state.adam_actor.to_arrays("adam_actor/"))
    if nets.q2 is not None:
        arrays.update(nets.q2.to_arrays("q2/"))
        arrays.update(nets.q2t.to_arrays("q2t/"))
        arrays.update(state.adam_q2.to_arrays("adam_q2/"))
    meta = {
        "version": AGENT_CHECKPOINT_VERSION,
        "config": asdict(cfg),
        "episodes_done": state.episodes_done,
        "env_steps": state.env_steps,
        "has_twin": nets.q2 is not None,
    }
    if rngs is not None:
        meta["rng"] = {
            name: _rng_state_json(getattr(rngs, name))
            for name in ("env", "noise", "replay", "init")
        }
    np.savez(path, meta=np.bytes_(json.dumps(meta).encode()), **arrays)


def load_agent(path) -> tuple[TrainState, TrainConfig, RngBundle | None]:
    with np.load(path) as data:
        meta = json.loads(data["meta"].item().decode())
        if meta["version"] != AGENT_CHECKPOINT_VERSION:
            raise ValueError(f"unsupported agent checkpoint version {meta['version']}")
        cfg_dict = dict(meta["config"])
        cfg_dict["hidden"] = tuple(cfg_dict["hidden"])
        cfg = TrainConfig(**cfg_dict)
        nets = AgentNetworks(
            q1=Mlp.from_arrays(data, "q1/"),
            q2=Mlp.from_arrays(data, "q2/") if meta["has_twin"] else None,
            actor=Mlp.from_arrays(data, "actor/"),
            q1t=Mlp.from_arrays(data, "q1t/"),
            q2t=Mlp.from_arrays(data, "q2t/") if meta["has_twin"] else None,
            actor_t=Mlp.from_arrays(data, "actor_t/"),
        )
        state = TrainState(
            networks=nets,
            adam_q1=AdamState.from_arrays(data, nets.q1, "adam_q1/"),
            adam_q2=AdamState.from_arrays(data, nets.q2, "adam_q2/")
            if meta["has_twin"]
            else None,
            adam_actor=AdamState.from_arrays(data, nets.actor, "adam_actor/"),
            episodes_done=meta["episodes_done"],
            env_steps=meta["env_steps"],
        )
        rngs = None
        if "rng" in meta:
            rngs = RngBundle(
                env=_rng_from_json(meta["rng"]["env"]),
                noise=_rng_from_json(meta["rng"]["noise"]),
                replay=_rng_from_json(meta["rng"]["replay"]),
                init=_rng_from_json(meta["rng"]["init"]),
            )
        return state, cfg, rngs


def config_for_algo(algo: str, **overrides) -> TrainConfig:
    """Named presets: 'tsmpdqn' (twin + smoothing) and 'mpdqn' (both
    reductions off)."""
    if algo == "tsmpdqn":
        base = dict(twin_enabled=True, smoothing_enabled=True)
    elif algo == "mpdqn":
        base = dict(twin_enabled=False, smoothing_enabled=False)
    else:
        raise ValueError(f"unknown parameterized-action algo {algo!r}")
    base.update(overrides)
    return TrainConfig(**base)
