"""Agent unit tests: multi-pass Q masking, smoothing, action selection,
target construction, critic/actor updates, replay, checkpoints and the
training loop."""

import math
from dataclasses import asdict

import numpy as np
import pytest

from pegprim.action import DEFAULT_SPACE, denormalize, normalize
from pegprim.agent import (
    AgentNetworks,
    Batch,
    GreedyPolicy,
    ReplayBuffer,
    RngBundle,
    TrainConfig,
    TrainState,
    Transition,
    actor_loss_and_grads,
    compute_targets,
    config_for_algo,
    epsilon_at,
    greedy_action,
    load_agent,
    masked_joint_norm,
    multi_pass_q,
    save_agent,
    select_action,
    sigma_at,
    smooth_params,
    train,
    update_actor,
    update_critics,
)
from pegprim.nn import AdamState, Mlp
from pegprim.sim import PegInHoleEnv

SPACE = DEFAULT_SPACE


def small_cfg(**kw):
    base = dict(
        batch_size=8,
        replay_capacity=128,
        warmup=8,
        hidden=(16, 16),
    )
    base.update(kw)
    return TrainConfig(**base)


def make_networks(cfg, seed=0):
    return AgentNetworks.create(cfg, np.random.default_rng(seed))


def random_batch(rng, n=8):
    ks = rng.integers(0, 3, size=n)
    xk = np.zeros((n, 4))
    for i, k in enumerate(ks):
        sl = SPACE.slice_of(int(k))
        width = sl.stop - sl.start
        low = SPACE.bounds_low[sl]
        high = SPACE.bounds_high[sl]
        xk[i, :width] = low + rng.random(width) * (high - low)
    return Batch(
        s=rng.normal(size=(n, 18)),
        k=ks,
        xk=xk,
        r=rng.normal(size=n),
        s2=rng.normal(size=(n, 18)),
        d=(rng.random(n) < 0.3).astype(float),
    )


def zero_last_layer(net):
    params = net.parameters()
    params[-2][:] = 0.0
    params[-1][:] = 0.0


def logs_equal(a, b):
    """Field-wise equality with nan == nan for the loss columns."""
    for name in a.__dataclass_fields__:
        va, vb = getattr(a, name), getattr(b, name)
        if isinstance(va, float) and math.isnan(va):
            if not (isinstance(vb, float) and math.isnan(vb)):
                return False
        elif va != vb:
            return False
    return True


# ---------------------------------------------------------------------
# multi-pass Q masking
# ---------------------------------------------------------------------


class TestMultiPassQ:
    def test_unrelated_slots_do_not_change_q(self):
        """Q_k must be bit-identical under arbitrary changes to the
        parameter slots of other primitive types."""
        cfg = small_cfg()
        nets = make_networks(cfg, seed=3)
        rng = np.random.default_rng(11)
        for _ in range(200):
            s = rng.normal(size=18)
            joint = denormalize(rng.uniform(-1, 1, size=9), SPACE)
            q_ref = multi_pass_q(nets.q1, s, joint)
            for k in range(3):
                sl = SPACE.slice_of(k)
                other = joint.copy()
                scrambled = denormalize(rng.uniform(-1, 1, size=9), SPACE)
                other[:] = scrambled
                other[sl] = joint[sl]
                q_alt = multi_pass_q(nets.q1, s, other)
                assert q_alt[k] == q_ref[k]

    def test_matches_naive_masked_forward(self):
        """Head k of a plain forward on the hand-masked input is the
        oracle for pass k."""
        cfg = small_cfg()
        nets = make_networks(cfg, seed=4)
        rng = np.random.default_rng(12)
        s = rng.normal(size=(5, 18))
        joint = denormalize(rng.uniform(-1, 1, size=(5, 9)), SPACE)
        q = multi_pass_q(nets.q1, s, joint)
        joint_norm = normalize(joint, SPACE)
        for k in range(3):
            sl = SPACE.slice_of(k)
            masked = np.zeros((5, 9))
            masked[:, sl] = joint_norm[:, sl]
            out = nets.q1.forward(np.concatenate([s, masked], axis=1))
            assert np.array_equal(q[:, k], out[:, k])

    def test_single_and_batch_agree(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=5)
        rng = np.random.default_rng(13)
        s = rng.normal(size=(4, 18))
        joint = denormalize(rng.uniform(-1, 1, size=(4, 9)), SPACE)
        q_batch = multi_pass_q(nets.q1, s, joint)
        for i in range(4):
            # different BLAS paths for (1,n) and (4,n) matmuls; values
            # agree to rounding, not bitwise
            single = multi_pass_q(nets.q1, s[i], joint[i])
            assert np.allclose(single, q_batch[i], rtol=0, atol=1e-12)

    def test_masked_joint_norm_layout(self):
        """Stored (k, x_k) pairs land in their own slice, normalized,
        zeros elsewhere."""
        ks = np.array([0, 1, 2])
        xk = np.zeros((3, 4))
        xk[0] = [0.5, -0.5, 0.0, 2.0]
        xk[1] = [0.1, -0.2, 0.3, np.inf]
        xk[2, 0] = 5.0
        out = masked_joint_norm(ks, xk, SPACE)
        assert out.shape == (3, 9)
        assert np.all(out[0, 4:] == 0)
        assert np.all(out[1, :4] == 0) and out[1, 8] == 0
        assert np.all(out[2, :8] == 0)
        expect0 = normalize(
            np.concatenate([xk[0], np.zeros(5)]), SPACE
        )[SPACE.slice_of(0)]
        assert np.array_equal(out[0, :4], expect0)
        assert out[2, 8] == 1.0


# ---------------------------------------------------------------------
# smoothing
# ---------------------------------------------------------------------


class TestSmoothing:
    def test_sigma_zero_is_exact_actor_output(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=6)
        s = np.random.default_rng(14).normal(size=(7, 18))
        out = smooth_params(nets.actor, s, 0.0, cfg.noise_clip)
        expect = denormalize(np.tanh(nets.actor.forward(s)), SPACE)
        assert np.array_equal(out, expect)

    def test_noise_bounded_by_clip(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=7)
        zero_last_layer(nets.actor)  # actor output identically zero
        rng = np.random.default_rng(15)
        s = rng.normal(size=(20000, 18))
        c = cfg.noise_clip
        out = smooth_params(nets.actor, s, 0.2, c, rng=rng)
        # actor term is exactly zero; undoing the denormalization costs
        # one affine round trip of rounding
        noise = normalize(out, SPACE)
        assert np.max(np.abs(noise)) <= c + 1e-12

    def test_clipped_noise_statistics(self):
        """Mean ~0 and the clip saturation fraction matches the normal
        tail mass 2*(1-Phi(c/sigma))."""
        cfg = small_cfg()
        nets = make_networks(cfg, seed=8)
        zero_last_layer(nets.actor)
        rng = np.random.default_rng(16)
        sigma, c = 0.2, cfg.noise_clip
        s = np.zeros((20000, 18))
        noise = normalize(smooth_params(nets.actor, s, sigma, c, rng=rng), SPACE)
        assert abs(float(noise.mean())) < 2e-3
        frac_clipped = float(np.mean(np.abs(noise) >= c - 1e-12))
        expected = 2.0 * (1.0 - 0.5 * (1.0 + math.erf(c / sigma / math.sqrt(2.0))))
        assert abs(frac_clipped - expected) < 6e-3

    def test_sigma_positive_requires_rng(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=9)
        with pytest.raises(ValueError):
            smooth_params(nets.actor, np.zeros(18), 0.1, cfg.noise_clip)


# ---------------------------------------------------------------------
# action selection
# ---------------------------------------------------------------------


class TestSelectAction:
    def test_rigged_critic_forces_type(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=10)
        params = nets.q1.parameters()
        params[-2][:] = 0.0
        params[-1][:] = [0.0, 0.0, 1.0]
        rng = np.random.default_rng(17)
        for _ in range(20):
            a = select_action(nets, rng.normal(size=18), 0.0, 0.0, cfg, SPACE, rng)
            assert a.k == 2

    def test_tie_breaks_to_lowest_type(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=11)
        zero_last_layer(nets.q1)
        rng = np.random.default_rng(18)
        a = select_action(nets, rng.normal(size=18), 0.0, 0.0, cfg, SPACE, rng)
        assert a.k == 0

    def test_epsilon_one_uniform_types(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=12)
        rng = np.random.default_rng(19)
        s = rng.normal(size=18)
        counts = np.zeros(3, dtype=int)
        n = 10_000
        for _ in range(n):
            counts[select_action(nets, s, 1.0, 0.0, cfg, SPACE, rng).k] += 1
        assert np.all(np.abs(counts / n - 1.0 / 3.0) < 0.02)

    def test_rng_draw_order_and_params(self):
        """Fixed draw order: smoothing noise, epsilon uniform, then the
        random type only when exploring."""
        cfg = small_cfg()
        nets = make_networks(cfg, seed=13)
        sigma, eps = 0.15, 0.3
        for seed in range(30):
            rng_a = np.random.default_rng(seed)
            rng_b = np.random.default_rng(seed)
            s = np.random.default_rng(1000 + seed).normal(size=18)
            a = select_action(nets, s, eps, sigma, cfg, SPACE, rng_a)
            t = np.tanh(nets.actor.forward(s[None, :]))
            noise = np.clip(
                rng_b.normal(0.0, sigma, size=t.shape), -cfg.noise_clip, cfg.noise_clip
            )
            xn = np.clip(t + noise, -1.0, 1.0)
            if rng_b.random() < eps:
                k = int(rng_b.integers(3))
            else:
                k = int(np.argmax(multi_pass_q(nets.q1, s, denormalize(xn[0], SPACE))))
            assert a.k == k
            sl = SPACE.slice_of(k)
            assert np.array_equal(a.params, denormalize(xn[0], SPACE)[sl])

    def test_greedy_action_matches_eval_mode(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=14)
        rng = np.random.default_rng(21)
        s = rng.normal(size=18)
        g = greedy_action(nets, s)
        a = select_action(nets, s, 0.0, 0.0, cfg, SPACE, np.random.default_rng(0))
        assert g.k == a.k and np.array_equal(g.params, a.params)
        pol = GreedyPolicy(nets)
        b = pol.act(s)
        assert b.k == g.k and np.array_equal(b.params, g.params)


# ---------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------


class TestTargets:
    def test_terminal_targets_equal_reward(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=15)
        batch = random_batch(np.random.default_rng(22))
        batch.d[:] = 1.0
        y = compute_targets(nets, batch, cfg, 0.1, SPACE, np.random.default_rng(3))
        assert np.array_equal(y, batch.r)

    def test_identical_twin_matches_single(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=16)
        nets.q2t = nets.q1t.copy()
        batch = random_batch(np.random.default_rng(23))
        y_twin = compute_targets(nets, batch, cfg, 0.0, SPACE)
        cfg_single = small_cfg(twin_enabled=False)
        y_single = compute_targets(nets, batch, cfg_single, 0.0, SPACE)
        assert np.array_equal(y_twin, y_single)

    def test_twin_never_exceeds_single(self):
        cfg = small_cfg()
        cfg_single = small_cfg(twin_enabled=False)
        for seed in range(10):
            nets = make_networks(cfg, seed=100 + seed)
            batch = random_batch(np.random.default_rng(seed), n=32)
            y_twin = compute_targets(
                nets, batch, cfg, 0.1, SPACE, np.random.default_rng(seed)
            )
            y_single = compute_targets(
                nets, batch, cfg_single, 0.1, SPACE, np.random.default_rng(seed)
            )
            assert np.all(y_twin <= y_single + 1e-12)

    def test_bootstrap_formula(self):
        """y = r + gamma*(1-d)*min_twin(max_k Q_target) at sigma=0."""
        cfg = small_cfg()
        nets = make_networks(cfg, seed=17)
        batch = random_batch(np.random.default_rng(24), n=16)
        y = compute_targets(nets, batch, cfg, 0.0, SPACE)
        xn = np.tanh(nets.actor_t.forward(batch.s2))
        joint = denormalize(np.clip(xn, -1, 1), SPACE)
        best1 = np.array(
            [multi_pass_q(nets.q1t, batch.s2[i], joint[i]).max() for i in range(16)]
        )
        best2 = np.array(
            [multi_pass_q(nets.q2t, batch.s2[i], joint[i]).max() for i in range(16)]
        )
        expect = batch.r + cfg.gamma * (1.0 - batch.d) * np.minimum(best1, best2)
        assert np.allclose(y, expect, rtol=0, atol=1e-12)


# ---------------------------------------------------------------------
# critic updates
# ---------------------------------------------------------------------


class TestCriticUpdate:
    def test_zero_loss_leaves_parameters_unchanged(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=18)
        batch = random_batch(np.random.default_rng(25))
        masked = masked_joint_norm(batch.k, batch.xk, SPACE)
        out = nets.q1.forward(np.concatenate([batch.s, masked], axis=1))
        y = out[np.arange(len(batch.r)), batch.k].copy()
        before = [p.copy() for p in nets.q1.parameters()]
        a1 = AdamState(nets.q1, lr=cfg.lr_q)
        a2 = AdamState(nets.q2, lr=cfg.lr_q)
        l1, _ = update_critics(nets, a1, a2, batch, y, cfg)
        assert l1 == 0.0
        for p, b in zip(nets.q1.parameters(), before):
            assert np.array_equal(p, b)

    def test_repeated_updates_reduce_loss(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=19)
        rng = np.random.default_rng(26)
        batch = random_batch(rng, n=32)
        y = rng.normal(size=32)
        a1 = AdamState(nets.q1, lr=cfg.lr_q)
        a2 = AdamState(nets.q2, lr=cfg.lr_q)
        losses = [update_critics(nets, a1, a2, batch, y, cfg)[0] for _ in range(60)]
        assert losses[-1] < 0.5 * losses[0]

    def test_gradient_matches_finite_differences(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=20)
        rng = np.random.default_rng(27)
        batch = random_batch(rng, n=8)
        y = rng.normal(size=8)
        masked = masked_joint_norm(batch.k, batch.xk, SPACE)
        inp = np.concatenate([batch.s, masked], axis=1)
        rows = np.arange(8)

        def loss_of():
            out = nets.q1.forward(inp)
            diff = out[rows, batch.k] - y
            return float(np.mean(diff * diff))

        out, cache = nets.q1.forward_cached(inp)
        diff = out[rows, batch.k] - y
        gout = np.zeros_like(out)
        gout[rows, batch.k] = 2.0 * diff / 8
        grads, _ = nets.q1.backward(cache, gout)

        params = nets.q1.parameters()
        coord_rng = np.random.default_rng(28)
        h = 1e-6
        for _ in range(12):
            pi = int(coord_rng.integers(len(params)))
            flat = params[pi].reshape(-1)
            ci = int(coord_rng.integers(flat.size))
            keep = flat[ci]
            flat[ci] = keep + h
            plus = loss_of()
            flat[ci] = keep - h
            minus = loss_of()
            flat[ci] = keep
            fd = (plus - minus) / (2 * h)
            an = grads[pi].reshape(-1)[ci]
            denom = max(abs(fd), abs(an), 1e-6)
            assert abs(fd - an) / denom < 1e-4

    def test_apply_updates_false_freezes_critics(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=21)
        rng = np.random.default_rng(29)
        batch = random_batch(rng)
        y = rng.normal(size=8)
        before1 = [p.copy() for p in nets.q1.parameters()]
        before2 = [p.copy() for p in nets.q2.parameters()]
        a1 = AdamState(nets.q1, lr=cfg.lr_q)
        a2 = AdamState(nets.q2, lr=cfg.lr_q)
        l1, l2 = update_critics(nets, a1, a2, batch, y, cfg, apply_updates=False)
        assert math.isfinite(l1) and math.isfinite(l2)
        for p, b in zip(nets.q1.parameters(), before1):
            assert np.array_equal(p, b)
        for p, b in zip(nets.q2.parameters(), before2):
            assert np.array_equal(p, b)

    def test_single_critic_reports_nan_for_twin(self):
        cfg = small_cfg(twin_enabled=False)
        nets = make_networks(cfg, seed=22)
        assert nets.q2 is None and nets.q2t is None
        rng = np.random.default_rng(30)
        batch = random_batch(rng)
        y = rng.normal(size=8)
        a1 = AdamState(nets.q1, lr=cfg.lr_q)
        l1, l2 = update_critics(nets, a1, None, batch, y, cfg)
        assert math.isfinite(l1) and math.isnan(l2)


# ---------------------------------------------------------------------
# actor updates
# ---------------------------------------------------------------------


class TestActorUpdate:
    def test_zero_critic_leaves_actor_unchanged(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=23)
        zero_last_layer(nets.q1)
        batch = random_batch(np.random.default_rng(31))
        before = [p.copy() for p in nets.actor.parameters()]
        adam = AdamState(nets.actor, lr=cfg.lr_actor)
        loss = update_actor(nets, adam, batch, cfg, 0.0)
        assert loss == 0.0
        for p, b in zip(nets.actor.parameters(), before):
            assert np.array_equal(p, b)

    def test_repeated_updates_increase_q(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=24)
        batch = random_batch(np.random.default_rng(32), n=16)
        adam = AdamState(nets.actor, lr=1e-3)
        losses = [update_actor(nets, adam, batch, cfg, 0.0) for _ in range(40)]
        assert losses[-1] < losses[0]

    def test_gradient_matches_finite_differences(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=25)
        batch = random_batch(np.random.default_rng(33), n=8)
        pre = np.tanh(nets.actor.forward(batch.s))
        assert np.max(np.abs(pre)) < 0.999  # clip gate comfortably open
        loss0, grads = actor_loss_and_grads(nets, batch, cfg, 0.0)

        params = nets.actor.parameters()
        coord_rng = np.random.default_rng(34)
        h = 1e-6
        for _ in range(12):
            pi = int(coord_rng.integers(len(params)))
            flat = params[pi].reshape(-1)
            ci = int(coord_rng.integers(flat.size))
            keep = flat[ci]
            flat[ci] = keep + h
            plus, _ = actor_loss_and_grads(nets, batch, cfg, 0.0)
            flat[ci] = keep - h
            minus, _ = actor_loss_and_grads(nets, batch, cfg, 0.0)
            flat[ci] = keep
            fd = (plus - minus) / (2 * h)
            an = grads[pi].reshape(-1)[ci]
            denom = max(abs(fd), abs(an), 1e-6)
            assert abs(fd - an) / denom < 1e-4

    def test_critic_frozen_during_actor_step(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=26)
        batch = random_batch(np.random.default_rng(35))
        before = [p.copy() for p in nets.q1.parameters()]
        adam = AdamState(nets.actor, lr=cfg.lr_actor)
        update_actor(nets, adam, batch, cfg, 0.1, SPACE, np.random.default_rng(4))
        for p, b in zip(nets.q1.parameters(), before):
            assert np.array_equal(p, b)

    def test_smoothed_loss_matches_manual_replication(self):
        cfg = small_cfg()
        nets = make_networks(cfg, seed=27)
        batch = random_batch(np.random.default_rng(36), n=8)
        sigma = 0.12
        loss, _ = actor_loss_and_grads(
            nets, batch, cfg, sigma, SPACE, np.random.default_rng(99)
        )
        rng = np.random.default_rng(99)
        t = np.tanh(nets.actor.forward(batch.s))
        noise = np.clip(
            rng.normal(0.0, sigma, size=t.shape), -cfg.noise_clip, cfg.noise_clip
        )
        xn = np.clip(t + noise, -1.0, 1.0)
        total = 0.0
        for k in range(3):
            sl = SPACE.slice_of(k)
            masked = np.zeros_like(xn)
            masked[:, sl] = xn[:, sl]
            out = nets.q1.forward(np.concatenate([batch.s, masked], axis=1))
            total += float(out[:, k].sum())
        assert loss == -total / 8


# ---------------------------------------------------------------------
# replay buffer
# ---------------------------------------------------------------------


class TestReplayBuffer:
    def test_fifo_overwrite(self):
        buf = ReplayBuffer(5, np.random.default_rng(37))
        for i in range(8):
            s = np.full(18, float(i))
            buf.push(Transition(s, 0, np.array([0.1, 0, 0, 1.0]), 0.0, s, False))
        assert len(buf) == 5
        seen = set()
        for _ in range(60):
            batch = buf.sample(5)
            seen.update(batch.s[:, 0].astype(int).tolist())
        assert seen == {3, 4, 5, 6, 7}

    def test_parameter_padding(self):
        buf = ReplayBuffer(4, np.random.default_rng(38))
        s = np.zeros(18)
        buf.push(Transition(s, 2, np.array([3.0]), 1.0, s, True))
        batch = buf.sample(1)
        assert batch.k[0] == 2
        assert batch.xk[0, 0] == 3.0 and np.all(batch.xk[0, 1:] == 0)
        assert batch.d[0] == 1.0

    def test_sample_more_than_size_raises(self):
        buf = ReplayBuffer(4, np.random.default_rng(39))
        s = np.zeros(18)
        buf.push(Transition(s, 0, np.zeros(4), 0.0, s, False))
        with pytest.raises(ValueError):
            buf.sample(2)

    def test_seeded_sampling_reproducible(self):
        def fill(seed):
            buf = ReplayBuffer(16, np.random.default_rng(seed))
            for i in range(16):
                s = np.full(18, float(i))
                buf.push(Transition(s, i % 3, np.zeros(4), float(i), s, False))
            return buf

        a, b = fill(7), fill(7)
        ba, bb = a.sample(8), b.sample(8)
        assert np.array_equal(ba.s, bb.s) and np.array_equal(ba.r, bb.r)


# ---------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------


class TestSchedules:
    def test_sigma_linear_decay(self):
        cfg = TrainConfig()
        assert sigma_at(cfg, 0) == 0.2
        assert abs(sigma_at(cfg, 5000) - 0.1) < 1e-15
        assert sigma_at(cfg, 10_000) == 0.0
        assert sigma_at(cfg, 25_000) == 0.0

    def test_sigma_zero_when_smoothing_disabled(self):
        cfg = TrainConfig(smoothing_enabled=False)
        assert sigma_at(cfg, 0) == 0.0

    def test_epsilon_schedule(self):
        cfg = TrainConfig()
        total = 3000
        cut = 600
        assert epsilon_at(cfg, 0, total) == 1.0
        assert epsilon_at(cfg, cut, total) == 0.05
        assert epsilon_at(cfg, total - 1, total) == 0.05
        mid = epsilon_at(cfg, 300, total)
        assert abs(mid - (1.0 + (0.05 - 1.0) * 0.5)) < 1e-12
        before_cut = epsilon_at(cfg, cut - 1, total)
        assert 0.05 < before_cut < 1.0


# ---------------------------------------------------------------------
# checkpointing
# ---------------------------------------------------------------------


class TestCheckpoint:
    def _trained_state(self, cfg, seed=40):
        rngs = RngBundle.from_seed(seed)
        state = TrainState.fresh(cfg, rngs.init)
        rng = np.random.default_rng(41)
        for _ in range(3):
            batch = random_batch(rng, n=8)
            y = compute_targets(state.networks, batch, cfg, 0.1, SPACE, rngs.noise)
            update_critics(state.networks, state.adam_q1, state.adam_q2, batch, y, cfg)
            update_actor(
                state.networks, state.adam_actor, batch, cfg, 0.1, SPACE, rngs.noise
            )
            state.networks.polyak(cfg.tau)
        state.episodes_done = 12
        state.env_steps = 240
        return state, rngs

    def test_round_trip_bitwise(self, tmp_path):
        cfg = small_cfg()
        state, rngs = self._trained_state(cfg)
        path = tmp_path / "agent.npz"
        save_agent(path, state, cfg, rngs)
        loaded, cfg2, rngs2 = load_agent(path)
        assert asdict(cfg2) == asdict(cfg)
        assert loaded.episodes_done == 12 and loaded.env_steps == 240
        pairs = [
            (state.networks.q1, loaded.networks.q1),
            (state.networks.q2, loaded.networks.q2),
            (state.networks.actor, loaded.networks.actor),
            (state.networks.q1t, loaded.networks.q1t),
            (state.networks.q2t, loaded.networks.q2t),
            (state.networks.actor_t, loaded.networks.actor_t),
        ]
        for orig, again in pairs:
            for p, q in zip(orig.parameters(), again.parameters()):
                assert np.array_equal(p, q)
        for a, b in [
            (state.adam_q1, loaded.adam_q1),
            (state.adam_q2, loaded.adam_q2),
            (state.adam_actor, loaded.adam_actor),
        ]:
            da, db = a.to_arrays(), b.to_arrays()
            assert da.keys() == db.keys()
            for key in da:
                assert np.array_equal(da[key], db[key])

    def test_rng_streams_continue_identically(self, tmp_path):
        cfg = small_cfg()
        state, rngs = self._trained_state(cfg)
        path = tmp_path / "agent.npz"
        save_agent(path, state, cfg, rngs)
        _, _, rngs2 = load_agent(path)
        for name in ("env", "noise", "replay", "init"):
            a = getattr(rngs, name).random(5)
            b = getattr(rngs2, name).random(5)
            assert np.array_equal(a, b)

    def test_round_trip_without_twin(self, tmp_path):
        cfg = small_cfg(twin_enabled=False)
        rngs = RngBundle.from_seed(50)
        state = TrainState.fresh(cfg, rngs.init)
        path = tmp_path / "agent.npz"
        save_agent(path, state, cfg)
        loaded, cfg2, rngs2 = load_agent(path)
        assert loaded.networks.q2 is None and loaded.adam_q2 is None
        assert rngs2 is None
        assert not cfg2.twin_enabled


# ---------------------------------------------------------------------
# training loop
# ---------------------------------------------------------------------


def tiny_train(seed, cfg=None, episodes=3, horizon=4):
    cfg = cfg or small_cfg(warmup=8, batch_size=8)
    rngs = RngBundle.from_seed(seed)
    env = PegInHoleEnv("square", rng=rngs.env)
    state = TrainState.fresh(cfg, rngs.init)
    logs = train(env, state, cfg, episodes, horizon, rngs)
    return logs, state


class TestTrainLoop:
    def test_deterministic_given_seed(self):
        logs_a, _ = tiny_train(123)
        logs_b, _ = tiny_train(123)
        assert len(logs_a) == len(logs_b) == 3
        for la, lb in zip(logs_a, logs_b):
            assert logs_equal(la, lb)

    def test_seed_changes_trajectories(self):
        logs_a, _ = tiny_train(123)
        logs_b, _ = tiny_train(124)
        assert any(la.ep_return != lb.ep_return for la, lb in zip(logs_a, logs_b))

    def test_log_schema_and_schedules(self):
        cfg = small_cfg(warmup=8, batch_size=8)
        logs, state = tiny_train(5, cfg=cfg)
        steps = 0
        for i, row in enumerate(logs):
            assert row.episode == i
            assert row.sigma == sigma_at(cfg, i)
            assert row.epsilon == epsilon_at(cfg, i, 3)
            assert row.env_primitive_steps >= steps
            steps = row.env_primitive_steps
        assert state.episodes_done == 3
        assert state.env_steps == logs[-1].env_primitive_steps

    def test_losses_nan_before_warmup(self):
        cfg = small_cfg(warmup=64, batch_size=8)
        logs, _ = tiny_train(6, cfg=cfg, episodes=2, horizon=3)
        for row in logs:
            assert math.isnan(row.loss_q1) and math.isnan(row.loss_actor)

    def test_updates_happen_after_warmup(self):
        cfg = small_cfg(warmup=8, batch_size=8)
        logs, _ = tiny_train(7, cfg=cfg, episodes=4, horizon=4)
        assert any(math.isfinite(row.loss_q1) for row in logs)
        assert any(math.isfinite(row.loss_actor) for row in logs)

    def test_hooks_fire(self):
        cfg = small_cfg(warmup=8, batch_size=8)
        rngs = RngBundle.from_seed(9)
        env = PegInHoleEnv("square", rng=rngs.env)
        state = TrainState.fresh(cfg, rngs.init)
        eval_at, ckpt_at, rows = [], [], []
        train(
            env,
            state,
            cfg,
            4,
            3,
            rngs,
            on_episode=lambda row: rows.append(row.episode),
            eval_hook=lambda ep, nets: eval_at.append(ep),
            eval_every=2,
            checkpoint_hook=lambda ep, st: ckpt_at.append(ep),
            checkpoint_every=2,
        )
        assert rows == [0, 1, 2, 3]
        assert eval_at == [1, 3]
        assert ckpt_at == [1, 3]


class TestReductionModes:
    def test_algo_presets(self):
        ts = config_for_algo("tsmpdqn")
        mp = config_for_algo("mpdqn")
        assert ts.twin_enabled and ts.smoothing_enabled
        assert not mp.twin_enabled and not mp.smoothing_enabled
        with pytest.raises(ValueError):
            config_for_algo("dqn")

    def test_flags_off_equals_mpdqn_preset(self):
        base = dict(batch_size=8, replay_capacity=128, warmup=8, hidden=(16, 16))
        mp = config_for_algo("mpdqn", **base)
        flagged = config_for_algo(
            "tsmpdqn", twin_enabled=False, smoothing_enabled=False, **base
        )
        assert mp == flagged
        logs_a, _ = tiny_train(55, cfg=mp, episodes=3, horizon=4)
        logs_b, _ = tiny_train(55, cfg=flagged, episodes=3, horizon=4)
        for la, lb in zip(logs_a, logs_b):
            assert logs_equal(la, lb)

    def test_mpdqn_run_has_nan_q2_and_zero_sigma(self):
        base = dict(batch_size=8, replay_capacity=128, warmup=8, hidden=(16, 16))
        mp = config_for_algo("mpdqn", **base)
        logs, _ = tiny_train(56, cfg=mp, episodes=3, horizon=4)
        for row in logs:
            assert math.isnan(row.loss_q2)
            assert row.sigma == 0.0
