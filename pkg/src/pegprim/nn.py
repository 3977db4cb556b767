"""Minimal dense network core used by all agents.

Implements exactly the network family needed here: multilayer perceptrons
with ReLU hidden activations and a linear output layer, double precision,
with analytic reverse-mode gradients for both parameters and inputs,
Adam, Polyak target blending, and a finite-difference verifier.

Weights are stored as (fan_in, fan_out) matrices; inputs are row vectors
or row-major batches, so a layer computes ``x @ W + b``.
"""

from __future__ import annotations

import json

import numpy as np

#: global gradient-norm ceiling applied before every Adam step
DEFAULT_GRAD_CLIP = 10.0

CHECKPOINT_VERSION = 1


class Mlp:
    """Fully connected ReLU network with a linear head.

    Parameters
    ----------
    sizes : sequence of int
        Layer widths, input first, output last. Two hidden layers of 128
        are the default throughout the package but any depth works.
    rng : numpy.random.Generator
        Source for the initial weights (uniform in +-1/sqrt(fan_in)).
    """

    def __init__(self, sizes, rng=None):
        sizes = tuple(int(s) for s in sizes)
        if len(sizes) < 2 or any(s <= 0 for s in sizes):
            raise ValueError(f"bad layer sizes {sizes}")
        self.sizes = sizes
        self.weights = []
        self.biases = []
        if rng is None:
            rng = np.random.default_rng()
        for n_in, n_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(n_in)
            self.weights.append(rng.uniform(-bound, bound, size=(n_in, n_out)))
            self.biases.append(np.zeros(n_out))

    @classmethod
    def build(cls, n_in, n_out, hidden=(128, 128), rng=None):
        return cls((n_in, *hidden, n_out), rng=rng)

    # -- evaluation ---------------------------------------------------

    def forward(self, x):
        """Evaluate the network; accepts a single vector or a batch."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        h = np.atleast_2d(x)
        if h.shape[1] != self.sizes[0]:
            raise ValueError(f"input width {h.shape[1]}, expected {self.sizes[0]}")
        last = len(self.weights) - 1
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ W + b
            if i != last:
                h = np.maximum(h, 0.0)
        return h[0] if single else h

    def forward_cached(self, x):
        """Evaluate and keep intermediates for a later backward pass.

        Returns (output, cache); cache holds the batch input, hidden
        pre-activations and hidden activations.
        """
        x2d = np.atleast_2d(np.asarray(x, dtype=float))
        if x2d.shape[1] != self.sizes[0]:
            raise ValueError(f"input width {x2d.shape[1]}, expected {self.sizes[0]}")
        zs = []
        hs = []
        h = x2d
        last = len(self.weights) - 1
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ W + b
            if i != last:
                zs.append(z)
                h = np.maximum(z, 0.0)
                hs.append(h)
            else:
                h = z
        return h, (x2d, zs, hs)

    def backward(self, cache, grad_out):
        """Reverse-mode pass from an upstream output gradient.

        Returns (param_grads, input_grad) where param_grads is the flat
        list [dW0, db0, dW1, db1, ...] matching :meth:`parameters`, and
        input_grad has the cached batch shape. Gradients are summed over
        the batch, so upstream gradients should already carry any 1/N.
        """
        x2d, zs, hs = cache
        g = np.atleast_2d(np.asarray(grad_out, dtype=float))
        if g.shape != (x2d.shape[0], self.sizes[-1]):
            raise ValueError(f"upstream gradient shape {g.shape} does not match")
        param_grads = [None] * (2 * len(self.weights))
        for i in range(len(self.weights) - 1, -1, -1):
            a_prev = x2d if i == 0 else hs[i - 1]
            param_grads[2 * i] = a_prev.T @ g
            param_grads[2 * i + 1] = g.sum(axis=0)
            g = g @ self.weights[i].T
            if i > 0:
                g = g * (zs[i - 1] > 0.0)
        return param_grads, g

    # -- parameter plumbing -------------------------------------------

    def parameters(self):
        """Flat list [W0, b0, W1, b1, ...] of live arrays."""
        out = []
        for W, b in zip(self.weights, self.biases):
            out.append(W)
            out.append(b)
        return out

    def copy(self):
        twin = Mlp.__new__(Mlp)
        twin.sizes = self.sizes
        twin.weights = [W.copy() for W in self.weights]
        twin.biases = [b.copy() for b in self.biases]
        return twin

    def to_arrays(self, prefix=""):
        """Dump parameters into a flat dict for npz-style persistence."""
        d = {f"{prefix}sizes": np.array(self.sizes, dtype=np.int64)}
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            d[f"{prefix}W{i}"] = W
            d[f"{prefix}b{i}"] = b
        return d

    @classmethod
    def from_arrays(cls, arrays, prefix=""):
        sizes = tuple(int(s) for s in arrays[f"{prefix}sizes"])
        net = cls.__new__(cls)
        net.sizes = sizes
        net.weights = []
        net.biases = []
        for i in range(len(sizes) - 1):
            net.weights.append(np.array(arrays[f"{prefix}W{i}"], dtype=float))
            net.biases.append(np.array(arrays[f"{prefix}b{i}"], dtype=float))
        return net


# ---------------------------------------------------------------------
# optimisation
# ---------------------------------------------------------------------


class AdamState:
    """Adam optimizer state for one network (bias-corrected update)."""

    def __init__(self, net, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.t = 0
        self.m = [np.zeros_like(p) for p in net.parameters()]
        self.v = [np.zeros_like(p) for p in net.parameters()]

    def to_arrays(self, prefix=""):
        d = {
            f"{prefix}hyper": np.array(
                [self.lr, self.beta1, self.beta2, self.eps, float(self.t)]
            )
        }
        for i, (m, v) in enumerate(zip(self.m, self.v)):
            d[f"{prefix}m{i}"] = m
            d[f"{prefix}v{i}"] = v
        return d

    @classmethod
    def from_arrays(cls, arrays, net, prefix=""):
        hyper = arrays[f"{prefix}hyper"]
        state = cls(net, lr=hyper[0], beta1=hyper[1], beta2=hyper[2], eps=hyper[3])
        state.t = int(hyper[4])
        state.m = [np.array(arrays[f"{prefix}m{i}"]) for i in range(len(state.m))]
        state.v = [np.array(arrays[f"{prefix}v{i}"]) for i in range(len(state.v))]
        return state


def adam_step(net, grads, state):
    """One in-place Adam update. Non-finite gradients raise."""
    params = net.parameters()
    if len(grads) != len(params):
        raise ValueError("gradient list does not match parameter list")
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise FloatingPointError("non-finite gradient in adam_step")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1**state.t
    bc2 = 1.0 - b2**state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * np.square(g)
        p -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)


def clip_grad_norm(grads, max_norm=DEFAULT_GRAD_CLIP):
    """Scale the gradient list in place to a global L2 ceiling.

    Returns the pre-clip global norm.
    """
    total = 0.0
    for g in grads:
        total += float(np.sum(np.square(g)))
    norm = float(np.sqrt(total))
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        for g in grads:
            g *= scale
    return norm


def polyak_update(target, source, tau):
    """target <- tau * source + (1 - tau) * target, element-wise."""
    if target.sizes != source.sizes:
        raise ValueError("architecture mismatch in polyak_update")
    for tp, sp in zip(target.parameters(), source.parameters()):
        tp *= 1.0 - tau
        tp += tau * sp


# ---------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------


def save_mlp(path, net):
    """Write a lossless, versioned checkpoint of one network."""
    arrays = net.to_arrays()
    meta = json.dumps({"version": CHECKPOINT_VERSION, "sizes": list(net.sizes)})
    np.savez(path, meta=np.bytes_(meta.encode()), **arrays)


def load_mlp(path):
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        if meta["version"] != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {meta['version']}")
        return Mlp.from_arrays(data)


# ---------------------------------------------------------------------
# finite-difference verification
# ---------------------------------------------------------------------


def finite_difference_max_rel_err(net, x, upstream, h=1e-5, n_param_coords=12, rng=None):
    """Compare analytic gradients against central differences.

    The probe scalar is ``sum(upstream * net(x))``.  Checks the full input
    gradient plus a random sample of parameter coordinates, and returns
    the worst relative error (denominator floored at 1e-6 so dead-ReLU
    zero-against-zero comparisons do not blow up).
    """
    if rng is None:
        rng = np.random.default_rng(0)
    x = np.asarray(x, dtype=float)
    upstream = np.asarray(upstream, dtype=float)

    out, cache = net.forward_cached(x)
    param_grads, gin = net.backward(cache, np.atleast_2d(upstream))

    def probe():
        return float(np.sum(upstream * net.forward(x)))

    worst = 0.0

    def compare(analytic, plus, minus):
        nonlocal worst
        fd = (plus - minus) / (2.0 * h)
        err = abs(analytic - fd) / max(abs(analytic), abs(fd), 1e-6)
        worst = max(worst, err)

    # input gradient, every coordinate
    flat_x = x.reshape(-1)
    gin_flat = gin.reshape(-1)
    for i in range(flat_x.size):
        orig = flat_x[i]
        flat_x[i] = orig + h
        plus = probe()
        flat_x[i] = orig - h
        minus = probe()
        flat_x[i] = orig
        compare(gin_flat[i], plus, minus)

    # sampled parameter coordinates
    params = net.parameters()
    for _ in range(n_param_coords):
        pi = int(rng.integers(len(params)))
        arr = params[pi]
        ci = int(rng.integers(arr.size))
        flat = arr.reshape(-1)
        orig = flat[ci]
        flat[ci] = orig + h
        plus = probe()
        flat[ci] = orig - h
        minus = probe()
        flat[ci] = orig
        compare(param_grads[pi].reshape(-1)[ci], plus, minus)

    return worst


def _sample_checkable_net(rng, h=1e-5):
    """Draw a random small net and input whose ReLU pre-activations sit
    safely away from zero, so finite differences never cross a kink."""
    while True:
        n_in = int(rng.integers(3, 7))
        hidden = (int(rng.integers(5, 9)), int(rng.integers(5, 9)))
        n_out = int(rng.integers(2, 5))
        net = Mlp.build(n_in, n_out, hidden=hidden, rng=rng)
        x = rng.normal(0.0, 1.0, size=n_in)
        _, (_, zs, _) = net.forward_cached(x)
        margin = min(float(np.min(np.abs(z))) for z in zs)
        if margin > 50.0 * h:
            upstream = rng.normal(0.0, 1.0, size=n_out)
            return net, x, upstream


def gradcheck_suite(n_instances=100, h=1e-5, seed=0):
    """Finite-difference sweep over many random nets; returns worst error."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        net, x, upstream = _sample_checkable_net(rng, h=h)
        err = finite_difference_max_rel_err(net, x, upstream, h=h, rng=rng)
        worst = max(worst, err)
    return worst
