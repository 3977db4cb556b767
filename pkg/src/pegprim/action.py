"""Hybrid action space for contact-rich insertion primitives.

An action is a pair (k, x_k): a discrete primitive type plus a continuous
parameter vector for that type.  Three primitive types share a single
9-slot joint parameter vector so that value networks can consume all
parameters at once:

    translation  slots 0..3   (vx, vy, vz, f_lim)
    rotation     slots 4..7   (v_roll, v_pitch, v_yaw, f_lim)
    insertion    slot  8      (f_lim,)

Velocities are in cm/s (translation) or rad/s (rotation), force limits in
newtons.  A force limit of ``math.inf`` is the explicit "never stop on
contact force" sentinel; it is valid in force slots only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TRANSLATION = 0
ROTATION = 1
INSERTION = 2

PRIMITIVE_NAMES = ("translation", "rotation", "insertion")

#: slots 3, 7 and 8 of the joint vector hold force limits
FORCE_SLOTS = (3, 7, 8)


@dataclass(frozen=True)
class ActionSpace:
    """Layout and physical bounds of the joint primitive-parameter vector.

    Parameters
    ----------
    v_max : float
        Magnitude bound for every velocity slot, cm/s or rad/s.
    f_max : float
        Upper bound for finite force limits, N.
    """

    v_max: float = 0.5
    f_max: float = 5.0

    num_types: int = field(default=3, init=False)
    joint_dim: int = field(default=9, init=False)
    #: (offset, length) of each primitive's slice in the joint vector
    layout: tuple = field(default=((0, 4), (4, 4), (8, 1)), init=False)

    bounds_low: np.ndarray = field(init=False, repr=False, compare=False)
    bounds_high: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.v_max > 0.0 and math.isfinite(self.v_max)):
            raise ValueError(f"v_max must be finite and positive, got {self.v_max}")
        if not (self.f_max > 0.0 and math.isfinite(self.f_max)):
            raise ValueError(f"f_max must be finite and positive, got {self.f_max}")
        low = np.array(
            [-self.v_max] * 3 + [0.0] + [-self.v_max] * 3 + [0.0, 0.0]
        )
        high = np.array(
            [self.v_max] * 3 + [self.f_max] + [self.v_max] * 3 + [self.f_max, self.f_max]
        )
        low.flags.writeable = False
        high.flags.writeable = False
        object.__setattr__(self, "bounds_low", low)
        object.__setattr__(self, "bounds_high", high)

    def slice_of(self, k: int) -> slice:
        """Joint-vector slice owned by primitive type ``k``."""
        off, length = self.layout[k]
        return slice(off, off + length)

    def param_dim(self, k: int) -> int:
        return self.layout[k][1]


DEFAULT_SPACE = ActionSpace()


@dataclass
class ParameterizedAction:
    """One executable primitive: discrete type plus its parameter slice."""

    k: int
    params: np.ndarray

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)

    def validate(self, space: ActionSpace = DEFAULT_SPACE) -> None:
        """Raise ValueError unless the action is inside the space."""
        if self.k not in (TRANSLATION, ROTATION, INSERTION):
            raise ValueError(f"unknown primitive type {self.k}")
        want = space.param_dim(self.k)
        if self.params.shape != (want,):
            raise ValueError(
                f"{PRIMITIVE_NAMES[self.k]} expects {want} parameters, "
                f"got shape {self.params.shape}"
            )
        sl = space.slice_of(self.k)
        low = space.bounds_low[sl]
        high = space.bounds_high[sl]
        off = space.layout[self.k][0]
        for i, (val, lo, hi) in enumerate(zip(self.params, low, high)):
            if (off + i) in FORCE_SLOTS and math.isinf(val) and val > 0:
                continue  # inf force limit disables the force stop
            if not (lo <= val <= hi):
                raise ValueError(
                    f"parameter {i} of {PRIMITIVE_NAMES[self.k]} out of bounds: "
                    f"{val} not in [{lo}, {hi}]"
                )
            if not math.isfinite(val):
                raise ValueError(f"non-finite parameter {i}: {val}")


def to_velocity_command(
    k: int, params: np.ndarray, space: ActionSpace = DEFAULT_SPACE
) -> np.ndarray:
    """Map (k, x_k) to the 6-dof velocity command (vx, vy, vz, wr, wp, wy).

    Translation moves only the linear components, rotation only the angular
    ones, and insertion is the fixed straight-down push at full speed.
    """
    params = np.asarray(params, dtype=float)
    cmd = np.zeros(6)
    if k == TRANSLATION:
        cmd[0:3] = params[0:3]
    elif k == ROTATION:
        cmd[3:6] = params[0:3]
    elif k == INSERTION:
        cmd[2] = -space.v_max
    else:
        raise ValueError(f"unknown primitive type {k}")
    return cmd


def force_limit_of(k: int, params: np.ndarray) -> float:
    """Force limit in N; the last parameter of every primitive type."""
    if k not in (TRANSLATION, ROTATION, INSERTION):
        raise ValueError(f"unknown primitive type {k}")
    return float(np.asarray(params, dtype=float)[-1])


def stop_on_force(v_d: np.ndarray, f_ext: np.ndarray, f_lim: float) -> bool:
    """Force-guard predicate: stop when the external wrench opposes motion.

    Projects the 6-dof wrench onto the commanded velocity direction and
    compares the magnitude against the limit, strictly.  An infinite limit
    never trips.
    """
    v_d = np.asarray(v_d, dtype=float)
    f_ext = np.asarray(f_ext, dtype=float)
    v_norm = float(np.linalg.norm(v_d))
    if v_norm == 0.0:
        raise ValueError("zero velocity command has no projection direction")
    return abs(float(np.dot(v_d, f_ext))) / v_norm > f_lim


def normalize(x_phys: np.ndarray, space: ActionSpace = DEFAULT_SPACE) -> np.ndarray:
    """Affinely map a joint parameter vector from physical bounds to [-1, 1]."""
    x_phys = np.asarray(x_phys, dtype=float)
    span = space.bounds_high - space.bounds_low
    return (x_phys - space.bounds_low) / span * 2.0 - 1.0


def denormalize(x_norm: np.ndarray, space: ActionSpace = DEFAULT_SPACE) -> np.ndarray:
    """Inverse of :func:`normalize`."""
    x_norm = np.asarray(x_norm, dtype=float)
    span = space.bounds_high - space.bounds_low
    return space.bounds_low + (x_norm + 1.0) / 2.0 * span
