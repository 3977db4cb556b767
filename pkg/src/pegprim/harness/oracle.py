"""Scripted reference policies.

The oracle is environment-privileged: it reads the episode's true hole
offset and the true peg pose, so it can solve every episode and thereby
certify that the task is solvable within the horizon.  Every primitive
travels a fixed distance (25 mm translation, 4 degree rotation), so
exact positioning uses two-move compositions whose errors cancel.
"""

from __future__ import annotations

import math

import numpy as np

from ..action import INSERTION, ROTATION, TRANSLATION, DEFAULT_SPACE, ParameterizedAction
from ..sim import wrap_angle
from ..sim.env import ROTATION_TRAVEL, TRANSLATION_TRAVEL

INF = float("inf")


class OracleInsertPolicy:
    """Privileged scripted insertion: align yaw, fly to a hover point
    above the true hole, then insert.

    Yaw alignment spends full 4-degree spins while the error is large,
    then one pair of rotations about tilted axes whose roll components
    cancel while the yaw components sum to the exact residual.
    Translation uses straight 25 mm moves while far, then a pair of
    25 mm moves m = net/2 +- w (w orthogonal to the net displacement)
    that lands exactly on the hover point.  All force limits are
    infinite; the final insertion stops on the success predicate.
    """

    def __init__(self, hover_height: float = 2.0, speed: float = 0.2,
                 rot_rate: float = 0.2):
        self.hover_height = hover_height
        self.speed = speed
        self.rot_rate = rot_rate
        self.pos_tol = 1e-3
        self.yaw_tol = 1e-5
        self.env = None
        self._queue: list[ParameterizedAction] = []

    def begin_episode(self, env) -> None:
        self.env = env
        self._queue.clear()

    def _rotation(self, axis3) -> ParameterizedAction:
        params = np.array([axis3[0], axis3[1], axis3[2], INF])
        params[:3] *= self.rot_rate
        return ParameterizedAction(ROTATION, params)

    def _translation(self, direction3) -> ParameterizedAction:
        params = np.array([direction3[0], direction3[1], direction3[2], INF])
        params[:3] *= self.speed
        return ParameterizedAction(TRANSLATION, params)

    def act(self, obs) -> ParameterizedAction:
        if self.env is None:
            raise RuntimeError("begin_episode(env) must run before act()")
        if self._queue:
            return self._queue.pop(0)
        setup = self.env.setup
        pose = self.env.pose

        yaw_err = wrap_angle(setup.hole_dyaw - pose.r[2])
        if abs(yaw_err) > self.yaw_tol:
            if abs(yaw_err) >= ROTATION_TRAVEL - 1e-12:
                return self._rotation([0.0, 0.0, math.copysign(1.0, yaw_err)])
            # tilted-axis pair: roll components cancel, yaw components
            # add to exactly yaw_err (angle integration is linear)
            c = yaw_err / (2.0 * ROTATION_TRAVEL)
            a = math.sqrt(1.0 - c * c)
            self._queue.append(self._rotation([-a, 0.0, c]))
            return self._rotation([a, 0.0, c])

        target = np.array([setup.hole_dx, setup.hole_dy, self.hover_height])
        delta = target - pose.p
        dist = float(np.linalg.norm(delta))
        if dist > self.pos_tol:
            if dist >= TRANSLATION_TRAVEL - 1e-9:
                return self._translation(delta / dist)
            # two-move composition: m = delta/2 +- w with w horizontal
            # and orthogonal to delta, |m| = 25 each, errors cancel
            lat = math.hypot(delta[0], delta[1])
            if lat > 1e-12:
                w_hat = np.array([-delta[1], delta[0], 0.0]) / lat
            else:
                w_hat = np.array([1.0, 0.0, 0.0])
            w = w_hat * math.sqrt(TRANSLATION_TRAVEL**2 - (dist / 2.0) ** 2)
            m1 = delta / 2.0 + w
            m2 = delta / 2.0 - w
            self._queue.append(self._translation(m2 / np.linalg.norm(m2)))
            return self._translation(m1 / np.linalg.norm(m1))

        return ParameterizedAction(INSERTION, np.array([INF]))


class RandomPolicy:
    """Uniform random type and uniform in-bounds parameters."""

    def __init__(self, rng: np.random.Generator, space=DEFAULT_SPACE):
        self.rng = rng
        self.space = space

    def act(self, obs) -> ParameterizedAction:
        k = int(self.rng.integers(self.space.num_types))
        sl = self.space.slice_of(k)
        low = self.space.bounds_low[sl]
        high = self.space.bounds_high[sl]
        params = low + self.rng.random(sl.stop - sl.start) * (high - low)
        return ParameterizedAction(k, params)
