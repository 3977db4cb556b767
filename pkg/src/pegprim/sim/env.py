"""Quasi-static peg-in-hole environment.

Deterministic penalty-contact simulation of a peg manipulated by
velocity-command motion primitives.  No inertia or friction: primitives
are integrated as capped sub-steps, penetration is resolved by
projection after every sub-step, and the reported velocity is the last
commanded one.

Frames: the world origin sits at the NOMINAL hole center on the top
surface.  The true hole pose adds a sampled planar offset (dx, dy, dyaw).
Observations are relative to the nominal pose: positions in cm, angles
in rad, so the reward exponent stays O(1) across the workspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..action import (
    DEFAULT_SPACE,
    ROTATION,
    ActionSpace,
    ParameterizedAction,
    force_limit_of,
    to_velocity_command,
)
from . import _kernels_py, kernels
from .geometry import TaskGeometry, task_from_name

STOP_REASONS = ("force_limit", "distance_threshold", "success", "clamp")

TRANSLATION_TRAVEL = 25.0  # mm
ROTATION_TRAVEL = math.radians(4.0)
TRANSLATION_STEP = 0.25  # mm per sub-step
ROTATION_STEP = math.radians(0.1)
SUCCESS_DEPTH = 15.0  # mm below the true hole top surface
SUCCESS_TILT = math.radians(1.0)


@dataclass
class PegPose:
    """Peg bottom-face center position (mm) and fixed-axis XYZ euler
    orientation (rad)."""

    p: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.r = np.asarray(self.r, dtype=float)

    def copy(self) -> "PegPose":
        return PegPose(self.p.copy(), self.r.copy())

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.p, self.r])

    @classmethod
    def from_vector(cls, v) -> "PegPose":
        v = np.asarray(v, dtype=float)
        return cls(v[:3].copy(), v[3:].copy())


@dataclass
class Wrench:
    """External force (N) and torque about the TCP (N*cm)."""

    f: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)
        self.tau = np.asarray(self.tau, dtype=float)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.f, self.tau])

    @classmethod
    def zero(cls) -> "Wrench":
        return cls(np.zeros(3), np.zeros(3))

    @classmethod
    def from_vector(cls, v) -> "Wrench":
        v = np.asarray(v, dtype=float)
        return cls(v[:3].copy(), v[3:].copy())


@dataclass(frozen=True)
class EpisodeSetup:
    """Sampled episode: true hole offset and the initial peg pose."""

    hole_dx: float
    hole_dy: float
    hole_dyaw: float
    initial_pose: PegPose
    rng_seed: int | None = None


@dataclass
class Observation:
    """Agent-visible state: relative pose (cm, rad), last commanded
    velocity, external wrench.  18 values total."""

    x: np.ndarray
    xdot: np.ndarray
    f_ext: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.xdot, self.f_ext])


@dataclass(frozen=True)
class RewardSpec:
    """Goal vector in observation units (cm, rad)."""

    x_goal: np.ndarray

    @classmethod
    def for_setup(cls, setup: EpisodeSetup, depth_mm: float = SUCCESS_DEPTH) -> "RewardSpec":
        goal = np.array(
            [
                setup.hole_dx / 10.0,
                setup.hole_dy / 10.0,
                -depth_mm / 10.0,
                0.0,
                0.0,
                setup.hole_dyaw,
            ]
        )
        goal.flags.writeable = False
        return cls(goal)


@dataclass
class PrimitiveOutcome:
    next_obs: Observation
    reward: float
    done: bool
    stop_reason: str
    substeps: int
    pose: PegPose = None
    wrench: Wrench = None
    max_residual: float = 0.0
    travel: float = 0.0


@dataclass(frozen=True)
class ResetDistribution:
    """Episode sampling parameters: truncated-Gaussian hole offset and
    uniform peg start pose."""

    hole_sigma_xy: float = 2.0  # mm
    hole_sigma_yaw: float = math.radians(0.5)
    truncate_sigmas: float = 3.0
    start_height: float = 30.0  # mm
    start_range_xy: float = 30.0  # mm
    start_range_yaw: float = math.radians(10.0)


DEFAULT_RESET = ResetDistribution()


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


def reward(obs: Observation, spec: RewardSpec) -> float:
    """10^(3 - e) with e the goal-error norm in cm/rad units."""
    e = float(np.linalg.norm(obs.x - spec.x_goal))
    return 10.0 ** (3.0 - e)


def check_success(pose: PegPose, setup: EpisodeSetup, geom: TaskGeometry) -> bool:
    """Inserted: deep enough, laterally centered, upright."""
    if -pose.p[2] < SUCCESS_DEPTH:
        return False
    if math.hypot(pose.p[0] - setup.hole_dx, pose.p[1] - setup.hole_dy) > geom.clearance:
        return False
    return abs(pose.r[0]) <= SUCCESS_TILT and abs(pose.r[1]) <= SUCCESS_TILT


def _truncated_normal(rng, sigma: float, bound: float) -> float:
    while True:
        v = rng.normal(0.0, sigma)
        if abs(v) <= bound:
            return v


def sample_setup(
    rng: np.random.Generator,
    dist: ResetDistribution = DEFAULT_RESET,
    seed: int | None = None,
) -> EpisodeSetup:
    dx = _truncated_normal(rng, dist.hole_sigma_xy, dist.truncate_sigmas * dist.hole_sigma_xy)
    dy = _truncated_normal(rng, dist.hole_sigma_xy, dist.truncate_sigmas * dist.hole_sigma_xy)
    dyaw = _truncated_normal(
        rng, dist.hole_sigma_yaw, dist.truncate_sigmas * dist.hole_sigma_yaw
    )
    px = rng.uniform(-dist.start_range_xy, dist.start_range_xy)
    py = rng.uniform(-dist.start_range_xy, dist.start_range_xy)
    pyaw = rng.uniform(-dist.start_range_yaw, dist.start_range_yaw)
    pose = PegPose(np.array([px, py, dist.start_height]), np.array([0.0, 0.0, pyaw]))
    return EpisodeSetup(dx, dy, dyaw, pose, rng_seed=seed)


def observe(pose: PegPose, xdot: np.ndarray, wrench: Wrench) -> Observation:
    x = np.array(
        [
            pose.p[0] / 10.0,
            pose.p[1] / 10.0,
            pose.p[2] / 10.0,
            pose.r[0],
            pose.r[1],
            wrap_angle(pose.r[2]),
        ]
    )
    return Observation(x=x, xdot=np.asarray(xdot, dtype=float).copy(), f_ext=wrench.as_vector())


def contact_wrench(pose: PegPose, setup: EpisodeSetup, geom: TaskGeometry, backend=None) -> Wrench:
    """Penalty contact wrench at a pose (world frame)."""
    impl = backend if backend is not None else kernels.get_backend()
    w6 = impl.contact_wrench(
        pose.as_vector(),
        setup.hole_dx,
        setup.hole_dy,
        setup.hole_dyaw,
        geom.hole_polygon,
        geom.sample_points,
        geom.point_stiffness,
        geom.hole_depth,
    )
    return Wrench.from_vector(np.asarray(w6))


def execute_primitive(
    pose: PegPose,
    prev_wrench: Wrench,
    action: ParameterizedAction,
    geom: TaskGeometry,
    setup: EpisodeSetup,
    reward_spec: RewardSpec,
    space: ActionSpace = DEFAULT_SPACE,
    backend=None,
) -> PrimitiveOutcome:
    """Run one primitive to completion and score the resulting state."""
    action.validate(space)
    impl = backend if backend is not None else kernels.get_backend()
    v6 = to_velocity_command(action.k, action.params, space)
    f_lim = force_limit_of(action.k, action.params)

    if action.k == ROTATION:
        u3 = v6[3:6]
        travel_max, step_cap = ROTATION_TRAVEL, ROTATION_STEP
    else:
        u3 = v6[0:3]
        travel_max, step_cap = TRANSLATION_TRAVEL, TRANSLATION_STEP

    norm = float(np.linalg.norm(u3))
    if norm == 0.0:
        # zero commanded velocity: no motion, wrench unchanged
        obs = observe(pose, v6, prev_wrench)
        return PrimitiveOutcome(
            next_obs=obs,
            reward=reward(obs, reward_spec),
            done=False,
            stop_reason="distance_threshold",
            substeps=0,
            pose=pose.copy(),
            wrench=Wrench.from_vector(prev_wrench.as_vector()),
        )

    out_pose, w6, code, substeps, max_residual, travel = impl.run_primitive(
        pose.as_vector(),
        v6,
        u3 / norm,
        action.k == ROTATION,
        f_lim,
        travel_max,
        step_cap,
        setup.hole_dx,
        setup.hole_dy,
        setup.hole_dyaw,
        geom.hole_polygon,
        geom.sample_points,
        geom.point_stiffness,
        geom.hole_depth,
        geom.clearance,
        SUCCESS_DEPTH,
        SUCCESS_TILT,
        _kernels_py.PENETRATION_TOL,
    )
    new_pose = PegPose.from_vector(np.asarray(out_pose))
    new_wrench = Wrench.from_vector(np.asarray(w6))
    obs = observe(new_pose, v6, new_wrench)
    stop_reason = STOP_REASONS[int(code)]
    return PrimitiveOutcome(
        next_obs=obs,
        reward=reward(obs, reward_spec),
        done=stop_reason == "success",
        stop_reason=stop_reason,
        substeps=int(substeps),
        pose=new_pose,
        wrench=new_wrench,
        max_residual=float(max_residual),
        travel=float(travel),
    )


class PegInHoleEnv:
    """Stateful episode wrapper around the functional simulator core.

    Each instance owns its rng; independent instances never share state.
    """

    def __init__(
        self,
        task: str | TaskGeometry = "square",
        seed: int | None = None,
        rng: np.random.Generator | None = None,
        reset_dist: ResetDistribution = DEFAULT_RESET,
        space: ActionSpace = DEFAULT_SPACE,
        backend: str | None = None,
    ):
        self.geom = task_from_name(task) if isinstance(task, str) else task
        self.space = space
        self.reset_dist = reset_dist
        self.backend = kernels.get_backend(backend)
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.setup: EpisodeSetup | None = None
        self.reward_spec: RewardSpec | None = None
        self.pose: PegPose | None = None
        self.last_wrench = Wrench.zero()
        self.last_v = np.zeros(6)
        self.primitive_count = 0

    def reset(self) -> Observation:
        self.setup = sample_setup(self.rng, self.reset_dist)
        self.reward_spec = RewardSpec.for_setup(self.setup)
        self.pose = self.setup.initial_pose.copy()
        self.last_v = np.zeros(6)
        self.last_wrench = contact_wrench(
            self.pose, self.setup, self.geom, backend=self.backend
        )
        self.primitive_count = 0
        return observe(self.pose, self.last_v, self.last_wrench)

    def step(self, action: ParameterizedAction) -> PrimitiveOutcome:
        if self.setup is None:
            raise RuntimeError("step() before reset()")
        outcome = execute_primitive(
            self.pose,
            self.last_wrench,
            action,
            self.geom,
            self.setup,
            self.reward_spec,
            space=self.space,
            backend=self.backend,
        )
        self.pose = outcome.pose
        self.last_wrench = outcome.wrench
        self.last_v = outcome.next_obs.xdot
        self.primitive_count += 1
        return outcome
