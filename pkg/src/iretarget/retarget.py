"""Two-stage contact-preserving retargeting of an interaction pair.

Given a source two-person interaction (actor ``H_s`` + partner ``H_p``) and
a robot skeleton, the optimizer searches over the robot's per-frame joint
parameters and root pose, plus the partner's upper-body joint parameters,
minimizing

    w_kin * L_kin + w_con * L_con + w_hum * L_hum + w_temp * L_temp + w_pose * L_pose

with exact analytic gradients through forward kinematics. Stage 1 runs a
moderate contact weight to settle globally consistent kinematics; stage 2
warm-starts from it with the contact weight raised 10x and a lower step
size to close near-miss contacts. Joint parameters are clamped to their
limits after every Adam step, and the robot trajectory is Gaussian-smoothed
at the end.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import NumericError, ValidationError
from .kinematics import MotionSequence, Skeleton, fk_backward, fk_forward
from .losses import (
    distance_matrices,
    loss_con,
    loss_con_value_and_grad,
    loss_hum,
    loss_hum_grad,
    loss_kin,
    loss_kin_grad,
    loss_pose,
    loss_pose_grad,
    loss_temp,
    loss_temp_grad,
)
from .morphology import MorphologyFit, fit_morphology, reshape_motion
from .optim import Adam
from .rotations import quat_normalize
from .smoothing import gaussian_kernel, smooth_motion
from .validation import require

log = logging.getLogger(__name__)

#: Roles entering the pairwise keypoint distance matrices (per agent).
KEYPOINT_ROLES = (
    "head",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
)

#: Partner joints whose parameters the optimizer may adjust.
UPPER_BODY_ROLES = (
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
)

LOSS_NAMES = ("kin", "con", "hum", "temp", "pose")


@dataclass(frozen=True)
class StageSchedule:
    iters: int
    lr: float
    w_con: float


@dataclass(frozen=True)
class RetargetConfig:
    """Loss weights and stage schedules. Defaults follow the published recipe:
    stage-1 weights (1.0, 0.25, 0.25, 5.0, 0.02), stage-2 contact weight 10x,
    150 + 50 iterations at learning rates 0.02 / 0.005, smoothing kernel 5
    with sigma 0.75."""

    w_kin: float = 1.0
    w_con_stage1: float = 0.25
    w_con_stage2: float = 2.5
    w_hum: float = 0.25
    w_temp: float = 5.0
    w_pose: float = 0.02
    w_accel: float = 1.0
    stage1_iters: int = 150
    stage1_lr: float = 0.02
    stage2_iters: int = 50
    stage2_lr: float = 0.005
    smooth_kernel: int = 5
    smooth_sigma: float = 0.75
    keypoint_roles: tuple = KEYPOINT_ROLES
    upper_body_roles: tuple = UPPER_BODY_ROLES
    seed: int = 42

    def __post_init__(self):
        for name in ("w_kin", "w_con_stage1", "w_con_stage2", "w_hum", "w_temp", "w_pose"):
            require(getattr(self, name) >= 0, f"{name} must be non-negative")
        require(self.stage1_iters >= 1, "stage1_iters must be >= 1")
        require(self.stage2_iters >= 0, "stage2_iters must be >= 0")
        require(self.stage1_lr > 0 and self.stage2_lr > 0, "learning rates must be positive")
        gaussian_kernel(self.smooth_kernel, self.smooth_sigma)

    def stage1(self) -> StageSchedule:
        return StageSchedule(self.stage1_iters, self.stage1_lr, self.w_con_stage1)

    def stage2(self) -> StageSchedule:
        return StageSchedule(self.stage2_iters, self.stage2_lr, self.w_con_stage2)


@dataclass
class RetargetProblem:
    """One retargeting instance: the source pair, the robot, and the
    per-robot-joint target positions gathered from the reshaped source."""

    source_motion: MotionSequence
    partner_motion: MotionSequence
    robot_skeleton: Skeleton
    reshaped_target: np.ndarray  # (T, J_R, 3)
    kin_mask: np.ndarray  # (J_R,) bool, robot joints with a source correspondence
    morphology: MorphologyFit | None = None
    task_keypoints: tuple = ()

    def __post_init__(self):
        T = self.source_motion.num_frames
        require(
            self.partner_motion.num_frames == T,
            "source and partner motions must share the frame count",
        )
        require(
            self.source_motion.fps == self.partner_motion.fps,
            "source and partner motions must share the frame rate",
        )
        J = self.robot_skeleton.num_joints
        if self.reshaped_target.shape != (T, J, 3):
            raise ValidationError(
                f"reshaped_target shape {self.reshaped_target.shape} does not match (T={T}, J={J}, 3)"
            )
        if self.kin_mask.shape != (J,):
            raise ValidationError("kin_mask must have one entry per robot joint")
        if not np.any(self.kin_mask):
            raise ValidationError("kin_mask excludes every robot joint")

    @property
    def num_frames(self) -> int:
        return self.source_motion.num_frames


@dataclass
class RetargetState:
    """Decision variables: robot joint params + root pose, partner UA params.
    Root quaternions are raw (normalized inside forward kinematics)."""

    joint_params: np.ndarray  # (T, D_R)
    root_pos: np.ndarray  # (T, 3)
    root_quat: np.ndarray  # (T, 4)
    partner_ua: np.ndarray  # (T, D_UA)

    def to_flat(self) -> np.ndarray:
        return np.concatenate(
            [self.joint_params.ravel(), self.root_pos.ravel(), self.root_quat.ravel(), self.partner_ua.ravel()]
        )

    @classmethod
    def from_flat(cls, flat: np.ndarray, T: int, d_robot: int, d_ua: int) -> "RetargetState":
        n_q = T * d_robot
        n_p = T * 3
        n_r = T * 4
        return cls(
            flat[:n_q].reshape(T, d_robot),
            flat[n_q : n_q + n_p].reshape(T, 3),
            flat[n_q + n_p : n_q + n_p + n_r].reshape(T, 4),
            flat[n_q + n_p + n_r :].reshape(T, d_ua),
        )

    def copy(self) -> "RetargetState":
        return RetargetState(
            self.joint_params.copy(), self.root_pos.copy(), self.root_quat.copy(), self.partner_ua.copy()
        )


@dataclass
class RetargetResult:
    robot_motion: MotionSequence
    partner_motion: MotionSequence
    loss_trace: list  # dicts: iteration, total, kin, con, hum, temp, pose
    final_breakdown: dict
    config: RetargetConfig


def _role_param_columns(skeleton: Skeleton, roles) -> list[int]:
    cols: list[int] = []
    for role in roles:
        sl = skeleton.param_slice(skeleton.role_index(role))
        cols.extend(range(sl.start, sl.stop))
    return cols


class RetargetObjective:
    """Composite loss with exact gradients over a flat decision vector.

    Flat layout: robot joint params, robot root translation, robot root
    quaternion, partner upper-body params (each frame-major).
    """

    def __init__(self, problem: RetargetProblem, config: RetargetConfig):
        self.problem = problem
        self.config = config
        robot = problem.robot_skeleton
        partner = problem.partner_motion.skeleton
        source = problem.source_motion.skeleton
        for skel in (robot, partner, source):
            for role in config.keypoint_roles:
                skel.role_index(role)  # raises naming the missing role

        self.robot_kp = [robot.role_index(r) for r in config.keypoint_roles]
        partner_kp = [partner.role_index(r) for r in config.keypoint_roles]
        source_kp = [source.role_index(r) for r in config.keypoint_roles]
        self.partner_kp = partner_kp

        self.ua_joints = [partner.role_index(r) for r in config.upper_body_roles]
        self.ua_cols = _role_param_columns(partner, config.upper_body_roles)
        require(len(self.ua_cols) > 0, "partner upper-body joints expose no parameters")

        self.T = problem.num_frames
        self.d_robot = robot.dof_count
        self.d_ua = len(self.ua_cols)

        # Original-pair geometry: partner keypoints first, then source-agent
        # keypoints (the robot replaces the source agent in the optimized pair).
        partner_pos = problem.partner_motion.joint_positions()
        source_pos = problem.source_motion.joint_positions()
        orig_points = np.concatenate([partner_pos[:, partner_kp], source_pos[:, source_kp]], axis=1)
        self.orig_matrices = distance_matrices(orig_points)
        self.ua_original = partner_pos[:, self.ua_joints]

        self.partner_base = problem.partner_motion.joint_params
        self.partner_root_pos = problem.partner_motion.root_pos
        self.partner_root_quat = problem.partner_motion.root_quat

        robot_lower, robot_upper = robot.limit_bounds()
        partner_lower, partner_upper = partner.limit_bounds()
        n_flat = self.T * (self.d_robot + 7 + self.d_ua)
        lower = np.full(n_flat, -np.inf)
        upper = np.full(n_flat, np.inf)
        n_q = self.T * self.d_robot
        lower[:n_q] = np.tile(robot_lower, self.T)
        upper[:n_q] = np.tile(robot_upper, self.T)
        n_pose = self.T * 7
        lower[n_q + n_pose :] = np.tile(partner_lower[self.ua_cols], self.T)
        upper[n_q + n_pose :] = np.tile(partner_upper[self.ua_cols], self.T)
        self.flat_lower = lower
        self.flat_upper = upper

    def unpack(self, flat: np.ndarray) -> RetargetState:
        return RetargetState.from_flat(flat, self.T, self.d_robot, self.d_ua)

    def clamp(self, flat: np.ndarray) -> np.ndarray:
        return np.clip(flat, self.flat_lower, self.flat_upper)

    def _partner_params(self, ua: np.ndarray) -> np.ndarray:
        params = self.partner_base.copy()
        params[:, self.ua_cols] = ua
        return params

    def partner_positions(self, ua: np.ndarray) -> np.ndarray:
        positions, _ = fk_forward(
            self.problem.partner_motion.skeleton,
            self._partner_params(ua),
            self.partner_root_pos,
            self.partner_root_quat,
        )
        return positions

    def value_and_grad(self, state: RetargetState, w_con: float) -> tuple[float, dict, np.ndarray]:
        problem, config = self.problem, self.config
        robot_pos, robot_cache = fk_forward(
            problem.robot_skeleton, state.joint_params, state.root_pos, state.root_quat
        )
        partner_pos, partner_cache = fk_forward(
            problem.partner_motion.skeleton,
            self._partner_params(state.partner_ua),
            self.partner_root_pos,
            self.partner_root_quat,
        )

        kin = loss_kin(robot_pos, problem.reshaped_target, problem.kin_mask)
        grad_robot_pos = config.w_kin * loss_kin_grad(robot_pos, problem.reshaped_target, problem.kin_mask)
        grad_partner_pos = np.zeros_like(partner_pos)

        n_partner_kp = len(self.partner_kp)
        opt_points = np.concatenate(
            [partner_pos[:, self.partner_kp], robot_pos[:, self.robot_kp]], axis=1
        )
        con, grad_points = loss_con_value_and_grad(opt_points, self.orig_matrices)
        if w_con != 0.0:
            np.add.at(grad_partner_pos, (slice(None), self.partner_kp), w_con * grad_points[:, :n_partner_kp])
            np.add.at(grad_robot_pos, (slice(None), self.robot_kp), w_con * grad_points[:, n_partner_kp:])

        ua_pos = partner_pos[:, self.ua_joints]
        hum = loss_hum(ua_pos, self.ua_original)
        np.add.at(
            grad_partner_pos,
            (slice(None), self.ua_joints),
            config.w_hum * loss_hum_grad(ua_pos, self.ua_original),
        )

        temp = loss_temp(state.joint_params, config.w_accel)
        pose = loss_pose(state.joint_params)

        g_q, g_root_pos, g_root_quat = fk_backward(problem.robot_skeleton, robot_cache, grad_robot_pos)
        g_q += config.w_temp * loss_temp_grad(state.joint_params, config.w_accel)
        g_q += config.w_pose * loss_pose_grad(state.joint_params)
        g_partner_params, _, _ = fk_backward(
            problem.partner_motion.skeleton, partner_cache, grad_partner_pos
        )
        g_ua = g_partner_params[:, self.ua_cols]

        components = {"kin": kin, "con": con, "hum": hum, "temp": temp, "pose": pose}
        total = (
            config.w_kin * kin
            + w_con * con
            + config.w_hum * hum
            + config.w_temp * temp
            + config.w_pose * pose
        )
        grad_flat = np.concatenate(
            [g_q.ravel(), g_root_pos.ravel(), g_root_quat.ravel(), g_ua.ravel()]
        )
        return total, components, grad_flat

    def value(self, state: RetargetState, w_con: float) -> tuple[float, dict]:
        """Forward-only evaluation (no gradient bookkeeping)."""
        problem, config = self.problem, self.config
        robot_pos, _ = fk_forward(
            problem.robot_skeleton, state.joint_params, state.root_pos, state.root_quat
        )
        partner_pos, _ = fk_forward(
            problem.partner_motion.skeleton,
            self._partner_params(state.partner_ua),
            self.partner_root_pos,
            self.partner_root_quat,
        )
        kin = loss_kin(robot_pos, problem.reshaped_target, problem.kin_mask)
        opt_points = np.concatenate(
            [partner_pos[:, self.partner_kp], robot_pos[:, self.robot_kp]], axis=1
        )
        con = loss_con(distance_matrices(opt_points), self.orig_matrices)
        hum = loss_hum(partner_pos[:, self.ua_joints], self.ua_original)
        temp = loss_temp(state.joint_params, config.w_accel)
        pose = loss_pose(state.joint_params)
        components = {"kin": kin, "con": con, "hum": hum, "temp": temp, "pose": pose}
        total = (
            config.w_kin * kin
            + w_con * con
            + config.w_hum * hum
            + config.w_temp * temp
            + config.w_pose * pose
        )
        return total, components


def total_loss(problem: RetargetProblem, state: RetargetState, config: RetargetConfig, w_con: float | None = None):
    """Weighted total and unweighted components at a state. ``w_con`` defaults
    to the stage-1 contact weight."""
    objective = RetargetObjective(problem, config)
    return objective.value(state, config.w_con_stage1 if w_con is None else w_con)


def gradient(problem: RetargetProblem, state: RetargetState, config: RetargetConfig, w_con: float | None = None) -> np.ndarray:
    """Exact gradient of the weighted total over the flat decision vector."""
    objective = RetargetObjective(problem, config)
    _, _, grad = objective.value_and_grad(state, config.w_con_stage1 if w_con is None else w_con)
    return grad


def initial_state(problem: RetargetProblem, config: RetargetConfig) -> RetargetState:
    """Warm initialization inside the kinematic-similarity basin.

    Robot joints copy the source agent's parameters wherever a same-role
    joint with the same DoF kind exists (clipped to robot limits); the root
    pose copies the source root. Partner upper-body parameters start at
    their original values.
    """
    robot = problem.robot_skeleton
    source_skel = problem.source_motion.skeleton
    T = problem.num_frames
    q = np.zeros((T, robot.dof_count))
    lower, upper = robot.limit_bounds()
    for role, r_idx in robot.roles.items():
        if role not in source_skel.roles:
            continue
        s_idx = source_skel.roles[role]
        r_joint = robot.joints[r_idx]
        s_joint = source_skel.joints[s_idx]
        if r_joint.dof != s_joint.dof or r_joint.num_params == 0:
            continue
        r_sl = robot.param_slice(r_idx)
        s_sl = source_skel.param_slice(s_idx)
        q[:, r_sl] = problem.source_motion.joint_params[:, s_sl]
    q = np.clip(q, lower, upper)

    partner_skel = problem.partner_motion.skeleton
    ua_cols = _role_param_columns(partner_skel, config.upper_body_roles)
    return RetargetState(
        joint_params=q,
        root_pos=problem.source_motion.root_pos.copy(),
        root_quat=problem.source_motion.root_quat.copy(),
        partner_ua=problem.partner_motion.joint_params[:, ua_cols].copy(),
    )


def _check_finite(iteration: int, total: float, components: dict) -> None:
    if np.isfinite(total) and all(np.isfinite(v) for v in components.values()):
        return
    for name, value in components.items():
        if not np.isfinite(value):
            raise NumericError(f"non-finite loss at iteration {iteration}: component '{name}' = {value}")
    raise NumericError(f"non-finite total loss at iteration {iteration}: {total}")


def _run_stage(
    objective: RetargetObjective,
    state: RetargetState,
    stage: StageSchedule,
    trace: list,
    first_iteration: int,
) -> RetargetState:
    flat = objective.clamp(state.to_flat())
    adam = Adam(flat.size, lr=stage.lr)
    for k in range(stage.iters):
        iteration = first_iteration + k
        total, components, grad = objective.value_and_grad(objective.unpack(flat), stage.w_con)
        _check_finite(iteration, total, components)
        trace.append({"iteration": iteration, "total": total, **components})
        flat = objective.clamp(adam.step(flat, grad))
    return objective.unpack(flat)


def optimize_stage(
    problem: RetargetProblem,
    init_state: RetargetState,
    stage: StageSchedule,
    config: RetargetConfig | None = None,
) -> tuple[RetargetState, list]:
    """Run one Adam stage (params clamped to limits after every step)."""
    require(stage.iters >= 1, "stage.iters must be >= 1")
    config = config or RetargetConfig()
    objective = RetargetObjective(problem, config)
    trace: list = []
    state = _run_stage(objective, init_state.copy(), stage, trace, first_iteration=1)
    return state, trace


def _state_to_motions(
    objective: RetargetObjective, state: RetargetState, normalize_quat: bool = True
) -> tuple[MotionSequence, MotionSequence]:
    problem = objective.problem
    robot_motion = MotionSequence(
        problem.robot_skeleton,
        state.joint_params,
        state.root_pos,
        quat_normalize(state.root_quat) if normalize_quat else state.root_quat,
        problem.source_motion.fps,
    )
    partner_params = objective._partner_params(state.partner_ua)
    partner_motion = MotionSequence(
        problem.partner_motion.skeleton,
        partner_params,
        objective.partner_root_pos.copy(),
        objective.partner_root_quat.copy(),
        problem.partner_motion.fps,
    )
    return robot_motion, partner_motion


def run_stage1(
    problem: RetargetProblem, config: RetargetConfig | None = None
) -> tuple[MotionSequence, MotionSequence, list]:
    """Stage 1 only (coarse kinematic settling at the moderate contact
    weight). Returns motions that warm-start stage 2 exactly: feeding them
    to :func:`resume_stage2` reproduces the full pipeline bit for bit."""
    config = config or RetargetConfig()
    objective = RetargetObjective(problem, config)
    trace: list = []
    state = _run_stage(objective, initial_state(problem, config), config.stage1(), trace, first_iteration=1)
    # Normalize at the stage boundary so saved stage-1 motions restart
    # from the same raw values the uninterrupted run continues with.
    state.root_quat = quat_normalize(state.root_quat)
    robot_motion, partner_motion = _state_to_motions(objective, state, normalize_quat=False)
    return robot_motion, partner_motion, trace


def _finalize(
    objective: RetargetObjective,
    state: RetargetState,
    trace: list,
    config: RetargetConfig,
) -> RetargetResult:
    state = objective.unpack(objective.clamp(state.to_flat()))
    robot_motion, partner_motion = _state_to_motions(objective, state)
    robot_motion = smooth_motion(robot_motion, config.smooth_kernel, config.smooth_sigma)
    final_state = RetargetState(
        robot_motion.joint_params,
        robot_motion.root_pos,
        robot_motion.root_quat,
        state.partner_ua,
    )
    total, components = objective.value(final_state, config.w_con_stage2)
    return RetargetResult(robot_motion, partner_motion, trace, {"total": total, **components}, config)


def resume_stage2(
    problem: RetargetProblem,
    robot_motion: MotionSequence,
    partner_motion: MotionSequence,
    config: RetargetConfig | None = None,
) -> RetargetResult:
    """Run stage 2 plus post-processing from saved stage-1 motions."""
    config = config or RetargetConfig()
    require(config.stage2_iters >= 1, "resume_stage2 needs stage2_iters >= 1")
    objective = RetargetObjective(problem, config)
    state = RetargetState(
        robot_motion.joint_params.copy(),
        robot_motion.root_pos.copy(),
        robot_motion.root_quat.copy(),
        partner_motion.joint_params[:, objective.ua_cols].copy(),
    )
    trace: list = []
    state = _run_stage(objective, state, config.stage2(), trace, first_iteration=config.stage1_iters + 1)
    return _finalize(objective, state, trace, config)


def run_pair(problem: RetargetProblem, config: RetargetConfig | None = None) -> RetargetResult:
    """Full pipeline: stage 1, warm-started stage 2, clamping, smoothing.

    The loss trace concatenates both stages with a continuous iteration
    index; the final breakdown is evaluated on the smoothed result at the
    stage-2 contact weight.
    """
    config = config or RetargetConfig()
    robot1, partner1, trace1 = run_stage1(problem, config)
    if config.stage2_iters > 0:
        result = resume_stage2(problem, robot1, partner1, config)
        result.loss_trace = trace1 + result.loss_trace
        return result
    objective = RetargetObjective(problem, config)
    state = RetargetState(
        robot1.joint_params.copy(),
        robot1.root_pos.copy(),
        robot1.root_quat.copy(),
        partner1.joint_params[:, objective.ua_cols].copy(),
    )
    return _finalize(objective, state, trace1, config)


def build_problem(
    source_motion: MotionSequence,
    partner_motion: MotionSequence,
    robot_skeleton: Skeleton,
    morphology: MorphologyFit | None = None,
    config: RetargetConfig | None = None,
) -> RetargetProblem:
    """Assemble a problem: fit morphology (unless given), reshape the source,
    and gather per-robot-joint targets through the shared-role correspondence."""
    config = config or RetargetConfig()
    if source_motion.fps != 50.0:
        log.warning("source motion runs at %.1f fps; the published protocol assumes 50", source_motion.fps)
    source_skel = source_motion.skeleton
    if morphology is None:
        morphology = fit_morphology(source_skel, robot_skeleton, seed=config.seed)
    reshaped_full = reshape_motion(source_motion, morphology)

    J = robot_skeleton.num_joints
    T = source_motion.num_frames
    target = np.zeros((T, J, 3))
    mask = np.zeros(J, dtype=bool)
    for role, r_idx in robot_skeleton.roles.items():
        if role in source_skel.roles:
            target[:, r_idx] = reshaped_full[:, source_skel.roles[role]]
            mask[r_idx] = True
    return RetargetProblem(
        source_motion=source_motion,
        partner_motion=partner_motion,
        robot_skeleton=robot_skeleton,
        reshaped_target=target,
        kin_mask=mask,
        morphology=morphology,
    )


class PairRetargeter(BaseEstimator):
    """Estimator facade over the two-stage pipeline.

    Construct with any :class:`RetargetConfig` field as a keyword, call
    ``fit`` on a :class:`RetargetProblem` (or a source/partner/robot triple
    via ``fit_pair``), then read ``robot_motion_``, ``partner_motion_``,
    ``loss_trace_`` and ``final_breakdown_``.
    """

    def __init__(
        self,
        w_kin: float = 1.0,
        w_con_stage1: float = 0.25,
        w_con_stage2: float = 2.5,
        w_hum: float = 0.25,
        w_temp: float = 5.0,
        w_pose: float = 0.02,
        w_accel: float = 1.0,
        stage1_iters: int = 150,
        stage1_lr: float = 0.02,
        stage2_iters: int = 50,
        stage2_lr: float = 0.005,
        smooth_kernel: int = 5,
        smooth_sigma: float = 0.75,
        seed: int = 42,
    ):
        self.w_kin = w_kin
        self.w_con_stage1 = w_con_stage1
        self.w_con_stage2 = w_con_stage2
        self.w_hum = w_hum
        self.w_temp = w_temp
        self.w_pose = w_pose
        self.w_accel = w_accel
        self.stage1_iters = stage1_iters
        self.stage1_lr = stage1_lr
        self.stage2_iters = stage2_iters
        self.stage2_lr = stage2_lr
        self.smooth_kernel = smooth_kernel
        self.smooth_sigma = smooth_sigma
        self.seed = seed

    def config(self) -> RetargetConfig:
        return RetargetConfig(**{k: v for k, v in self.get_params().items()})

    def fit(self, problem: RetargetProblem):
        self.result_ = run_pair(problem, self.config())
        self.robot_motion_ = self.result_.robot_motion
        self.partner_motion_ = self.result_.partner_motion
        self.loss_trace_ = self.result_.loss_trace
        self.final_breakdown_ = self.result_.final_breakdown
        return self

    def fit_pair(
        self,
        source_motion: MotionSequence,
        partner_motion: MotionSequence,
        robot_skeleton: Skeleton,
        morphology: MorphologyFit | None = None,
    ):
        problem = build_problem(source_motion, partner_motion, robot_skeleton, morphology, self.config())
        return self.fit(problem)

    @property
    def result(self) -> RetargetResult:
        if not hasattr(self, "result_"):
            raise NotFittedError("PairRetargeter must be fit before reading results")
        return self.result_


def ablation_config(base: RetargetConfig, variant: str) -> RetargetConfig:
    """Published ablations: 'no_contact' zeroes the contact weight in both
    stages; 'single_stage' collapses the schedule to 200 iterations at the
    stage-1 learning rate with the high contact weight throughout."""
    if variant == "no_contact":
        return replace(base, w_con_stage1=0.0, w_con_stage2=0.0)
    if variant == "single_stage":
        return replace(
            base,
            w_con_stage1=base.w_con_stage2,
            stage1_iters=base.stage1_iters + base.stage2_iters,
            stage2_iters=0,
        )
    raise ValidationError(f"unknown ablation variant '{variant}'")
