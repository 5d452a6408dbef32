"""Runtime temporal pipeline around the high-level policy.

Five 36-D anchors per call (29 joint targets + root translation + root
quaternion) at offsets {0, 0.5, 1.0, 1.5, 2.0} s densify into a 100-frame
50 Hz reference via per-channel linear interpolation (quaternion channels
renormalized). Consecutive calls at the 5 Hz cadence are fused on their
overlap with a linear blend; delayed updates hold the last frame and flag
the consumer to tighten root-velocity bounds. Sim-to-real standardization
rewrites preparation/follow-up phases around an untouched act segment, and
the position-to-velocity conversion implements the distance-to-go rule
with active braking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .kinematics import MotionSequence, Skeleton
from .rotations import quat_normalize
from .validation import as_float_array, require

FPS = 50.0
FRAME_DT = 1.0 / FPS
ACTION_DIM = 36
NUM_ANCHORS = 5
ANCHOR_OFFSETS = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
DENSE_FRAMES = 100

JOINT_CHANNELS = slice(0, 29)
TRANS_CHANNELS = slice(29, 32)
QUAT_CHANNELS = slice(32, 36)

# Neutral upper-body configuration used outside the act phase:
# shoulder (pitch/roll/yaw), elbow, wrist — right side mirrors the roll sign.
NEUTRAL_SHOULDER = (0.0, 0.3, 0.0)
NEUTRAL_ELBOW = 1.0
RAMP_FRAMES = 16


@dataclass
class AnchorPlan:
    """One policy emission: call time plus 5 reference vectors."""

    call_time: float
    anchors: np.ndarray  # (5, 36)

    def __post_init__(self):
        self.anchors = as_float_array(self.anchors, "anchors", (NUM_ANCHORS, ACTION_DIM))
        norms = np.linalg.norm(self.anchors[:, QUAT_CHANNELS], axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise ValidationError("anchor quaternions must be unit within 1e-6")

    def anchor_times(self) -> np.ndarray:
        return self.call_time + ANCHOR_OFFSETS


@dataclass
class DenseTrajectory:
    """50 Hz reference frames; densification emits exactly 100 of them."""

    start_time: float
    frames: np.ndarray  # (n, 36)

    def __post_init__(self):
        self.frames = as_float_array(self.frames, "frames")
        require(self.frames.ndim == 2 and self.frames.shape[1] == ACTION_DIM,
                f"frames must be (n, {ACTION_DIM})")
        require(self.frames.shape[0] >= 1, "dense trajectory needs at least one frame")

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def end_time(self) -> float:
        return self.start_time + (self.num_frames - 1) * FRAME_DT

    def frame_times(self) -> np.ndarray:
        return self.start_time + np.arange(self.num_frames) * FRAME_DT


def sample_plan(plan: AnchorPlan, times: np.ndarray) -> np.ndarray:
    """Piecewise-linear interpolant through the anchors, evaluated at
    absolute times (clamped to the anchor span); quaternion channels are
    renormalized after interpolation. Passes through every anchor exactly."""
    times = np.atleast_1d(as_float_array(times, "times"))
    offsets = np.clip(times - plan.call_time, 0.0, ANCHOR_OFFSETS[-1])
    out = np.empty((times.shape[0], ACTION_DIM))
    for channel in range(ACTION_DIM):
        out[:, channel] = np.interp(offsets, ANCHOR_OFFSETS, plan.anchors[:, channel])
    # Snap times that hit an anchor (up to grid float noise) to the anchor
    # vector itself, so anchor passage is exact rather than within rounding.
    nearest = np.rint(offsets / 0.5).astype(int)
    exact = np.abs(offsets - nearest * 0.5) < 1e-9
    if np.any(exact):
        out[exact] = plan.anchors[nearest[exact]]
    out[:, QUAT_CHANNELS] = quat_normalize(out[:, QUAT_CHANNELS])
    return out


def densify(plan: AnchorPlan) -> DenseTrajectory:
    """Interpolate the 5 anchors to the 100-frame 50 Hz reference grid
    {call_time + i/50, i = 0..99}."""
    grid = plan.call_time + np.arange(DENSE_FRAMES) * FRAME_DT
    return DenseTrajectory(plan.call_time, sample_plan(plan, grid))


def fuse_overlaps(prev: DenseTrajectory, next_traj: DenseTrajectory) -> DenseTrajectory:
    """Blend two dense segments over their shared 50 Hz grid.

    The blend weight ramps linearly from the previous trajectory at the
    first overlapping frame to the next one at the last, so the output is
    continuous at both overlap boundaries. Outside the overlap the owning
    trajectory is copied; the result spans the union of both segments.
    """
    shift = (next_traj.start_time - prev.start_time) * FPS
    offset = int(round(shift))
    if abs(shift - offset) > 1e-6:
        raise ValidationError(
            f"dense grids are misaligned: start times differ by {next_traj.start_time - prev.start_time:.6f} s"
        )
    require(offset > 0, "next trajectory must start after the previous one")
    n_overlap = prev.num_frames - offset
    require(n_overlap > 0, "trajectories do not overlap on the 50 Hz grid")
    require(n_overlap <= next_traj.num_frames, "next trajectory ends inside the previous one")

    weights = np.linspace(0.0, 1.0, n_overlap)[:, None] if n_overlap > 1 else np.zeros((1, 1))
    blended = (1.0 - weights) * prev.frames[offset:] + weights * next_traj.frames[:n_overlap]
    blended[:, QUAT_CHANNELS] = quat_normalize(blended[:, QUAT_CHANNELS])
    frames = np.concatenate([prev.frames[:offset], blended, next_traj.frames[n_overlap:]])
    return DenseTrajectory(prev.start_time, frames)


def hold_on_timeout(last: DenseTrajectory, now: float) -> tuple[np.ndarray, bool]:
    """Reference frame for time ``now``; once coverage runs out, the final
    frame is held and the flag asks the consumer to tighten root-velocity
    bounds. Repeated calls with the same arguments are idempotent."""
    idx = int(np.floor((now - last.start_time) * FPS + 1e-9))
    if idx >= last.num_frames:
        return last.frames[-1].copy(), True
    return last.frames[max(idx, 0)].copy(), False


class AnchorScheduler:
    """Single-producer, single-consumer densify/fuse pipeline.

    ``submit`` densifies a plan, fuses it with the retained segment, and
    returns the frames that can no longer change (those before the new
    plan's start). ``reference`` serves the consumer side with hold-last
    semantics; ``flush`` drains the remaining frames.
    """

    def __init__(self):
        self.current: DenseTrajectory | None = None

    def submit(self, plan: AnchorPlan) -> np.ndarray:
        dense = densify(plan)
        if self.current is None:
            self.current = dense
            return np.empty((0, ACTION_DIM))
        fused = fuse_overlaps(self.current, dense)
        split = int(round((dense.start_time - fused.start_time) * FPS))
        finalized = fused.frames[:split]
        self.current = DenseTrajectory(dense.start_time, fused.frames[split:])
        return finalized

    def reference(self, now: float) -> tuple[np.ndarray, bool]:
        require(self.current is not None, "no plan submitted yet")
        return hold_on_timeout(self.current, now)

    def flush(self) -> np.ndarray:
        if self.current is None:
            return np.empty((0, ACTION_DIM))
        frames = self.current.frames
        self.current = None
        return frames


@dataclass(frozen=True)
class PhaseSegmentation:
    """Contiguous preparation / act / follow-up split of [0, total)."""

    act_start: int
    followup_start: int
    total: int

    def __post_init__(self):
        require(0 <= self.act_start < self.followup_start <= self.total,
                "phases must be contiguous, in order, with a nonempty act segment")

    @classmethod
    def from_labels(cls, labels) -> "PhaseSegmentation":
        order = {"preparation": 0, "act": 1, "follow_up": 2}
        codes = []
        for label in labels:
            if label not in order:
                raise ValidationError(f"unknown phase label '{label}'")
            codes.append(order[label])
        codes = np.asarray(codes)
        if np.any(np.diff(codes) < 0):
            raise ValidationError("phase labels must appear in preparation, act, follow_up order")
        act_start = int(np.searchsorted(codes, 1))
        followup_start = int(np.searchsorted(codes, 2))
        return cls(act_start, followup_start, len(codes))

    def labels(self) -> list:
        return (
            ["preparation"] * self.act_start
            + ["act"] * (self.followup_start - self.act_start)
            + ["follow_up"] * (self.total - self.followup_start)
        )


def _arm_chain_segments(skeleton: Skeleton, side: str) -> list[tuple[int, int, int]]:
    """(first_param, param_count, segment_id) for the shoulder/elbow/wrist
    spans of one arm, walking the chain from the shoulder role joint to the
    hand role joint. Segment ids: 0 shoulder, 1 elbow, 2 wrist."""
    shoulder = skeleton.role_index(f"{side}_shoulder")
    elbow = skeleton.role_index(f"{side}_elbow")
    wrist = skeleton.role_index(f"{side}_wrist")
    hand = skeleton.role_index(f"{side}_hand")
    chain = list(reversed(skeleton.chain_to_root(hand)))
    if shoulder not in chain:
        raise ValidationError(f"{side} shoulder is not an ancestor of the {side} hand")
    segments = []
    segment = -1
    for joint in chain[chain.index(shoulder):]:
        if joint == shoulder:
            segment = 0
        elif joint == elbow:
            segment = 1
        elif joint == wrist:
            segment = 2
        sl = skeleton.param_slice(joint)
        if sl.stop > sl.start:
            segments.append((sl.start, sl.stop - sl.start, segment))
    return segments


def neutral_upper_body(skeleton: Skeleton) -> tuple[np.ndarray, np.ndarray]:
    """Neutral arm parameters: shoulder (0, +/-0.3, 0), elbow 1.0, wrist 0.

    Values are laid out along each arm's parameter span in chain order and
    padded with zeros, which reproduces the published numbers exactly on
    the 29-DoF humanoid layout. Returns (columns, values).
    """
    cols: list[int] = []
    vals: list[float] = []
    for side, roll_sign in (("left", 1.0), ("right", -1.0)):
        segment_values = {
            0: [NEUTRAL_SHOULDER[0], roll_sign * NEUTRAL_SHOULDER[1], NEUTRAL_SHOULDER[2]],
            1: [NEUTRAL_ELBOW],
            2: [],
        }
        fill: dict[int, int] = {0: 0, 1: 0, 2: 0}
        for start, count, segment in _arm_chain_segments(skeleton, side):
            values = segment_values[segment]
            for k in range(count):
                cols.append(start + k)
                pos = fill[segment]
                vals.append(values[pos] if pos < len(values) else 0.0)
                fill[segment] += 1
    return np.asarray(cols, dtype=int), np.asarray(vals)


def standardize_phases(
    motion: MotionSequence,
    segmentation: PhaseSegmentation,
    neutral: tuple[np.ndarray, np.ndarray] | None = None,
) -> MotionSequence:
    """Rewrite preparation and follow-up around an untouched act segment.

    Preparation holds the neutral upper body, with its last 16 frames
    ramping linearly into the act's first frame (weights (k+1)/16, so the
    midpoint frame is the arithmetic mean). Follow-up freezes the root and
    lower body at the act's final frame while the upper body ramps back to
    neutral over 16 frames and then holds. Shorter segments ramp over
    whatever frames they have.
    """
    require(segmentation.total == motion.num_frames,
            "segmentation does not cover the motion's frame count")
    cols, neutral_vals = neutral if neutral is not None else neutral_upper_body(motion.skeleton)
    out = motion.copy()
    a0, f0, T = segmentation.act_start, segmentation.followup_start, segmentation.total

    if a0 > 0:
        out.joint_params[:a0, cols] = neutral_vals
        ramp = min(RAMP_FRAMES, a0)
        act_first = motion.joint_params[a0, cols]
        for k in range(ramp):
            w = (k + 1) / ramp
            out.joint_params[a0 - ramp + k, cols] = neutral_vals + w * (act_first - neutral_vals)

    if f0 < T:
        act_last = f0 - 1
        out.root_pos[f0:] = motion.root_pos[act_last]
        out.root_quat[f0:] = motion.root_quat[act_last]
        out.joint_params[f0:] = motion.joint_params[act_last]
        out.joint_params[f0:, cols] = neutral_vals
        ramp = min(RAMP_FRAMES, T - f0)
        act_vals = motion.joint_params[act_last, cols]
        for k in range(ramp):
            w = (k + 1) / ramp
            out.joint_params[f0 + k, cols] = act_vals + w * (neutral_vals - act_vals)
    return out


REFERENCE_SPEED = 0.2    # m/s forward command while distance remains
BRAKE_SPEED = -0.2       # m/s reverse command for active braking
DISTANCE_THRESHOLD = 0.15  # m residual below which braking logic engages
SPEED_THRESHOLD = 0.1    # m/s momentum above which braking is issued


def root_velocity_command(residual_dist: float, current_speed: float) -> float:
    """Distance-to-go conversion of position targets into velocity commands,
    with active braking near the target."""
    if residual_dist > DISTANCE_THRESHOLD:
        return REFERENCE_SPEED
    if current_speed >= SPEED_THRESHOLD:
        return BRAKE_SPEED
    return 0.0
