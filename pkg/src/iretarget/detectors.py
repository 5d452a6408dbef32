"""Automated task-success detectors for the six interaction types.

Each detector is a pure function of position tracks and a config carrying
the published thresholds (hug 0.5/0.45/0.4/3, high-five 0.4/1/1000/0.3,
handshake 0.3/10/0.4/1.5/0.15/0.45, wave 0.5/3/0.3/pi4/0.45, bend pi6/5,
fly-kiss 0.3/0.1/5). The outcome carries the success flag plus enough
evidence to recompute it.

The episode dispatcher follows the published input conventions: hug scores
the human's hands against the robot torso/shoulders; handshake and
high-five use both agents' hands; wave, bend and fly-kiss read the tracks
placed in the episode's ``human`` slot, so score a robot-performed gesture
by putting the robot track there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .tracks import AgentTrack, as_track
from .validation import as_float_array, require, require_same_shape

TASKS = ("hug", "handshake", "highfive", "wave", "bend", "flykiss")


def _positive(value, name):
    require(value > 0, f"{name} must be positive")


def _min_frames(value, name):
    require(int(value) >= 1, f"{name} must be >= 1")


@dataclass(frozen=True)
class HugConfig:
    hand_dist: float = 0.5      # max distance between the two hands (double embrace)
    body: float = 0.45          # hand-to-torso threshold
    shoulder: float = 0.4       # hand-to-shoulder threshold (shoulder embrace)
    min_frames: int = 3         # min consecutive embrace frames

    def __post_init__(self):
        _positive(self.hand_dist, "hand_dist")
        _positive(self.body, "body")
        _positive(self.shoulder, "shoulder")
        _min_frames(self.min_frames, "min_frames")


@dataclass(frozen=True)
class HighFiveConfig:
    contact: float = 0.4        # max hand-to-hand distance
    min_approach: int = 1       # min valid contact frames
    max_sustained: int = 1000   # max consecutive contact frames (rules out holding)
    height: float = 0.3         # min hand height above the human root

    def __post_init__(self):
        _positive(self.contact, "contact")
        _min_frames(self.min_approach, "min_approach")
        _min_frames(self.max_sustained, "max_sustained")
        _positive(self.height, "height")


@dataclass(frozen=True)
class HandshakeConfig:
    contact: float = 0.3        # max hand-to-hand contact distance
    min_contact: int = 10       # min (total and consecutive) contact frames
    min_dist: float = 0.4       # min active-hand-to-human-root distance
    max_dist: float = 1.5       # max active-hand-to-human-root distance
    std_contact: float = 0.15   # stability: std of contact distances
    mean_contact: float = 0.45  # stability: mean of contact distances

    def __post_init__(self):
        for name in ("contact", "min_dist", "max_dist", "std_contact", "mean_contact"):
            _positive(getattr(self, name), name)
        _min_frames(self.min_contact, "min_contact")


@dataclass(frozen=True)
class WaveConfig:
    motion_dist: float = 0.5    # min total path of the waving hand
    min_changes: int = 3        # min significant direction changes
    amplitude: float = 0.3      # min peak-to-peak amplitude
    angle: float = np.pi / 4    # planar angle delta counting as a change
    height: float = 0.45        # min hand height above the root
    min_displacement: float = 0.02  # per-step displacement for a change to count

    def __post_init__(self):
        _positive(self.motion_dist, "motion_dist")
        _min_frames(self.min_changes, "min_changes")
        _positive(self.amplitude, "amplitude")
        require(0 < self.angle < np.pi, "angle must lie in (0, pi)")
        _positive(self.height, "height")
        _positive(self.min_displacement, "min_displacement")


@dataclass(frozen=True)
class BendConfig:
    min_angle: float = np.pi / 6  # min lean of the head-root axis from vertical
    min_frames: int = 5           # min frames at or above the angle

    def __post_init__(self):
        require(0 < self.min_angle < np.pi, "min_angle must lie in (0, pi)")
        _min_frames(self.min_frames, "min_frames")


@dataclass(frozen=True)
class FlyKissConfig:
    hand2head: float = 0.3       # max hand-to-head distance (phase A)
    forward_thresh: float = 0.1  # min summed forward projection (phase B)
    min_forward: int = 5         # min consecutive forward-motion frames

    def __post_init__(self):
        _positive(self.hand2head, "hand2head")
        _positive(self.forward_thresh, "forward_thresh")
        _min_frames(self.min_forward, "min_forward")


@dataclass(frozen=True)
class DetectionConfig:
    hug: HugConfig = field(default_factory=HugConfig)
    highfive: HighFiveConfig = field(default_factory=HighFiveConfig)
    handshake: HandshakeConfig = field(default_factory=HandshakeConfig)
    wave: WaveConfig = field(default_factory=WaveConfig)
    bend: BendConfig = field(default_factory=BendConfig)
    flykiss: FlyKissConfig = field(default_factory=FlyKissConfig)


@dataclass
class DetectionOutcome:
    success: bool
    evidence: dict


@dataclass
class Episode:
    """One scored episode: the human-slot track and the robot-slot track."""

    human: AgentTrack
    robot: AgentTrack
    fps: float = 50.0


def max_consecutive_frames(flags) -> int:
    """Length of the longest run of True values."""
    best = run = 0
    for flag in np.asarray(flags, dtype=bool):
        run = run + 1 if flag else 0
        best = max(best, run)
    return best


def _pairwise_hand_distances(hands_a: np.ndarray, hands_b: np.ndarray) -> np.ndarray:
    hands_a = as_float_array(hands_a, "hands_a", (None, 2, 3))
    hands_b = as_float_array(hands_b, "hands_b", (None, 2, 3))
    require_same_shape(hands_a, hands_b, "hands_a", "hands_b")
    return np.linalg.norm(hands_a[:, :, None, :] - hands_b[:, None, :, :], axis=-1)


def detect_hug(
    human_hands: np.ndarray,
    robot_torso: np.ndarray,
    cfg: HugConfig | None = None,
    robot_shoulders: np.ndarray | None = None,
) -> DetectionOutcome:
    """Double, single or shoulder embrace of the robot by the human's hands."""
    cfg = cfg or HugConfig()
    human_hands = as_float_array(human_hands, "human_hands", (None, 2, 3))
    robot_torso = as_float_array(robot_torso, "robot_torso", (human_hands.shape[0], 3))
    h_l, h_r = human_hands[:, 0], human_hands[:, 1]
    d_hands = np.linalg.norm(h_l - h_r, axis=1)
    d_l = np.linalg.norm(h_l - robot_torso, axis=1)
    d_r = np.linalg.norm(h_r - robot_torso, axis=1)

    double_frames = (d_hands < cfg.hand_dist) & (d_l < cfg.body) & (d_r < cfg.body)
    single_frames = (d_l < cfg.body) | (d_r < cfg.body)
    double_run = max_consecutive_frames(double_frames)
    single_run = max_consecutive_frames(single_frames)
    shoulder_run = 0
    if robot_shoulders is not None:
        robot_shoulders = as_float_array(robot_shoulders, "robot_shoulders", (human_hands.shape[0], 2, 3))
        d_sh = np.linalg.norm(human_hands[:, :, None, :] - robot_shoulders[:, None, :, :], axis=-1)
        shoulder_frames = np.any(d_sh < cfg.shoulder, axis=(1, 2))
        shoulder_run = max_consecutive_frames(shoulder_frames)

    double = double_run >= cfg.min_frames
    single = single_run >= cfg.min_frames
    shoulder = shoulder_run >= cfg.min_frames
    return DetectionOutcome(
        success=bool(double or single or shoulder),
        evidence={
            "double_embrace": bool(double),
            "single_embrace": bool(single),
            "shoulder_embrace": bool(shoulder),
            "max_consecutive_double": double_run,
            "max_consecutive_single": single_run,
            "max_consecutive_shoulder": shoulder_run,
        },
    )


def detect_handshake(
    human_hands: np.ndarray,
    robot_hands: np.ndarray,
    human_root: np.ndarray,
    cfg: HandshakeConfig | None = None,
) -> DetectionOutcome:
    """Sustained hand contact at arm's length, with stable contact distance.

    The active hand of a contact frame is the robot-side hand of the
    closest pair; its distance to the human root must stay inside
    [min_dist, max_dist] for the frame to count. Stability uses the
    whole-window std/mean of the min distances over raw contact frames.
    """
    cfg = cfg or HandshakeConfig()
    d = _pairwise_hand_distances(human_hands, robot_hands)
    human_root = as_float_array(human_root, "human_root", (d.shape[0], 3))
    T = d.shape[0]
    flat = d.reshape(T, 4)
    min_idx = np.argmin(flat, axis=1)
    d_min = flat[np.arange(T), min_idx]
    robot_side = min_idx % 2  # column index of the robot hand in the min pair

    contact = d_min < cfg.contact
    active_hand = as_float_array(robot_hands, "robot_hands", (T, 2, 3))[np.arange(T), robot_side]
    d_root = np.linalg.norm(active_hand - human_root, axis=1)
    valid = contact & (d_root >= cfg.min_dist) & (d_root <= cfg.max_dist)
    valid_count = int(valid.sum())
    max_run = max_consecutive_frames(valid)
    contact_phase = valid_count >= cfg.min_contact and max_run >= cfg.min_contact

    d_seq = d_min[contact]
    if d_seq.size:
        seq_std = float(np.std(d_seq))
        seq_mean = float(np.mean(d_seq))
        stability_phase = seq_std < cfg.std_contact and seq_mean < cfg.mean_contact
    else:
        seq_std = seq_mean = float("nan")
        stability_phase = False

    return DetectionOutcome(
        success=bool(contact_phase and stability_phase),
        evidence={
            "contact_phase": bool(contact_phase),
            "stability_phase": bool(stability_phase),
            "valid_contact_count": valid_count,
            "max_consecutive": max_run,
            "contact_distance_std": seq_std,
            "contact_distance_mean": seq_mean,
        },
    )


def detect_highfive(
    human_hands: np.ndarray,
    robot_hands: np.ndarray,
    human_root: np.ndarray,
    cfg: HighFiveConfig | None = None,
) -> DetectionOutcome:
    """Brief raised-hand contact: both contacting hands must sit at least
    ``height`` above the human root, and the contact must not be held past
    ``max_sustained`` consecutive frames."""
    cfg = cfg or HighFiveConfig()
    d = _pairwise_hand_distances(human_hands, robot_hands)
    T = d.shape[0]
    human_root = as_float_array(human_root, "human_root", (T, 3))
    flat = d.reshape(T, 4)
    min_idx = np.argmin(flat, axis=1)
    d_min = flat[np.arange(T), min_idx]
    close = d_min < cfg.contact

    human_z = np.asarray(human_hands)[np.arange(T), min_idx // 2, 2]
    robot_z = np.asarray(robot_hands)[np.arange(T), min_idx % 2, 2]
    floor = human_root[:, 2] + cfg.height
    heights_ok = (human_z >= floor) & (robot_z >= floor)
    valid = close & heights_ok

    count = int(valid.sum())
    run = max_consecutive_frames(valid)
    return DetectionOutcome(
        success=bool(count >= cfg.min_approach and run <= cfg.max_sustained),
        evidence={
            "contact_count": count,
            "max_consecutive": run,
            "min_distance": float(d_min.min()),
        },
    )


def detect_wave(
    human_hands: np.ndarray,
    human_root: np.ndarray,
    cfg: WaveConfig | None = None,
) -> DetectionOutcome:
    """Repeated planar direction changes of the more active hand, with
    sufficient travel, amplitude and height above the root."""
    cfg = cfg or WaveConfig()
    human_hands = as_float_array(human_hands, "human_hands", (None, 2, 3))
    T = human_hands.shape[0]
    human_root = as_float_array(human_root, "human_root", (T, 3))
    require(T >= 2, "wave detection needs at least 2 frames")

    steps = np.diff(human_hands, axis=0)  # (T-1, 2, 3)
    path = np.linalg.norm(steps, axis=2).sum(axis=0)
    active = int(np.argmax(path))
    hand = human_hands[:, active]
    dp = np.diff(hand, axis=0)

    total = float(path[active])
    motion_ok = total > cfg.motion_dist

    theta = np.arctan2(dp[:, 1], dp[:, 0])
    dtheta = np.abs(np.diff(theta))
    dtheta = np.where(dtheta > np.pi, 2 * np.pi - dtheta, dtheta)
    disp = np.linalg.norm(dp, axis=1)
    significant = (disp[1:] >= cfg.min_displacement) & (disp[:-1] >= cfg.min_displacement)
    changes = int(np.sum((dtheta > cfg.angle) & significant))
    changes_ok = changes >= cfg.min_changes

    amplitude = float(np.max(hand.max(axis=0) - hand.min(axis=0)))
    amplitude_ok = amplitude > cfg.amplitude

    height = float(np.max(hand[:, 2] - human_root[:, 2]))
    height_ok = height >= cfg.height

    return DetectionOutcome(
        success=bool(motion_ok and changes_ok and amplitude_ok and height_ok),
        evidence={
            "active_hand": "left" if active == 0 else "right",
            "total_path": total,
            "direction_changes": changes,
            "amplitude": amplitude,
            "hand_height": height,
            "motion_ok": bool(motion_ok),
            "changes_ok": bool(changes_ok),
            "amplitude_ok": bool(amplitude_ok),
            "height_ok": bool(height_ok),
        },
    )


def detect_bend(head: np.ndarray, root: np.ndarray, cfg: BendConfig | None = None) -> DetectionOutcome:
    """Lean of the head-root axis away from vertical, held long enough."""
    cfg = cfg or BendConfig()
    head = as_float_array(head, "head", (None, 3))
    root = as_float_array(root, "root", (head.shape[0], 3))
    v = head - root
    norms = np.linalg.norm(v, axis=1)
    require(np.all(norms > 0), "head and root coincide")
    angles = np.arccos(np.clip(v[:, 2] / norms, -1.0, 1.0))
    above = angles >= cfg.min_angle
    frames_above = int(above.sum())
    max_angle = float(angles.max())
    return DetectionOutcome(
        success=bool(max_angle >= cfg.min_angle and frames_above >= cfg.min_frames),
        evidence={"max_angle": max_angle, "frames_above_threshold": frames_above},
    )


def detect_flykiss(
    human_hands: np.ndarray,
    head: np.ndarray,
    human_root: np.ndarray,
    robot_root: np.ndarray,
    cfg: FlyKissConfig | None = None,
) -> DetectionOutcome:
    """Hand-to-lips proximity followed by a sustained forward hand push
    toward the partner (projections onto the mean root-to-root direction)."""
    cfg = cfg or FlyKissConfig()
    human_hands = as_float_array(human_hands, "human_hands", (None, 2, 3))
    T = human_hands.shape[0]
    head = as_float_array(head, "head", (T, 3))
    human_root = as_float_array(human_root, "human_root", (T, 3))
    robot_root = as_float_array(robot_root, "robot_root", (T, 3))
    require(T >= 2, "fly-kiss detection needs at least 2 frames")

    d_to_head = np.linalg.norm(human_hands - head[:, None, :], axis=2)  # (T, 2)
    min_per_hand = d_to_head.min(axis=0)
    active = 0 if min_per_hand[0] <= min_per_hand[1] else 1
    d_min = float(min_per_hand[active])
    condition_a = d_min <= cfg.hand2head

    direction = np.mean(robot_root, axis=0) - np.mean(human_root, axis=0)
    norm = np.linalg.norm(direction)
    require(norm > 0, "agent roots coincide on average")
    direction = direction / norm
    proj = np.diff(human_hands[:, active], axis=0) @ direction
    forward = proj > 0
    consecutive = max_consecutive_frames(forward)
    total_forward = float(proj[forward].sum())
    condition_b = consecutive >= cfg.min_forward and total_forward >= cfg.forward_thresh

    return DetectionOutcome(
        success=bool(condition_a and condition_b),
        evidence={
            "active_hand": "left" if active == 0 else "right",
            "min_hand_head_distance": d_min,
            "consecutive_forward": consecutive,
            "total_forward_motion": total_forward,
            "proximity_ok": bool(condition_a),
            "forward_ok": bool(condition_b),
        },
    )


def _robot_torso(robot: AgentTrack) -> np.ndarray:
    if "torso" in robot.roles:
        return robot.get("torso")
    return robot.get("root")


def _robot_shoulders(robot: AgentTrack) -> np.ndarray | None:
    if "left_shoulder" in robot.roles and "right_shoulder" in robot.roles:
        return robot.positions[:, [robot.roles["left_shoulder"], robot.roles["right_shoulder"]]]
    return None


def detect(task: str, episode: Episode, cfg: DetectionConfig | None = None) -> DetectionOutcome:
    """Route an episode to its task detector."""
    cfg = cfg or DetectionConfig()
    human = as_track(episode.human)
    robot = as_track(episode.robot)
    if task == "hug":
        return detect_hug(human.hands(), _robot_torso(robot), cfg.hug, _robot_shoulders(robot))
    if task == "handshake":
        return detect_handshake(human.hands(), robot.hands(), human.get("root"), cfg.handshake)
    if task == "highfive":
        return detect_highfive(human.hands(), robot.hands(), human.get("root"), cfg.highfive)
    if task == "wave":
        return detect_wave(human.hands(), human.get("root"), cfg.wave)
    if task == "bend":
        return detect_bend(human.get("head"), human.get("root"), cfg.bend)
    if task == "flykiss":
        return detect_flykiss(
            human.hands(), human.get("head"), human.get("root"), robot.get("root"), cfg.flykiss
        )
    raise ValidationError(f"unknown task '{task}' (expected one of {', '.join(TASKS)})")
