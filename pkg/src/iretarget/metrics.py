"""Retargeting evaluation suite.

Eighteen numbers per retargeted pair: joint position error against the
reshaped source, average workspace distance over the interaction-joint
distance matrices, contact precision/recall/F1/accuracy at the three
thresholds (0.2 / 0.35 / 0.5 m, optimal left/right hand matching,
micro-averaged over frames x hands), large-angle ratio and angle standard
deviation, and jerk mean/std from third-order finite differences at the
sequence frame rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .kinematics import INTERACTION_ROLES, MotionSequence
from .tracks import AgentTrack, as_track
from .validation import as_float_array, require, require_roles, require_same_shape

CONTACT_THRESHOLDS = (0.2, 0.35, 0.5)


@dataclass
class ContactStats:
    precision: float
    recall: float
    f1: float
    accuracy: float
    tp: int
    fp: int
    fn: int
    tn: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class MetricsReport:
    jpe: float
    awd: float
    contact: dict  # threshold -> ContactStats
    large_angle_ratio: float
    angle_std: float
    jerk_mean: float
    jerk_std: float

    def to_dict(self) -> dict:
        out = {
            "jpe": self.jpe,
            "awd": self.awd,
            "large_angle_ratio": self.large_angle_ratio,
            "angle_std": self.angle_std,
            "jerk_mean": self.jerk_mean,
            "jerk_std": self.jerk_std,
            "contact": {str(tau): stats.to_dict() for tau, stats in self.contact.items()},
        }
        return out

    def flat_row(self) -> dict:
        """Single CSV-friendly row; contact columns are suffixed with the threshold."""
        row = {
            "jpe": self.jpe,
            "awd": self.awd,
            "large_angle_ratio": self.large_angle_ratio,
            "angle_std": self.angle_std,
            "jerk_mean": self.jerk_mean,
            "jerk_std": self.jerk_std,
        }
        for tau, stats in self.contact.items():
            key = f"{tau:g}"
            for name, value in stats.to_dict().items():
                row[f"{name}_at_{key}"] = value
        return row


def compute_jpe(robot_positions: np.ndarray, reshaped: np.ndarray, mask: np.ndarray | None = None) -> float:
    """Mean L2 distance between robot joints and the reshaped source joints."""
    robot_positions = as_float_array(robot_positions, "robot_positions")
    reshaped = as_float_array(reshaped, "reshaped")
    require_same_shape(robot_positions, reshaped, "robot_positions", "reshaped")
    diff = robot_positions - reshaped
    if mask is not None:
        diff = diff[:, mask]
    return float(np.mean(np.linalg.norm(diff, axis=-1)))


def interaction_keypoints(track: AgentTrack, roles=INTERACTION_ROLES) -> np.ndarray:
    """Gather the named interaction joints (head, shoulders, elbows, wrists
    by default) into a (T, K, 3) stack."""
    require_roles(track.roles, [r for r in roles if r != "root"], owner="track")
    idx = [track.roles[r] for r in roles if r != "root"]
    return track.positions[:, idx]


def _full_matrices(points_a: np.ndarray, points_b: np.ndarray) -> np.ndarray:
    stacked = np.concatenate([points_a, points_b], axis=1)
    diff = stacked[:, :, None, :] - stacked[:, None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def compute_awd(orig_pair: tuple, retargeted_pair: tuple) -> float:
    """Mean absolute difference between the full pairwise distance matrices
    of the original pair and the retargeted pair, averaged over frames.

    Each pair is (initiator_keypoints, responder_keypoints) as (T, K, 3);
    responder means the source agent originally, the robot after retargeting.
    """
    d_orig = _full_matrices(*[as_float_array(p, "orig keypoints") for p in orig_pair])
    d_new = _full_matrices(*[as_float_array(p, "retargeted keypoints") for p in retargeted_pair])
    require_same_shape(d_orig, d_new, "original matrices", "retargeted matrices")
    _assert_distance_stack(d_orig)
    _assert_distance_stack(d_new)
    return float(np.mean(np.abs(d_new - d_orig)))


def _assert_distance_stack(matrices: np.ndarray) -> None:
    if not np.allclose(matrices, matrices.transpose(0, 2, 1)):
        raise ValidationError("distance matrices are not symmetric")
    if not np.allclose(np.diagonal(matrices, axis1=1, axis2=2), 0.0):
        raise ValidationError("distance matrices have nonzero diagonal")


def classify_contacts(hands_a: np.ndarray, hands_b: np.ndarray, tau: float) -> np.ndarray:
    """Per-frame contact labels for the two hand pairs under optimal matching.

    ``hands_*`` are (T, 2, 3) stacks ordered [left, right]. For each frame
    the matching {(L,L),(R,R)} or {(L,R),(R,L)} with the smaller summed
    distance is selected, then each matched pair is thresholded at ``tau``.
    Output (T, 2) booleans; entry 0 is the pair containing agent A's left
    hand, entry 1 its right hand.
    """
    hands_a = as_float_array(hands_a, "hands_a", (None, 2, 3))
    hands_b = as_float_array(hands_b, "hands_b", (None, 2, 3))
    require_same_shape(hands_a, hands_b, "hands_a", "hands_b")
    require(tau > 0, "tau must be positive")
    d = np.linalg.norm(hands_a[:, :, None, :] - hands_b[:, None, :, :], axis=-1)  # (T, 2, 2)
    straight = d[:, 0, 0] + d[:, 1, 1]
    crossed = d[:, 0, 1] + d[:, 1, 0]
    use_straight = straight <= crossed
    matched = np.where(
        use_straight[:, None],
        np.stack([d[:, 0, 0], d[:, 1, 1]], axis=1),
        np.stack([d[:, 0, 1], d[:, 1, 0]], axis=1),
    )
    return matched < tau


def contact_metrics(gt_labels: np.ndarray, pred_labels: np.ndarray) -> ContactStats:
    """Micro-averaged precision/recall/F1/accuracy over frames x hand pairs.

    Degenerate conventions: precision is 1 when there are no positive
    predictions and nothing was missed, otherwise 0 when there are no
    positive predictions; recall mirrors this for absent ground truth.
    """
    gt = np.asarray(gt_labels, dtype=bool)
    pred = np.asarray(pred_labels, dtype=bool)
    require_same_shape(gt, pred, "gt_labels", "pred_labels")
    tp = int(np.sum(gt & pred))
    fp = int(np.sum(~gt & pred))
    fn = int(np.sum(gt & ~pred))
    tn = int(np.sum(~gt & ~pred))
    if tp + fp == 0:
        precision = 1.0 if fn == 0 else 0.0
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall = 1.0 if fp == 0 else 0.0
    else:
        recall = tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    accuracy = (tp + tn) / gt.size
    return ContactStats(precision, recall, f1, accuracy, tp, fp, fn, tn)


def plausibility(joint_params: np.ndarray, large_angle: float = 0.5) -> tuple[float, float]:
    """Fraction of joint-angle magnitudes above ``large_angle`` rad, and the
    population standard deviation of the magnitudes."""
    q = as_float_array(joint_params, "joint_params")
    mags = np.abs(q)
    return float(np.mean(mags > large_angle)), float(np.std(mags))


def jerk_stats(positions: np.ndarray, fps: float = 50.0) -> tuple[float, float]:
    """Mean and std of jerk magnitudes from third-order finite differences."""
    positions = as_float_array(positions, "positions")
    if positions.ndim != 3 or positions.shape[0] < 4:
        raise ValidationError("jerk needs a (T>=4, J, 3) position sequence")
    third = np.diff(positions, n=3, axis=0) * fps**3
    mags = np.linalg.norm(third, axis=-1)
    return float(np.mean(mags)), float(np.std(mags))


def full_report(
    source_partner,
    source_actor,
    robot_motion: MotionSequence,
    adjusted_partner,
    reshaped_target: np.ndarray,
    kin_mask: np.ndarray | None = None,
    thresholds=CONTACT_THRESHOLDS,
) -> MetricsReport:
    """Assemble the full metric suite for one retargeted pair.

    Ground-truth contact labels come from the original pair at the same
    threshold as the predictions. Plausibility uses the robot's joint
    angles; jerk uses its joint positions at the motion frame rate.
    """
    partner0 = as_track(source_partner)
    actor0 = as_track(source_actor)
    partner1 = as_track(adjusted_partner)
    robot = as_track(robot_motion)

    robot_positions = robot.positions
    jpe = compute_jpe(robot_positions, reshaped_target, kin_mask)
    awd = compute_awd(
        (interaction_keypoints(partner0), interaction_keypoints(actor0)),
        (interaction_keypoints(partner1), interaction_keypoints(robot)),
    )
    contact = {}
    for tau in thresholds:
        gt = classify_contacts(partner0.hands(), actor0.hands(), tau)
        pred = classify_contacts(partner1.hands(), robot.hands(), tau)
        contact[tau] = contact_metrics(gt, pred)
    large_angle_ratio, angle_std = plausibility(robot_motion.joint_params)
    jerk_mean, jerk_std = jerk_stats(robot_positions, robot_motion.fps)
    return MetricsReport(jpe, awd, contact, large_angle_ratio, angle_std, jerk_mean, jerk_std)
