"""Built-in skeleton definitions.

``build_human`` is a simplified capture-style skeleton (spherical joints,
T-pose rest, ~1.7 m) and ``build_humanoid`` a 29-DoF revolute humanoid in
the same rest convention (~1.3 m). Coordinates: x forward, y left, z up.

Both carry the full role vocabulary, so the default 16-pair correspondence
(root, hips, knees, ankles, shoulders, elbows, hands, head, toes) resolves
between any two of them.
"""

from __future__ import annotations

import numpy as np

from .kinematics import FIXED, REVOLUTE, SPHERICAL, Joint, Skeleton

#: Role-to-role pairs used by default when fitting one morphology to another.
CORRESPONDENCE_16 = tuple(
    (role, role)
    for role in (
        "root",
        "left_hip",
        "left_knee",
        "left_ankle",
        "right_hip",
        "right_knee",
        "right_ankle",
        "left_shoulder",
        "left_elbow",
        "left_hand",
        "right_shoulder",
        "right_elbow",
        "right_hand",
        "head",
        "left_toe",
        "right_toe",
    )
)

X, Y, Z = np.eye(3)


def build_human(name: str = "human", scale: float = 1.0) -> Skeleton:
    """Capture-style skeleton with spherical joints (48 DoF)."""
    s = float(scale)

    def j(jname, parent, offset, dof=SPHERICAL):
        return Joint(jname, parent, np.asarray(offset) * s, dof=dof)

    joints = [
        Joint("pelvis", None, (0.0, 0.0, 0.0), dof=FIXED),
        j("spine1", 0, (0.0, 0.0, 0.12)),
        j("spine2", 1, (0.0, 0.0, 0.13)),
        j("neck", 2, (0.0, 0.0, 0.15)),
        j("head", 3, (0.0, 0.0, 0.12)),
        j("left_shoulder", 2, (0.0, 0.18, 0.10)),
        j("left_elbow", 5, (0.0, 0.27, 0.0)),
        j("left_wrist", 6, (0.0, 0.25, 0.0)),
        j("left_hand", 7, (0.0, 0.08, 0.0), dof=FIXED),
        j("right_shoulder", 2, (0.0, -0.18, 0.10)),
        j("right_elbow", 9, (0.0, -0.27, 0.0)),
        j("right_wrist", 10, (0.0, -0.25, 0.0)),
        j("right_hand", 11, (0.0, -0.08, 0.0), dof=FIXED),
        j("left_hip", 0, (0.0, 0.09, -0.05)),
        j("left_knee", 13, (0.0, 0.0, -0.42)),
        j("left_ankle", 14, (0.0, 0.0, -0.40)),
        j("left_toe", 15, (0.14, 0.0, -0.06), dof=FIXED),
        j("right_hip", 0, (0.0, -0.09, -0.05)),
        j("right_knee", 17, (0.0, 0.0, -0.42)),
        j("right_ankle", 18, (0.0, 0.0, -0.40)),
        j("right_toe", 19, (0.14, 0.0, -0.06), dof=FIXED),
    ]
    roles = {
        "root": 0,
        "head": 4,
        "left_shoulder": 5,
        "left_elbow": 6,
        "left_wrist": 7,
        "left_hand": 8,
        "right_shoulder": 9,
        "right_elbow": 10,
        "right_wrist": 11,
        "right_hand": 12,
        "left_hip": 13,
        "left_knee": 14,
        "left_ankle": 15,
        "left_toe": 16,
        "right_hip": 17,
        "right_knee": 18,
        "right_ankle": 19,
        "right_toe": 20,
    }
    return Skeleton(name, joints, roles)


def build_humanoid(name: str = "humanoid", scale: float = 1.0) -> Skeleton:
    """29-DoF revolute humanoid: 3 waist + 2x7 arm + 2x6 leg joints.

    The flat parameter layout (29 values) matches the joint-target block of
    the 36-D reference action used by the scheduler.
    """
    s = float(scale)

    def rj(jname, parent, offset, axis, limits):
        return Joint(
            jname, parent, np.asarray(offset) * s, dof=REVOLUTE, axis=axis,
            limits=np.asarray([limits]),
        )

    def fj(jname, parent, offset):
        return Joint(jname, parent, np.asarray(offset) * s, dof=FIXED)

    wide = (-2.9, 2.9)
    joints = [
        fj("pelvis", None, (0.0, 0.0, 0.0)),
        rj("waist_yaw", 0, (0.0, 0.0, 0.07), Z, (-2.6, 2.6)),
        rj("waist_roll", 1, (0.0, 0.0, 0.0), X, (-0.5, 0.5)),
        rj("waist_pitch", 2, (0.0, 0.0, 0.0), Y, (-0.5, 0.5)),
        fj("torso", 3, (0.0, 0.0, 0.12)),
        fj("head", 4, (0.0, 0.0, 0.22)),
        # left arm
        rj("left_shoulder_pitch", 4, (0.0, 0.10, 0.14), Y, wide),
        rj("left_shoulder_roll", 6, (0.0, 0.0, 0.0), X, (-1.6, 2.3)),
        rj("left_shoulder_yaw", 7, (0.0, 0.0, 0.0), Z, wide),
        rj("left_elbow", 8, (0.0, 0.20, 0.0), Z, (-1.0, 2.1)),
        rj("left_wrist_roll", 9, (0.0, 0.17, 0.0), Y, (-1.9, 1.9)),
        rj("left_wrist_pitch", 10, (0.0, 0.0, 0.0), X, (-1.6, 1.6)),
        rj("left_wrist_yaw", 11, (0.0, 0.0, 0.0), Z, (-1.6, 1.6)),
        fj("left_hand", 12, (0.0, 0.06, 0.0)),
        # right arm
        rj("right_shoulder_pitch", 4, (0.0, -0.10, 0.14), Y, wide),
        rj("right_shoulder_roll", 14, (0.0, 0.0, 0.0), X, (-2.3, 1.6)),
        rj("right_shoulder_yaw", 15, (0.0, 0.0, 0.0), Z, wide),
        rj("right_elbow", 16, (0.0, -0.20, 0.0), Z, (-2.1, 1.0)),
        rj("right_wrist_roll", 17, (0.0, -0.17, 0.0), Y, (-1.9, 1.9)),
        rj("right_wrist_pitch", 18, (0.0, 0.0, 0.0), X, (-1.6, 1.6)),
        rj("right_wrist_yaw", 19, (0.0, 0.0, 0.0), Z, (-1.6, 1.6)),
        fj("right_hand", 20, (0.0, -0.06, 0.0)),
        # left leg
        rj("left_hip_pitch", 0, (0.0, 0.065, -0.06), Y, wide),
        rj("left_hip_roll", 22, (0.0, 0.0, 0.0), X, (-0.5, 2.9)),
        rj("left_hip_yaw", 23, (0.0, 0.0, 0.0), Z, wide),
        rj("left_knee", 24, (0.0, 0.0, -0.30), Y, (-0.1, 2.8)),
        rj("left_ankle_pitch", 25, (0.0, 0.0, -0.30), Y, (-0.9, 0.5)),
        rj("left_ankle_roll", 26, (0.0, 0.0, 0.0), X, (-0.3, 0.3)),
        fj("left_toe", 27, (0.10, 0.0, -0.04)),
        # right leg
        rj("right_hip_pitch", 0, (0.0, -0.065, -0.06), Y, wide),
        rj("right_hip_roll", 29, (0.0, 0.0, 0.0), X, (-2.9, 0.5)),
        rj("right_hip_yaw", 30, (0.0, 0.0, 0.0), Z, wide),
        rj("right_knee", 31, (0.0, 0.0, -0.30), Y, (-0.1, 2.8)),
        rj("right_ankle_pitch", 32, (0.0, 0.0, -0.30), Y, (-0.9, 0.5)),
        rj("right_ankle_roll", 33, (0.0, 0.0, 0.0), X, (-0.3, 0.3)),
        fj("right_toe", 34, (0.10, 0.0, -0.04)),
    ]
    roles = {
        "root": 0,
        "torso": 4,
        "head": 5,
        "left_shoulder": 6,
        "left_elbow": 9,
        "left_wrist": 10,
        "left_hand": 13,
        "right_shoulder": 14,
        "right_elbow": 17,
        "right_wrist": 18,
        "right_hand": 21,
        "left_hip": 22,
        "left_knee": 25,
        "left_ankle": 26,
        "left_toe": 28,
        "right_hip": 29,
        "right_knee": 32,
        "right_ankle": 33,
        "right_toe": 35,
    }
    return Skeleton(name, joints, roles)
