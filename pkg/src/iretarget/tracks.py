"""Position tracks with semantic roles.

Metrics and detectors work on world-space joint positions regardless of
whether they came from forward kinematics or a capture file; AgentTrack is
that common currency: a (T, J, 3) array plus a role -> column map.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kinematics import MotionSequence
from .validation import as_float_array, require, require_roles

#: Role vocabulary detectors and metrics may resolve.
ROLE_NAMES = (
    "root",
    "head",
    "torso",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hand",
    "right_hand",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
    "left_toe",
    "right_toe",
)


@dataclass
class AgentTrack:
    """World positions of one agent's joints over time, with semantic roles."""

    positions: np.ndarray  # (T, J, 3)
    roles: dict = field(default_factory=dict)

    def __post_init__(self):
        self.positions = as_float_array(self.positions, "positions")
        require(self.positions.ndim == 3 and self.positions.shape[2] == 3,
                f"positions must be (T, J, 3), got {self.positions.shape}")
        for role, idx in self.roles.items():
            require(0 <= idx < self.positions.shape[1],
                    f"role '{role}' maps to invalid joint column {idx}")

    @classmethod
    def from_motion(cls, motion: MotionSequence) -> "AgentTrack":
        return cls(motion.joint_positions(), dict(motion.skeleton.roles))

    @classmethod
    def from_positions(cls, positions, joint_names=None, roles=None) -> "AgentTrack":
        """Build from a raw array; role columns are inferred from joint names
        that match the role vocabulary unless given explicitly."""
        if roles is None:
            roles = {}
            if joint_names is not None:
                for idx, name in enumerate(joint_names):
                    if name in ROLE_NAMES:
                        roles[name] = idx
        return cls(positions, roles)

    @property
    def num_frames(self) -> int:
        return self.positions.shape[0]

    def get(self, role: str) -> np.ndarray:
        require_roles(self.roles, [role], owner="track")
        return self.positions[:, self.roles[role]]

    def hands(self) -> np.ndarray:
        """(T, 2, 3) stack of [left_hand, right_hand] positions."""
        require_roles(self.roles, ["left_hand", "right_hand"], owner="track")
        return self.positions[:, [self.roles["left_hand"], self.roles["right_hand"]]]


def as_track(agent) -> AgentTrack:
    if isinstance(agent, AgentTrack):
        return agent
    if isinstance(agent, MotionSequence):
        return AgentTrack.from_motion(agent)
    raise TypeError(f"expected AgentTrack or MotionSequence, got {type(agent).__name__}")
