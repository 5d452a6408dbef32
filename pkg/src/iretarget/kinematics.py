"""Skeleton model, motion containers and differentiable forward kinematics.

A skeleton is a topologically sorted kinematic tree. Joint ``j`` sits at
``p[j] = p[parent] + R_world[parent] @ offset[j]`` and orients its subtree
with ``R_world[j] = R_world[parent] @ R_local(params[j])``, so bone lengths
are invariant under joint angles by construction. ``fk_forward`` /
``fk_backward`` expose the whole-sequence computation together with exact
gradients, which is what the retargeting optimizer consumes.

Quaternions are (w, x, y, z) throughout.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .rotations import (
    axis_angle_to_matrix,
    axis_angle_vjp,
    quat_normalize,
    quat_to_matrix,
    quat_vjp,
    revolute_to_matrix,
    revolute_vjp,
)
from .validation import as_float_array, require

log = logging.getLogger(__name__)

FIXED = "fixed"
REVOLUTE = "revolute"
SPHERICAL = "spherical"

_PARAM_COUNT = {FIXED: 0, REVOLUTE: 1, SPHERICAL: 3}

#: Roles the interaction losses, metrics and detectors resolve on a skeleton.
INTERACTION_ROLES = (
    "root",
    "head",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
)

IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


@dataclass(frozen=True)
class Joint:
    """One node of the kinematic tree.

    ``limits`` has one (min, max) row per parameter of ``dof``; revolute
    joints also carry a unit rotation ``axis``.
    """

    name: str
    parent: int | None
    rest_offset: np.ndarray
    dof: str = SPHERICAL
    axis: np.ndarray | None = None
    limits: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "rest_offset", as_float_array(self.rest_offset, f"{self.name}.rest_offset", (3,)))
        if self.dof not in _PARAM_COUNT:
            raise ValidationError(f"joint '{self.name}': unknown dof kind '{self.dof}'")
        if self.dof == REVOLUTE:
            if self.axis is None:
                raise ValidationError(f"revolute joint '{self.name}' needs an axis")
            axis = as_float_array(self.axis, f"{self.name}.axis", (3,))
            if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
                raise ValidationError(f"joint '{self.name}': axis must have unit norm")
            object.__setattr__(self, "axis", axis)
        n = _PARAM_COUNT[self.dof]
        if self.limits is None or n == 0:
            lim = np.tile([-np.pi, np.pi], (n, 1)).reshape(n, 2)
        else:
            lim = as_float_array(self.limits, f"{self.name}.limits", (n, 2))
        if np.any(lim[:, 0] > lim[:, 1]):
            raise ValidationError(f"joint '{self.name}': limit min exceeds max")
        object.__setattr__(self, "limits", lim)

    @property
    def num_params(self) -> int:
        return _PARAM_COUNT[self.dof]


@dataclass(frozen=True)
class Skeleton:
    """Rooted kinematic tree with rest offsets, DoF specs, limits and roles."""

    name: str
    joints: tuple[Joint, ...]
    roles: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "joints", tuple(self.joints))
        require(len(self.joints) >= 1, "skeleton needs at least one joint")
        for idx, joint in enumerate(self.joints):
            if idx == 0:
                require(joint.parent is None, f"skeleton '{self.name}': first joint must be the root")
            else:
                require(
                    joint.parent is not None and 0 <= joint.parent < idx,
                    f"skeleton '{self.name}': joint '{joint.name}' must have parent index < its own",
                )
        for role, idx in self.roles.items():
            require(
                0 <= idx < len(self.joints),
                f"skeleton '{self.name}': role '{role}' maps to invalid joint index {idx}",
            )
        slices = []
        start = 0
        for joint in self.joints:
            slices.append(slice(start, start + joint.num_params))
            start += joint.num_params
        object.__setattr__(self, "_param_slices", tuple(slices))
        object.__setattr__(self, "_dof_count", start)
        object.__setattr__(self, "_rest_offsets", np.stack([j.rest_offset for j in self.joints]))
        rev = [j for j, joint in enumerate(self.joints) if joint.dof == REVOLUTE]
        sph = [j for j, joint in enumerate(self.joints) if joint.dof == SPHERICAL]
        object.__setattr__(self, "_rev_joints", rev)
        object.__setattr__(self, "_sph_joints", sph)
        object.__setattr__(self, "_rev_cols", np.array([slices[j].start for j in rev], dtype=int))
        object.__setattr__(
            self,
            "_rev_axes",
            np.stack([self.joints[j].axis for j in rev]) if rev else np.zeros((0, 3)),
        )
        sph_cols = []
        for j in sph:
            sph_cols.extend(range(slices[j].start, slices[j].stop))
        object.__setattr__(self, "_sph_cols", np.array(sph_cols, dtype=int))
        lower = np.empty(start)
        upper = np.empty(start)
        for joint, sl in zip(self.joints, slices):
            lower[sl] = joint.limits[:, 0]
            upper[sl] = joint.limits[:, 1]
        object.__setattr__(self, "_lower", lower)
        object.__setattr__(self, "_upper", upper)

    @property
    def num_joints(self) -> int:
        return len(self.joints)

    @property
    def dof_count(self) -> int:
        return self._dof_count

    def param_slice(self, joint_index: int) -> slice:
        return self._param_slices[joint_index]

    def joint_index(self, name: str) -> int:
        for idx, joint in enumerate(self.joints):
            if joint.name == name:
                return idx
        raise ValidationError(f"skeleton '{self.name}' has no joint named '{name}'")

    def role_index(self, role: str) -> int:
        if role not in self.roles:
            raise ValidationError(f"skeleton '{self.name}' is missing required role '{role}'")
        return self.roles[role]

    def limit_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Lower/upper limit vectors over the flat parameter layout, shape (D,)."""
        return self._lower.copy(), self._upper.copy()

    def rest_offsets(self) -> np.ndarray:
        return self._rest_offsets.copy()

    def chain_to_root(self, joint_index: int) -> list[int]:
        chain = []
        idx: int | None = joint_index
        while idx is not None:
            chain.append(idx)
            idx = self.joints[idx].parent
        return chain


@dataclass
class FramePose:
    """Root pose plus flat joint parameters for one frame."""

    root_pos: np.ndarray
    root_quat: np.ndarray
    joint_params: np.ndarray

    def __post_init__(self):
        self.root_pos = as_float_array(self.root_pos, "root_pos", (3,))
        self.root_quat = as_float_array(self.root_quat, "root_quat", (4,))
        self.joint_params = np.atleast_1d(as_float_array(self.joint_params, "joint_params"))
        norm = np.linalg.norm(self.root_quat)
        if abs(norm - 1.0) > 1e-6:
            raise ValidationError(f"root_quat must be unit (|q| - 1 = {norm - 1.0:.2e})")


class MotionSequence:
    """Fixed-rate time series of poses for one agent, stored as arrays."""

    def __init__(self, skeleton: Skeleton, joint_params, root_pos, root_quat, fps: float = 50.0):
        self.skeleton = skeleton
        self.joint_params = as_float_array(joint_params, "joint_params")
        if self.joint_params.ndim == 1:
            self.joint_params = self.joint_params[:, None]
        T = self.joint_params.shape[0]
        require(T >= 1, "motion must have at least one frame")
        if self.joint_params.shape != (T, skeleton.dof_count):
            raise ValidationError(
                f"joint_params shape {self.joint_params.shape} does not match "
                f"skeleton '{skeleton.name}' with {skeleton.dof_count} DoF"
            )
        self.root_pos = as_float_array(root_pos, "root_pos", (T, 3))
        quat = as_float_array(root_quat, "root_quat", (T, 4))
        norms = np.linalg.norm(quat, axis=1)
        deviation = np.abs(norms - 1.0)
        if np.any(deviation > 1e-4):
            raise ValidationError("root_quat norms deviate from 1 by more than 1e-4")
        if np.any(deviation > 1e-6):
            log.warning("renormalizing root quaternions (max deviation %.2e)", deviation.max())
        if np.any(deviation > 1e-12):
            # Conditional so that already-normalized values round-trip bit-exactly.
            quat = quat / norms[:, None]
        self.root_quat = quat
        require(fps > 0, "fps must be positive")
        self.fps = float(fps)

    @classmethod
    def from_frames(cls, skeleton: Skeleton, frames: list[FramePose], fps: float = 50.0) -> "MotionSequence":
        require(len(frames) >= 1, "motion must have at least one frame")
        return cls(
            skeleton,
            np.stack([f.joint_params for f in frames]),
            np.stack([f.root_pos for f in frames]),
            np.stack([f.root_quat for f in frames]),
            fps,
        )

    @property
    def num_frames(self) -> int:
        return self.joint_params.shape[0]

    def frame(self, t: int) -> FramePose:
        return FramePose(self.root_pos[t], self.root_quat[t], self.joint_params[t])

    def joint_positions(self) -> np.ndarray:
        """World positions of every joint at every frame, (T, J, 3)."""
        positions, _ = fk_forward(self.skeleton, self.joint_params, self.root_pos, self.root_quat)
        return positions

    def copy(self) -> "MotionSequence":
        return MotionSequence(
            self.skeleton,
            self.joint_params.copy(),
            self.root_pos.copy(),
            self.root_quat.copy(),
            self.fps,
        )


class FkCache:
    """Intermediate quantities of one forward pass, consumed by fk_backward."""

    __slots__ = ("local_rots", "world_rots", "offsets", "joint_params", "root_quat")

    def __init__(self, local_rots, world_rots, offsets, joint_params, root_quat):
        self.local_rots = local_rots
        self.world_rots = world_rots
        self.offsets = offsets
        self.joint_params = joint_params
        self.root_quat = root_quat


def _local_rotations(skeleton: Skeleton, joint_params: np.ndarray) -> list:
    """Local rotation per joint (None for fixed), computed in two batched
    calls: one over all revolute joints, one over all spherical ones."""
    T = joint_params.shape[0]
    local: list = [None] * skeleton.num_joints
    if skeleton._rev_joints:
        rev_R = revolute_to_matrix(joint_params[:, skeleton._rev_cols], skeleton._rev_axes)
        for i, j in enumerate(skeleton._rev_joints):
            local[j] = rev_R[:, i]
    if skeleton._sph_joints:
        sph_R = axis_angle_to_matrix(joint_params[:, skeleton._sph_cols].reshape(T, -1, 3))
        for i, j in enumerate(skeleton._sph_joints):
            local[j] = sph_R[:, i]
    return local


def fk_forward(
    skeleton: Skeleton,
    joint_params: np.ndarray,
    root_pos: np.ndarray,
    root_quat: np.ndarray,
    bone_scale: np.ndarray | None = None,
) -> tuple[np.ndarray, FkCache]:
    """Batched forward kinematics over a whole sequence.

    ``bone_scale`` optionally rescales each joint's rest offset (the bone
    ending at that joint); morphology reshaping rides on this hook.
    Returns (T, J, 3) world positions plus a cache for the backward pass.
    """
    joint_params = as_float_array(joint_params, "joint_params")
    if joint_params.ndim == 1:
        joint_params = joint_params[:, None]
    T = joint_params.shape[0]
    if joint_params.shape[1] != skeleton.dof_count:
        raise ValidationError(
            f"joint_params has {joint_params.shape[1]} values per frame, "
            f"skeleton '{skeleton.name}' expects {skeleton.dof_count}"
        )
    root_pos = as_float_array(root_pos, "root_pos", (T, 3))
    root_quat = as_float_array(root_quat, "root_quat", (T, 4))

    J = skeleton.num_joints
    offsets = skeleton._rest_offsets
    if bone_scale is not None:
        bone_scale = as_float_array(bone_scale, "bone_scale", (J,))
        offsets = offsets * bone_scale[:, None]

    root_rot = quat_to_matrix(root_quat)
    positions = np.empty((T, J, 3))
    world_rots: list[np.ndarray] = [None] * J
    local_rots = _local_rotations(skeleton, joint_params)

    world_rots[0] = root_rot if local_rots[0] is None else root_rot @ local_rots[0]
    positions[:, 0] = root_pos

    joints = skeleton.joints
    for j in range(1, J):
        parent = joints[j].parent
        parent_rot = world_rots[parent]
        positions[:, j] = positions[:, parent] + parent_rot @ offsets[j]
        local = local_rots[j]
        world_rots[j] = parent_rot if local is None else parent_rot @ local

    cache = FkCache(local_rots, world_rots, offsets, joint_params, root_quat)
    return positions, cache


def fk_backward(
    skeleton: Skeleton,
    cache: FkCache,
    grad_positions: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pull a (T, J, 3) position gradient back onto the pose parameters.

    Returns gradients for joint_params (T, D), root_pos (T, 3) and the raw
    root quaternion (T, 4), the latter including the normalization Jacobian.
    """
    T = cache.joint_params.shape[0]
    J = skeleton.num_joints
    gpos = as_float_array(grad_positions, "grad_positions", (T, J, 3)).copy()
    grot = np.zeros((T, J, 3, 3))
    gparams = np.zeros_like(cache.joint_params)
    n_rev = len(skeleton._rev_joints)
    n_sph = len(skeleton._sph_joints)
    glocal_rev = np.zeros((T, n_rev, 3, 3)) if n_rev else None
    glocal_sph = np.zeros((T, n_sph, 3, 3)) if n_sph else None
    rev_slot = {j: i for i, j in enumerate(skeleton._rev_joints)}
    sph_slot = {j: i for i, j in enumerate(skeleton._sph_joints)}

    def store_glocal(j: int, glocal: np.ndarray) -> None:
        if j in rev_slot:
            glocal_rev[:, rev_slot[j]] = glocal
        else:
            glocal_sph[:, sph_slot[j]] = glocal

    joints = skeleton.joints
    for j in range(J - 1, 0, -1):
        parent = joints[j].parent
        # p_j = p_parent + R_parent @ b_j
        gpos[:, parent] += gpos[:, j]
        grot[:, parent] += gpos[:, j, :, None] * cache.offsets[j][None, None, :]
        local = cache.local_rots[j]
        if local is not None:
            # R_j = R_parent @ R_local
            grot[:, parent] += grot[:, j] @ local.transpose(0, 2, 1)
            store_glocal(j, cache.world_rots[parent].transpose(0, 2, 1) @ grot[:, j])
        else:
            grot[:, parent] += grot[:, j]

    local0 = cache.local_rots[0]
    groot_rot = grot[:, 0]
    if local0 is not None:
        root_rot = quat_to_matrix(cache.root_quat)
        store_glocal(0, root_rot.transpose(0, 2, 1) @ groot_rot)
        groot_rot = groot_rot @ local0.transpose(0, 2, 1)

    if n_rev:
        gparams[:, skeleton._rev_cols] = revolute_vjp(
            cache.joint_params[:, skeleton._rev_cols], skeleton._rev_axes, glocal_rev
        )
    if n_sph:
        gparams[:, skeleton._sph_cols] = axis_angle_vjp(
            cache.joint_params[:, skeleton._sph_cols].reshape(T, -1, 3), glocal_sph
        ).reshape(T, -1)
    groot_quat = quat_vjp(cache.root_quat, groot_rot)
    return gparams, gpos[:, 0], groot_quat


def forward_kinematics(skeleton: Skeleton, pose: FramePose) -> np.ndarray:
    """World position of every joint for a single frame, (J, 3)."""
    if pose.joint_params.shape[0] != skeleton.dof_count:
        raise ValidationError(
            f"pose has {pose.joint_params.shape[0]} joint parameters, "
            f"skeleton '{skeleton.name}' expects {skeleton.dof_count}"
        )
    positions, _ = fk_forward(
        skeleton,
        pose.joint_params[None, :],
        pose.root_pos[None, :],
        pose.root_quat[None, :],
    )
    return positions[0]


def identity_motion(skeleton: Skeleton, num_frames: int, fps: float = 50.0) -> MotionSequence:
    """All-zero parameters, identity root orientation, root at the origin."""
    return MotionSequence(
        skeleton,
        np.zeros((num_frames, skeleton.dof_count)),
        np.zeros((num_frames, 3)),
        np.tile(IDENTITY_QUAT, (num_frames, 1)),
        fps,
    )


def normalized_quat_motion(motion: MotionSequence) -> MotionSequence:
    out = motion.copy()
    out.root_quat = quat_normalize(out.root_quat)
    return out
