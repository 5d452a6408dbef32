import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iretarget.errors import ValidationError
from iretarget.kinematics import (
    FIXED,
    REVOLUTE,
    FramePose,
    Joint,
    MotionSequence,
    Skeleton,
    fk_backward,
    fk_forward,
    forward_kinematics,
    identity_motion,
)
from iretarget.rotations import quat_to_matrix

from helpers import build_small_human, random_motion
from oracles import fd_gradient


def chain_skeleton():
    joints = [
        Joint("root", None, (0, 0, 0), dof=FIXED),
        Joint("a", 0, (0.5, 0, 0), dof=REVOLUTE, axis=(0, 0, 1)),
        Joint("b", 1, (0.4, 0, 0), dof=REVOLUTE, axis=(0, 1, 0)),
        Joint("c", 2, (0.3, 0, 0), dof=FIXED),
    ]
    return Skeleton("chain", joints, {"root": 0})


def identity_pose(skeleton, root_pos=(0, 0, 0)):
    return FramePose(np.asarray(root_pos, dtype=float), np.array([1.0, 0, 0, 0]), np.zeros(skeleton.dof_count))


def test_fk_identity_is_cumulative_offsets():
    skel = chain_skeleton()
    positions = forward_kinematics(skel, identity_pose(skel))
    expected = np.array([[0, 0, 0], [0.5, 0, 0], [0.9, 0, 0], [1.2, 0, 0]])
    np.testing.assert_allclose(positions, expected, atol=1e-15)


def test_fk_translation_equivariance():
    skel = chain_skeleton()
    base = forward_kinematics(skel, identity_pose(skel))
    shifted = forward_kinematics(skel, identity_pose(skel, root_pos=(1, 2, 3)))
    np.testing.assert_allclose(shifted, base + np.array([1.0, 2.0, 3.0]), atol=1e-15)


def test_fk_quarter_turn_child():
    joints = [
        Joint("root", None, (0, 0, 0), dof=REVOLUTE, axis=(0, 0, 1)),
        Joint("tip", 0, (0.7, 0, 0), dof=FIXED),
    ]
    skel = Skeleton("hinge", joints, {"root": 0})
    pose = FramePose(np.zeros(3), np.array([1.0, 0, 0, 0]), np.array([np.pi / 2]))
    positions = forward_kinematics(skel, pose)
    np.testing.assert_allclose(positions[1], [0.0, 0.7, 0.0], atol=1e-12)


def test_fk_root_position_equals_root_pos(rng):
    skel = build_small_human()
    motion = random_motion(skel, 5, rng)
    positions = motion.joint_positions()
    np.testing.assert_array_equal(positions[:, 0], motion.root_pos)


def test_fk_dimension_mismatch_rejected():
    skel = chain_skeleton()
    pose = FramePose(np.zeros(3), np.array([1.0, 0, 0, 0]), np.zeros(5))
    with pytest.raises(ValidationError):
        forward_kinematics(skel, pose)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_fk_rigid_transform_equivariance(seed):
    rng = np.random.default_rng(seed)
    skel = build_small_human()
    q = rng.uniform(-1.0, 1.0, skel.dof_count)
    root_pos = rng.uniform(-1, 1, 3)
    quat = rng.normal(size=4)
    quat /= np.linalg.norm(quat)
    base, _ = fk_forward(skel, q[None], root_pos[None], quat[None])

    g_quat = rng.normal(size=4)
    g_quat /= np.linalg.norm(g_quat)
    g_rot = quat_to_matrix(g_quat[None])[0]
    g_trans = rng.uniform(-1, 1, 3)
    # compose the rigid transform with the root pose
    new_pos = g_rot @ root_pos + g_trans
    w1, x1, y1, z1 = g_quat
    w2, x2, y2, z2 = quat
    new_quat = np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])
    moved, _ = fk_forward(skel, q[None], new_pos[None], new_quat[None])
    np.testing.assert_allclose(moved[0], base[0] @ g_rot.T + g_trans, atol=1e-9)


def test_bone_length_preserved_under_angles(rng):
    skel = build_small_human()
    motion = random_motion(skel, 8, rng, angle_scale=1.2)
    positions = motion.joint_positions()
    offsets = skel.rest_offsets()
    for j in range(1, skel.num_joints):
        parent = skel.joints[j].parent
        lengths = np.linalg.norm(positions[:, j] - positions[:, parent], axis=1)
        np.testing.assert_allclose(lengths, np.linalg.norm(offsets[j]), atol=1e-9)


def test_bone_scale_scales_lengths(rng):
    skel = build_small_human()
    motion = random_motion(skel, 4, rng)
    scale = np.linspace(0.5, 1.5, skel.num_joints)
    positions, _ = fk_forward(skel, motion.joint_params, motion.root_pos, motion.root_quat, bone_scale=scale)
    offsets = skel.rest_offsets()
    for j in range(1, skel.num_joints):
        parent = skel.joints[j].parent
        lengths = np.linalg.norm(positions[:, j] - positions[:, parent], axis=1)
        np.testing.assert_allclose(lengths, scale[j] * np.linalg.norm(offsets[j]), atol=1e-9)


def test_fk_backward_matches_fd(rng):
    skel = build_small_human()
    T = 3
    motion = random_motion(skel, T, rng)
    g_pos = rng.normal(size=(T, skel.num_joints, 3))

    _, cache = fk_forward(skel, motion.joint_params, motion.root_pos, motion.root_quat)
    g_q, g_rp, g_rq = fk_backward(skel, cache, g_pos)

    n_q = T * skel.dof_count
    flat = np.concatenate([motion.joint_params.ravel(), motion.root_pos.ravel(), motion.root_quat.ravel()])

    def f(x):
        q = x[:n_q].reshape(T, -1)
        rp = x[n_q : n_q + 3 * T].reshape(T, 3)
        rq = x[n_q + 3 * T :].reshape(T, 4)
        positions, _ = fk_forward(skel, q, rp, rq)
        return float(np.sum(positions * g_pos))

    numeric = fd_gradient(f, flat.copy())
    analytic = np.concatenate([g_q.ravel(), g_rp.ravel(), g_rq.ravel()])
    np.testing.assert_allclose(analytic, numeric, rtol=1e-6, atol=1e-8)


def test_skeleton_validation():
    with pytest.raises(ValidationError):
        Skeleton("bad", [Joint("a", 0, (0, 0, 0))], {})  # first joint must be root
    with pytest.raises(ValidationError):
        Joint("r", None, (0, 0, 0), dof=REVOLUTE, axis=(0, 0, 2.0))  # non-unit axis
    with pytest.raises(ValidationError):
        Joint("r", None, (0, 0, 0), dof=REVOLUTE, axis=(0, 0, 1), limits=[[1.0, -1.0]])
    with pytest.raises(ValidationError):
        Skeleton("bad", [Joint("root", None, (0, 0, 0), dof=FIXED)], {"head": 3})


def test_frame_pose_quat_norm_enforced():
    with pytest.raises(ValidationError):
        FramePose(np.zeros(3), np.array([1.0, 0.1, 0, 0]), np.zeros(1))


def test_motion_sequence_quat_handling(human):
    T = 3
    quat = np.tile([1.0, 0, 0, 0], (T, 1)) * (1 + 5e-5)
    motion = MotionSequence(human, np.zeros((T, human.dof_count)), np.zeros((T, 3)), quat)
    np.testing.assert_allclose(np.linalg.norm(motion.root_quat, axis=1), 1.0, atol=1e-12)
    with pytest.raises(ValidationError):
        MotionSequence(human, np.zeros((T, human.dof_count)), np.zeros((T, 3)), quat * 1.01)


def test_identity_motion_roundtrip(human):
    motion = identity_motion(human, 4)
    frame = motion.frame(2)
    assert frame.joint_params.shape == (human.dof_count,)
    rebuilt = MotionSequence.from_frames(human, [motion.frame(t) for t in range(4)])
    np.testing.assert_array_equal(rebuilt.joint_params, motion.joint_params)
