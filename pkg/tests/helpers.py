"""Synthetic fixtures shared across the test suite."""

from __future__ import annotations

import numpy as np

from iretarget.kinematics import FIXED, REVOLUTE, SPHERICAL, Joint, MotionSequence, Skeleton

IDENT_Q = np.array([1.0, 0.0, 0.0, 0.0])
FACING_Q = np.array([0.0, 0.0, 0.0, 1.0])  # 180 degrees about z
SIDE_Q = np.array([np.cos(np.pi / 4), 0.0, 0.0, np.sin(np.pi / 4)])  # +90 degrees about z
X, Y, Z = np.eye(3)


def eased(T, t0, t1, lo, hi):
    """Cosine-eased ramp from lo to hi between frames t0..t1, held outside."""
    t = np.arange(T, dtype=float)
    phase = np.clip((t - t0) / max(t1 - t0, 1), 0.0, 1.0)
    return lo + (hi - lo) * 0.5 * (1.0 - np.cos(np.pi * phase))


def static_motion(skeleton, root_pos, root_quat, T, fps=50.0):
    return MotionSequence(
        skeleton,
        np.zeros((T, skeleton.dof_count)),
        np.tile(np.asarray(root_pos, dtype=float), (T, 1)),
        np.tile(np.asarray(root_quat, dtype=float), (T, 1)),
        fps,
    )


# ---------------------------------------------------------------------------
# Identity-retargeting fixture: two identical humans, one walks in from the
# side, their adjacent hands pass through all three contact thresholds, then
# it walks back out. Joint angles stay zero: with the published weights the
# pose/temporal regularizers are only stationary at the rest pose, so this is
# the fixture family for which the source motion is the exact optimum.
# ---------------------------------------------------------------------------

def greeting_pair(skel_partner, skel_source, T=160, far=1.76, near=0.844,
                  ramp=30, margin=0.01, thresholds=(0.2, 0.35, 0.5)):
    """Walk-in / touch / walk-out identity pair with guarded threshold margins.

    The ramp length and contact depth are chosen so every threshold
    crossing happens in the fast part of the eased approach and no frame's
    hand distance sits within ``margin`` of a threshold; small optimization
    drift therefore cannot flip contact labels. The builder asserts the
    margin to catch accidental retuning.
    """
    L = (
        far
        - eased(T, 18, 18 + ramp, 0.0, far - near)
        + eased(T, 100, 100 + ramp, 0.0, far - near)
    )
    d = L - 0.78  # adjacent-hand distance in the perpendicular layout
    worst = min(float(np.abs(d - tau).min()) for tau in thresholds)
    assert worst >= margin, f"fixture margin {worst:.4f} below {margin}"
    partner = static_motion(skel_partner, (0.0, 0.0, 0.95), IDENT_Q, T)
    source_root = np.stack([np.full(T, 0.78), -L, np.full(T, 0.95)], axis=1)
    source = MotionSequence(
        skel_source,
        np.zeros((T, skel_source.dof_count)),
        source_root,
        np.tile(SIDE_Q, (T, 1)),
    )
    return source, partner


# ---------------------------------------------------------------------------
# Height-mismatch handshake fixture: two humans face each other and swing
# their right arms into a handshake; the robot replacing the source agent is
# a humanoid roughly 0.3 m shorter, which breaks the contact under purely
# kinematic retargeting.
# ---------------------------------------------------------------------------

def handshake_pair(skel_partner, skel_source, T=120, reach=2.0, separation=1.15,
                   up=20, hold=45, down=20):
    t0 = 8
    t1, t2 = t0 + up, t0 + up + hold
    t3 = t2 + down

    def motion(skel, x, quat):
        q = np.zeros((T, skel.dof_count))
        sl = skel.param_slice(skel.role_index("right_shoulder"))
        q[:, sl.start + 2] = eased(T, t0, t1, 0.0, reach) - eased(T, t2, t3, 0.0, reach)
        return MotionSequence(skel, q, np.tile([x, 0.0, 0.95], (T, 1)), np.tile(quat, (T, 1)))

    partner = motion(skel_partner, 0.0, IDENT_Q)
    source = motion(skel_source, separation, FACING_Q)
    return source, partner


def contact_window(source, partner, tau=0.2, role_a="right_hand", role_b="right_hand"):
    """Frames where the source pair's hands are within tau of each other."""
    pa = source.joint_positions()[:, source.skeleton.role_index(role_a)]
    pb = partner.joint_positions()[:, partner.skeleton.role_index(role_b)]
    return np.linalg.norm(pa - pb, axis=1) < tau


def hand_pair_distance(motion_a, motion_b, role_a="right_hand", role_b="right_hand"):
    pa = motion_a.joint_positions()[:, motion_a.skeleton.role_index(role_a)]
    pb = motion_b.joint_positions()[:, motion_b.skeleton.role_index(role_b)]
    return np.linalg.norm(pa - pb, axis=1)


# ---------------------------------------------------------------------------
# Small skeletons for the gradient-check fixture (robot D = 12).
# ---------------------------------------------------------------------------

def build_small_robot(name="small_robot"):
    joints = [
        Joint("pelvis", None, (0, 0, 0), dof=FIXED),
        Joint("waist", 0, (0, 0, 0.10), dof=REVOLUTE, axis=Z),
        Joint("chest", 1, (0, 0, 0.15), dof=SPHERICAL),
        Joint("head", 2, (0, 0, 0.18), dof=FIXED),
        Joint("left_shoulder", 2, (0, 0.14, 0.05), dof=SPHERICAL),
        Joint("left_elbow", 4, (0, 0.20, 0), dof=REVOLUTE, axis=Z),
        Joint("left_wrist", 5, (0, 0.18, 0), dof=FIXED),
        Joint("right_shoulder", 2, (0, -0.14, 0.05), dof=SPHERICAL),
        Joint("right_elbow", 7, (0, -0.20, 0), dof=REVOLUTE, axis=Z),
        Joint("right_wrist", 8, (0, -0.18, 0), dof=FIXED),
    ]
    roles = {
        "root": 0,
        "head": 3,
        "left_shoulder": 4,
        "left_elbow": 5,
        "left_wrist": 6,
        "right_shoulder": 7,
        "right_elbow": 8,
        "right_wrist": 9,
    }
    return Skeleton(name, joints, roles)


def build_small_human(name="small_human"):
    """Partner/source skeleton with revolute arms (6 adjustable UA params)."""
    joints = [
        Joint("pelvis", None, (0, 0, 0), dof=FIXED),
        Joint("chest", 0, (0, 0, 0.25), dof=SPHERICAL),
        Joint("head", 1, (0, 0, 0.20), dof=FIXED),
        Joint("left_shoulder", 1, (0, 0.16, 0.05), dof=REVOLUTE, axis=X),
        Joint("left_elbow", 3, (0, 0.22, 0), dof=REVOLUTE, axis=Z),
        Joint("left_wrist", 4, (0, 0.20, 0), dof=REVOLUTE, axis=Y),
        Joint("left_hand", 5, (0, 0.06, 0), dof=FIXED),
        Joint("right_shoulder", 1, (0, -0.16, 0.05), dof=REVOLUTE, axis=X),
        Joint("right_elbow", 7, (0, -0.22, 0), dof=REVOLUTE, axis=Z),
        Joint("right_wrist", 8, (0, -0.20, 0), dof=REVOLUTE, axis=Y),
        Joint("right_hand", 9, (0, -0.06, 0), dof=FIXED),
    ]
    roles = {
        "root": 0,
        "head": 2,
        "left_shoulder": 3,
        "left_elbow": 4,
        "left_wrist": 5,
        "left_hand": 6,
        "right_shoulder": 7,
        "right_elbow": 8,
        "right_wrist": 9,
        "right_hand": 10,
    }
    return Skeleton(name, joints, roles)


def random_motion(skeleton, T, rng, angle_scale=0.3, fps=50.0):
    quat = rng.normal(size=(T, 4))
    quat /= np.linalg.norm(quat, axis=1, keepdims=True)
    return MotionSequence(
        skeleton,
        rng.uniform(-angle_scale, angle_scale, (T, skeleton.dof_count)),
        rng.uniform(-0.5, 0.5, (T, 3)),
        quat,
        fps,
    )


def gradient_check_problem(T=8, seed=11):
    """T=8 problem with a 12-DoF robot for finite-difference sweeps."""
    from iretarget.retarget import build_problem

    rng = np.random.default_rng(seed)
    source = random_motion(build_small_human("fd_source"), T, rng)
    partner = random_motion(build_small_human("fd_partner"), T, rng)
    robot = build_small_robot()
    assert robot.dof_count == 12
    return build_problem(source, partner, robot), rng
