"""Scratch experiment v2: identity + handshake fixture behavior (not shipped)."""
import numpy as np, time
from iretarget import build_human, build_problem, run_pair, RetargetConfig, ablation_config
from iretarget.kinematics import MotionSequence

FACING_Q = np.array([0.0, 0.0, 0.0, 1.0])
IDENT_Q = np.array([1.0, 0.0, 0.0, 0.0])


def eased(T, t0, t1, lo, hi):
    t = np.arange(T, dtype=float)
    phase = np.clip((t - t0) / max(t1 - t0, 1), 0.0, 1.0)
    return lo + (hi - lo) * 0.5 * (1.0 - np.cos(np.pi * phase))


def gentle_reach_pair(skel_a, skel_b, T=140, separation=0.56, theta_max=0.349,
                      t_up0=15, t_up1=50, t_dn0=105, t_dn1=135, far_lift=0.7):
    """Face-to-face pair; agent A swings right arm forward, B swings left arm
    forward; A-right and B-left hands approach along x with controlled gap.
    A's left arm is lifted statically to keep the far hand pair off thresholds."""
    theta = eased(T, t_up0, t_up1, 0.0, theta_max) - eased(T, t_dn0, t_dn1, 0.0, theta_max)

    def motion(skel, x, quat, arm_role, arm_sign, lift_role=None):
        q = np.zeros((T, skel.dof_count))
        sl = skel.param_slice(skel.role_index(arm_role))
        q[:, sl.start + 2] = arm_sign * theta  # z-axis swing
        if lift_role is not None:
            sl2 = skel.param_slice(skel.role_index(lift_role))
            q[:, sl2.start] = far_lift  # x-axis static lift
        root_pos = np.tile([x, 0.0, 0.95], (T, 1))
        return MotionSequence(skel, q, root_pos, np.tile(quat, (T, 1)))

    partner = motion(skel_a, 0.0, IDENT_Q, "right_shoulder", +1.0, lift_role="left_shoulder")
    source = motion(skel_b, separation, FACING_Q, "left_shoulder", -1.0)
    return source, partner


def handshake_pair(skel_a, skel_b, T=120, reach=2.0, separation=1.1,
                   t_up0=10, t_up1=55, t_dn0=90, t_dn1=115):
    def motion(skel, x, quat):
        q = np.zeros((T, skel.dof_count))
        sl = skel.param_slice(skel.role_index("right_shoulder"))
        q[:, sl.start + 2] = eased(T, t_up0, t_up1, 0.0, reach) - eased(T, t_dn0, t_dn1, 0.0, reach)
        root_pos = np.tile([x, 0.0, 0.95], (T, 1))
        return MotionSequence(skel, q, root_pos, np.tile(quat, (T, 1)))

    partner = motion(skel_a, 0.0, IDENT_Q)
    source = motion(skel_b, separation, FACING_Q)
    return source, partner


def pair_hand_distances(ma, mb):
    pa = ma.joint_positions(); pb = mb.joint_positions()
    ra, rb = ma.skeleton.roles, mb.skeleton.roles
    out = {}
    for na, nb in [("right_hand","left_hand"),("right_hand","right_hand"),("left_hand","left_hand"),("left_hand","right_hand")]:
        out[(na,nb)] = np.linalg.norm(pa[:, ra[na]] - pb[:, rb[nb]], axis=1)
    return out


def jpe_of(res, prob):
    rp = res.robot_motion.joint_positions()
    return float(np.mean(np.linalg.norm((rp - prob.reshaped_target)[:, prob.kin_mask], axis=2)))


if __name__ == "__main__":
    human = build_human("human"); partner_skel = build_human("partner")

    # -------- identity fixture --------
    source, partner = gentle_reach_pair(partner_skel, human)
    dd = pair_hand_distances(source, partner)
    near = dd[("left_hand","right_hand")]  # source-left vs partner-right... check all
    for k, v in dd.items():
        print(f"source.{k[0]:10s} vs partner.{k[1]:10s}: min {v.min():.3f} max {v.max():.3f}")
    for tau in (0.2, 0.35, 0.5):
        m = min(np.abs(v - tau).min() for v in dd.values())
        print(f"  min margin to tau={tau}: {m:.4f}")
    prob = build_problem(source, partner, build_human("human"))
    t0=time.time(); res = run_pair(prob); t1=time.time()
    print(f"identity JPE = {jpe_of(res, prob):.2e} m ({t1-t0:.1f} s)")

    # -------- handshake mismatch fixture --------
    source2, partner2 = handshake_pair(partner_skel, human)
    d2 = pair_hand_distances(source2, partner2)[("right_hand","right_hand")]
    window = d2 < 0.2
    print(f"\nhandshake window: {window.sum()} frames, source min d {d2.min():.3f}")
    for s in (0.60, 0.55):
        robot_small = build_human("robot_small", scale=s)
        prob2 = build_problem(source2, partner2, robot_small)
        print(f"scale {s}:")
        for label, cfg in [("full", RetargetConfig()),
                           ("no_contact", ablation_config(RetargetConfig(), "no_contact")),
                           ("single_stage", ablation_config(RetargetConfig(), "single_stage"))]:
            r = run_pair(prob2, cfg)
            pr = r.robot_motion.joint_positions()[:, robot_small.roles["right_hand"]]
            pp = r.partner_motion.joint_positions()[:, partner_skel.roles["right_hand"]]
            dd2 = np.linalg.norm(pr - pp, axis=1)
            hit = np.mean(dd2[window] <= 0.2)
            print(f"  {label:12s} hit {hit*100:5.1f}%  min {dd2[window].min():.3f}  mean {dd2[window].mean():.3f}  JPE {jpe_of(r, prob2):.3f}")
