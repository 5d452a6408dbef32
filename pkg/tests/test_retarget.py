import numpy as np
import pytest

from iretarget import (
    PairRetargeter,
    RetargetConfig,
    ablation_config,
    build_problem,
    resume_stage2,
    run_pair,
    run_stage1,
)
from iretarget.errors import NumericError, ValidationError
from iretarget.retarget import (
    LOSS_NAMES,
    RetargetObjective,
    StageSchedule,
    initial_state,
    optimize_stage,
)

from helpers import build_small_human, gradient_check_problem, random_motion, static_motion


@pytest.fixture(scope="module")
def small_problem():
    problem, _ = gradient_check_problem(T=8, seed=3)
    return problem


FAST = dict(stage1_iters=10, stage2_iters=5)


def test_config_defaults_follow_publication():
    config = RetargetConfig()
    assert (config.w_kin, config.w_con_stage1, config.w_hum, config.w_temp, config.w_pose) == (
        1.0, 0.25, 0.25, 5.0, 0.02,
    )
    assert config.w_con_stage2 == pytest.approx(10 * config.w_con_stage1)
    assert (config.stage1_iters, config.stage2_iters) == (150, 50)
    assert (config.stage1_lr, config.stage2_lr) == (0.02, 0.005)
    assert (config.smooth_kernel, config.smooth_sigma) == (5, 0.75)
    assert config.seed == 42


def test_config_validation():
    with pytest.raises(ValidationError):
        RetargetConfig(w_kin=-1.0)
    with pytest.raises(ValidationError):
        RetargetConfig(smooth_kernel=4)
    with pytest.raises(ValidationError):
        RetargetConfig(stage1_iters=0)


def test_optimize_stage_monotone_on_quadratic_surrogate(small_problem):
    # Pose-only objective: a pure quadratic bowl. Start far enough inside
    # the limits that 150 Adam steps never overshoot the minimum.
    config = RetargetConfig(w_kin=0.0, w_hum=0.0, w_temp=0.0, w_pose=1.0)
    state = initial_state(small_problem, config)
    state.joint_params = np.full_like(state.joint_params, 3.1)
    state, trace = optimize_stage(small_problem, state, StageSchedule(150, 0.02, 0.0), config)
    totals = [entry["total"] for entry in trace]
    assert len(totals) == 150
    assert all(b < a for a, b in zip(totals, totals[1:]))


def test_optimize_stage_requires_positive_iters(small_problem):
    config = RetargetConfig()
    with pytest.raises(ValidationError):
        optimize_stage(small_problem, initial_state(small_problem, config), StageSchedule(0, 0.02, 0.25), config)


def test_non_finite_loss_aborts_with_diagnostic(small_problem):
    config = RetargetConfig(**FAST)
    state = initial_state(small_problem, config)
    with pytest.raises(NumericError, match=r"iteration \d+"):
        optimize_stage(small_problem, state, StageSchedule(10, 1e200, 0.25), config)


def test_trace_schema_and_continuity(small_problem):
    config = RetargetConfig(**FAST)
    result = run_pair(small_problem, config)
    assert [e["iteration"] for e in result.loss_trace] == list(range(1, 16))
    for entry in result.loss_trace:
        assert set(entry) == {"iteration", "total"} | set(LOSS_NAMES)
    assert set(result.final_breakdown) == {"total"} | set(LOSS_NAMES)


def test_clamping_exact(small_problem):
    config = RetargetConfig(**FAST)
    result = run_pair(small_problem, config)
    lower, upper = small_problem.robot_skeleton.limit_bounds()
    q = result.robot_motion.joint_params
    assert np.all(q >= lower) and np.all(q <= upper)
    p_lower, p_upper = small_problem.partner_motion.skeleton.limit_bounds()
    pq = result.partner_motion.joint_params
    assert np.all(pq >= p_lower) and np.all(pq <= p_upper)


def test_partner_masking_bit_identical(small_problem):
    config = RetargetConfig(**FAST)
    result = run_pair(small_problem, config)
    objective = RetargetObjective(small_problem, config)
    ua = set(objective.ua_cols)
    original = small_problem.partner_motion
    for col in range(original.skeleton.dof_count):
        if col not in ua:
            np.testing.assert_array_equal(
                result.partner_motion.joint_params[:, col], original.joint_params[:, col]
            )
    np.testing.assert_array_equal(result.partner_motion.root_pos, original.root_pos)
    np.testing.assert_array_equal(result.partner_motion.root_quat, original.root_quat)


def test_determinism_bit_identical(small_problem):
    config = RetargetConfig(**FAST)
    a = run_pair(small_problem, config)
    b = run_pair(small_problem, config)
    np.testing.assert_array_equal(a.robot_motion.joint_params, b.robot_motion.joint_params)
    np.testing.assert_array_equal(a.robot_motion.root_quat, b.robot_motion.root_quat)
    np.testing.assert_array_equal(a.partner_motion.joint_params, b.partner_motion.joint_params)
    assert a.loss_trace == b.loss_trace


def test_resume_stage2_reproduces_full_run(small_problem):
    config = RetargetConfig(**FAST)
    full = run_pair(small_problem, config)
    robot1, partner1, trace1 = run_stage1(small_problem, config)
    resumed = resume_stage2(small_problem, robot1, partner1, config)
    np.testing.assert_array_equal(full.robot_motion.joint_params, resumed.robot_motion.joint_params)
    np.testing.assert_array_equal(full.robot_motion.root_pos, resumed.robot_motion.root_pos)
    np.testing.assert_array_equal(full.robot_motion.root_quat, resumed.robot_motion.root_quat)
    np.testing.assert_array_equal(full.partner_motion.joint_params, resumed.partner_motion.joint_params)
    assert full.loss_trace == trace1 + resumed.loss_trace


def test_initialization_copies_matching_roles(small_problem):
    # Robot and source share spherical/revolute layouts only where roles and
    # DoF kinds agree; initialization must copy those and zero the rest.
    config = RetargetConfig()
    state = initial_state(small_problem, config)
    robot = small_problem.robot_skeleton
    source = small_problem.source_motion.skeleton
    for role, r_idx in robot.roles.items():
        if role not in source.roles:
            continue
        r_joint, s_joint = robot.joints[r_idx], source.joints[source.roles[role]]
        sl = robot.param_slice(r_idx)
        if r_joint.dof == s_joint.dof and r_joint.num_params:
            expected = np.clip(
                small_problem.source_motion.joint_params[:, source.param_slice(source.roles[role])],
                r_joint.limits[:, 0],
                r_joint.limits[:, 1],
            )
            np.testing.assert_array_equal(state.joint_params[:, sl], expected)
    np.testing.assert_array_equal(state.root_pos, small_problem.source_motion.root_pos)


def test_build_problem_requires_matching_frame_counts(rng):
    skel = build_small_human("fd_source")
    partner = build_small_human("fd_partner")
    a = random_motion(skel, 5, rng)
    b = random_motion(partner, 6, rng)
    with pytest.raises(ValidationError):
        build_problem(a, b, build_small_human("fd_source"))


def test_ablation_configs():
    base = RetargetConfig()
    nocon = ablation_config(base, "no_contact")
    assert nocon.w_con_stage1 == 0.0 and nocon.w_con_stage2 == 0.0
    single = ablation_config(base, "single_stage")
    assert single.w_con_stage1 == base.w_con_stage2
    assert single.stage1_iters == 200 and single.stage2_iters == 0
    with pytest.raises(ValidationError):
        ablation_config(base, "bogus")


def test_pair_retargeter_estimator(small_problem):
    est = PairRetargeter(**FAST)
    params = est.get_params()
    assert params["w_con_stage2"] == 2.5
    est.fit(small_problem)
    assert est.robot_motion_ is est.result_.robot_motion
    assert len(est.loss_trace_) == 15
    clone_params = PairRetargeter(**est.get_params()).get_params()
    assert clone_params == params


def test_single_stage_skips_stage2(small_problem):
    config = ablation_config(RetargetConfig(stage1_iters=6, stage2_iters=3), "single_stage")
    result = run_pair(small_problem, config)
    assert [e["iteration"] for e in result.loss_trace] == list(range(1, 10))


def test_identity_stage1_kin_small(human, partner_skel):
    from helpers import greeting_pair

    source, partner = greeting_pair(partner_skel, human)
    from iretarget import build_human

    problem = build_problem(source, partner, build_human("human"))
    _, _, trace = run_stage1(problem)
    assert trace[-1]["kin"] < 1e-4
