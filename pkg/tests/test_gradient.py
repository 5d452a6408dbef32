"""Finite-difference verification of the composite objective gradient."""

import numpy as np
import pytest

from iretarget import RetargetConfig
from iretarget.retarget import RetargetObjective, gradient, initial_state, total_loss

from helpers import gradient_check_problem


@pytest.fixture(scope="module")
def fd_problem():
    problem, rng = gradient_check_problem(T=8, seed=11)
    return problem, RetargetConfig(), rng


def relative_errors(objective, flat, w_con, step=1e-5):
    _, _, grad = objective.value_and_grad(objective.unpack(flat), w_con)
    errs = np.empty_like(flat)
    for i in range(flat.size):
        fp = flat.copy()
        fp[i] += step
        fm = flat.copy()
        fm[i] -= step
        vp, _ = objective.value(objective.unpack(fp), w_con)
        vm, _ = objective.value(objective.unpack(fm), w_con)
        fd = (vp - vm) / (2 * step)
        errs[i] = abs(fd - grad[i]) / max(abs(fd), abs(grad[i]), 1e-8)
    return errs


def test_gradient_zero_at_identity_minimum():
    # Robot skeleton identical to the source: the source motion is a global
    # minimum of kin+con+hum, and with zero angles the regularizers vanish.
    from iretarget.retarget import build_problem
    from helpers import build_small_human, static_motion

    skel = build_small_human("fd_source")
    source = static_motion(skel, (0, 0, 0.9), (1, 0, 0, 0), 6)
    partner = static_motion(build_small_human("fd_partner"), (0.8, 0, 0.9), (0, 0, 0, 1), 6)
    problem = build_problem(source, partner, build_small_human("fd_source"))
    config = RetargetConfig()
    grad = gradient(problem, initial_state(problem, config), config)
    assert np.linalg.norm(grad) < 1e-8


def test_gradient_matches_fd_random_states(fd_problem):
    problem, config, rng = fd_problem
    objective = RetargetObjective(problem, config)
    base = initial_state(problem, config).to_flat()
    worst = 0.0
    for _ in range(5):
        flat = base + rng.normal(scale=0.08, size=base.size)
        errs = relative_errors(objective, flat, config.w_con_stage1)
        worst = max(worst, errs.max())
    assert worst < 1e-4


def test_gradient_pose_only_closed_form(fd_problem):
    problem, _, rng = fd_problem
    config = RetargetConfig(w_kin=0.0, w_hum=0.0, w_temp=0.0, w_pose=1.0)
    state = initial_state(problem, config)
    state.joint_params = rng.normal(size=state.joint_params.shape)
    grad = gradient(problem, state, config, w_con=0.0)
    T, D = state.joint_params.shape
    np.testing.assert_allclose(
        grad[: T * D].reshape(T, D), 2 * state.joint_params / (T * D), atol=1e-14
    )
    assert np.allclose(grad[T * D :], 0.0)


def test_total_loss_weight_isolation(fd_problem):
    problem, _, rng = fd_problem
    state = initial_state(problem, RetargetConfig())
    state.joint_params = state.joint_params + rng.normal(scale=0.1, size=state.joint_params.shape)

    zero = RetargetConfig(w_kin=0.0, w_hum=0.0, w_temp=0.0, w_pose=0.0)
    total, comps = total_loss(problem, state, zero, w_con=0.0)
    assert total == 0.0

    kin_only = RetargetConfig(w_kin=1.0, w_hum=0.0, w_temp=0.0, w_pose=0.0)
    total, comps = total_loss(problem, state, kin_only, w_con=0.0)
    assert total == pytest.approx(comps["kin"], rel=1e-12)


def test_total_loss_default_weights_assemble(fd_problem):
    problem, config, rng = fd_problem
    state = initial_state(problem, config)
    state.joint_params = state.joint_params + rng.normal(scale=0.05, size=state.joint_params.shape)
    total, comps = total_loss(problem, state, config)
    manual = (
        config.w_kin * comps["kin"]
        + config.w_con_stage1 * comps["con"]
        + config.w_hum * comps["hum"]
        + config.w_temp * comps["temp"]
        + config.w_pose * comps["pose"]
    )
    assert total == pytest.approx(manual, rel=1e-12)
