"""Command-line surface.

Subcommands: retarget, metrics, detect, schedule, standardize, fit-shape.
Exit codes: 0 success, 1 numerical failure, 2 input or validation failure.
Set IRETARGET_LOG=debug|info|warning to control log verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .detectors import DetectionConfig, Episode, detect
from .errors import NumericError, ValidationError
from .kinematics import MotionSequence
from .metrics import compute_jpe, full_report
from .morphology import fit_morphology, reshape_motion
from .retarget import RetargetConfig, build_problem, resume_stage2, run_pair, run_stage1
from .scheduler import (
    ACTION_DIM,
    AnchorScheduler,
    JOINT_CHANNELS,
    QUAT_CHANNELS,
    TRANS_CHANNELS,
    standardize_phases,
)
from .skeletons import build_humanoid
from .tracks import AgentTrack, as_track

log = logging.getLogger("iretarget")

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_INVALID = 2


def _configure_logging() -> None:
    level = os.environ.get("IRETARGET_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def _load_config(args) -> RetargetConfig:
    config = io.load_config(args.config) if args.config else RetargetConfig()
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    return config


def _load_pair(args):
    source_skel = io.load_skeleton(args.source_skeleton)
    partner_skel = io.load_skeleton(args.partner_skeleton) if args.partner_skeleton else source_skel
    source = io.load_motion(args.source, skeleton=source_skel)
    partner = io.load_motion(args.partner, skeleton=partner_skel)
    for name, motion in (("source", source), ("partner", partner)):
        if not isinstance(motion, MotionSequence):
            raise ValidationError(f"{name} motion must be a full motion file (positions-only given)")
    return source, partner


def cmd_retarget(args) -> int:
    config = _load_config(args)
    source, partner = _load_pair(args)
    robot_skeleton = io.load_skeleton(args.robot_skeleton)
    problem = build_problem(source, partner, robot_skeleton, config=config)
    out = Path(args.out_dir)

    if args.stage2_only:
        if not args.warm_start:
            raise ValidationError("--stage2-only requires --warm-start DIR with stage-1 motions")
        warm = Path(args.warm_start)
        robot1 = io.load_motion(warm / "robot_stage1.json", skeleton=robot_skeleton)
        partner1 = io.load_motion(warm / "partner_stage1.json", skeleton=partner.skeleton)
        result = resume_stage2(problem, robot1, partner1, config)
    else:
        if args.keep_stage1:
            robot1, partner1, trace1 = run_stage1(problem, config)
            io.save_motion(out / "robot_stage1.json", robot1)
            io.save_motion(out / "partner_stage1.json", partner1)
            result = resume_stage2(problem, robot1, partner1, config)
            result.loss_trace = trace1 + result.loss_trace
        else:
            result = run_pair(problem, config)

    io.save_motion(out / "robot_motion.json", result.robot_motion)
    io.save_motion(out / "partner_motion.json", result.partner_motion)
    io.write_loss_trace(out / "loss_trace.csv", result.loss_trace)
    jpe = compute_jpe(result.robot_motion.joint_positions(), problem.reshaped_target, problem.kin_mask)
    report = {
        "jpe": jpe,
        "final_breakdown": result.final_breakdown,
        "morphology": {
            "global_scale": problem.morphology.global_scale,
            "residual": problem.morphology.residual,
        },
        "provenance": io.provenance(config, config.seed),
    }
    io.write_json(out / "report.json", report)
    log.info("retarget finished: jpe=%.6f", jpe)
    return EXIT_OK


def cmd_metrics(args) -> int:
    config = _load_config(args)
    source, partner = _load_pair(args)
    robot_skeleton = io.load_skeleton(args.robot_skeleton)
    robot = io.load_motion(args.robot, skeleton=robot_skeleton)
    if not isinstance(robot, MotionSequence):
        raise ValidationError("robot motion must be a full motion file")
    if args.partner_adjusted:
        adjusted = io.load_motion(args.partner_adjusted, skeleton=partner.skeleton)
    else:
        adjusted = partner
    fit = fit_morphology(source.skeleton, robot_skeleton, seed=config.seed)
    reshaped = reshape_motion(source, fit)
    target = np.zeros((source.num_frames, robot_skeleton.num_joints, 3))
    mask = np.zeros(robot_skeleton.num_joints, dtype=bool)
    for role, r_idx in robot_skeleton.roles.items():
        if role in source.skeleton.roles:
            target[:, r_idx] = reshaped[:, source.skeleton.roles[role]]
            mask[r_idx] = True
    thresholds = tuple(args.tau) if args.tau else (0.2, 0.35, 0.5)
    report = full_report(partner, source, robot, adjusted, target, mask, thresholds)
    out = Path(args.out_dir)
    io.write_json(out / "metrics.json", {"metrics": report.to_dict(), "provenance": io.provenance(config, config.seed)})
    io.write_metrics_csv(out / "metrics.csv", [report.flat_row()])
    log.info("metrics written to %s", out)
    return EXIT_OK


def _load_episode_track(path) -> AgentTrack:
    loaded = io.load_motion(path)
    return as_track(loaded) if isinstance(loaded, MotionSequence) else loaded


def _detect_one(entry, cfg: DetectionConfig):
    episode = Episode(_load_episode_track(entry["human"]), _load_episode_track(entry["robot"]))
    outcome = detect(entry["task"], episode, cfg)
    return entry, outcome


def cmd_detect(args) -> int:
    episodes = io.load_manifest(args.manifest)
    cfg = DetectionConfig()
    out = Path(args.out_dir)
    jobs = max(1, args.jobs)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda e: _detect_one(e, cfg), episodes))
    else:
        results = [_detect_one(e, cfg) for e in episodes]

    outcomes = {}
    cells: dict = {}
    for entry, outcome in results:
        outcomes[entry["id"]] = {
            "task": entry["task"],
            "condition": entry["condition"],
            "success": outcome.success,
            "evidence": outcome.evidence,
        }
        key = (entry["task"], entry["condition"])
        n, wins = cells.get(key, (0, 0))
        cells[key] = (n + 1, wins + int(outcome.success))
    rows = [
        {"task": task, "condition": condition, "n": n, "successes": wins, "rate": repr(wins / n)}
        for (task, condition), (n, wins) in sorted(cells.items())
    ]
    io.write_json(out / "outcomes.json", {"episodes": outcomes, "provenance": io.provenance()})
    io.write_success_table(out / "success_rates.csv", rows)
    log.info("detected %d episodes over %d cells", len(results), len(rows))
    return EXIT_OK


def cmd_schedule(args) -> int:
    plans = io.load_anchor_plans(args.plans)
    scheduler = AnchorScheduler()
    chunks = [scheduler.submit(plan) for plan in plans]
    chunks.append(scheduler.flush())
    frames = np.concatenate([c for c in chunks if c.size], axis=0)
    skeleton = build_humanoid()
    if skeleton.dof_count != JOINT_CHANNELS.stop:
        raise ValidationError("humanoid skeleton does not match the 29-channel action layout")
    motion = MotionSequence(
        skeleton,
        frames[:, JOINT_CHANNELS],
        frames[:, TRANS_CHANNELS],
        frames[:, QUAT_CHANNELS],
    )
    out = Path(args.out_dir)
    io.save_motion(out / "reference_motion.json", motion)
    log.info("densified %d plans into %d frames", len(plans), frames.shape[0])
    return EXIT_OK


def cmd_standardize(args) -> int:
    skeleton = io.load_skeleton(args.skeleton)
    motion = io.load_motion(args.motion, skeleton=skeleton)
    if not isinstance(motion, MotionSequence):
        raise ValidationError("standardize needs a full motion file")
    segmentation = io.load_phase_labels(args.labels, total=motion.num_frames)
    standardized = standardize_phases(motion, segmentation)
    out = Path(args.out_dir)
    io.save_motion(out / "standardized_motion.json", standardized)
    return EXIT_OK


def cmd_fit_shape(args) -> int:
    source = io.load_skeleton(args.source_skeleton)
    target = io.load_skeleton(args.target_skeleton)
    fit = fit_morphology(source, target, seed=args.seed if args.seed is not None else 42)
    payload = {
        "source": fit.source_name,
        "target": fit.target_name,
        "global_scale": fit.global_scale,
        "per_bone_scale": {
            source.joints[j].name: fit.per_bone_scale[j] for j in range(1, source.num_joints)
        },
        "residual": fit.residual,
        "n_iterations": fit.n_iterations,
        "provenance": io.provenance(seed=args.seed),
    }
    io.write_json(args.out, payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iretarget", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="seed recorded in provenance (default 42 via config)")

    p = sub.add_parser("retarget", help="retarget an interaction pair onto a robot skeleton")
    p.add_argument("--source", required=True, help="motion file of the agent the robot replaces")
    p.add_argument("--partner", required=True, help="motion file of the partner agent")
    p.add_argument("--source-skeleton", required=True)
    p.add_argument("--partner-skeleton", default=None, help="defaults to the source skeleton file")
    p.add_argument("--robot-skeleton", required=True)
    p.add_argument("--config", default=None, help="JSON retargeting config")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--keep-stage1", action="store_true", help="also write the stage-1 motions")
    p.add_argument("--stage2-only", action="store_true", help="resume from saved stage-1 motions")
    p.add_argument("--warm-start", default=None, help="directory holding robot_stage1.json/partner_stage1.json")
    common(p)
    p.set_defaults(func=cmd_retarget)

    p = sub.add_parser("metrics", help="evaluate a retargeted pair against its source pair")
    p.add_argument("--source", required=True)
    p.add_argument("--partner", required=True)
    p.add_argument("--source-skeleton", required=True)
    p.add_argument("--partner-skeleton", default=None)
    p.add_argument("--robot", required=True, help="retargeted robot motion file")
    p.add_argument("--robot-skeleton", required=True)
    p.add_argument("--partner-adjusted", default=None, help="adjusted partner motion (defaults to the source partner)")
    p.add_argument("--config", default=None)
    p.add_argument("--tau", type=float, action="append", default=None, help="contact threshold (repeatable)")
    p.add_argument("--out-dir", required=True)
    common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("detect", help="run task-success detectors over a manifest of episodes")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("schedule", help="replay anchor plans into a fused 50 Hz reference motion")
    p.add_argument("--plans", required=True)
    p.add_argument("--out-dir", required=True)
    common(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("standardize", help="standardize preparation/follow-up phases of a motion")
    p.add_argument("--motion", required=True)
    p.add_argument("--skeleton", required=True)
    p.add_argument("--labels", required=True, help="phase segmentation JSON")
    p.add_argument("--out-dir", required=True)
    common(p)
    p.set_defaults(func=cmd_standardize)

    p = sub.add_parser("fit-shape", help="fit global + per-bone scales between two skeletons")
    p.add_argument("--source-skeleton", required=True)
    p.add_argument("--target-skeleton", required=True)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_fit_shape)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, OSError) as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericError as exc:
        log.error("%s", exc)
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
