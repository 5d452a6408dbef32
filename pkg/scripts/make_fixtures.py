#!/usr/bin/env python3
"""Regenerate the bundled demo fixtures under fixtures/.

Deterministic: rerunning produces byte-identical files.
"""

import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "tests"))

from iretarget import build_human, build_humanoid, io
from iretarget.scheduler import ACTION_DIM, AnchorPlan, QUAT_CHANNELS
from iretarget.tracks import AgentTrack

from helpers import greeting_pair, handshake_pair, random_motion

OUT = REPO / "fixtures"


def motion_files():
    human = build_human("human")
    partner = build_human("partner")
    io.save_skeleton(OUT / "human_skeleton.json", human)
    io.save_skeleton(OUT / "partner_skeleton.json", partner)
    io.save_skeleton(OUT / "humanoid_skeleton.json", build_humanoid("humanoid"))
    io.save_skeleton(OUT / "compact_humanoid_skeleton.json", build_humanoid("compact_humanoid", scale=0.85))

    source, partner_motion = greeting_pair(partner, human)
    io.save_motion(OUT / "greeting_source.json", source)
    io.save_motion(OUT / "greeting_partner.json", partner_motion)

    source, partner_motion = handshake_pair(partner, human)
    io.save_motion(OUT / "handshake_source.json", source)
    io.save_motion(OUT / "handshake_partner.json", partner_motion)

    io.write_json(OUT / "retarget_config.json", io.config_to_dict(__import__("iretarget").RetargetConfig()))


def anchor_plans():
    rng = np.random.default_rng(7)
    base = np.zeros(ACTION_DIM)
    base[QUAT_CHANNELS.start] = 1.0
    plans = []
    phase = rng.uniform(0, 2 * np.pi, ACTION_DIM)
    for k in range(4):
        anchors = np.tile(base, (5, 1))
        t = k * 0.2 + np.array([0.0, 0.5, 1.0, 1.5, 2.0])
        for c in range(29):
            anchors[:, c] = 0.3 * np.sin(0.8 * t + phase[c])
        anchors[:, 29] = 0.1 * t
        plans.append(AnchorPlan(k * 0.2, anchors))
    io.save_anchor_plans(OUT / "anchor_plans.json", plans)


def standardize_inputs():
    rng = np.random.default_rng(21)
    humanoid = build_humanoid("humanoid")
    motion = random_motion(humanoid, 80, rng, angle_scale=0.4)
    io.save_motion(OUT / "humanoid_motion.json", motion)
    io.write_json(OUT / "phase_labels.json", {"act_start": 30, "followup_start": 60, "total": 80})


def _track_file(path, positions, roles):
    names = [f"joint_{i}" for i in range(positions.shape[1])]
    for role, idx in roles.items():
        names[idx] = role
    io.save_position_track(path, AgentTrack(positions, roles), names)


def detect_manifest():
    """Golden handshake episodes (two passing, one failing) as positions-only tracks."""
    roles = {"left_hand": 0, "right_hand": 1, "root": 2}

    def tracks(contact_frames, d=0.25, T=16):
        human = np.zeros((T, 3, 3))
        human[:, 0] = [50.0, 50.0, 50.0]
        human[:, 1] = [0.5, 0.0, 1.0]
        human[:, 2] = [0.0, 0.0, 0.95]
        robot = np.zeros((T, 3, 3))
        robot[:, 0] = [-50.0, -50.0, 40.0]
        robot[:, 1] = [2.5, 0.0, 1.0]
        robot[contact_frames, 1] = [0.5 + d, 0.0, 1.0]
        robot[:, 2] = [1.5, 0.0, 0.95]
        return human, robot

    episodes = []
    for name, frames, condition in (
        ("shake_ok_a", slice(2, 14), "default"),
        ("shake_ok_b", slice(1, 15), "default"),
        ("shake_short", slice(2, 10), "too_short"),
    ):
        human, robot = tracks(frames)
        _track_file(OUT / f"{name}_human.json", human, roles)
        _track_file(OUT / f"{name}_robot.json", robot, roles)
        episodes.append(
            {
                "id": name,
                "task": "handshake",
                "condition": condition,
                "human": f"{name}_human.json",
                "robot": f"{name}_robot.json",
            }
        )
    io.write_json(OUT / "detect_manifest.json", {"episodes": episodes})


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    motion_files()
    anchor_plans()
    standardize_inputs()
    detect_manifest()
    print(f"fixtures written to {OUT}")
