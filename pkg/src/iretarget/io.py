"""File formats and report writers.

Everything on disk is JSON (version-tagged) or CSV:

* skeleton files: joints with parent index, rest offset, DoF spec, limits,
  plus the role map;
* motion files: fps, a skeleton (inline object or name reference), and
  per-frame {root_pos, root_quat (w,x,y,z), joint_params};
* positions-only motion files: fps, joint_names, T x J x 3 positions, with
  roles inferred from joint names (or given explicitly) — the natural
  format for capture data consumed by metrics and detectors;
* anchor-plan files for the scheduler, run manifests for batch detection;
* loss traces as CSV (iteration, total, kin, con, hum, temp, pose),
  metric reports as JSON + one-row CSV, success-rate tables as CSV
  (task, condition, n, successes, rate).

Outputs embed a provenance block (config hash, seed, package and numpy
versions) and never a timestamp, so rerunning a command with the same seed
reproduces files byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ValidationError
from .kinematics import Joint, MotionSequence, Skeleton
from .retarget import LOSS_NAMES, RetargetConfig
from .scheduler import AnchorPlan, PhaseSegmentation
from .skeletons import build_human, build_humanoid
from .tracks import AgentTrack
from .validation import require

#: Skeletons resolvable by name in motion files.
BUILTIN_SKELETONS = {"human": build_human, "humanoid": build_humanoid}

LOSS_TRACE_COLUMNS = ("iteration", "total") + LOSS_NAMES
SUCCESS_TABLE_COLUMNS = ("task", "condition", "n", "successes", "rate")


def _load_json(path) -> dict:
    path = Path(path)
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a JSON object at top level")
    return data


def write_json(path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def skeleton_to_dict(skeleton: Skeleton) -> dict:
    joints = []
    for joint in skeleton.joints:
        entry = {
            "name": joint.name,
            "parent": joint.parent,
            "offset": joint.rest_offset.tolist(),
            "dof": joint.dof,
            "limits": joint.limits.tolist(),
        }
        if joint.axis is not None:
            entry["axis"] = joint.axis.tolist()
        joints.append(entry)
    return {"version": 1, "name": skeleton.name, "joints": joints, "roles": dict(skeleton.roles)}


def skeleton_from_dict(data: dict, origin: str = "skeleton") -> Skeleton:
    try:
        joints = [
            Joint(
                name=j["name"],
                parent=j["parent"],
                rest_offset=j["offset"],
                dof=j.get("dof", "spherical"),
                axis=j.get("axis"),
                limits=j.get("limits"),
            )
            for j in data["joints"]
        ]
        return Skeleton(data["name"], joints, dict(data.get("roles", {})))
    except KeyError as exc:
        raise ValidationError(f"{origin}: missing required field {exc}") from exc


def load_skeleton(path) -> Skeleton:
    return skeleton_from_dict(_load_json(path), origin=str(path))


def save_skeleton(path, skeleton: Skeleton) -> None:
    write_json(path, skeleton_to_dict(skeleton))


def _resolve_skeleton(ref, skeleton: Skeleton | None, origin: str) -> Skeleton:
    if isinstance(ref, dict):
        return skeleton_from_dict(ref, origin=origin)
    if skeleton is not None:
        if isinstance(ref, str) and ref != skeleton.name:
            raise ValidationError(
                f"{origin}: motion references skeleton '{ref}' but '{skeleton.name}' was supplied"
            )
        return skeleton
    if isinstance(ref, str) and ref in BUILTIN_SKELETONS:
        return BUILTIN_SKELETONS[ref]()
    raise ValidationError(f"{origin}: skeleton '{ref}' cannot be resolved; pass a skeleton file")


def motion_to_dict(motion: MotionSequence, inline_skeleton: bool = False) -> dict:
    frames = [
        {
            "root_pos": motion.root_pos[t].tolist(),
            "root_quat": motion.root_quat[t].tolist(),
            "joint_params": motion.joint_params[t].tolist(),
        }
        for t in range(motion.num_frames)
    ]
    skeleton = skeleton_to_dict(motion.skeleton) if inline_skeleton else motion.skeleton.name
    return {"version": 1, "fps": motion.fps, "skeleton": skeleton, "frames": frames}


def load_motion(path, skeleton: Skeleton | None = None):
    """Load a motion file.

    Returns a :class:`MotionSequence` for the full format, or an
    :class:`AgentTrack` for the positions-only variant. Quaternions off
    unit norm by more than 1e-4 are rejected; smaller deviations are
    renormalized (with a warning beyond 1e-6).
    """
    data = _load_json(path)
    origin = str(path)
    if data.get("version") not in (1,):
        raise ValidationError(f"{origin}: unsupported version {data.get('version')!r}")
    if "positions" in data:
        return load_position_track(path, data)
    if "frames" not in data:
        raise ValidationError(f"{origin}: motion file needs 'frames' or 'positions'")
    if "fps" not in data:
        raise ValidationError(f"{origin}: missing 'fps'")
    skel = _resolve_skeleton(data.get("skeleton"), skeleton, origin)
    frames = data["frames"]
    require(len(frames) >= 1, f"{origin}: motion needs at least one frame")
    root_pos = np.empty((len(frames), 3))
    root_quat = np.empty((len(frames), 4))
    params = np.empty((len(frames), skel.dof_count))
    for t, frame in enumerate(frames):
        for key, target, width in (
            ("root_pos", root_pos, 3),
            ("root_quat", root_quat, 4),
            ("joint_params", params, skel.dof_count),
        ):
            if key not in frame:
                raise ValidationError(f"{origin}: frame {t} is missing '{key}'")
            value = np.asarray(frame[key], dtype=np.float64)
            if value.shape != (width,):
                raise ValidationError(
                    f"{origin}: frame {t} field '{key}' has shape {value.shape}, expected ({width},)"
                )
            target[t] = value
    try:
        return MotionSequence(skel, params, root_pos, root_quat, float(data["fps"]))
    except ValidationError as exc:
        raise ValidationError(f"{origin}: {exc}") from exc


def load_position_track(path, data: dict | None = None) -> AgentTrack:
    data = data if data is not None else _load_json(path)
    origin = str(path)
    for key in ("fps", "joint_names", "positions"):
        if key not in data:
            raise ValidationError(f"{origin}: positions-only motion needs '{key}'")
    positions = np.asarray(data["positions"], dtype=np.float64)
    names = list(data["joint_names"])
    if positions.ndim != 3 or positions.shape[1] != len(names) or positions.shape[2] != 3:
        raise ValidationError(
            f"{origin}: positions shape {positions.shape} inconsistent with {len(names)} joint names"
        )
    roles = data.get("roles")
    track = AgentTrack.from_positions(positions, joint_names=names, roles=roles)
    return track


def save_motion(path, motion: MotionSequence, inline_skeleton: bool = False) -> None:
    write_json(path, motion_to_dict(motion, inline_skeleton=inline_skeleton))


def save_position_track(path, track: AgentTrack, joint_names, fps: float = 50.0) -> None:
    payload = {
        "version": 1,
        "fps": fps,
        "joint_names": list(joint_names),
        "roles": dict(track.roles),
        "positions": track.positions.tolist(),
    }
    write_json(path, payload)


def config_from_dict(data: dict, origin: str = "config") -> RetargetConfig:
    known = set(RetargetConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"{origin}: unknown config keys {sorted(unknown)}")
    try:
        return RetargetConfig(**data)
    except TypeError as exc:
        raise ValidationError(f"{origin}: {exc}") from exc


def load_config(path) -> RetargetConfig:
    data = _load_json(path)
    data.pop("version", None)
    for key in ("keypoint_roles", "upper_body_roles"):
        if key in data:
            data[key] = tuple(data[key])
    return config_from_dict(data, origin=str(path))


def config_to_dict(config: RetargetConfig) -> dict:
    out = {}
    for name in RetargetConfig.__dataclass_fields__:
        value = getattr(config, name)
        out[name] = list(value) if isinstance(value, tuple) else value
    return out


def config_hash(config: RetargetConfig) -> str:
    canonical = json.dumps(config_to_dict(config), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


def provenance(config: RetargetConfig | None = None, seed: int | None = None) -> dict:
    block = {"package_version": __version__, "numpy_version": np.__version__}
    if config is not None:
        block["config_hash"] = config_hash(config)
        block["config"] = config_to_dict(config)
    if seed is not None:
        block["seed"] = seed
    return block


def load_anchor_plans(path) -> list[AnchorPlan]:
    data = _load_json(path)
    if "plans" not in data:
        raise ValidationError(f"{path}: anchor file needs a 'plans' list")
    plans = []
    for i, entry in enumerate(data["plans"]):
        try:
            plans.append(AnchorPlan(float(entry["call_time"]), np.asarray(entry["anchors"])))
        except (KeyError, ValidationError, TypeError) as exc:
            raise ValidationError(f"{path}: plan {i}: {exc}") from exc
    require(len(plans) >= 1, f"{path}: no plans")
    return plans


def save_anchor_plans(path, plans) -> None:
    write_json(
        path,
        {
            "version": 1,
            "plans": [
                {"call_time": p.call_time, "anchors": p.anchors.tolist()} for p in plans
            ],
        },
    )


def load_phase_labels(path, total: int | None = None) -> PhaseSegmentation:
    data = _load_json(path)
    if "labels" in data:
        seg = PhaseSegmentation.from_labels(data["labels"])
    else:
        try:
            seg = PhaseSegmentation(int(data["act_start"]), int(data["followup_start"]), int(data["total"]))
        except KeyError as exc:
            raise ValidationError(f"{path}: phase file needs 'labels' or act_start/followup_start/total") from exc
    if total is not None and seg.total != total:
        raise ValidationError(f"{path}: segmentation covers {seg.total} frames, motion has {total}")
    return seg


def load_manifest(path) -> list[dict]:
    """Episode manifest for batch detection: unique ids, existing files."""
    data = _load_json(path)
    if "episodes" not in data:
        raise ValidationError(f"{path}: manifest needs an 'episodes' list")
    base = Path(path).parent
    seen = set()
    episodes = []
    for i, entry in enumerate(data["episodes"]):
        for key in ("id", "task", "human", "robot"):
            if key not in entry:
                raise ValidationError(f"{path}: episode {i} is missing '{key}'")
        if entry["id"] in seen:
            raise ValidationError(f"{path}: duplicate episode id '{entry['id']}'")
        seen.add(entry["id"])
        episode = dict(entry)
        episode.setdefault("condition", "default")
        for key in ("human", "robot", "phase_labels"):
            if key in episode and episode[key] is not None:
                resolved = base / episode[key]
                if not resolved.exists():
                    raise ValidationError(f"{path}: episode '{entry['id']}': file not found: {resolved}")
                episode[key] = resolved
        episodes.append(episode)
    return episodes


def write_loss_trace(path, trace) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LOSS_TRACE_COLUMNS)
        for entry in trace:
            writer.writerow([entry["iteration"]] + [repr(entry[k]) for k in LOSS_TRACE_COLUMNS[1:]])


def write_metrics_csv(path, rows: list[dict]) -> None:
    require(len(rows) >= 1, "no metric rows to write")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row[c] for c in columns])


def write_success_table(path, rows: list[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUCCESS_TABLE_COLUMNS)
        for row in rows:
            writer.writerow([row[c] for c in SUCCESS_TABLE_COLUMNS])
