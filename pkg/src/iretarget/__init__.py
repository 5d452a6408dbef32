"""Contact-preserving retargeting of two-person interaction motions onto a
humanoid, with the matching evaluation metrics, task-success detectors and
anchor-densification scheduler."""

__version__ = "0.1.0"

from .errors import NumericError, ValidationError
from .kinematics import (
    FIXED,
    REVOLUTE,
    SPHERICAL,
    FramePose,
    Joint,
    MotionSequence,
    Skeleton,
    forward_kinematics,
)
from .morphology import MorphologyAligner, MorphologyFit, fit_morphology, reshape_motion
from .retarget import (
    PairRetargeter,
    RetargetConfig,
    RetargetProblem,
    RetargetResult,
    RetargetState,
    ablation_config,
    build_problem,
    resume_stage2,
    run_pair,
    run_stage1,
)
from .skeletons import CORRESPONDENCE_16, build_human, build_humanoid
from .smoothing import GaussianSmoother, gaussian_smooth, smooth_motion
from .tracks import AgentTrack

__all__ = [
    "NumericError",
    "ValidationError",
    "FIXED",
    "REVOLUTE",
    "SPHERICAL",
    "FramePose",
    "Joint",
    "MotionSequence",
    "Skeleton",
    "forward_kinematics",
    "MorphologyAligner",
    "MorphologyFit",
    "fit_morphology",
    "reshape_motion",
    "PairRetargeter",
    "RetargetConfig",
    "RetargetProblem",
    "RetargetResult",
    "RetargetState",
    "ablation_config",
    "build_problem",
    "resume_stage2",
    "run_pair",
    "run_stage1",
    "CORRESPONDENCE_16",
    "build_human",
    "build_humanoid",
    "GaussianSmoother",
    "gaussian_smooth",
    "smooth_motion",
    "AgentTrack",
    "__version__",
]
