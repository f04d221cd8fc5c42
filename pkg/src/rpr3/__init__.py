"""Kinematics, singularities and Cardanic self-motions of 3-RPR planar parallel robots."""

from .errors import KinematicsError
from .geometry import JointState, Pose, RobotDesign, WorkingMode
from .kinematics import DkResult, direct_kinematics, inverse_kinematics
from .selfmotion import cardanic_path, classify_self_motions, paminsa_analysis
from .singularity import classify, locus_scan, velocity_model

__all__ = [
    "DkResult",
    "JointState",
    "KinematicsError",
    "Pose",
    "RobotDesign",
    "WorkingMode",
    "cardanic_path",
    "classify",
    "classify_self_motions",
    "direct_kinematics",
    "inverse_kinematics",
    "locus_scan",
    "paminsa_analysis",
    "velocity_model",
]
