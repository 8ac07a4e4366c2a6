from .types import MMM21, SMPLH, SKELETON_DIM, SMPL_DIM, FeatureSequence, MotionSequence
from .joints import MMM_JOINT_NAMES, SMPL_TO_MMM_SCALE, map_smpl_joints_to_mmm
from .frames import LocalFrame, canonicalize, compute_local_frame, heading_angles
from .rotations import rot_z, rotation_from_6d, rotation_to_6d, yaw
from .skeleton import SkeletonFeatureCodec
from .smplpose import SmplFeatureCodec, SmplPoseSequence, canonicalize_smpl
from .resample import resample
from .standardize import FeatureStandardizer
from . import tmf

__all__ = [
    "MMM21",
    "SMPLH",
    "SKELETON_DIM",
    "SMPL_DIM",
    "FeatureSequence",
    "FeatureStandardizer",
    "LocalFrame",
    "MMM_JOINT_NAMES",
    "MotionSequence",
    "SMPL_TO_MMM_SCALE",
    "SkeletonFeatureCodec",
    "SmplFeatureCodec",
    "SmplPoseSequence",
    "canonicalize",
    "canonicalize_smpl",
    "compute_local_frame",
    "heading_angles",
    "map_smpl_joints_to_mmm",
    "resample",
    "rot_z",
    "rotation_from_6d",
    "rotation_to_6d",
    "tmf",
    "yaw",
]
