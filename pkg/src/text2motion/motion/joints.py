"""Joint naming for the 21-joint MMM skeleton and its SMPL-H correspondence."""

from __future__ import annotations

import numpy as np

from .types import MMM21, MotionSequence

# Canonical MMM joint order; index 0 is the root.
MMM_JOINT_NAMES = (
    "root", "BP", "BT", "BLN", "BUN",
    "LS", "LE", "LW", "RS", "RE", "RW",
    "LH", "LK", "LA", "LMrot", "LF",
    "RH", "RK", "RA", "RMrot", "RF",
)

MMM_JOINT_INDEX = {name: i for i, name in enumerate(MMM_JOINT_NAMES)}

ROOT = MMM_JOINT_INDEX["root"]
LEFT_HIP = MMM_JOINT_INDEX["LH"]
RIGHT_HIP = MMM_JOINT_INDEX["RH"]
LEFT_SHOULDER = MMM_JOINT_INDEX["LS"]
RIGHT_SHOULDER = MMM_JOINT_INDEX["RS"]

# SMPL-H joint providing each MMM joint, in MMM order.
SMPLH_SOURCE_FOR_MMM = (
    ("root", "pelvis"),
    ("BP", "spine1"),
    ("BT", "spine3"),
    ("BLN", "neck"),
    ("BUN", "head"),
    ("LS", "left_shoulder"),
    ("LE", "left_elbow"),
    ("LW", "left_wrist"),
    ("RS", "right_shoulder"),
    ("RE", "right_elbow"),
    ("RW", "right_wrist"),
    ("LH", "left_hip"),
    ("LK", "left_knee"),
    ("LA", "left_ankle"),
    ("LMrot", "left_heel"),
    ("LF", "left_foot"),
    ("RH", "right_hip"),
    ("RK", "right_knee"),
    ("RA", "right_ankle"),
    ("RMrot", "right_heel"),
    ("RF", "right_foot"),
)

# SMPL bodies are larger than the MMM reference body.
SMPL_TO_MMM_SCALE = 0.64


def map_smpl_joints_to_mmm(motion, smpl_joint_names, rescale=True):
    """Select the 21 MMM correspondents from an SMPL-H joint motion.

    `smpl_joint_names` lists the joint name of every column in the input
    motion. Output joints follow the MMM order; with `rescale`, all
    coordinates are multiplied by the MMM scale factor.
    """
    name_to_col = {name: i for i, name in enumerate(smpl_joint_names)}
    cols = []
    for mmm_name, smpl_name in SMPLH_SOURCE_FOR_MMM:
        if smpl_name not in name_to_col:
            raise KeyError(f"input is missing SMPL-H joint '{smpl_name}' (needed for {mmm_name})")
        cols.append(name_to_col[smpl_name])
    joints = motion.joints[:, cols, :]
    if rescale:
        joints = joints * SMPL_TO_MMM_SCALE
    return MotionSequence(joints, motion.fps, MMM21)
