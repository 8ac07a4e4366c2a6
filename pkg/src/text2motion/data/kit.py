"""Disk layout compatible with the KIT Motion-Language preprocessing.

Per motion id the directory holds `<id>_annotations.json` (list of
description strings), `<id>_meta.json` (at least {"fps": ...}) and
`<id>_joints.tmf1` (frames x 63 joint coordinates). Split files list one
motion id per line. Joints are resampled to 12.5 Hz and encoded to
features at load time.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from ..motion.resample import resample
from ..motion.skeleton import SkeletonFeatureCodec
from ..motion.tmf import read_tmf, write_tmf
from ..motion.types import MMM21, MotionSequence
from .dataset import DatasetEntry

log = logging.getLogger(__name__)

MODEL_FPS = 12.5
DISK_FPS = 100.0


def read_split_ids(split_file) -> list[str]:
    with open(split_file, "r", encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def load_kit(root_dir, split_file, split=None) -> list[DatasetEntry]:
    """Load every usable entry named in `split_file`.

    Entries with a missing or unreadable joints/annotation file are skipped
    with a warning; malformed JSON raises. Entries without descriptions are
    dropped.
    """
    root = Path(root_dir)
    if split is None:
        split = Path(split_file).stem
    codec = SkeletonFeatureCodec(MODEL_FPS)
    entries = []
    skipped_missing = 0
    skipped_empty = 0
    for entry_id in read_split_ids(split_file):
        ann_path = root / f"{entry_id}_annotations.json"
        meta_path = root / f"{entry_id}_meta.json"
        joints_path = root / f"{entry_id}_joints.tmf1"
        if not (ann_path.exists() and meta_path.exists() and joints_path.exists()):
            log.warning("skipping %s: missing file(s)", entry_id)
            skipped_missing += 1
            continue
        try:
            descriptions = json.loads(ann_path.read_text(encoding="utf-8"))
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValueError(f"{entry_id}: malformed JSON ({exc})") from exc
        if not isinstance(descriptions, list) or not all(isinstance(d, str) for d in descriptions):
            raise ValueError(f"{entry_id}: annotations must be a list of strings")
        if not descriptions:
            skipped_empty += 1
            continue
        try:
            flat = read_tmf(joints_path)
            if flat.shape[1] % 3 != 0:
                raise ValueError(f"{entry_id}: joint file width {flat.shape[1]} is not a multiple of 3")
            motion = MotionSequence(
                flat.reshape(flat.shape[0], -1, 3), float(meta.get("fps", DISK_FPS)), MMM21
            )
        except ValueError as exc:
            log.warning("skipping %s: corrupt joints file (%s)", entry_id, exc)
            skipped_missing += 1
            continue
        features = codec.transform(resample(motion, MODEL_FPS))
        entries.append(
            DatasetEntry(
                entry_id=entry_id,
                features=features,
                descriptions=descriptions,
                motion=motion,
                split=split,
            )
        )
    if skipped_missing or skipped_empty:
        log.warning(
            "loaded %d entries (%d skipped for missing/corrupt files, %d without descriptions)",
            len(entries), skipped_missing, skipped_empty,
        )
    return entries


def write_kit_layout(entries, out_dir):
    """Write entries back to the on-disk layout (joints stored at 100 Hz)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    split_ids = {}
    for entry in entries:
        motion = entry.motion
        if abs(motion.fps - DISK_FPS) > 1e-9:
            motion = resample(motion, DISK_FPS)
        write_tmf(out / f"{entry.entry_id}_joints.tmf1", motion.joints.reshape(motion.num_frames, -1))
        (out / f"{entry.entry_id}_annotations.json").write_text(
            json.dumps(entry.descriptions, indent=1), encoding="utf-8"
        )
        (out / f"{entry.entry_id}_meta.json").write_text(
            json.dumps({"fps": DISK_FPS, "joint_set": motion.joint_set}), encoding="utf-8"
        )
        split_ids.setdefault(entry.split, []).append(entry.entry_id)
    for split, ids in split_ids.items():
        (out / f"{split}.txt").write_text("\n".join(ids) + "\n", encoding="utf-8")
