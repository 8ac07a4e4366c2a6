"""Positional and variance error metrics plus the sampling-mode protocols.

Both motions are canonicalized first (first frame facing the canonical
direction at the origin). Non-root joints are then re-expressed in each
body's own local frame; the root stays in the canonicalized global frame.
Four groupings are reported for each metric:

  root_joint   3-D root error
  global_traj  root error on X/Y only
  mean_local   average over the 20 non-root joints in local coordinates
  mean_global  average over all 21 joints in global coordinates

APE averages per-frame L2 distances; AVE compares per-joint temporal
variance vectors (1/(F-1) normalization). Metrics operate on joint
positions only - never on standardized features.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .data.dataset import EVAL_FIRST, select_description
from .motion.frames import canonicalize, frame_rotations
from .motion.resample import resample
from .motion.skeleton import SkeletonFeatureCodec
from .motion.types import FeatureSequence, MotionSequence
from .nn.layers import AttentionMask
from .nn.tensor import Tensor
from .sampling import latent_for_text

GROUPINGS = ("root_joint", "global_traj", "mean_local", "mean_global")

DETERMINISTIC = "deterministic"
Z_ZERO = "z_zero"
SINGLE_RANDOM = "single_random"
K_RANDOM_AVG = "k_random_avg"
K_RANDOM_BEST = "k_random_best"
MODES = (DETERMINISTIC, Z_ZERO, SINGLE_RANDOM, K_RANDOM_AVG, K_RANDOM_BEST)


@dataclass
class EvalMode:
    kind: str
    k: int = 1

    def __post_init__(self):
        if self.kind not in MODES:
            raise ValueError(f"unknown evaluation mode {self.kind!r}; choose from {MODES}")
        if self.kind in (K_RANDOM_AVG, K_RANDOM_BEST) and self.k < 1:
            raise ValueError("k must be at least 1 for multi-sample modes")

    @property
    def samples(self):
        return self.k if self.kind in (K_RANDOM_AVG, K_RANDOM_BEST) else 1


@dataclass
class MetricReport:
    ape: dict
    ave: dict

    CSV_FIELDS = tuple(f"ape_{g}" for g in GROUPINGS) + tuple(f"ave_{g}" for g in GROUPINGS)

    def row(self):
        return [self.ape[g] for g in GROUPINGS] + [self.ave[g] for g in GROUPINGS]

    @classmethod
    def from_row(cls, row):
        return cls(
            ape=dict(zip(GROUPINGS, row[:4])),
            ave=dict(zip(GROUPINGS, row[4:])),
        )


def canonicalize_for_eval(motion: MotionSequence) -> MotionSequence:
    """First frame facing the canonical direction, ground point at the origin."""
    return canonicalize(motion)


def _local_joints(joints):
    """Non-root joints of [F, 21, 3] in each frame's body-local coordinates."""
    rot = frame_rotations(joints)
    origin = joints[:, 0, :] * np.array([1.0, 1.0, 0.0])
    return np.einsum("fjk,fkl->fjl", joints[:, 1:, :] - origin[:, None, :], rot)


def _check_pair(gt, pred):
    if gt.num_frames != pred.num_frames:
        raise ValueError(f"frame counts differ ({gt.num_frames} vs {pred.num_frames})")
    if gt.joint_set != pred.joint_set or gt.num_joints != pred.num_joints:
        raise ValueError("joint sets differ")


def ape(gt: MotionSequence, pred: MotionSequence, grouping: str) -> float:
    """Average positional error in meters for one grouping."""
    _check_pair(gt, pred)
    if grouping == "root_joint":
        dist = np.linalg.norm(gt.joints[:, 0, :] - pred.joints[:, 0, :], axis=-1)
        return float(dist.mean())
    if grouping == "global_traj":
        dist = np.linalg.norm(gt.joints[:, 0, :2] - pred.joints[:, 0, :2], axis=-1)
        return float(dist.mean())
    if grouping == "mean_local":
        dist = np.linalg.norm(_local_joints(gt.joints) - _local_joints(pred.joints), axis=-1)
        return float(dist.mean())
    if grouping == "mean_global":
        dist = np.linalg.norm(gt.joints - pred.joints, axis=-1)
        return float(dist.mean())
    raise ValueError(f"unknown grouping {grouping!r}")


def _variance(positions):
    """Per-joint temporal variance vectors [J, 3] with 1/(F-1) normalization."""
    mean = positions.mean(axis=0, keepdims=True)
    return np.square(positions - mean).sum(axis=0) / (positions.shape[0] - 1)


def ave(gt: MotionSequence, pred: MotionSequence, grouping: str) -> float:
    """Average variance error for one grouping."""
    _check_pair(gt, pred)
    if gt.num_frames < 2:
        raise ValueError("variance needs at least 2 frames")
    if grouping == "root_joint":
        return float(np.linalg.norm(_variance(gt.joints[:, :1]) - _variance(pred.joints[:, :1]), axis=-1).mean())
    if grouping == "global_traj":
        diff = _variance(gt.joints[:, 0:1, :2]) - _variance(pred.joints[:, 0:1, :2])
        return float(np.linalg.norm(diff, axis=-1).mean())
    if grouping == "mean_local":
        diff = _variance(_local_joints(gt.joints)) - _variance(_local_joints(pred.joints))
        return float(np.linalg.norm(diff, axis=-1).mean())
    if grouping == "mean_global":
        diff = _variance(gt.joints) - _variance(pred.joints)
        return float(np.linalg.norm(diff, axis=-1).mean())
    raise ValueError(f"unknown grouping {grouping!r}")


def motion_metrics(gt: MotionSequence, pred: MotionSequence) -> MetricReport:
    return MetricReport(
        ape={g: ape(gt, pred, g) for g in GROUPINGS},
        ave={g: ave(gt, pred, g) for g in GROUPINGS},
    )


@dataclass
class EntryEvaluation:
    entry_id: str
    report: MetricReport
    sample_root_ape: list = field(default_factory=list)  # root APE of each drawn sample
    sample_reports: list = field(default_factory=list)


@dataclass
class EvalResult:
    mode: EvalMode
    summary: MetricReport
    entries: list

    def best_of_k_curve(self):
        """Mean over entries of the prefix-minimum root APE, for k = 1..K."""
        k = max(len(e.sample_root_ape) for e in self.entries)
        curve = []
        for prefix in range(1, k + 1):
            best = [min(e.sample_root_ape[:prefix]) for e in self.entries]
            curve.append(float(np.mean(best)))
        return curve


def _entry_rng(seed, entry_id):
    digest = hashlib.sha256(entry_id.encode("utf-8")).digest()
    return np.random.default_rng(np.random.SeedSequence([int(seed), int.from_bytes(digest[:8], "little")]))


def _mean_report(reports):
    rows = np.array([r.row() for r in reports])
    return MetricReport.from_row(rows.mean(axis=0).tolist())


def evaluate(bundle, entries, mode: EvalMode, seed=0, target_fps=100.0) -> EvalResult:
    """Run the metric suite over a test set.

    Per entry: encode the first description, resolve latents by mode, decode
    at the ground-truth duration, destandardize, decode features to joints,
    upsample to the ground truth's frame rate, canonicalize both sides and
    score. Each entry's rng stream depends only on (seed, entry id), so the
    result is independent of evaluation order.
    """
    model, vocab, standardizer = bundle.model, bundle.vocab, bundle.standardizer
    if bundle.codec_name != "skeleton64":
        raise ValueError(
            "evaluation compares joint positions and supports skeleton-codec checkpoints only"
        )
    if mode.kind == DETERMINISTIC and not model.config.deterministic:
        raise ValueError("deterministic mode needs a deterministic-variant checkpoint")
    if mode.kind != DETERMINISTIC and model.config.deterministic:
        raise ValueError(f"checkpoint is the deterministic variant; mode {mode.kind!r} cannot sample")
    codec = SkeletonFeatureCodec()
    model.eval()

    per_entry = []
    for entry in entries:
        rng = _entry_rng(seed, entry.entry_id)
        text = select_description(entry, EVAL_FIRST)
        duration = entry.features.num_frames
        z = latent_for_text(
            model, vocab, text,
            rng=rng,
            z_zero=(mode.kind == Z_ZERO),
            k=mode.samples,
        )
        out = model.decode(Tensor(np.asarray(z, dtype=model.dtype)), duration)

        gt_fps = entry.motion.fps
        eval_fps = gt_fps if abs(gt_fps - target_fps) < 1e-9 else target_fps
        gt = entry.motion if abs(gt_fps - eval_fps) < 1e-9 else resample(entry.motion, eval_fps)
        gt = canonicalize_for_eval(gt)

        reports = []
        for i in range(mode.samples):
            feats = FeatureSequence(out.data[i].astype(np.float64), standardized=True)
            pred = codec.inverse_transform(standardizer.inverse_transform(feats))
            pred = resample(pred, eval_fps)
            pred = canonicalize_for_eval(pred)
            frames = min(gt.num_frames, pred.num_frames)
            gt_cut = MotionSequence(gt.joints[:frames], eval_fps, gt.joint_set)
            pred_cut = MotionSequence(pred.joints[:frames], eval_fps, pred.joint_set)
            reports.append(motion_metrics(gt_cut, pred_cut))
        root_apes = [r.ape["root_joint"] for r in reports]
        if mode.kind == K_RANDOM_BEST:
            chosen = reports[int(np.argmin(root_apes))]
        elif mode.kind == K_RANDOM_AVG:
            chosen = _mean_report(reports)
        else:
            chosen = reports[0]
        per_entry.append(
            EntryEvaluation(
                entry_id=entry.entry_id,
                report=chosen,
                sample_root_ape=root_apes,
                sample_reports=reports,
            )
        )

    summary = _mean_report([e.report for e in per_entry])
    return EvalResult(mode=mode, summary=summary, entries=per_entry)


def write_report_csv(path, result: EvalResult):
    """One summary row plus one row per entry."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entry_id"] + list(MetricReport.CSV_FIELDS))
        writer.writerow(["<summary>"] + [f"{v:.6f}" for v in result.summary.row()])
        for entry in result.entries:
            writer.writerow([entry.entry_id] + [f"{v:.6f}" for v in entry.report.row()])
