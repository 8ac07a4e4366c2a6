"""Command-line entry point.

Subcommands: synth, train, sample, evaluate, roundtrip, gradcheck.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Commands that produce an output directory write a run manifest (command,
arguments, seed, content hashes of the inputs, timestamps) next to their
outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class DataError(Exception):
    """Unusable input data; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def content_hash(*paths):
    """Hex digest over the given files (directories are walked in sorted order)."""
    digest = hashlib.sha256()
    for path in paths:
        path = Path(path)
        if not path.exists():
            continue
        files = sorted(p for p in path.rglob("*") if p.is_file()) if path.is_dir() else [path]
        for f in files:
            digest.update(str(f.name).encode())
            digest.update(f.read_bytes())
    return digest.hexdigest()[:16]


def write_manifest(out_dir, command, args_dict, seed, inputs, started):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "arguments": {k: str(v) for k, v in args_dict.items()},
        "seed": seed,
        "input_hash": content_hash(*inputs),
        "started_at": started,
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=1), encoding="utf-8")


def _timestamp():
    return time.strftime("%Y-%m-%dT%H:%M:%S%z")


def cmd_synth(args):
    from .data.kit import write_kit_layout
    from .data.synthetic import synthetic_corpus

    started = _timestamp()
    entries = synthetic_corpus(args.seed, args.n)
    write_kit_layout(entries, args.out)
    write_manifest(args.out, "synth", vars(args), args.seed, [], started)
    print(f"wrote {len(entries)} entries to {args.out}")
    return EXIT_OK


def cmd_train(args):
    from .data.kit import load_kit
    from .training import TrainConfig, train

    started = _timestamp()
    config = TrainConfig.from_file(args.config)
    data = Path(args.data)
    train_split = data / "train.txt"
    if not train_split.exists():
        raise DataError(f"{train_split} not found")
    entries = load_kit(data, train_split, split="train")
    val_split = data / "val.txt"
    if val_split.exists():
        entries += load_kit(data, val_split, split="val")
    if not entries:
        raise DataError("no usable training entries")
    result = train(config, entries, out_dir=args.out)
    write_manifest(args.out, "train", vars(args), config.seed, [args.config, args.data], started)
    print(f"final checkpoint: {result.final_checkpoint}")
    if result.best_checkpoint:
        print(f"best-validation checkpoint: {result.best_checkpoint}")
    return EXIT_OK


def cmd_sample(args):
    from .checkpoint import load_checkpoint
    from .motion.skeleton import SkeletonFeatureCodec
    from .motion.tmf import write_tmf
    from .sampling import generate_motions

    started = _timestamp()
    if not args.text.strip():
        raise DataError("empty text")
    bundle = load_checkpoint(args.checkpoint)
    if bundle.codec_name != "skeleton64":
        raise DataError("sampling to joint files supports skeleton-codec checkpoints only")
    motions = generate_motions(
        bundle.model, bundle.vocab, bundle.standardizer, SkeletonFeatureCodec(),
        args.text, args.duration, k=args.k,
        rng=np.random.default_rng(args.seed), z_zero=args.z_zero,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, motion in enumerate(motions):
        write_tmf(out / f"sample-{i:02d}.tmf1", motion.joints.reshape(motion.num_frames, -1))
        lines = [f"{x:.6f} {y:.6f}" for x, y in motion.joints[:, 0, :2]]
        (out / f"sample-{i:02d}-trajectory.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    write_manifest(args.out, "sample", vars(args), args.seed, [args.checkpoint], started)
    print(f"wrote {len(motions)} motions to {out}")
    return EXIT_OK


def cmd_evaluate(args):
    from .checkpoint import load_checkpoint
    from .data.kit import load_kit
    from .metrics import GROUPINGS, EvalMode, evaluate, write_report_csv

    started = _timestamp()
    bundle = load_checkpoint(args.checkpoint)
    data = Path(args.data)
    split_file = Path(args.split) if args.split else data / "test.txt"
    if not split_file.exists():
        raise DataError(f"split file {split_file} not found")
    entries = load_kit(data, split_file, split="test")
    if not entries:
        raise DataError("no evaluable entries")
    mode = EvalMode(args.mode, args.k)
    result = evaluate(bundle, entries, mode, seed=args.seed, target_fps=args.fps)
    write_report_csv(args.out, result)
    out_dir = Path(args.out).resolve().parent
    write_manifest(out_dir, "evaluate", vars(args), args.seed, [args.checkpoint, args.data], started)
    print(f"mode={mode.kind} k={mode.k} over {len(result.entries)} entries")
    for g in GROUPINGS:
        print(f"  APE {g:12s} {result.summary.ape[g]:.4f}   AVE {g:12s} {result.summary.ave[g]:.4f}")
    print(f"report: {args.out}")
    return EXIT_OK


def cmd_roundtrip(args):
    from .motion.frames import canonicalize
    from .motion.resample import resample
    from .motion.skeleton import SkeletonFeatureCodec
    from .motion.tmf import read_tmf
    from .motion.types import MMM21, MotionSequence

    flat = read_tmf(args.file)
    if flat.shape[1] != 63:
        raise DataError(f"{args.file}: expected 63 columns of MMM joints, got {flat.shape[1]}")
    motion = MotionSequence(flat.reshape(flat.shape[0], 21, 3), args.fps, MMM21)
    codec = SkeletonFeatureCodec()
    if abs(motion.fps - codec.fps) > 1e-9:
        motion = resample(motion, codec.fps)
    decoded = codec.inverse_transform(codec.transform(motion))
    reference = canonicalize(motion)
    err = float(np.abs(decoded.joints - reference.joints).max())
    print(f"frames={motion.num_frames} max per-coordinate roundtrip error: {err:.3e}")
    if not np.isfinite(err) or err > args.tolerance:
        print(f"FAIL (tolerance {args.tolerance:g})")
        return EXIT_NUMERIC
    print(f"PASS (tolerance {args.tolerance:g})")
    return EXIT_OK


def cmd_gradcheck(args):
    from .nn.gradcheck import TOLERANCE, run_op_checks

    results = run_op_checks(seed=args.seed)
    width = max(len(name) for name, _, _ in results)
    failed = 0
    for name, err, ok in results:
        print(f"{name:{width}s}  max-rel-err {err:.3e}  {'PASS' if ok else 'FAIL'}")
        failed += 0 if ok else 1
    print(f"{len(results) - failed}/{len(results)} ops within {TOLERANCE:g}")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def build_parser():
    parser = _Parser(prog="text2motion", description="Text-conditioned human motion generation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset in the on-disk layout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--config", required=True, help="flat key = value config file")
    p.add_argument("--data", required=True, help="dataset directory with train.txt (and optional val.txt)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("sample", help="generate motions for a description")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--duration", type=int, required=True, help="frames at 12.5 Hz")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--z-zero", action="store_true", help="decode the latent-space mean instead of sampling")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("evaluate", help="run the metric suite on a test split")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", default=None, help="split file (default <data>/test.txt)")
    p.add_argument("--mode", default="single_random",
                   choices=["deterministic", "z_zero", "single_random", "k_random_avg", "k_random_best"])
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fps", type=float, default=100.0, help="frame rate metrics are computed at")
    p.add_argument("--out", required=True, help="report CSV path")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("roundtrip", help="encode/decode a joints file and report the error")
    p.add_argument("--file", required=True, help="TMF1 joints file (frames x 63)")
    p.add_argument("--fps", type=float, default=100.0, help="frame rate of the file")
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.set_defaults(fn=cmd_roundtrip)

    p = sub.add_parser("gradcheck", help="finite-difference check of every differentiable op")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_gradcheck)

    return parser


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
