"""Versioned checkpoint container.

A checkpoint is a zip holding a JSON manifest (format version, training
config echo, vocabulary, optimizer scalars and parameter shapes), one TMF1
payload per named parameter tensor (and per optimizer moment), and the
feature standardization stats in the binary stats format.
"""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass

import numpy as np

from .model import ModelConfig, TextMotionModel
from .motion.standardize import FeatureStandardizer
from .motion import tmf
from .data.text import Vocabulary

FORMAT_NAME = "text2motion-checkpoint"
FORMAT_VERSION = 1


def _as_2d(array):
    return array.reshape(array.shape[0] if array.ndim == 2 else 1, -1)


@dataclass
class CheckpointBundle:
    model: TextMotionModel
    vocab: Vocabulary
    standardizer: FeatureStandardizer
    train_config: dict
    optimizer_state: dict | None

    @property
    def codec_name(self):
        return self.train_config.get("codec", "skeleton64")


def save_checkpoint(path, model, vocab, standardizer, train_config, optimizer=None):
    params = dict(model.named_parameters())
    manifest = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "train_config": dict(train_config),
        "feature_dim": model.config.feature_dim,
        "vocab": vocab.to_list(),
        "param_shapes": {name: list(p.shape) for name, p in params.items()},
        "optimizer": None,
    }
    if optimizer is not None:
        manifest["optimizer"] = {
            "step": optimizer.step_count,
            "lr": optimizer.lr,
            "betas": [optimizer.beta1, optimizer.beta2],
            "eps": optimizer.eps,
            "weight_decay": optimizer.weight_decay,
        }
    with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("manifest.json", json.dumps(manifest, indent=1))
        for name, p in params.items():
            zf.writestr(f"params/{name}.tmf1", tmf.to_bytes(_as_2d(p.data)))
        if optimizer is not None:
            for name in params:
                zf.writestr(f"opt_m/{name}.tmf1", tmf.to_bytes(_as_2d(optimizer.m[name])))
                zf.writestr(f"opt_v/{name}.tmf1", tmf.to_bytes(_as_2d(optimizer.v[name])))
        stats = io.BytesIO()
        mean = standardizer.mean_.astype("<f4")
        std = standardizer.std_.astype("<f4")
        stats.write(np.array([mean.size], dtype="<u4").tobytes())
        stats.write(mean.tobytes())
        stats.write(std.tobytes())
        zf.writestr("stats.bin", stats.getvalue())


def load_checkpoint(path) -> CheckpointBundle:
    with zipfile.ZipFile(path, "r") as zf:
        manifest = json.loads(zf.read("manifest.json"))
        if manifest.get("format") != FORMAT_NAME:
            raise ValueError(f"{path}: not a {FORMAT_NAME} file")
        if manifest.get("version") != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {manifest.get('version')}")
        cfg = manifest["train_config"]
        vocab = Vocabulary.from_list(manifest["vocab"])
        model = TextMotionModel(
            ModelConfig(
                feature_dim=int(manifest["feature_dim"]),
                vocab_size=len(vocab),
                latent_dim=int(cfg.get("latent_dim", 256)),
                layers=int(cfg.get("layers", 6)),
                heads=int(cfg.get("heads", 4)),
                ff_dim=int(cfg.get("ff_dim", 1024)),
                dropout=float(cfg.get("dropout", 0.1)),
                deterministic=bool(cfg.get("deterministic", False)),
            ),
            seed=int(cfg.get("seed", 0)),
        )
        params = dict(model.named_parameters())
        if set(params) != set(manifest["param_shapes"]):
            raise ValueError(f"{path}: parameter names do not match the configured model")
        for name, p in params.items():
            flat = tmf.from_bytes(zf.read(f"params/{name}.tmf1"), str(path))
            p.copy_(flat.reshape(p.shape).astype(p.dtype))
        optimizer_state = None
        if manifest.get("optimizer") is not None:
            optimizer_state = dict(manifest["optimizer"])
            optimizer_state["m"] = {}
            optimizer_state["v"] = {}
            for name, p in params.items():
                optimizer_state["m"][name] = (
                    tmf.from_bytes(zf.read(f"opt_m/{name}.tmf1"), str(path)).reshape(p.shape).astype(np.float32)
                )
                optimizer_state["v"][name] = (
                    tmf.from_bytes(zf.read(f"opt_v/{name}.tmf1"), str(path)).reshape(p.shape).astype(np.float32)
                )
        raw = zf.read("stats.bin")
        width = int(np.frombuffer(raw[:4], dtype="<u4")[0])
        values = np.frombuffer(raw[4:], dtype="<f4").astype(np.float64)
        standardizer = FeatureStandardizer.from_stats(values[:width], values[width : 2 * width])
    model.eval()
    return CheckpointBundle(
        model=model,
        vocab=vocab,
        standardizer=standardizer,
        train_config=cfg,
        optimizer_state=optimizer_state,
    )
