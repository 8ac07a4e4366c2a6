"""Training loop: variable-length batching, two decoding branches, AdamW.

Each iteration samples a minibatch, picks one description per entry, runs
the motion->motion and text->motion branches through the shared decoder,
and applies one optimizer step on the combined loss. All randomness
(parameter init, batch order, description choice, latent noise, dropout)
derives from the run seed, so fixed-seed runs reproduce exactly.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .checkpoint import CheckpointBundle, save_checkpoint
from .data.dataset import EVAL_FIRST, TRAIN_RANDOM, select_description
from .data.text import PAD_ID, Vocabulary, build_vocab
from .losses import LossConfig, NonFiniteLoss, total_loss
from .model import ModelConfig, TextMotionModel
from .motion.skeleton import SkeletonFeatureCodec
from .motion.smplpose import SmplFeatureCodec
from .motion.standardize import FeatureStandardizer
from .motion.types import SKELETON_DIM, SMPL_DIM
from .nn.layers import AttentionMask
from .nn.optim import AdamW, NonFiniteGradient

log = logging.getLogger(__name__)

CODECS = {"skeleton64": (SkeletonFeatureCodec, SKELETON_DIM), "smpl135": (SmplFeatureCodec, SMPL_DIM)}


class TrainingDiverged(RuntimeError):
    """Loss or gradients became non-finite; carries the last-good checkpoint path."""

    def __init__(self, message, checkpoint_path=None):
        super().__init__(message)
        self.checkpoint_path = checkpoint_path


@dataclass
class TrainConfig:
    epochs: int = 1000
    batch_size: int = 32
    lr: float = 1e-4
    lambda_kl: float = 1e-5
    lambda_e: float = 1e-5
    layers: int = 6
    heads: int = 4
    latent_dim: int = 256
    ff_dim: int = 1024
    dropout: float = 0.1
    max_train_frames: int = 500
    seed: int = 0
    codec: str = "skeleton64"
    deterministic: bool = False
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    weight_decay: float = 1e-2
    grad_clip: float = 0.0
    checkpoint_every: int = 100
    cross_modal_kl: bool = True
    prior_kl: bool = True
    embedding_similarity: bool = True

    def __post_init__(self):
        for name in ("epochs", "batch_size", "lr", "latent_dim", "layers", "heads", "ff_dim",
                     "max_train_frames", "checkpoint_every"):
            if getattr(self, name) <= 0:
                raise ValueError(f"config field {name} must be positive")
        if self.codec not in CODECS:
            raise ValueError(f"unknown codec {self.codec!r}; choose from {sorted(CODECS)}")
        if self.latent_dim % self.heads != 0:
            raise ValueError(f"latent_dim {self.latent_dim} must be divisible by heads {self.heads}")
        if self.latent_dim % 2 != 0:
            raise ValueError("latent_dim must be even for sinusoidal position codes")

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, values):
        known = {f.name: f.type for f in fields(cls)}
        unknown = set(values) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)

    @classmethod
    def from_file(cls, path):
        """Parse a flat `key = value` file; '#' starts a comment."""
        values = {}
        casts = {f.name: f.type for f in fields(cls)}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (part.strip() for part in line.split("=", 1))
            if key not in casts:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            kind = casts[key]
            if kind in (bool, "bool"):
                if raw.lower() not in ("true", "false", "0", "1", "yes", "no"):
                    raise ValueError(f"{path}:{lineno}: bad boolean {raw!r}")
                values[key] = raw.lower() in ("true", "1", "yes")
            elif kind in (int, "int"):
                values[key] = int(raw)
            elif kind in (float, "float"):
                values[key] = float(raw)
            else:
                values[key] = raw
        return cls(**values)

    def loss_config(self):
        return LossConfig(
            lambda_kl=self.lambda_kl,
            lambda_e=self.lambda_e,
            cross_modal_kl=self.cross_modal_kl and not self.deterministic,
            prior_kl=self.prior_kl and not self.deterministic,
            embedding_similarity=self.embedding_similarity,
        )

    def model_config(self, feature_dim, vocab_size):
        return ModelConfig(
            feature_dim=feature_dim,
            vocab_size=vocab_size,
            latent_dim=self.latent_dim,
            layers=self.layers,
            heads=self.heads,
            ff_dim=self.ff_dim,
            dropout=self.dropout,
            deterministic=self.deterministic,
        )


@dataclass
class Batch:
    features: np.ndarray       # [B, Fmax, p], zero padded, standardized
    motion_mask: AttentionMask
    token_ids: np.ndarray      # [B, Nmax], PAD padded
    text_mask: AttentionMask
    durations: np.ndarray      # [B]

    @property
    def size(self):
        return self.features.shape[0]


def make_batch(entries, vocab, standardizer, rng=None, mode=TRAIN_RANDOM, max_frames=None) -> Batch:
    """Pad a set of entries into one batch; drops over-length entries when
    `max_frames` is given (training only - evaluation keeps everything)."""
    if not entries:
        raise ValueError("cannot build a batch from no entries")
    if max_frames is not None:
        entries = [e for e in entries if e.num_frames <= max_frames]
        if not entries:
            raise ValueError(f"all entries exceed max_frames={max_frames}")

    feats = [standardizer.transform(e.features).features for e in entries]
    texts = [vocab.encode(select_description(e, mode, rng)) for e in entries]
    durations = np.array([f.shape[0] for f in feats], dtype=int)
    lengths = np.array([t.length for t in texts], dtype=int)
    fmax, nmax = durations.max(), lengths.max()
    p = feats[0].shape[1]

    features = np.zeros((len(entries), fmax, p), dtype=np.float32)
    token_ids = np.full((len(entries), nmax), PAD_ID, dtype=np.int64)
    for i, (f, t) in enumerate(zip(feats, texts)):
        features[i, : f.shape[0]] = f
        token_ids[i, : t.length] = t.token_ids
    return Batch(
        features=features,
        motion_mask=AttentionMask.from_lengths(durations, fmax),
        token_ids=token_ids,
        text_mask=AttentionMask.from_lengths(lengths, nmax),
        durations=durations,
    )


def run_batch(model, batch, loss_cfg, noise_rng=None):
    """Both branches through the shared decoder; returns (loss tensor, breakdown)."""
    dist_m = model.encode_motion(batch.features, batch.motion_mask)
    dist_t = model.encode_text(batch.token_ids, batch.text_mask)
    z_m = model.latent_from_dist(dist_m, rng=noise_rng)
    z_t = model.latent_from_dist(dist_t, rng=noise_rng)
    fmax = batch.features.shape[1]
    recon_m = model.decode(z_m, fmax, batch.motion_mask)
    recon_t = model.decode(z_t, fmax, batch.motion_mask)
    return total_loss(
        batch.features, recon_m, recon_t, dist_t, dist_m, z_t, z_m, batch.motion_mask, loss_cfg
    )


def _clip_gradients(named_params, max_norm):
    total = 0.0
    for _, p in named_params:
        if p.grad is not None:
            total += float((p.grad * p.grad).sum())
    norm = np.sqrt(total)
    if norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        for _, p in named_params:
            if p.grad is not None:
                p.grad *= scale
    return norm


@dataclass
class TrainResult:
    model: TextMotionModel
    vocab: Vocabulary
    standardizer: FeatureStandardizer
    config: TrainConfig
    history: list
    final_checkpoint: str | None = None
    best_checkpoint: str | None = None

    def bundle(self):
        return CheckpointBundle(
            model=self.model,
            vocab=self.vocab,
            standardizer=self.standardizer,
            train_config=self.config.to_dict(),
            optimizer_state=None,
        )


def _epoch_validation(model, val_entries, vocab, standardizer, loss_cfg):
    """Text-branch reconstruction on the validation split, first description,
    latent taken at the distribution mean."""
    from .losses import masked_reconstruction

    model.eval()
    batch = make_batch(val_entries, vocab, standardizer, mode=EVAL_FIRST)
    dist_t = model.encode_text(batch.token_ids, batch.text_mask)
    recon_t = model.decode(dist_t.mu, batch.features.shape[1], batch.motion_mask)
    value = float(masked_reconstruction(recon_t, batch.features, batch.motion_mask).data)
    model.train()
    return value


def train(config: TrainConfig, entries, out_dir=None) -> TrainResult:
    """Train on the entries tagged split=='train'; returns model plus history.

    When `out_dir` is set, writes `metrics.csv`, periodic checkpoints, the
    best-validation checkpoint and a final one. A non-finite loss or
    gradient aborts with the last finished epoch's parameters saved.
    """
    train_entries = [e for e in entries if e.split == "train"]
    val_entries = [e for e in entries if e.split == "val"]
    if not train_entries:
        raise ValueError("no training entries (split == 'train')")
    _, feature_dim = CODECS[config.codec]
    bad_dim = [e.entry_id for e in train_entries if e.features.dim != feature_dim]
    if bad_dim:
        raise ValueError(f"entries {bad_dim[:3]} do not match codec {config.codec}")

    vocab = build_vocab(d for e in train_entries for d in e.descriptions)
    standardizer = FeatureStandardizer().fit([e.features for e in train_entries])
    model = TextMotionModel(config.model_config(feature_dim, len(vocab)), seed=config.seed)
    named = list(model.named_parameters())
    optimizer = AdamW(
        named,
        lr=config.lr,
        betas=(config.beta1, config.beta2),
        eps=config.adam_eps,
        weight_decay=config.weight_decay,
    )
    loss_cfg = config.loss_config()

    seeds = np.random.SeedSequence(config.seed).spawn(3)
    order_rng = np.random.default_rng(seeds[0])
    desc_rng = np.random.default_rng(seeds[1])
    noise_rng = None if config.deterministic else np.random.default_rng(seeds[2])

    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "metrics.csv" if out is not None else None
    csv_file = open(csv_path, "w", newline="", encoding="utf-8") if csv_path else None
    writer = csv.writer(csv_file) if csv_file else None
    if writer:
        writer.writerow(["epoch", "l_r", "l_kl", "l_e", "total", "val_l_r"])

    history = []
    last_good = None
    best_val = np.inf
    best_path = None
    final_path = None

    def snapshot():
        return (
            {name: p.data.copy() for name, p in named},
            optimizer.state_dict(),
        )

    def write_checkpoint(name, params_state=None):
        if out is None:
            return None
        if params_state is not None:
            current = snapshot()
            params, opt_state = params_state
            for pname, p in named:
                p.copy_(params[pname])
            optimizer.load_state_dict(opt_state)
            path = out / name
            save_checkpoint(path, model, vocab, standardizer, config.to_dict(), optimizer)
            for pname, p in named:
                p.copy_(current[0][pname])
            optimizer.load_state_dict(current[1])
            return str(path)
        path = out / name
        save_checkpoint(path, model, vocab, standardizer, config.to_dict(), optimizer)
        return str(path)

    model.train()
    try:
        for epoch in range(1, config.epochs + 1):
            order = order_rng.permutation(len(train_entries))
            sums = None
            seen = 0
            for start in range(0, len(order), config.batch_size):
                chunk = [train_entries[i] for i in order[start : start + config.batch_size]]
                chunk = [e for e in chunk if e.num_frames <= config.max_train_frames]
                if not chunk:
                    continue
                batch = make_batch(chunk, vocab, standardizer, desc_rng, TRAIN_RANDOM)
                optimizer.zero_grad()
                loss, breakdown = run_batch(model, batch, loss_cfg, noise_rng)
                loss.backward()
                if config.grad_clip > 0:
                    _clip_gradients(named, config.grad_clip)
                optimizer.step()
                row = np.array(breakdown.row())
                sums = row * batch.size if sums is None else sums + row * batch.size
                seen += batch.size
            if seen == 0:
                raise ValueError("every training entry exceeds max_train_frames")
            epoch_means = sums / seen
            record = dict(zip(breakdown.CSV_FIELDS, epoch_means))
            record["epoch"] = epoch
            record["val_l_r"] = (
                _epoch_validation(model, val_entries, vocab, standardizer, loss_cfg)
                if val_entries
                else float("nan")
            )
            history.append(record)
            if writer:
                writer.writerow(
                    [epoch] + [f"{record[k]:.6g}" for k in ("l_r", "l_kl", "l_e", "total", "val_l_r")]
                )
                csv_file.flush()
            last_good = snapshot()
            if val_entries and record["val_l_r"] < best_val:
                best_val = record["val_l_r"]
                best_path = write_checkpoint("checkpoint-best.ckpt")
            if epoch % config.checkpoint_every == 0 and epoch != config.epochs:
                write_checkpoint(f"checkpoint-epoch{epoch:06d}.ckpt")
            if epoch % max(1, config.epochs // 20) == 0:
                log.info("epoch %d/%d total=%.5f", epoch, config.epochs, record["total"])
    except (NonFiniteLoss, NonFiniteGradient) as exc:
        saved = write_checkpoint("checkpoint-last-good.ckpt", params_state=last_good) if last_good else None
        raise TrainingDiverged(f"training aborted: {exc}", checkpoint_path=saved) from exc
    finally:
        if csv_file:
            csv_file.close()

    final_path = write_checkpoint("checkpoint-final.ckpt")
    model.eval()
    return TrainResult(
        model=model,
        vocab=vocab,
        standardizer=standardizer,
        config=config,
        history=history,
        final_checkpoint=final_path,
        best_checkpoint=best_path,
    )


class TextToMotionGenerator(BaseEstimator):
    """Estimator-style wrapper: fit on dataset entries, sample motions from text."""

    def __init__(self, epochs=1000, batch_size=32, lr=1e-4, lambda_kl=1e-5, lambda_e=1e-5,
                 layers=6, heads=4, latent_dim=256, ff_dim=1024, dropout=0.1,
                 max_train_frames=500, seed=0, codec="skeleton64", deterministic=False,
                 grad_clip=0.0, checkpoint_every=100):
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr = lr
        self.lambda_kl = lambda_kl
        self.lambda_e = lambda_e
        self.layers = layers
        self.heads = heads
        self.latent_dim = latent_dim
        self.ff_dim = ff_dim
        self.dropout = dropout
        self.max_train_frames = max_train_frames
        self.seed = seed
        self.codec = codec
        self.deterministic = deterministic
        self.grad_clip = grad_clip
        self.checkpoint_every = checkpoint_every

    def _config(self):
        return TrainConfig(**{k: v for k, v in self.get_params().items()})

    def fit(self, X, y=None, out_dir=None):
        result = train(self._config(), list(X), out_dir=out_dir)
        self.model_ = result.model
        self.vocab_ = result.vocab
        self.standardizer_ = result.standardizer
        self.history_ = result.history
        self.result_ = result
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("generator is not fitted; call fit() or load a checkpoint")

    def sample(self, text, duration, k=1, seed=0, z_zero=False):
        """Generate `k` motions for one description at the given frame count."""
        from .sampling import generate_motions

        self._check_fitted()
        return generate_motions(
            self.model_, self.vocab_, self.standardizer_,
            CODECS[self.codec][0](), text, duration, k=k,
            rng=np.random.default_rng(seed), z_zero=z_zero,
        )
