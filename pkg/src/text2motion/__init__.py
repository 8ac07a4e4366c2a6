"""Text-conditioned generative modeling of 3D human motion.

A cross-modal variational autoencoder: transformer encoders map motion and
text into one Gaussian latent space, and a transformer decoder expands a
single latent vector into a motion of any requested duration. Includes the
motion feature codecs, a from-scratch autodiff core, the training loop and
the positional/variance evaluation metrics.
"""

from .checkpoint import CheckpointBundle, load_checkpoint, save_checkpoint
from .losses import LossBreakdown, LossConfig, total_loss
from .metrics import EvalMode, MetricReport, ape, ave, canonicalize_for_eval, evaluate
from .model import LatentDistribution, ModelConfig, TextMotionModel
from .sampling import generate_motions
from .training import Batch, TextToMotionGenerator, TrainConfig, make_batch, train

__version__ = "0.1.0"

__all__ = [
    "Batch",
    "CheckpointBundle",
    "EvalMode",
    "LatentDistribution",
    "LossBreakdown",
    "LossConfig",
    "MetricReport",
    "ModelConfig",
    "TextMotionModel",
    "TextToMotionGenerator",
    "TrainConfig",
    "ape",
    "ave",
    "canonicalize_for_eval",
    "evaluate",
    "generate_motions",
    "load_checkpoint",
    "make_batch",
    "save_checkpoint",
    "total_loss",
    "train",
]
