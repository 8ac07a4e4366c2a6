"""Training loss: masked reconstruction, latent KL terms, embedding similarity.

Total = L_R + lambda_KL * L_KL + lambda_E * L_E where L_R compares both
decoded branches to the target over valid frames only, L_KL holds up to
four terms (text<->motion both ways plus each against the standard-normal
prior) and L_E ties the two sampled latents together. Ablation switches
drop term groups without touching the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nn import tensor as T
from .nn.tensor import Tensor


class NonFiniteLoss(ArithmeticError):
    """A loss term evaluated to NaN or inf."""


@dataclass
class LossConfig:
    lambda_kl: float = 1e-5
    lambda_e: float = 1e-5
    cross_modal_kl: bool = True
    prior_kl: bool = True
    embedding_similarity: bool = True


@dataclass
class LossBreakdown:
    l_r_motion: float
    l_r_text: float
    l_r: float
    kl_text_to_motion: float
    kl_motion_to_text: float
    kl_text_to_prior: float
    kl_motion_to_prior: float
    l_kl: float
    l_e: float
    total: float

    CSV_FIELDS = (
        "l_r", "l_kl", "l_e", "total",
        "l_r_motion", "l_r_text",
        "kl_text_to_motion", "kl_motion_to_text", "kl_text_to_prior", "kl_motion_to_prior",
    )

    def row(self):
        return [getattr(self, name) for name in self.CSV_FIELDS]


def masked_reconstruction(pred, target, mask):
    """Mean smooth-L1 over valid frames and all channels."""
    target = target if isinstance(target, Tensor) else Tensor(np.asarray(target, dtype=pred.dtype))
    loss = T.smooth_l1(pred, target)
    weights = mask.valid.astype(pred.dtype)[:, :, None]
    total = T.sum_(T.mul(loss, Tensor(weights)))
    count = float(mask.valid.sum()) * pred.shape[-1]
    return T.mul(total, pred.data.dtype.type(1.0 / count))


def latent_similarity(z_a, z_b):
    """Mean smooth-L1 between two latent batches."""
    return T.mean(T.smooth_l1(z_a, z_b))


def kl_divergence(dist_a, dist_b=None):
    """Closed-form KL between diagonal Gaussians, summed over the latent dim
    and averaged over the batch. `dist_b=None` means the standard normal."""
    mu_a, logstd_a = dist_a.mu, dist_a.log_std
    if dist_b is None:
        zero = Tensor(np.zeros_like(mu_a.data))
        mu_b, logstd_b = zero, zero
    else:
        mu_b, logstd_b = dist_b.mu, dist_b.log_std
    var_a = T.exp(T.mul(logstd_a, 2.0))
    var_b = T.exp(T.mul(logstd_b, 2.0))
    diff2 = T.square(T.sub(mu_a, mu_b))
    elem = T.sub(
        T.add(T.sub(logstd_b, logstd_a), T.div(T.add(var_a, diff2), T.mul(var_b, 2.0))),
        0.5,
    )
    return T.mean(T.sum_(elem, axis=1))


def _term(name, tensor):
    value = float(tensor.data)
    if not np.isfinite(value):
        raise NonFiniteLoss(f"loss term '{name}' is not finite ({value})")
    return value


def total_loss(target, recon_motion, recon_text, dist_text, dist_motion, z_text, z_motion,
               mask, cfg: LossConfig):
    """Assemble the weighted training loss; returns (scalar tensor, breakdown).

    Reconstruction covers only unpadded frames. The deterministic variant
    passes point embeddings and must run with both KL groups switched off.
    """
    dtype = recon_motion.data.dtype.type

    lr_m = masked_reconstruction(recon_motion, target, mask)
    lr_t = masked_reconstruction(recon_text, target, mask)
    l_r = T.add(lr_m, lr_t)

    zero = Tensor(np.zeros((), dtype=recon_motion.data.dtype))
    kl_tm = kl_mt = kl_tp = kl_mp = None
    l_kl = zero
    use_kl = cfg.cross_modal_kl or cfg.prior_kl
    if use_kl and (dist_text.is_point or dist_motion.is_point):
        raise ValueError("KL terms need Gaussian latents; got point embeddings")
    if cfg.cross_modal_kl:
        kl_tm = kl_divergence(dist_text, dist_motion)
        kl_mt = kl_divergence(dist_motion, dist_text)
        l_kl = T.add(l_kl, T.add(kl_tm, kl_mt))
    if cfg.prior_kl:
        kl_tp = kl_divergence(dist_text, None)
        kl_mp = kl_divergence(dist_motion, None)
        l_kl = T.add(l_kl, T.add(kl_tp, kl_mp))

    l_e = latent_similarity(z_text, z_motion) if cfg.embedding_similarity else zero

    total = T.add(l_r, T.add(T.mul(l_kl, dtype(cfg.lambda_kl)), T.mul(l_e, dtype(cfg.lambda_e))))

    breakdown = LossBreakdown(
        l_r_motion=_term("reconstruction(motion)", lr_m),
        l_r_text=_term("reconstruction(text)", lr_t),
        l_r=_term("reconstruction", l_r),
        kl_text_to_motion=_term("kl(text, motion)", kl_tm) if kl_tm is not None else 0.0,
        kl_motion_to_text=_term("kl(motion, text)", kl_mt) if kl_mt is not None else 0.0,
        kl_text_to_prior=_term("kl(text, prior)", kl_tp) if kl_tp is not None else 0.0,
        kl_motion_to_prior=_term("kl(motion, prior)", kl_mp) if kl_mp is not None else 0.0,
        l_kl=_term("kl", l_kl),
        l_e=_term("embedding", l_e),
        total=_term("total", total),
    )
    return total, breakdown
