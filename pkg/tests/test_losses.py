import numpy as np
import pytest

from text2motion.losses import (
    LossConfig,
    NonFiniteLoss,
    kl_divergence,
    latent_similarity,
    masked_reconstruction,
    total_loss,
)
from text2motion.model import LatentDistribution
from text2motion.nn.layers import AttentionMask
from text2motion.nn.tensor import Tensor


def _dist(mu, log_std):
    return LatentDistribution(Tensor(np.asarray(mu, dtype=np.float64)),
                              Tensor(np.asarray(log_std, dtype=np.float64)))


def test_kl_of_identical_distributions_is_zero(rng):
    mu = rng.normal(size=(3, 6))
    ls = rng.normal(size=(3, 6)) * 0.5
    value = float(kl_divergence(_dist(mu, ls), _dist(mu.copy(), ls.copy())).data)
    assert abs(value) < 1e-10


def test_kl_against_standard_normal_closed_form(rng):
    mu = rng.normal(size=(4, 8))
    dist = _dist(mu, np.zeros((4, 8)))
    value = float(kl_divergence(dist, None).data)
    expect = 0.5 * np.square(mu).sum(axis=1).mean()
    assert value == pytest.approx(expect, abs=1e-8)


def test_kl_matches_monte_carlo():
    # E_p[log p - log q] over 10^6 draws
    rng = np.random.default_rng(21)
    d = 4
    mu_a, ls_a = rng.normal(size=(1, d)), rng.normal(size=(1, d)) * 0.3
    mu_b, ls_b = rng.normal(size=(1, d)), rng.normal(size=(1, d)) * 0.3
    closed = float(kl_divergence(_dist(mu_a, ls_a), _dist(mu_b, ls_b)).data)

    std_a, std_b = np.exp(ls_a[0]), np.exp(ls_b[0])
    samples = rng.normal(size=(1_000_000, d)) * std_a + mu_a[0]

    def logpdf(x, mu, std):
        return (-0.5 * ((x - mu) / std) ** 2 - np.log(std) - 0.5 * np.log(2 * np.pi)).sum(axis=1)

    mc = (logpdf(samples, mu_a[0], std_a) - logpdf(samples, mu_b[0], std_b)).mean()
    assert closed == pytest.approx(mc, rel=0.01)


def test_kl_is_nonnegative(rng):
    for i in range(10):
        r = np.random.default_rng(i)
        a = _dist(r.normal(size=(2, 5)), r.normal(size=(2, 5)))
        b = _dist(r.normal(size=(2, 5)), r.normal(size=(2, 5)))
        assert float(kl_divergence(a, b).data) >= 0.0


def _loss_inputs(rng, b=2, frames=5, p=64):
    target = rng.normal(size=(b, frames, p))
    mask = AttentionMask(np.ones((b, frames), bool))
    dist_t = _dist(rng.normal(size=(b, 8)), rng.normal(size=(b, 8)) * 0.2)
    dist_m = _dist(rng.normal(size=(b, 8)), rng.normal(size=(b, 8)) * 0.2)
    z_t = Tensor(rng.normal(size=(b, 8)))
    z_m = Tensor(rng.normal(size=(b, 8)))
    return target, mask, dist_t, dist_m, z_t, z_m


def test_perfect_reconstruction_and_prior_gives_zero_total(rng):
    target, mask, *_ = _loss_inputs(rng)
    perfect = Tensor(target.copy())
    prior = _dist(np.zeros((2, 8)), np.zeros((2, 8)))
    z = Tensor(rng.normal(size=(2, 8)))
    total, breakdown = total_loss(
        target, perfect, Tensor(target.copy()), prior, prior, z, Tensor(z.data.copy()),
        mask, LossConfig(),
    )
    assert float(total.data) == pytest.approx(0.0, abs=1e-12)
    assert breakdown.total == pytest.approx(0.0, abs=1e-12)


def test_default_weights_are_1e_minus_5():
    cfg = LossConfig()
    assert cfg.lambda_kl == pytest.approx(1e-5)
    assert cfg.lambda_e == pytest.approx(1e-5)


def test_total_is_exact_weighted_sum(rng):
    target, mask, dist_t, dist_m, z_t, z_m = _loss_inputs(rng)
    recon = Tensor(rng.normal(size=target.shape))
    cfg = LossConfig(lambda_kl=1e-3, lambda_e=1e-2)
    total, b = total_loss(target, recon, recon, dist_t, dist_m, z_t, z_m, mask, cfg)
    assert b.total == pytest.approx(b.l_r + 1e-3 * b.l_kl + 1e-2 * b.l_e, rel=1e-12)
    assert b.l_kl == pytest.approx(
        b.kl_text_to_motion + b.kl_motion_to_text + b.kl_text_to_prior + b.kl_motion_to_prior,
        rel=1e-9,
    )
    assert b.l_r == pytest.approx(b.l_r_motion + b.l_r_text, rel=1e-12)
    assert b.total >= 0.0


def test_dropping_cross_modal_kl_keeps_prior_terms(rng):
    target, mask, dist_t, dist_m, z_t, z_m = _loss_inputs(rng)
    recon = Tensor(rng.normal(size=target.shape))
    cfg = LossConfig(cross_modal_kl=False)
    _, b = total_loss(target, recon, recon, dist_t, dist_m, z_t, z_m, mask, cfg)
    assert b.kl_text_to_motion == 0.0 and b.kl_motion_to_text == 0.0
    assert b.kl_text_to_prior > 0.0 and b.kl_motion_to_prior > 0.0
    assert b.l_kl == pytest.approx(b.kl_text_to_prior + b.kl_motion_to_prior, rel=1e-9)


def test_dropping_priors_keeps_cross_modal(rng):
    target, mask, dist_t, dist_m, z_t, z_m = _loss_inputs(rng)
    recon = Tensor(rng.normal(size=target.shape))
    cfg = LossConfig(prior_kl=False)
    _, b = total_loss(target, recon, recon, dist_t, dist_m, z_t, z_m, mask, cfg)
    assert b.kl_text_to_prior == 0.0 and b.kl_motion_to_prior == 0.0
    assert b.l_kl == pytest.approx(b.kl_text_to_motion + b.kl_motion_to_text, rel=1e-9)


def test_embedding_loss_can_be_disabled(rng):
    target, mask, dist_t, dist_m, z_t, z_m = _loss_inputs(rng)
    recon = Tensor(rng.normal(size=target.shape))
    _, b = total_loss(target, recon, recon, dist_t, dist_m, z_t, z_m, mask,
                      LossConfig(embedding_similarity=False))
    assert b.l_e == 0.0


def test_nan_term_is_identified(rng):
    target, mask, dist_t, dist_m, z_t, z_m = _loss_inputs(rng)
    bad = Tensor(np.full(target.shape, np.nan))
    with pytest.raises(NonFiniteLoss, match="reconstruction\\(motion\\)"):
        total_loss(target, bad, Tensor(target), dist_t, dist_m, z_t, z_m, mask, LossConfig())


def test_masked_frames_do_not_contribute(rng):
    target = rng.normal(size=(1, 4, 64))
    pred = Tensor(target + 1.0)
    full = AttentionMask(np.ones((1, 4), bool))
    value_full = float(masked_reconstruction(pred, target, full).data)
    # corrupt the last frame of the prediction but mask it out
    corrupted = target + 1.0
    corrupted[0, -1] = 1e6
    half = AttentionMask(np.array([[True, True, True, False]]))
    value_masked = float(masked_reconstruction(Tensor(corrupted), target, half).data)
    assert value_masked == pytest.approx(value_full, rel=1e-12)


def test_latent_similarity_smooth_l1(rng):
    a = Tensor(np.zeros((2, 4)))
    b = Tensor(np.full((2, 4), 0.5))
    assert float(latent_similarity(a, b).data) == pytest.approx(0.125)
