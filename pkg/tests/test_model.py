import numpy as np
import pytest

from text2motion.model import LatentDistribution, ModelConfig, TextMotionModel, reparameterize
from text2motion.nn.gradcheck import check_gradient
from text2motion.nn.layers import AttentionMask
from text2motion.nn.tensor import Tensor
from text2motion.nn import tensor as T

CFG = ModelConfig(feature_dim=64, vocab_size=11, latent_dim=16, layers=2, heads=2, ff_dim=32, dropout=0.1)


def _model(deterministic=False, dropout=0.1):
    cfg = ModelConfig(
        feature_dim=CFG.feature_dim, vocab_size=CFG.vocab_size, latent_dim=CFG.latent_dim,
        layers=CFG.layers, heads=CFG.heads, ff_dim=CFG.ff_dim, dropout=dropout,
        deterministic=deterministic,
    )
    return TextMotionModel(cfg, seed=0).eval()


def _motion_batch(rng, b=2, frames=9):
    feats = rng.normal(size=(b, frames, CFG.feature_dim)).astype(np.float32)
    mask = AttentionMask(np.ones((b, frames), dtype=bool))
    return feats, mask


def test_encoders_output_two_latent_vectors(rng):
    model = _model()
    feats, mask = _motion_batch(rng)
    dist = model.encode_motion(feats, mask)
    assert dist.mu.shape == (2, CFG.latent_dim)
    assert dist.log_std.shape == (2, CFG.latent_dim)
    ids = rng.integers(0, CFG.vocab_size, size=(2, 5))
    dist_t = model.encode_text(ids, AttentionMask(np.ones((2, 5), bool)))
    assert dist_t.mu.shape == (2, CFG.latent_dim)
    assert np.isfinite(dist_t.mu.data).all() and np.isfinite(dist_t.log_std.data).all()


def test_padding_frames_do_not_change_latents(rng):
    model = _model()
    feats, mask = _motion_batch(rng, b=1, frames=6)
    base = model.encode_motion(feats, mask)
    pad = np.concatenate([feats, 99.0 * np.ones((1, 3, CFG.feature_dim), np.float32)], axis=1)
    padmask = AttentionMask(np.concatenate([mask.valid, np.zeros((1, 3), bool)], axis=1))
    padded = model.encode_motion(pad, padmask)
    assert np.abs(padded.mu.data - base.mu.data).max() < 1e-5
    assert np.abs(padded.log_std.data - base.log_std.data).max() < 1e-5


def test_pad_tokens_after_mask_do_not_change_text_latents(rng):
    model = _model()
    ids = np.array([[2, 3, 4, 0, 0]])
    mask = AttentionMask(np.array([[True, True, True, False, False]]))
    base = model.encode_text(ids, mask)
    permuted = np.array([[2, 3, 4, 7, 1]])  # different junk under the mask
    other = model.encode_text(permuted, mask)
    assert np.abs(other.mu.data - base.mu.data).max() < 1e-5


def test_different_motions_get_distinct_latents(rng):
    model = _model()
    a, mask = _motion_batch(rng, b=1)
    b_, _ = _motion_batch(np.random.default_rng(99), b=1)
    mu_a = model.encode_motion(a, mask).mu.data
    mu_b = model.encode_motion(b_, mask).mu.data
    assert np.abs(mu_a - mu_b).max() > 1e-4


def test_decode_shapes_for_various_durations(rng):
    model = _model()
    z = Tensor(rng.normal(size=(1, CFG.latent_dim)).astype(np.float32))
    for frames in (1, 30, 500):
        out = model.decode(z, frames)
        assert out.shape == (1, frames, CFG.feature_dim)


def test_same_latent_two_durations(rng):
    model = _model()
    z = Tensor(rng.normal(size=(1, CFG.latent_dim)).astype(np.float32))
    short = model.decode(z, 10)
    longer = model.decode(z, 20)
    assert short.shape[1] == 10 and longer.shape[1] == 20


def test_eval_mode_decode_is_bit_identical(rng):
    model = _model()
    z = Tensor(rng.normal(size=(2, CFG.latent_dim)).astype(np.float32))
    a = model.decode(z, 12)
    b = model.decode(z, 12)
    assert np.array_equal(a.data, b.data)


def test_train_mode_dropout_changes_outputs(rng):
    model = _model()
    model.train()
    z = Tensor(rng.normal(size=(1, CFG.latent_dim)).astype(np.float32))
    a = model.decode(z, 8)
    b = model.decode(z, 8)
    assert not np.array_equal(a.data, b.data)


def test_masked_extra_queries_do_not_leak(rng):
    model = _model()
    z = Tensor(rng.normal(size=(1, CFG.latent_dim)).astype(np.float32))
    short = model.decode(z, 7)
    mask = AttentionMask(np.arange(12)[None, :] < 7)
    padded = model.decode(z, 12, mask)
    assert np.abs(padded.data[:, :7] - short.data).max() < 1e-6


def test_feature_dim_mismatch_rejected(rng):
    model = _model()
    feats = rng.normal(size=(1, 5, 32)).astype(np.float32)
    with pytest.raises(ValueError, match="feature dim"):
        model.encode_motion(feats, AttentionMask(np.ones((1, 5), bool)))


def test_reparameterize_zero_std_returns_mu(rng):
    mu = Tensor(rng.normal(size=(3, 8)))
    log_std = Tensor(np.full((3, 8), -60.0))  # std underflows to 0
    dist = LatentDistribution(mu, log_std)
    z = reparameterize(dist, rng.normal(size=(3, 8)))
    assert np.abs(z.data - mu.data).max() < 1e-12


def test_reparameterize_sample_mean_matches_mu():
    rng = np.random.default_rng(17)
    mu = Tensor(np.array([[0.3, -1.2, 0.7, 0.0]]))
    dist = LatentDistribution(mu, Tensor(np.zeros((1, 4))))  # unit std
    draws = np.stack([dist.sample(rng).data[0] for _ in range(100_00)])
    extra = np.stack([dist.sample(rng).data[0] for _ in range(90_000)])
    all_draws = np.concatenate([draws, extra])
    assert np.abs(all_draws.mean(axis=0) - mu.data[0]).max() < 0.02


def test_reparameterize_pathwise_gradient():
    # gradient of E[f(z)] w.r.t. mu via the sample path equals finite differences
    rng = np.random.default_rng(3)
    eps = rng.normal(size=(2, 4))
    mu0 = rng.normal(size=(2, 4))
    ls0 = rng.normal(size=(2, 4)) * 0.3

    def surrogate(mu, log_std):
        z = reparameterize(LatentDistribution(mu, log_std), eps)
        return T.sum_(T.mul(z, z))

    err = check_gradient(surrogate, [mu0, ls0])
    assert err < 1e-4


def test_deterministic_variant_is_rng_free(rng):
    model = _model(deterministic=True)
    feats, mask = _motion_batch(rng, b=1)
    dist = model.encode_motion(feats, mask)
    assert dist.is_point
    z = model.latent_from_dist(dist)  # no rng needed
    out_a = model.decode(z, 9)
    out_b = model.decode(model.latent_from_dist(model.encode_motion(feats, mask)), 9)
    assert np.array_equal(out_a.data, out_b.data)
    with pytest.raises(ValueError, match="nothing to sample"):
        dist.sample(np.random.default_rng(0))


def test_variational_model_requires_rng(rng):
    model = _model()
    feats, mask = _motion_batch(rng, b=1)
    dist = model.encode_motion(feats, mask)
    with pytest.raises(ValueError, match="rng"):
        model.latent_from_dist(dist)


def test_decoder_is_shared_between_branches():
    model = _model()
    names = [n for n, _ in model.named_parameters()]
    assert len(names) == len(set(names))
    decoder_params = [n for n in names if n.startswith("decoder.")]
    encoder_params = [n for n in names if n.startswith(("motion_encoder.", "text_encoder."))]
    assert decoder_params and encoder_params
    assert len(decoder_params) + len(encoder_params) == len(names)
