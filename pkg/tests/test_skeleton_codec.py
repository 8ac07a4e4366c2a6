import numpy as np
import pytest

from conftest import REST, make_smooth_motion, rot_z_mat
from text2motion.motion.frames import canonicalize
from text2motion.motion.skeleton import SkeletonFeatureCodec
from text2motion.motion.types import MMM21, FeatureSequence, MotionSequence

FPS = 12.5


def _static_motion(frames=10):
    return MotionSequence(np.repeat(REST[None], frames, axis=0), FPS, MMM21)


def test_standing_still_has_zero_motion_channels():
    feats = SkeletonFeatureCodec().transform(_static_motion()).features
    assert np.allclose(feats[:, 60], 0.0, atol=1e-12)  # heading deltas
    assert np.allclose(feats[:, 61:63], 0.0, atol=1e-12)  # local XY velocity
    assert np.allclose(feats[:, 63], REST[0, 2])  # root height


def test_constant_velocity_walk_along_heading():
    frames, speed = 30, 0.9
    joints = np.repeat(REST[None], frames, axis=0)
    joints[:, :, 0] += (np.arange(frames) / FPS * speed)[:, None]
    feats = SkeletonFeatureCodec().transform(MotionSequence(joints, FPS, MMM21)).features
    assert np.allclose(feats[:, 61], speed, atol=1e-9)   # forward velocity constant
    assert np.allclose(feats[:, 62], 0.0, atol=1e-12)    # no sideways drift
    assert np.allclose(feats[:, 60], 0.0, atol=1e-12)


def test_roundtrip_equals_canonicalized_input():
    codec = SkeletonFeatureCodec()
    worst = 0.0
    for i in range(100):
        m = make_smooth_motion(np.random.default_rng(i), frames=int(10 + (i % 5) * 13))
        decoded = codec.inverse_transform(codec.transform(m))
        reference = canonicalize(m)
        worst = max(worst, float(np.abs(decoded.joints - reference.joints).max()))
    assert worst < 1e-4


def test_feature_dim_is_64(rng):
    feats = SkeletonFeatureCodec().transform(make_smooth_motion(rng))
    assert feats.dim == 64  # 60 local + 1 angle delta + 3 root channels


def test_translation_invariance_of_features(rng):
    m = make_smooth_motion(rng, frames=20)
    codec = SkeletonFeatureCodec()
    base = codec.transform(m).features
    shifted = MotionSequence(m.joints + np.array([5.0, -3.0, 0.0]), FPS, MMM21)
    moved = codec.transform(shifted).features
    assert np.abs(base - moved).max() < 1e-9


def test_rotation_invariance_of_features(rng):
    m = make_smooth_motion(rng, frames=20)
    codec = SkeletonFeatureCodec()
    base = codec.transform(m).features
    rot = rot_z_mat(2.1)[0]
    turned = codec.transform(MotionSequence(m.joints @ rot.T, FPS, MMM21)).features
    assert np.abs(base - turned).max() < 1e-8


def test_single_frame_rejected():
    with pytest.raises(ValueError, match="2 frames"):
        SkeletonFeatureCodec().transform(_static_motion(1))


def test_wrong_fps_rejected(rng):
    m = make_smooth_motion(rng, fps=25.0)
    with pytest.raises(ValueError, match="Hz"):
        SkeletonFeatureCodec(12.5).transform(m)


def test_decode_all_zero_features():
    feats = FeatureSequence(np.zeros((5, 64)))
    m = SkeletonFeatureCodec().inverse_transform(feats)
    # joints collapse onto the local origin, root pinned at height 0
    assert np.allclose(m.joints, 0.0)


def test_decode_integrates_constant_angle_delta():
    frames, delta = 8, 0.1
    feats = np.zeros((frames, 64))
    feats[:, 60] = delta
    feats[:, 63] = 0.9
    decoded = SkeletonFeatureCodec().inverse_transform(FeatureSequence(feats))
    # first angle pinned to 0 -> final heading is (F-1) * delta; root never moves,
    # so headings only show in joint placement. Reconstruct via a marker joint:
    # decode a second time with a distinguishable local joint.
    feats[:, 0] = 1.0  # BP local x = 1
    decoded = SkeletonFeatureCodec().inverse_transform(FeatureSequence(feats))
    marker = decoded.joints[:, 1, :2]
    angles = np.arctan2(marker[:, 1], marker[:, 0])
    assert angles[0] == pytest.approx(0.0, abs=1e-12)
    assert angles[-1] == pytest.approx((frames - 1) * delta, abs=1e-9)


def test_standardized_features_rejected_on_decode(rng):
    codec = SkeletonFeatureCodec()
    feats = codec.transform(make_smooth_motion(rng))
    feats.standardized = True
    with pytest.raises(ValueError, match="destandardized"):
        codec.inverse_transform(feats)


def test_decode_rejects_wrong_width():
    with pytest.raises(ValueError, match="64"):
        SkeletonFeatureCodec().inverse_transform(FeatureSequence(np.zeros((4, 135))))
