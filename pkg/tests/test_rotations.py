import numpy as np
import pytest

from text2motion.motion.rotations import (
    is_rotation,
    random_rotation,
    rot_z,
    rotation_from_6d,
    rotation_to_6d,
    yaw,
)


def test_identity_maps_to_canonical_6d():
    assert np.allclose(rotation_to_6d(np.eye(3)), [1, 0, 0, 0, 1, 0])


def test_roundtrip_over_random_rotations():
    rng = np.random.default_rng(11)
    rots = random_rotation(rng, (1000,))
    back = rotation_from_6d(rotation_to_6d(rots))
    assert np.abs(back - rots).max() < 1e-6


def test_decode_of_skewed_vectors_is_orthonormal():
    rng = np.random.default_rng(12)
    vec = rng.normal(size=(50, 6)) * 3.0
    rots = rotation_from_6d(vec)
    assert is_rotation(rots, atol=1e-9)
    assert np.allclose(np.linalg.det(rots), 1.0, atol=1e-9)


def test_parallel_vectors_rejected():
    v = np.array([1.0, 0.0, 0.0, 2.0, 0.0, 0.0])
    with pytest.raises(ValueError, match="parallel"):
        rotation_from_6d(v)
    with pytest.raises(ValueError, match="zero"):
        rotation_from_6d(np.zeros(6))


def test_yaw_is_additive_under_z_rotation():
    rng = np.random.default_rng(13)
    rot = random_rotation(rng)
    base = yaw(rot)
    for angle in (-2.0, 0.4, 1.3):
        turned = rot_z(angle) @ rot
        diff = (yaw(turned) - base - angle + np.pi) % (2 * np.pi) - np.pi
        assert abs(diff) < 1e-9


def test_rot_z_matches_manual():
    a = 0.7
    expect = np.array(
        [[np.cos(a), -np.sin(a), 0.0], [np.sin(a), np.cos(a), 0.0], [0.0, 0.0, 1.0]]
    )
    assert np.allclose(rot_z(a), expect)
