import numpy as np
import pytest

from conftest import REST, make_smooth_motion, rot_z_mat
from text2motion.motion.frames import canonicalize, compute_local_frame, heading_angles
from text2motion.motion.types import MMM21, MotionSequence


def test_canonical_pose_gives_global_frame():
    frame = compute_local_frame(REST)
    assert np.allclose(frame.x_axis, [1, 0, 0], atol=1e-12)
    assert np.allclose(frame.y_axis, [0, 1, 0], atol=1e-12)
    assert np.allclose(frame.z_axis, [0, 0, 1])
    assert np.allclose(frame.origin, [0, 0, 0], atol=1e-12)


def test_frame_rotates_with_body():
    rot = rot_z_mat(np.pi / 2)[0]
    pose = REST @ rot.T
    frame = compute_local_frame(pose)
    assert np.allclose(frame.x_axis, [0, 1, 0], atol=1e-12)


def test_axes_orthonormal_for_random_poses(rng):
    for i in range(20):
        m = make_smooth_motion(np.random.default_rng(i), frames=3)
        frame = compute_local_frame(m.joints[0])
        basis = frame.rotation
        assert np.abs(basis.T @ basis - np.eye(3)).max() < 1e-6
        assert np.linalg.det(basis) == pytest.approx(1.0, abs=1e-9)


def test_degenerate_pose_raises():
    pose = np.zeros((21, 3))
    pose[:, 2] = np.linspace(0, 1, 21)  # everything stacked on the up axis
    with pytest.raises(ValueError, match="degenerate"):
        compute_local_frame(pose)


def test_canonicalize_idempotent_and_invariant(rng):
    m = make_smooth_motion(rng, frames=25)
    canon = canonicalize(m)
    again = canonicalize(canon)
    assert np.abs(again.joints - canon.joints).max() < 1e-6
    # rotating/translating the input does not change the canonical form
    rot = rot_z_mat(1.234)[0]
    moved = MotionSequence(m.joints @ rot.T + np.array([3.0, -1.0, 0.0]), m.fps, MMM21)
    assert np.abs(canonicalize(moved).joints - canon.joints).max() < 1e-9


def test_canonicalize_zeroes_first_frame_heading(rng):
    for i in range(10):
        m = make_smooth_motion(np.random.default_rng(100 + i), frames=10)
        canon = canonicalize(m)
        assert heading_angles(canon.joints)[0] == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(canon.joints[0, 0, :2], 0.0, atol=1e-12)
