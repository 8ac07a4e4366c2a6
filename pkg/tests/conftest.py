import numpy as np
import pytest

from text2motion.motion.types import MMM21, MotionSequence

# Independent stick-figure generator for codec/metric oracles. Canonical
# stance: facing +X, left side of the body at -Y.
REST = np.array(
    [
        [0.00, 0.00, 0.85],
        [0.00, 0.00, 1.00],
        [0.00, 0.00, 1.15],
        [0.00, 0.00, 1.35],
        [0.00, 0.00, 1.50],
        [0.00, -0.18, 1.30],
        [0.00, -0.22, 1.05],
        [0.00, -0.25, 0.80],
        [0.00, 0.18, 1.30],
        [0.00, 0.22, 1.05],
        [0.00, 0.25, 0.80],
        [0.00, -0.09, 0.85],
        [0.00, -0.10, 0.45],
        [0.00, -0.11, 0.05],
        [-0.03, -0.11, 0.03],
        [0.12, -0.11, 0.02],
        [0.00, 0.09, 0.85],
        [0.00, 0.10, 0.45],
        [0.00, 0.11, 0.05],
        [-0.03, 0.11, 0.03],
        [0.12, 0.11, 0.02],
    ]
)


def rot_z_mat(theta):
    theta = np.atleast_1d(theta)
    c, s = np.cos(theta), np.sin(theta)
    out = np.zeros(theta.shape + (3, 3))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    out[..., 2, 2] = 1.0
    return out


def make_smooth_motion(rng, frames=40, fps=12.5, start_offset=True):
    """Random smooth walking-ish motion with turning, bobbing and joint wobble."""
    t = np.arange(frames) / fps
    theta = (
        rng.uniform(-np.pi, np.pi)
        + rng.uniform(-0.5, 0.5) * np.sin(rng.uniform(0.4, 1.0) * t)
        + rng.uniform(-0.4, 0.4) * t
    )
    speed = rng.uniform(0.2, 1.3)
    rot = rot_z_mat(theta)
    pos = np.zeros((frames, 3))
    steps = np.stack([np.cos(theta), np.sin(theta)], axis=1) * (speed / fps)
    pos[1:, :2] = np.cumsum(steps[1:], axis=0)
    if start_offset:
        pos[:, :2] += rng.uniform(-2.0, 2.0, 2)
    pos[:, 2] = 0.03 * np.sin(rng.uniform(1.0, 3.0) * t)
    freqs = rng.uniform(0.5, 2.0, (21, 3))
    phases = rng.uniform(0, 2 * np.pi, (21, 3))
    wobble = 0.05 * np.sin(2 * np.pi * freqs[None] * t[:, None, None] + phases[None])
    local = REST[None] + wobble
    joints = np.einsum("fjk,flk->fjl", local, rot)
    joints += pos[:, None, :]
    return MotionSequence(joints, fps, MMM21)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
