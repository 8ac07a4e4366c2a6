"""Rotation utilities: Z-rotations, yaw extraction, and the 6D codec.

The 6D representation is the first two columns of the rotation matrix;
decoding runs Gram-Schmidt on those two 3-vectors and completes the third
column with a cross product, so any non-degenerate 6-vector maps onto SO(3).
"""

from __future__ import annotations

import numpy as np

_EPS = 1e-8


def rot_z(angle):
    """Rotation matrix (or stack of them) about the global Z axis."""
    angle = np.asarray(angle, dtype=np.float64)
    c, s = np.cos(angle), np.sin(angle)
    zeros = np.zeros_like(c)
    ones = np.ones_like(c)
    rows = np.stack(
        [
            np.stack([c, -s, zeros], axis=-1),
            np.stack([s, c, zeros], axis=-1),
            np.stack([zeros, zeros, ones], axis=-1),
        ],
        axis=-2,
    )
    return rows


def yaw(rotation):
    """Heading of a rotation about Z: yaw(Rz(a) @ R) == a + yaw(R)."""
    rotation = np.asarray(rotation)
    return np.arctan2(rotation[..., 1, 0], rotation[..., 0, 0])


def rotation_to_6d(rotation):
    """First two columns of R, column-major: identity -> (1,0,0,0,1,0)."""
    rotation = np.asarray(rotation, dtype=np.float64)
    return np.concatenate([rotation[..., :, 0], rotation[..., :, 1]], axis=-1)


def rotation_from_6d(vec6):
    """Gram-Schmidt the two 3-vectors back into an orthonormal, det +1 matrix."""
    vec6 = np.asarray(vec6, dtype=np.float64)
    a1 = vec6[..., 0:3]
    a2 = vec6[..., 3:6]
    n1 = np.linalg.norm(a1, axis=-1, keepdims=True)
    if np.any(n1 < _EPS):
        raise ValueError("first 3-vector of 6D rotation is (near) zero")
    b1 = a1 / n1
    a2_proj = a2 - (b1 * a2).sum(axis=-1, keepdims=True) * b1
    n2 = np.linalg.norm(a2_proj, axis=-1, keepdims=True)
    if np.any(n2 < _EPS):
        raise ValueError("6D rotation vectors are (near) parallel")
    b2 = a2_proj / n2
    b3 = np.cross(b1, b2)
    return np.stack([b1, b2, b3], axis=-1)


def is_rotation(matrix, atol=1e-5):
    matrix = np.asarray(matrix)
    eye = np.eye(3)
    ortho = np.abs(np.swapaxes(matrix, -1, -2) @ matrix - eye).max() <= atol
    return bool(ortho) and bool(np.abs(np.linalg.det(matrix) - 1.0).max() <= atol)


def random_rotation(rng, size=()):
    """Uniform random rotation(s) via quaternions."""
    q = rng.normal(size=tuple(size) + (4,))
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    rows = np.stack(
        [
            np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)], axis=-1),
            np.stack([2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)], axis=-1),
            np.stack([2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)], axis=-1),
        ],
        axis=-2,
    )
    return rows
