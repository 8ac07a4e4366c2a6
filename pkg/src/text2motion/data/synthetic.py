"""Procedural 21-joint motion corpus with templated descriptions.

Six motion families (straight walk, circular walk, left/right turns, arm
raise, crouch) with randomized speed, radius and duration. Deterministic
given the seed; used as the desk-scale stand-in for a mocap corpus.
"""

from __future__ import annotations

import numpy as np

from ..motion.rotations import rot_z
from ..motion.skeleton import SkeletonFeatureCodec
from ..motion.types import MMM21, MotionSequence
from .dataset import DatasetEntry

FPS = 12.5
MIN_FRAMES = 20
MAX_FRAMES = 120

# Canonical standing body: facing +X, left side at -Y, heights in meters.
REST_POSE = np.array(
    [
        [0.00, 0.00, 0.85],   # root
        [0.00, 0.00, 1.00],   # BP
        [0.00, 0.00, 1.15],   # BT
        [0.00, 0.00, 1.35],   # BLN
        [0.00, 0.00, 1.50],   # BUN
        [0.00, -0.18, 1.30],  # LS
        [0.00, -0.22, 1.05],  # LE
        [0.00, -0.25, 0.80],  # LW
        [0.00, 0.18, 1.30],   # RS
        [0.00, 0.22, 1.05],   # RE
        [0.00, 0.25, 0.80],   # RW
        [0.00, -0.09, 0.85],  # LH
        [0.00, -0.10, 0.45],  # LK
        [0.00, -0.11, 0.05],  # LA
        [-0.03, -0.11, 0.03], # LMrot
        [0.12, -0.11, 0.02],  # LF
        [0.00, 0.09, 0.85],   # RH
        [0.00, 0.10, 0.45],   # RK
        [0.00, 0.11, 0.05],   # RA
        [-0.03, 0.11, 0.03],  # RMrot
        [0.12, 0.11, 0.02],   # RF
    ]
)

_LEFT_LEG = (12, 13, 14, 15)
_RIGHT_LEG = (17, 18, 19, 20)
_LEFT_ARM = (6, 7)
_RIGHT_ARM = (9, 10)
_UPPER_BODY = (0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 16)


def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def _gait(t, freq, scale):
    """Leg/arm swing offsets in body-local coordinates, [F, 21, 3]."""
    phase = 2.0 * np.pi * freq * t
    swing = np.sin(phase)
    extra = np.zeros((t.size, 21, 3))
    for j, amp in zip(_LEFT_LEG, (0.08, 0.12, 0.15, 0.15)):
        extra[:, j, 0] = amp * scale * swing
    for j, amp in zip(_RIGHT_LEG, (0.08, 0.12, 0.15, 0.15)):
        extra[:, j, 0] = -amp * scale * swing
    for j, amp in zip(_LEFT_ARM, (0.05, 0.10)):
        extra[:, j, 0] = -amp * scale * swing
    for j, amp in zip(_RIGHT_ARM, (0.05, 0.10)):
        extra[:, j, 0] = amp * scale * swing
    # slight vertical bob at double the step frequency
    extra[:, 0, 2] = 0.012 * scale * np.cos(2.0 * phase)
    return extra


def _assemble(theta, xy, z_offset, extra):
    """Rotate the rest pose by per-frame heading and attach the trajectory."""
    pose = REST_POSE[None, :, :] + extra
    rot = rot_z(theta)
    joints = np.einsum("fjk,flk->fjl", pose, rot)
    joints[:, :, 0] += xy[:, 0:1]
    joints[:, :, 1] += xy[:, 1:2]
    joints[:, :, 2] += z_offset[:, None]
    return joints


def _integrate_heading_path(theta, speed, fps):
    """Root XY path from per-frame heading and scalar speed."""
    steps = np.stack([np.cos(theta), np.sin(theta)], axis=1) * (speed / fps)
    xy = np.zeros((theta.size, 2))
    xy[1:] = np.cumsum(steps[1:], axis=0)
    return xy


def _speed_word(speed):
    if speed < 0.65:
        return "slowly"
    if speed > 1.1:
        return "quickly"
    return "at a normal pace"


def _walk_straight(rng, t):
    speed = rng.uniform(0.4, 1.4)
    theta = np.full(t.size, rng.uniform(-np.pi, np.pi))
    xy = _integrate_heading_path(theta, speed, FPS)
    extra = _gait(t, rng.uniform(1.5, 2.2), 1.0)
    word = _speed_word(speed)
    descs = [
        f"a person walks {word} in a straight line",
        f"a human walks forward {word}",
        f"someone walks straight ahead {word}",
    ]
    return _assemble(theta, xy, np.zeros(t.size), extra), descs


def _walk_circle(rng, t):
    direction = 1.0 if rng.random() < 0.5 else -1.0
    omega = direction * rng.uniform(0.2, 0.5)
    speed = rng.uniform(0.5, 1.0)
    theta = rng.uniform(-np.pi, np.pi) + omega * t
    xy = _integrate_heading_path(theta, speed, FPS)
    extra = _gait(t, rng.uniform(1.5, 2.2), 1.0)
    side = "left" if direction > 0 else "right"
    size = "small" if speed / abs(omega) < 2.5 else "wide"
    descs = [
        f"a person walks in a {size} circle to the {side}",
        f"a human walks along a circular path turning {side}",
        f"someone walks {_speed_word(speed)} in a circle",
    ]
    return _assemble(theta, xy, np.zeros(t.size), extra), descs


def _turn(rng, t, direction):
    angle = direction * np.deg2rad(rng.uniform(60.0, 150.0))
    theta = rng.uniform(-np.pi, np.pi) + angle * _smoothstep(t / t[-1])
    extra = _gait(t, rng.uniform(0.8, 1.2), 0.3)
    side = "left" if direction > 0 else "right"
    sweep = "sharply" if abs(angle) > np.deg2rad(120) else "halfway"
    descs = [
        f"a person turns {sweep} to the {side}",
        f"a human makes a {side} turn on the spot",
        f"someone rotates to the {side} while standing",
    ]
    return _assemble(theta, np.zeros((t.size, 2)), np.zeros(t.size), extra), descs


def _raise_arm(rng, t):
    left = rng.random() < 0.5
    lift = rng.uniform(0.35, 0.6)
    ramp = _smoothstep(2.0 * t / t[-1])
    extra = np.zeros((t.size, 21, 3))
    elbow, wrist = (_LEFT_ARM if left else _RIGHT_ARM)
    extra[:, wrist, 2] = lift * ramp
    extra[:, wrist, 0] = 0.10 * ramp
    extra[:, elbow, 2] = 0.5 * lift * ramp
    side = "left" if left else "right"
    descs = [
        f"a person raises the {side} hand",
        f"a human lifts the {side} arm above the shoulder",
        f"someone holds up the {side} hand",
    ]
    return _assemble(np.full(t.size, rng.uniform(-np.pi, np.pi)), np.zeros((t.size, 2)), np.zeros(t.size), extra), descs


def _crouch(rng, t):
    dip = rng.uniform(0.18, 0.35)
    cycle = np.sin(np.pi * t / t[-1])
    extra = np.zeros((t.size, 21, 3))
    for j in _UPPER_BODY:
        extra[:, j, 2] = -dip * cycle
    for knee in (12, 17):
        extra[:, knee, 0] = 0.6 * dip * cycle
        extra[:, knee, 2] = -0.4 * dip * cycle
    depth = "deep" if dip > 0.28 else "quick"
    descs = [
        f"a person performs a {depth} squat",
        "a human crouches down and stands back up",
        "someone bends the knees and rises again",
    ]
    return _assemble(np.full(t.size, rng.uniform(-np.pi, np.pi)), np.zeros((t.size, 2)), np.zeros(t.size), extra), descs


_TEMPLATES = (
    _walk_straight,
    _walk_circle,
    lambda rng, t: _turn(rng, t, +1.0),
    lambda rng, t: _turn(rng, t, -1.0),
    _raise_arm,
    _crouch,
)


def synthetic_corpus(seed, n, split="train"):
    """Generate `n` deterministic motion/text entries at 12.5 Hz."""
    if n < 1:
        raise ValueError("need at least one entry")
    root_rng = np.random.default_rng(seed)
    codec = SkeletonFeatureCodec(FPS)
    entries = []
    for i, child in enumerate(root_rng.spawn(n)):
        template = _TEMPLATES[i % len(_TEMPLATES)]
        frames = int(child.integers(MIN_FRAMES, MAX_FRAMES + 1))
        t = np.arange(frames) / FPS
        joints, descs = template(child, t)
        # repeats of a template lead with a different phrasing
        shift = (i // len(_TEMPLATES)) % len(descs)
        descs = descs[shift:] + descs[:shift]
        n_descs = int(child.integers(1, len(descs) + 1))
        motion = MotionSequence(joints, FPS, MMM21)
        entries.append(
            DatasetEntry(
                entry_id=f"synth{i:04d}",
                features=codec.transform(motion),
                descriptions=descs[:n_descs],
                motion=motion,
                split=split,
            )
        )
    return entries
