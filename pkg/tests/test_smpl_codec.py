import numpy as np
import pytest

from text2motion.motion.joints import SMPL_TO_MMM_SCALE, SMPLH_SOURCE_FOR_MMM, map_smpl_joints_to_mmm
from text2motion.motion.rotations import is_rotation, random_rotation
from text2motion.motion.smplpose import SmplFeatureCodec, SmplPoseSequence, canonicalize_smpl
from text2motion.motion.types import MMM21, SMPLH, FeatureSequence, MotionSequence

FPS = 12.5


def _random_pose(rng, frames=25):
    body = random_rotation(rng, (frames, 21))
    glob = random_rotation(rng, (frames,))
    root = np.cumsum(rng.normal(0, 0.04, (frames, 3)), axis=0) + rng.uniform(-1, 1, 3)
    return SmplPoseSequence(body, glob, root)


def test_feature_dim_is_135(rng):
    feats = SmplFeatureCodec().transform(_random_pose(rng))
    assert feats.dim == 135  # 21*6 + 6 + 3


def test_identity_pose_static_root():
    frames = 6
    body = np.repeat(np.eye(3)[None, None], frames, axis=0).repeat(21, axis=1)
    glob = np.repeat(np.eye(3)[None], frames, axis=0)
    root = np.tile([0.0, 0.0, 0.95], (frames, 1))
    feats = SmplFeatureCodec().transform(SmplPoseSequence(body, glob, root)).features
    canonical = np.tile([1, 0, 0, 0, 1, 0], 21)
    assert np.allclose(feats[:, :126], canonical)
    assert np.allclose(feats[:, 126:132], [1, 0, 0, 0, 1, 0])
    assert np.allclose(feats[:, 132:134], 0.0)
    assert np.allclose(feats[:, 134], 0.95)


def test_roundtrip_reproduces_canonicalized_pose():
    codec = SmplFeatureCodec()
    worst_rot, worst_root = 0.0, 0.0
    for i in range(30):
        pose = _random_pose(np.random.default_rng(200 + i))
        decoded = codec.inverse_transform(codec.transform(pose))
        canon = canonicalize_smpl(pose)
        worst_rot = max(
            worst_rot,
            float(np.abs(decoded.body_rots - canon.body_rots).max()),
            float(np.abs(decoded.global_rot - canon.global_rot).max()),
        )
        worst_root = max(worst_root, float(np.abs(decoded.root_trans - canon.root_trans).max()))
    assert worst_rot < 1e-5
    assert worst_root < 1e-4


def test_decoded_matrices_always_orthonormal(rng):
    feats = rng.normal(size=(8, 135))
    feats[:, 134] = 0.9
    decoded = SmplFeatureCodec().inverse_transform(FeatureSequence(feats))
    assert is_rotation(decoded.body_rots, atol=1e-8)
    assert is_rotation(decoded.global_rot, atol=1e-8)


def test_canonicalized_first_frame(rng):
    pose = _random_pose(rng)
    canon = canonicalize_smpl(pose)
    assert canon.global_rot[0, 1, 0] == pytest.approx(0.0, abs=1e-12)  # zero yaw
    assert np.allclose(canon.root_trans[0, :2], 0.0, atol=1e-12)


def test_single_frame_rejected():
    body = np.repeat(np.eye(3)[None, None], 1, axis=0).repeat(21, axis=1)
    glob = np.eye(3)[None]
    pose = SmplPoseSequence(body, glob, np.zeros((1, 3)))
    with pytest.raises(ValueError, match="2 frames"):
        SmplFeatureCodec().transform(pose)


def test_invalid_rotations_rejected(rng):
    body = random_rotation(rng, (4, 21))
    glob = random_rotation(rng, (4,))
    body[0, 0] *= 1.5  # not orthonormal any more
    with pytest.raises(ValueError, match="rotations"):
        SmplPoseSequence(body, glob, np.zeros((4, 3)))


def _smpl_joint_motion(rng, frames=5):
    names = [smpl for _, smpl in SMPLH_SOURCE_FOR_MMM] + ["left_index1", "right_index1"]
    joints = rng.normal(size=(frames, len(names), 3))
    return MotionSequence(joints, 100.0, SMPLH), names


def test_smpl_to_mmm_mapping_and_rescale(rng):
    motion, names = _smpl_joint_motion(rng)
    mapped = map_smpl_joints_to_mmm(motion, names, rescale=True)
    assert mapped.joint_set == MMM21
    assert mapped.num_joints == 21
    pelvis_col = names.index("pelvis")
    heel_col = names.index("left_heel")
    assert np.allclose(mapped.joints[:, 0], motion.joints[:, pelvis_col] * SMPL_TO_MMM_SCALE)
    assert np.allclose(mapped.joints[:, 14], motion.joints[:, heel_col] * SMPL_TO_MMM_SCALE)


def test_smpl_to_mmm_without_rescale(rng):
    motion, names = _smpl_joint_motion(rng)
    mapped = map_smpl_joints_to_mmm(motion, names, rescale=False)
    assert np.array_equal(mapped.joints[:, 0], motion.joints[:, names.index("pelvis")])


def test_missing_smpl_joint_rejected(rng):
    motion, names = _smpl_joint_motion(rng)
    names = ["torso" if n == "spine1" else n for n in names]
    with pytest.raises(KeyError, match="spine1"):
        map_smpl_joints_to_mmm(motion, names)
