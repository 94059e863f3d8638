"""
Unit tests for the light field camera manifest
"""

import json

import numpy as np
import pytest

from src.geometry.lens import EquidistantFisheye, Rectilinear
from src.geometry.pose import CameraPose
from src.manifest.lightfield_config import (
    ImagePatternError,
    ManifestFieldError,
    ManifestFileError,
    ManifestInvariantError,
    ManifestSyntaxError,
    camera_entry_from_pose,
    config_from_layout,
    emit_config,
    lens_from_json,
    lens_to_json,
    load_config,
    parse_config,
    save_config,
    split_train_eval,
)
from src.rig.generator import PRESETS, generate


def _camera(**overrides):
    camera = {
        'name': 'cam_0',
        'sequence': 0,
        'position': [0.0, 0.0, 1.0],
        'rotation': [1.0, 0.0, 0.0, 0.0],
        'lens': {'type': 'rectilinear', 'focal': 18.0, 'sensor_w': 36.0, 'sensor_h': 36.0},
        'resolution': [256, 256],
        'image': 'exr/cam_0.exr',
    }
    camera.update(overrides)
    return camera


def _document(*cameras, **top):
    doc = {'scene_name': 'test', 'unit': 'meters', 'cameras': list(cameras) or [_camera()]}
    doc.update(top)
    return json.dumps(doc)


class TestParseConfig:
    """Test strict manifest parsing"""

    def test_minimal(self):
        """Test a single rectilinear camera"""
        cfg = parse_config(_document())

        assert cfg.scene_name == 'test'
        assert len(cfg) == 1
        camera = cfg.cameras[0]
        assert camera.lens == Rectilinear(18.0, 36.0, 36.0)
        assert camera.resolution == (256, 256)
        assert camera.depth is None

    def test_unknown_fields_preserved(self):
        """Test unknown top-level, camera and lens fields survive a round trip"""
        lens = dict(_camera()['lens'], vendor='acme')
        doc = _document(_camera(exposure_time=0.01, lens=lens), renderer='cycles')

        cfg = parse_config(doc)
        emitted = json.loads(emit_config(cfg))

        assert emitted['renderer'] == 'cycles'
        assert emitted['cameras'][0]['exposure_time'] == 0.01
        assert emitted['cameras'][0]['lens']['vendor'] == 'acme'

    def test_depth_path(self):
        """Test an optional separate depth image"""
        cfg = parse_config(_document(_camera(depth='depth/cam_0.exr')))
        assert cfg.cameras[0].depth == 'depth/cam_0.exr'

    def test_malformed_json(self):
        """Test broken JSON is a syntax error"""
        with pytest.raises(ManifestSyntaxError):
            parse_config(b'{"scene_name": ')

    def test_missing_field_names_camera(self):
        """Test missing camera fields name the camera"""
        camera = _camera()
        del camera['resolution']

        with pytest.raises(ManifestFieldError) as exc_info:
            parse_config(_document(camera))

        assert exc_info.value.camera == 'cam_0'
        assert "camera 'cam_0'" in str(exc_info.value)

    def test_non_unit_quaternion(self):
        """Test rotations must be unit quaternions"""
        with pytest.raises(ManifestInvariantError):
            parse_config(_document(_camera(rotation=[1.0, 0.1, 0.0, 0.0])))

    def test_duplicate_sequence(self):
        """Test sequence numbers are unique"""
        with pytest.raises(ManifestInvariantError):
            parse_config(_document(_camera(), _camera(name='cam_1', image='exr/cam_1.exr')))

    def test_duplicate_name(self):
        """Test camera names are unique"""
        with pytest.raises(ManifestInvariantError):
            parse_config(_document(_camera(), _camera(sequence=1, image='exr/cam_1.exr')))

    @pytest.mark.parametrize('image', ['exr/cam_0.exr', 'exr/./cam_0.exr'])
    def test_duplicate_image(self, image):
        """Test two cameras cannot write the same image"""
        with pytest.raises(ManifestInvariantError) as exc_info:
            parse_config(_document(_camera(), _camera(name='cam_1', sequence=1, image=image)))

        assert exc_info.value.camera == 'cam_1'
        assert "already used by 'cam_0'" in str(exc_info.value)

    @pytest.mark.parametrize('image', ['/abs/cam.exr', '../cam.exr', 'exr/../../cam.exr', 'C:\\cam.exr'])
    def test_unsafe_image_path(self, image):
        """Test image paths must stay relative"""
        with pytest.raises(ManifestInvariantError):
            parse_config(_document(_camera(image=image)))

    def test_wrong_unit(self):
        """Test only meters are accepted"""
        with pytest.raises(ManifestInvariantError):
            parse_config(_document(unit='feet'))

    def test_unknown_lens(self):
        """Test unknown lens types are rejected"""
        with pytest.raises(ManifestFieldError):
            parse_config(_document(_camera(lens={'type': 'orthographic'})))

    def test_invalid_lens_value(self):
        """Test lens parameters are validated"""
        lens = {'type': 'equidistant_fisheye', 'fov': -1.0}
        with pytest.raises(ManifestInvariantError):
            parse_config(_document(_camera(lens=lens)))

    @pytest.mark.parametrize('resolution', [[0, 10], [10], [10.5, 10], [True, 10]])
    def test_invalid_resolution(self, resolution):
        """Test resolution must be two positive integers"""
        with pytest.raises(ManifestFieldError):
            parse_config(_document(_camera(resolution=resolution)))


class TestEmitConfig:
    """Test manifest emission"""

    @pytest.mark.parametrize('preset', ['barbershop-sphere', 'zen-garden-cuboid', 'lone-monk-corners'])
    def test_generated_rigs_round_trip(self, preset):
        """Test emit -> parse -> emit is byte-identical for generated rigs"""
        cfg = config_from_layout(generate(PRESETS[preset]), 'scene')
        data = emit_config(cfg)

        assert emit_config(parse_config(data)) == data

    def test_formatting(self):
        """Test indented UTF-8 output with a trailing newline"""
        data = emit_config(parse_config(_document()))

        assert data.endswith(b'\n')
        assert data.startswith(b'{\n  "scene_name"')

    def test_lens_json(self):
        """Test tagged lens objects"""
        assert lens_to_json(EquidistantFisheye()) == {'type': 'equidistant_fisheye', 'fov': pytest.approx(np.pi)}
        lens, extra = lens_from_json({'type': 'rectilinear', 'focal': 18, 'sensor_w': 36, 'sensor_h': 24})
        assert lens == Rectilinear(18.0, 36.0, 24.0)
        assert extra == {}


class TestConfigFiles:
    """Test manifest files"""

    def test_save_and_load(self, tmp_path):
        """Test files round trip"""
        cfg = parse_config(_document())
        path = tmp_path / 'sub' / 'lightfield.json'

        save_config(cfg, path)

        assert load_config(path) == cfg

    def test_missing_file(self, tmp_path):
        """Test a missing manifest is an I/O error"""
        with pytest.raises(ManifestFileError) as exc_info:
            load_config(tmp_path / 'missing.json')

        assert isinstance(exc_info.value, OSError)


class TestLayoutConversion:
    """Test manifests built from rigs and poses"""

    def test_config_from_layout(self):
        """Test image patterns and quaternions"""
        cfg = config_from_layout(generate(PRESETS['barbershop-corners']), 'barbershop', 'pano/{sequence:02d}.exr')

        assert len(cfg) == 8
        assert cfg.cameras[3].image == 'pano/03.exr'
        for camera in cfg.cameras:
            assert camera.rotation[0] >= 0
            assert sum(c * c for c in camera.rotation) == pytest.approx(1.0, abs=1e-12)

    def test_unsafe_pattern_rejected(self):
        """Test image patterns cannot escape the manifest directory"""
        with pytest.raises(ManifestInvariantError):
            config_from_layout(generate(PRESETS['barbershop-corners']), 'x', '../{name}.exr')

    @pytest.mark.parametrize('pattern', ['exr/{camera}.exr', 'exr/{0}.exr', 'exr/{name.exr'])
    def test_malformed_pattern(self, pattern):
        """Test patterns with unknown fields are rejected"""
        with pytest.raises(ImagePatternError) as exc_info:
            config_from_layout(generate(PRESETS['barbershop-corners']), 'x', pattern)

        assert exc_info.value.pattern == pattern

    def test_constant_pattern(self):
        """Test a pattern must give every camera its own image"""
        with pytest.raises(ImagePatternError) as exc_info:
            config_from_layout(generate(PRESETS['barbershop-corners']), 'x', 'exr/x.exr')

        assert '{name} or {sequence}' in str(exc_info.value)

    def test_entry_pose_round_trip(self):
        """Test entry quaternions reproduce the pose"""
        pose = CameraPose.look_along((1.0, 2.0, 3.0), (0.3, -0.2, 0.9))
        entry = camera_entry_from_pose('a', 0, pose, EquidistantFisheye(), (64, 64), 'a.exr')

        np.testing.assert_allclose(entry.pose().rotation, pose.rotation, atol=1e-12)
        np.testing.assert_allclose(entry.pose().position, pose.position)


class TestSplitTrainEval:
    """Test the odd/even evaluation split"""

    @pytest.mark.parametrize('preset', sorted(PRESETS))
    def test_partition(self, preset):
        """Test even views train, odd views evaluate, nothing lost"""
        cfg = config_from_layout(generate(PRESETS[preset]), 'scene')
        count = len(cfg)

        train, evaluation = split_train_eval(cfg)

        assert all(s % 2 == 0 for s in train.sequences())
        assert all(s % 2 == 1 for s in evaluation.sequences())
        assert sorted(train.sequences() + evaluation.sequences()) == cfg.sequences()
        assert len(evaluation) == count // 2
        assert len(train) == count - count // 2
