"""
Unit tests for EXR image I/O
"""

import Imath
import numpy as np
import OpenEXR
import pytest

from src.geometry.lens import EquidistantFisheye, Rectilinear
from src.imaging.exr_io import (
    ExrFormatError,
    ExrMissingError,
    read_depth_exr,
    read_exr,
    write_exr,
)
from src.imaging.plen_image import ImageFormatError, PlenImage
from src.reprojection.engine import ReprojectParams, reproject


def _write_raw_exr(path, width, height, planes, pixel_type=Imath.PixelType.FLOAT):
    """Write arbitrary channels with the OpenEXR API"""
    header = OpenEXR.Header(width, height)
    header['channels'] = {name: Imath.Channel(Imath.PixelType(pixel_type)) for name in planes}
    dtype = np.float32 if pixel_type == Imath.PixelType.FLOAT else np.float16
    out = OpenEXR.OutputFile(str(path), header)
    out.writePixels({name: plane.astype(dtype).tobytes() for name, plane in planes.items()})
    out.close()


@pytest.fixture
def sample_image():
    """4x3 image with half-representable values, depth and one invalid pixel"""
    rgb = np.zeros((3, 4, 3))
    rgb[..., 0] = 0.5
    rgb[..., 1] = 0.25
    rgb[..., 2] = 6.0
    depth = np.full((3, 4), 1.5)
    valid = np.ones((3, 4), dtype=bool)
    valid[0, 0] = False
    return PlenImage(rgb=rgb, valid=valid, depth=depth)


class TestExrRoundTrip:
    """Test writing and reading PlenImages"""

    def test_color_and_depth_survive(self, tmp_path, sample_image):
        """Test half-representable values come back exactly"""
        path = tmp_path / 'img.exr'
        write_exr(sample_image, path)

        img = read_exr(path)

        assert img.resolution == (4, 3)
        assert img.has_depth
        np.testing.assert_array_equal(img.rgb[img.valid], sample_image.rgb[sample_image.valid])
        np.testing.assert_array_equal(img.depth[img.valid], 1.5)

    def test_invalid_pixels_round_trip(self, tmp_path, sample_image):
        """Test invalid pixels are stored black with infinite depth and read back invalid"""
        path = tmp_path / 'img.exr'
        write_exr(sample_image, path)

        img = read_exr(path)

        assert not img.valid[0, 0]
        assert img.valid.sum() == 11
        np.testing.assert_array_equal(img.rgb[0, 0], 0.0)
        assert np.isinf(img.depth[0, 0])

    def test_without_depth(self, tmp_path, sample_image):
        """Test color-only files keep their validity mask through an A channel"""
        path = tmp_path / 'color.exr'
        write_exr(sample_image.without_depth(), path)

        img = read_exr(path)

        assert not img.has_depth
        np.testing.assert_array_equal(img.valid, sample_image.valid)
        np.testing.assert_array_equal(img.rgb[img.valid], sample_image.rgb[sample_image.valid])
        assert 'A' in OpenEXR.InputFile(str(path)).header()['channels']

    def test_fully_valid_color_only(self, tmp_path):
        """Test fully valid color-only images are written as plain RGB"""
        path = tmp_path / 'color.exr'
        write_exr(PlenImage.from_rgb(np.full((2, 2, 3), 0.5)), path)

        img = read_exr(path)

        assert img.valid.all()
        assert sorted(OpenEXR.InputFile(str(path)).header()['channels']) == ['B', 'G', 'R']

    def test_reprojected_mask_survives(self, tmp_path):
        """Test fish-eye corners left unmapped by reprojection stay invalid on disk"""
        src = PlenImage.from_rgb(np.full((16, 16, 3), 0.5))
        out = reproject(src, Rectilinear(18.0, 36.0, 36.0), ReprojectParams(EquidistantFisheye()))
        path = tmp_path / 'fisheye.exr'
        assert not out.valid.all()

        write_exr(out, path)
        img = read_exr(path)

        np.testing.assert_array_equal(img.valid, out.valid)

    def test_alpha_channel_from_other_tools(self, tmp_path):
        """Test foreign RGBA files treat A = 0 as invalid"""
        plane = np.full((2, 2), 0.25)
        alpha = np.array([[1.0, 0.0], [0.5, 1.0]])
        path = tmp_path / 'rgba.exr'
        _write_raw_exr(path, 2, 2, {'R': plane, 'G': plane, 'B': plane, 'A': alpha})

        img = read_exr(path)

        np.testing.assert_array_equal(img.valid, alpha > 0)

    def test_no_temporary_files_left(self, tmp_path, sample_image):
        """Test atomic writes leave only the final file"""
        write_exr(sample_image, tmp_path / 'out' / 'img.exr')

        assert [p.name for p in (tmp_path / 'out').iterdir()] == ['img.exr']


class TestExrReading:
    """Test reading foreign EXR layouts"""

    def test_float_channels_and_depth_alias(self, tmp_path):
        """Test 32-bit channels and a 'depth' channel name are accepted"""
        plane = np.full((2, 3), 0.1)
        path = tmp_path / 'float.exr'
        _write_raw_exr(path, 3, 2, {'R': plane, 'G': plane, 'B': plane, 'depth': plane * 20})

        img = read_exr(path)

        np.testing.assert_allclose(img.rgb, np.float32(0.1), rtol=0)
        np.testing.assert_allclose(img.depth, np.float32(2.0), rtol=1e-6)

    def test_negative_values_clamped(self, tmp_path):
        """Test negative color values are clamped to zero"""
        plane = np.full((2, 2), -1.0)
        path = tmp_path / 'neg.exr'
        _write_raw_exr(path, 2, 2, {'R': plane, 'G': plane * 0, 'B': plane * 0})

        img = read_exr(path)

        assert np.all(img.rgb >= 0)

    def test_standalone_depth_single_channel(self, tmp_path):
        """Test a single-channel file is read as depth whatever its name"""
        path = tmp_path / 'depth.exr'
        _write_raw_exr(path, 3, 2, {'Y': np.full((2, 3), 4.0)})

        depth = read_depth_exr(path)

        assert depth.shape == (2, 3)
        np.testing.assert_array_equal(depth, 4.0)

    def test_standalone_depth_ambiguous(self, tmp_path):
        """Test multi-channel files without a depth channel are rejected"""
        path = tmp_path / 'rgb.exr'
        plane = np.zeros((2, 2))
        _write_raw_exr(path, 2, 2, {'R': plane, 'G': plane})

        with pytest.raises(ExrFormatError):
            read_depth_exr(path)

    def test_missing_color_channel(self, tmp_path):
        """Test files without R, G and B are rejected"""
        path = tmp_path / 'gray.exr'
        _write_raw_exr(path, 2, 2, {'Y': np.zeros((2, 2))})

        with pytest.raises(ExrFormatError) as exc_info:
            read_exr(path)

        assert 'R' in str(exc_info.value)

    def test_missing_file(self, tmp_path):
        """Test a missing file raises an OSError subclass"""
        with pytest.raises(ExrMissingError) as exc_info:
            read_exr(tmp_path / 'nope.exr')

        assert isinstance(exc_info.value, OSError)
        assert exc_info.value.path.endswith('nope.exr')

    def test_not_an_exr(self, tmp_path):
        """Test garbage files are rejected"""
        path = tmp_path / 'junk.exr'
        path.write_bytes(b'not an image')

        with pytest.raises(ExrFormatError):
            read_exr(path)


class TestPlenImage:
    """Test the image container invariants"""

    def test_negative_color_rejected(self):
        """Test valid pixels must carry non-negative radiance"""
        with pytest.raises(ImageFormatError):
            PlenImage.from_rgb(np.full((2, 2, 3), -0.1))

    def test_negative_color_allowed_on_invalid(self):
        """Test invalid pixels are not checked"""
        img = PlenImage(rgb=np.full((2, 2, 3), -0.1), valid=np.zeros((2, 2), dtype=bool))
        assert not img.valid.any()

    def test_depth_shape_checked(self):
        """Test depth must match the image size"""
        with pytest.raises(ImageFormatError):
            PlenImage.from_rgb(np.zeros((2, 2, 3)), depth=np.zeros((3, 2)))

    def test_planes_read_only(self):
        """Test planes cannot be modified after construction"""
        img = PlenImage.from_rgb(np.zeros((2, 2, 3)))
        with pytest.raises(ValueError):
            img.rgb[0, 0, 0] = 1.0
