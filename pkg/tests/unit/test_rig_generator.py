"""
Unit tests for the camera rig generator
"""

import numpy as np
import pytest

from src.geometry.lens import Equirectangular, Rectilinear
from src.geometry.pose import is_proper_rotation
from src.rig.generator import (
    PRESETS,
    CornersSpec,
    CuboidSpec,
    RigSpecError,
    SphereSpec,
    gen_cube_corners,
    gen_cuboid,
    gen_sphere,
    generate,
    icosphere_vertices,
    layout_extent,
    preset_scene_name,
)


def _cuboid_count(nx, ny, nz):
    return 2 * (ny * nz + nx * nz + nx * ny)


class TestCuboid:
    """Test cuboid rigs"""

    @pytest.mark.parametrize('preset, expected', [
        ('barbershop-cuboid', 1400),
        ('lone-monk-cuboid', 2226),
        ('zen-garden-cuboid', 1806),
    ])
    def test_published_counts(self, preset, expected):
        """Test preset rigs have the published camera counts"""
        assert len(generate(PRESETS[preset])) == expected

    @pytest.mark.parametrize('counts', [(2, 2, 2), (3, 4, 5), (7, 2, 3)])
    def test_count_formula(self, counts):
        """Test the count formula holds for arbitrary grids"""
        layout = gen_cuboid(CuboidSpec(size=(1.0, 2.0, 3.0), counts=counts))
        assert len(layout) == _cuboid_count(*counts)

    def test_cameras_on_surface_facing_out(self):
        """Test every camera sits on its face and looks along the face normal"""
        spec = CuboidSpec(size=(2.0, 3.0, 1.0), counts=(3, 4, 2), center=(1.0, -1.0, 0.5))
        layout = gen_cuboid(spec)
        center = np.asarray(spec.center)
        half = np.asarray(spec.size) / 2.0

        for camera in layout.cameras:
            forward = camera.pose.forward
            axis = int(np.argmax(np.abs(forward)))
            offset = camera.pose.position - center
            assert abs(abs(forward[axis]) - 1.0) <= 1e-12
            assert offset[axis] == pytest.approx(np.sign(forward[axis]) * half[axis], abs=1e-9)
            assert np.all(np.abs(offset) <= half + 1e-9)
            assert is_proper_rotation(camera.pose.rotation)

    def test_face_shares_rotation(self):
        """Test cameras of one face share a rotation"""
        layout = gen_cuboid(CuboidSpec(size=(1.0, 1.0, 1.0), counts=(3, 3, 3)))

        faces = {}
        for camera in layout.cameras:
            faces.setdefault(camera.name[:2], []).append(camera.pose.rotation)

        assert sorted(faces) == ['nx', 'ny', 'nz', 'px', 'py', 'pz']
        for rotations in faces.values():
            for rotation in rotations:
                np.testing.assert_array_equal(rotation, rotations[0])

    def test_order_and_names(self):
        """Test faces in order +X, -X, +Y, -Y, +Z, -Z, row-major"""
        layout = gen_cuboid(CuboidSpec(size=(1.0, 1.0, 1.0), counts=(2, 2, 2)))
        names = [camera.name for camera in layout.cameras]

        assert names[:4] == ['px_00_00', 'px_00_01', 'px_01_00', 'px_01_01']
        assert [name[:2] for name in names[::4]] == ['px', 'nx', 'py', 'ny', 'pz', 'nz']
        assert [camera.sequence for camera in layout.cameras] == list(range(24))

    def test_grid_spacing(self):
        """Test inclusive spacing L / (n - 1)"""
        layout = gen_cuboid(CuboidSpec(size=(4.0, 4.0, 3.0), counts=(21, 21, 16)))
        zs = np.unique(np.round(layout.positions()[:, 2], 9))

        np.testing.assert_allclose(np.diff(zs), 0.2, atol=1e-9)

    def test_repeatable(self):
        """Test generation is bit-identical across runs"""
        spec = PRESETS['zen-garden-cuboid']

        assert generate(spec).positions().tobytes() == generate(spec).positions().tobytes()

    @pytest.mark.parametrize('kwargs', [
        {'size': (1.0, 0.0, 1.0), 'counts': (2, 2, 2)},
        {'size': (1.0, 1.0, 1.0), 'counts': (1, 2, 2)},
        {'size': (1.0, 1.0, 1.0), 'counts': (2, 2, 2.5)},
    ])
    def test_invalid_spec(self, kwargs):
        """Test invalid cuboids are rejected"""
        with pytest.raises(RigSpecError):
            CuboidSpec(**kwargs)


class TestSphere:
    """Test icosphere rigs"""

    @pytest.mark.parametrize('subdivisions, expected', [(0, 12), (1, 42), (2, 162), (3, 642)])
    def test_vertex_counts(self, subdivisions, expected):
        """Test 10 * 4^s + 2 vertices"""
        assert len(icosphere_vertices(subdivisions)) == expected

    @pytest.mark.parametrize('preset', ['barbershop-sphere', 'lone-monk-sphere', 'zen-garden-sphere'])
    def test_published_counts(self, preset):
        """Test every published sphere has 642 cameras"""
        assert len(generate(PRESETS[preset])) == 642

    def test_on_sphere_facing_out(self):
        """Test cameras lie on the sphere and look radially outward"""
        spec = SphereSpec(diameter=1.7, subdivisions=2, center=(0.5, 0.0, 1.0))
        layout = gen_sphere(spec)
        center = np.asarray(spec.center)

        for camera in layout.cameras:
            radial = camera.pose.position - center
            assert np.linalg.norm(radial) == pytest.approx(0.85, abs=1e-9)
            assert np.dot(camera.pose.forward, radial) == pytest.approx(np.linalg.norm(radial), abs=1e-9)
            assert is_proper_rotation(camera.pose.rotation)

    def test_names(self):
        """Test sphere cameras are numbered in construction order"""
        layout = gen_sphere(SphereSpec(diameter=1.0, subdivisions=0))

        assert layout.cameras[0].name == 'sphere_000'
        assert layout.cameras[-1].name == 'sphere_011'

    def test_perspective_evaluation_sphere(self):
        """Test sphere rigs accept rectilinear lenses"""
        lens = Rectilinear(18.0, 36.0, 36.0)
        layout = gen_sphere(SphereSpec(diameter=1.0, subdivisions=1, lens=lens, resolution=(256, 256)))

        assert len(layout) == 42
        assert all(camera.lens == lens for camera in layout.cameras)

    def test_invalid_spec(self):
        """Test diameter and subdivisions are checked"""
        with pytest.raises(RigSpecError):
            SphereSpec(diameter=0.0, subdivisions=1)
        with pytest.raises(RigSpecError):
            SphereSpec(diameter=1.0, subdivisions=-1)


class TestCorners:
    """Test cube-corner evaluation cameras"""

    def test_eight_panoramas(self):
        """Test 8 equirectangular cameras at the cube corners, all facing +X"""
        layout = gen_cube_corners(CornersSpec(size=0.5, center=(0.0, 0.0, 1.0)))

        assert len(layout) == 8
        assert layout.cameras[0].name == 'corner_nnn'
        assert layout.cameras[-1].name == 'corner_ppp'
        for camera in layout.cameras:
            assert isinstance(camera.lens, Equirectangular)
            np.testing.assert_allclose(camera.pose.forward, [1.0, 0.0, 0.0], atol=1e-12)
            np.testing.assert_allclose(
                np.abs(camera.pose.position - [0.0, 0.0, 1.0]), 0.25, atol=1e-12
            )

    @pytest.mark.parametrize('scene', ['barbershop', 'lone-monk', 'zen-garden'])
    def test_corners_do_not_coincide_with_base_cameras(self, scene):
        """Test evaluation corners are distinct from every cuboid and sphere camera"""
        corners = generate(PRESETS[f'{scene}-corners']).positions()
        for kind in ('cuboid', 'sphere'):
            base = generate(PRESETS[f'{scene}-{kind}']).positions()
            distances = np.linalg.norm(base[None, :, :] - corners[:, None, :], axis=-1)
            assert distances.min() > 1e-6


class TestLayoutHelpers:
    """Test extents and preset helpers"""

    def test_extent(self):
        """Test the extent of the Lone Monk cuboid"""
        extent = layout_extent(generate(PRESETS['lone-monk-cuboid']).positions())

        np.testing.assert_allclose(extent.size, [4.0, 4.0, 3.0], atol=1e-12)
        np.testing.assert_allclose(extent.center, [0.0, 0.0, 2.2], atol=1e-12)

    def test_empty_extent(self):
        """Test empty layouts have no extent"""
        with pytest.raises(RigSpecError):
            layout_extent(np.zeros((0, 3)))

    def test_preset_scene_name(self):
        """Test preset names map to scene names"""
        assert preset_scene_name('lone-monk-cuboid') == 'lone_monk'
        assert preset_scene_name('barbershop-sphere') == 'barbershop'
