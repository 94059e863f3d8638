"""
Pytest configuration and shared fixtures
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config.settings import Settings
from src.geometry.lens import EquidistantFisheye, Equirectangular, Rectilinear
from src.geometry.pose import CameraPose
from src.manifest.lightfield_config import config_from_layout, save_config
from src.oracle.scene import OracleScene, OracleSphere
from src.rig.generator import SphereSpec, gen_sphere


@pytest.fixture
def test_settings(tmp_path):
    """Create test settings with minimal configuration"""
    import yaml

    config = {
        'reprojection': {
            'samples': 2,
            'scale': 0.5,
            'filter': 'nearest',
            'parallel': 2,
        },
        'tonemap': {
            'exposure': -1.0,
            'reinhard': 5.0,
        },
        'depth': {
            'interpretation': 'raylen',
        },
        'nerf': {
            'scenes': {
                'lone_monk': {'scale': 0.1, 'offset': [0.5, 0.5, 0.3]},
            },
        },
        'logging': {
            'level': 'DEBUG',
            'log_dir': str(tmp_path / 'logs'),
        },
    }

    config_file = tmp_path / 'lightrig.yaml'
    config_file.write_text(yaml.dump(config), encoding='utf-8')
    return Settings(str(config_file))


@pytest.fixture
def fisheye():
    """180 degree equidistant fish-eye"""
    return EquidistantFisheye(math.pi)


@pytest.fixture
def equirect():
    return Equirectangular()


@pytest.fixture
def rectilinear():
    """18 mm lens on a 36 x 36 mm sensor (90 degree field of view)"""
    return Rectilinear(18.0, 36.0, 36.0)


@pytest.fixture
def lenses(fisheye, equirect, rectilinear):
    return {'fisheye': fisheye, 'equirect': equirect, 'rectilinear': rectilinear}


@pytest.fixture
def oracle_scene():
    """Default checkerboard ground, sphere and sky"""
    return OracleScene()


@pytest.fixture
def down_pose():
    """Camera 3 m above the origin looking straight down, image up along world +X"""
    return CameraPose.look_along((0.0, 0.0, 3.0), (0.0, 0.0, -1.0))


@pytest.fixture
def mini_rig():
    """12-camera icosahedron rig of small fish-eye images"""
    spec = SphereSpec(
        diameter=1.0,
        subdivisions=0,
        center=(0.0, 0.0, 1.5),
        lens=EquidistantFisheye(math.pi),
        resolution=(32, 32),
    )
    return gen_sphere(spec)


@pytest.fixture
def mini_dataset(tmp_path, mini_rig):
    """
    Manifest for the mini rig written to tmp_path/rig/lightfield.json

    Images are not rendered; tests render them as needed.
    """
    cfg = config_from_layout(mini_rig, 'mini', 'exr/{name}.exr')
    manifest = tmp_path / 'rig' / 'lightfield.json'
    save_config(cfg, manifest)
    return manifest


@pytest.fixture
def random_directions():
    """Deterministic unit directions on the forward hemisphere"""
    rng = np.random.default_rng(7)
    dirs = rng.normal(size=(1000, 3))
    dirs[:, 2] = np.abs(dirs[:, 2]) + 0.05
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


@pytest.fixture
def floating_sphere_scene():
    """Scene whose sphere sits right below the down-looking camera"""
    return OracleScene(sphere=OracleSphere(center=(0.0, 0.0, 1.0), radius=0.5))
