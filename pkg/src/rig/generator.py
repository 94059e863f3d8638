"""
Camera Rig Generator
Builds cuboid, spherical and cube-corner outward-facing camera layouts
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple, Union

import numpy as np

from src.config.logging_config import get_logger
from src.geometry.lens import EquidistantFisheye, Equirectangular, LensModel, Resolution
from src.geometry.pose import CameraPose

logger = get_logger(__name__)

Vec3 = Tuple[float, float, float]

DEFAULT_RESOLUTION: Resolution = (2048, 2048)
PANORAMA_RESOLUTION: Resolution = (4096, 2048)


class RigSpecError(ValueError):
    """Exception raised for an invalid rig description"""

    def __init__(self, parameter: str, message: str):
        self.parameter = parameter
        super().__init__(message)


@dataclass(frozen=True)
class CuboidSpec:
    """Cameras on a full inclusive grid over every face of an axis-aligned box"""

    size: Vec3
    counts: Tuple[int, int, int]
    center: Vec3 = (0.0, 0.0, 0.0)
    lens: LensModel = field(default_factory=EquidistantFisheye)
    resolution: Resolution = DEFAULT_RESOLUTION

    def __post_init__(self):
        if len(self.size) != 3 or any(not s > 0 for s in self.size):
            raise RigSpecError('size', f"Cuboid size must be three positive lengths, got {self.size}")
        if len(self.counts) != 3 or any(
            isinstance(n, bool) or not isinstance(n, int) or n < 2 for n in self.counts
        ):
            raise RigSpecError('counts', f"Cuboid counts must be three integers >= 2, got {self.counts}")
        _check_common(self.center, self.resolution)


@dataclass(frozen=True)
class SphereSpec:
    """Cameras at the vertices of a subdivided icosahedron"""

    diameter: float
    subdivisions: int
    center: Vec3 = (0.0, 0.0, 0.0)
    lens: LensModel = field(default_factory=EquidistantFisheye)
    resolution: Resolution = DEFAULT_RESOLUTION

    def __post_init__(self):
        if not self.diameter > 0:
            raise RigSpecError('diameter', f"Sphere diameter must be > 0, got {self.diameter}")
        if isinstance(self.subdivisions, bool) or not isinstance(self.subdivisions, int) \
                or self.subdivisions < 0:
            raise RigSpecError(
                'subdivisions', f"Subdivisions must be an integer >= 0, got {self.subdivisions}"
            )
        _check_common(self.center, self.resolution)


@dataclass(frozen=True)
class CornersSpec:
    """Eight panoramic evaluation cameras at the corners of a cube"""

    size: float
    center: Vec3 = (0.0, 0.0, 0.0)
    lens: LensModel = field(default_factory=Equirectangular)
    resolution: Resolution = PANORAMA_RESOLUTION

    def __post_init__(self):
        if not self.size > 0:
            raise RigSpecError('size', f"Cube size must be > 0, got {self.size}")
        _check_common(self.center, self.resolution)


RigSpec = Union[CuboidSpec, SphereSpec, CornersSpec]


def _check_common(center: Vec3, resolution: Resolution):
    if len(center) != 3 or not all(math.isfinite(c) for c in center):
        raise RigSpecError('center', f"Center must be three finite coordinates, got {center}")
    if len(resolution) != 2 or any(
        isinstance(n, bool) or not isinstance(n, int) or n < 1 for n in resolution
    ):
        raise RigSpecError('resolution', f"Resolution must be (W, H) with W, H >= 1, got {resolution}")


@dataclass(frozen=True, eq=False)
class RigCamera:
    sequence: int
    name: str
    pose: CameraPose
    lens: LensModel
    resolution: Resolution


@dataclass(frozen=True, eq=False)
class RigLayout:
    """Ordered cameras with contiguous sequence numbers from 0"""

    cameras: Tuple[RigCamera, ...]

    def __post_init__(self):
        object.__setattr__(self, 'cameras', tuple(self.cameras))
        for expected, camera in enumerate(self.cameras):
            if camera.sequence != expected:
                raise RigSpecError(
                    'sequence', f"Camera '{camera.name}' has sequence {camera.sequence}, expected {expected}"
                )

    def __len__(self) -> int:
        return len(self.cameras)

    def positions(self) -> np.ndarray:
        """(N, 3) camera positions"""
        if not self.cameras:
            return np.zeros((0, 3))
        return np.array([camera.pose.position for camera in self.cameras])


# (name prefix, normal axis, normal sign, row axis, column axis)
_CUBOID_FACES = (
    ('px', 0, +1, 2, 1),
    ('nx', 0, -1, 2, 1),
    ('py', 1, +1, 2, 0),
    ('ny', 1, -1, 2, 0),
    ('pz', 2, +1, 1, 0),
    ('nz', 2, -1, 1, 0),
)


def gen_cuboid(spec: CuboidSpec) -> RigLayout:
    """
    Generate the cuboid rig

    Faces are emitted in the order +X, -X, +Y, -Y, +Z, -Z, each as a
    row-major inclusive grid. Cameras on shared edges and corners appear once
    per face, at the same position but facing along that face's normal, so
    the total is 2(ny*nz + nx*nz + nx*ny).

    Args:
        spec: Cuboid description

    Returns:
        RigLayout
    """
    size = np.asarray(spec.size, dtype=np.float64)
    center = np.asarray(spec.center, dtype=np.float64)
    ticks = [np.linspace(-size[i] / 2.0, size[i] / 2.0, spec.counts[i]) for i in range(3)]

    cameras: List[RigCamera] = []
    for prefix, axis, sign, row_axis, col_axis in _CUBOID_FACES:
        normal = np.zeros(3)
        normal[axis] = sign
        pose_template = CameraPose.look_along(np.zeros(3), normal)

        for row, row_value in enumerate(ticks[row_axis]):
            for col, col_value in enumerate(ticks[col_axis]):
                offset = np.zeros(3)
                offset[axis] = sign * size[axis] / 2.0
                offset[row_axis] = row_value
                offset[col_axis] = col_value
                cameras.append(RigCamera(
                    sequence=len(cameras),
                    name=f"{prefix}_{row:02d}_{col:02d}",
                    pose=CameraPose(center + offset, pose_template.rotation),
                    lens=spec.lens,
                    resolution=spec.resolution,
                ))

    logger.debug(f"Generated cuboid rig {tuple(spec.size)} m, counts {spec.counts}: {len(cameras)} cameras")
    return RigLayout(tuple(cameras))


def icosphere_vertices(subdivisions: int) -> np.ndarray:
    """
    Unit-sphere vertices of a subdivided icosahedron

    Each level splits every triangle into four through its edge midpoints;
    shared midpoints are created once, giving 10 * 4^s + 2 vertices in
    construction order.

    Args:
        subdivisions: Number of subdivision levels

    Returns:
        (N, 3) unit vectors
    """
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    vertices = [
        (-1.0, phi, 0.0), (1.0, phi, 0.0), (-1.0, -phi, 0.0), (1.0, -phi, 0.0),
        (0.0, -1.0, phi), (0.0, 1.0, phi), (0.0, -1.0, -phi), (0.0, 1.0, -phi),
        (phi, 0.0, -1.0), (phi, 0.0, 1.0), (-phi, 0.0, -1.0), (-phi, 0.0, 1.0),
    ]
    points = [np.asarray(v) / np.linalg.norm(v) for v in vertices]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]

    for _ in range(subdivisions):
        midpoints: Dict[Tuple[int, int], int] = {}

        def midpoint(i: int, j: int) -> int:
            key = (min(i, j), max(i, j))
            if key not in midpoints:
                m = points[i] + points[j]
                points.append(m / np.linalg.norm(m))
                midpoints[key] = len(points) - 1
            return midpoints[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        faces = refined

    return np.array(points)


def gen_sphere(spec: SphereSpec) -> RigLayout:
    """
    Generate the spherical rig with every camera facing radially outward

    Args:
        spec: Sphere description

    Returns:
        RigLayout with 10 * 4^s + 2 cameras
    """
    center = np.asarray(spec.center, dtype=np.float64)
    radius = spec.diameter / 2.0
    directions = icosphere_vertices(spec.subdivisions)
    digits = max(3, len(str(len(directions) - 1)))

    cameras = tuple(
        RigCamera(
            sequence=i,
            name=f"sphere_{i:0{digits}d}",
            pose=CameraPose.look_along(center + radius * direction, direction),
            lens=spec.lens,
            resolution=spec.resolution,
        )
        for i, direction in enumerate(directions)
    )
    logger.debug(f"Generated sphere rig d={spec.diameter} m, subdiv {spec.subdivisions}: {len(cameras)} cameras")
    return RigLayout(cameras)


def gen_cube_corners(spec: CornersSpec) -> RigLayout:
    """
    Generate eight evaluation cameras at the corners of a cube

    All cameras share one orientation: optical axis along world +X, image up
    along world +Z.

    Args:
        spec: Corner cube description

    Returns:
        RigLayout with 8 cameras ordered by (x, y, z) sign, negative first
    """
    center = np.asarray(spec.center, dtype=np.float64)
    half = spec.size / 2.0
    rotation = CameraPose.look_along(np.zeros(3), (1.0, 0.0, 0.0)).rotation

    cameras = []
    for signs in itertools.product((-1, 1), repeat=3):
        label = ''.join('p' if s > 0 else 'n' for s in signs)
        cameras.append(RigCamera(
            sequence=len(cameras),
            name=f"corner_{label}",
            pose=CameraPose(center + half * np.asarray(signs, dtype=np.float64), rotation),
            lens=spec.lens,
            resolution=spec.resolution,
        ))
    return RigLayout(tuple(cameras))


def generate(spec: RigSpec) -> RigLayout:
    """Dispatch on the rig description type"""
    if isinstance(spec, CuboidSpec):
        return gen_cuboid(spec)
    if isinstance(spec, SphereSpec):
        return gen_sphere(spec)
    if isinstance(spec, CornersSpec):
        return gen_cube_corners(spec)
    raise RigSpecError('spec', f"Unknown rig description: {type(spec).__name__}")


@dataclass(frozen=True)
class LayoutExtent:
    minimum: np.ndarray
    maximum: np.ndarray

    @property
    def center(self) -> np.ndarray:
        return (self.minimum + self.maximum) / 2.0

    @property
    def size(self) -> np.ndarray:
        return self.maximum - self.minimum


def layout_extent(positions: np.ndarray) -> LayoutExtent:
    """
    Axis-aligned bounds of camera positions

    Args:
        positions: (N, 3) positions, N >= 1

    Returns:
        LayoutExtent
    """
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    if len(positions) == 0:
        raise RigSpecError('cameras', "Cannot compute the extent of an empty layout")
    return LayoutExtent(minimum=positions.min(axis=0), maximum=positions.max(axis=0))


# Rigs of the three published scenes; sphere centers sit at the capture elevation
PRESETS: Dict[str, RigSpec] = {
    'barbershop-cuboid': CuboidSpec(size=(1.0, 3.0, 1.0), counts=(10, 30, 10), center=(0.0, 0.0, 1.2)),
    'barbershop-sphere': SphereSpec(diameter=1.45, subdivisions=3, center=(0.0, 0.0, 1.2)),
    'barbershop-corners': CornersSpec(size=0.5, center=(0.0, 0.0, 1.2)),
    'lone-monk-cuboid': CuboidSpec(size=(4.0, 4.0, 3.0), counts=(21, 21, 16), center=(0.0, 0.0, 2.2)),
    'lone-monk-sphere': SphereSpec(diameter=4.0, subdivisions=3, center=(0.0, 0.0, 2.2)),
    'lone-monk-corners': CornersSpec(size=1.5, center=(0.0, 0.0, 2.2)),
    'zen-garden-cuboid': CuboidSpec(size=(2.0, 2.0, 1.0), counts=(21, 21, 11), center=(0.0, 0.0, 1.0)),
    'zen-garden-sphere': SphereSpec(diameter=1.7, subdivisions=3, center=(0.0, 0.0, 1.0)),
    'zen-garden-corners': CornersSpec(size=0.5, center=(0.0, 0.0, 1.0)),
}


def preset_scene_name(preset: str) -> str:
    """Scene name of a preset, e.g. 'lone-monk-cuboid' -> 'lone_monk'"""
    return preset.rsplit('-', 1)[0].replace('-', '_')
