"""
NeRF Transforms Conversion
Converts a rectilinear camera manifest to the instant-ngp transforms.json layout
"""

import json
import math
import posixpath
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.config.logging_config import get_logger
from src.geometry.lens import Rectilinear
from src.manifest.lightfield_config import LightfieldConfig
from src.rig.generator import PRESETS, CornersSpec, CuboidSpec, SphereSpec, layout_extent
from src.utils.file_utils import PathLike, write_bytes_atomic

logger = get_logger(__name__)

# Camera +Y down / +Z forward becomes +Y up / -Z forward
AXIS_FLIP = np.diag([1.0, -1.0, -1.0])

KNOWN_SCENES = ('barbershop', 'lone_monk', 'zen_garden')
DEFAULT_AABB_SCALE = 1


class NerfConversionError(ValueError):
    """Raised when a manifest cannot be converted to NeRF transforms"""

    def __init__(self, message: str, camera: Optional[str] = None):
        self.camera = camera
        super().__init__(message)


@dataclass(frozen=True)
class SceneTransform:
    """Uniform scale and translation applied to camera positions"""

    scale: float = 1.0
    offset: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise NerfConversionError(f"Scene scale must be a positive number, got {self.scale}")
        if len(self.offset) != 3 or not all(math.isfinite(c) for c in self.offset):
            raise NerfConversionError(f"Scene offset must be three finite numbers, got {self.offset}")


@dataclass(frozen=True)
class NerfFrame:
    file_path: str
    transform_matrix: np.ndarray


@dataclass(frozen=True)
class NerfTransforms:
    camera_angle_x: float
    camera_angle_y: float
    fl_x: float
    fl_y: float
    cx: float
    cy: float
    w: int
    h: int
    scale: float
    offset: Tuple[float, float, float]
    aabb_scale: int = DEFAULT_AABB_SCALE
    frames: List[NerfFrame] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'camera_angle_x': self.camera_angle_x,
            'camera_angle_y': self.camera_angle_y,
            'fl_x': self.fl_x,
            'fl_y': self.fl_y,
            'cx': self.cx,
            'cy': self.cy,
            'w': self.w,
            'h': self.h,
            'aabb_scale': self.aabb_scale,
            'scale': self.scale,
            'offset': list(self.offset),
            'frames': [
                {'file_path': frame.file_path, 'transform_matrix': frame.transform_matrix.tolist()}
                for frame in self.frames
            ],
        }


def to_nerf_transforms(
    cfg: LightfieldConfig,
    scene: SceneTransform,
    path_prefix: str = '',
    aabb_scale: int = DEFAULT_AABB_SCALE
) -> NerfTransforms:
    """
    Convert a manifest of identical rectilinear cameras to NeRF transforms

    Camera Y and Z basis vectors are negated to reach the -Z forward / +Y up
    camera convention; positions become position * scale + offset. The
    rotation block stays orthonormal.

    Args:
        cfg: Manifest whose cameras all share one rectilinear lens and resolution
        scene: Scale and offset applied to positions
        path_prefix: Prefix joined to every image path (relative to the transforms file)
        aabb_scale: Scene bounding-box scale recorded for the trainer

    Returns:
        NerfTransforms

    Raises:
        NerfConversionError: If cameras are missing, not rectilinear, or differ in lens or size
    """
    if not cfg.cameras:
        raise NerfConversionError("The camera manifest has no cameras to convert")

    first = cfg.cameras[0]
    for camera in cfg.cameras:
        if not isinstance(camera.lens, Rectilinear):
            raise NerfConversionError(
                f"Camera '{camera.name}' uses a {camera.lens.kind} lens; NeRF conversion "
                f"needs rectilinear images", camera.name
            )
        if camera.lens != first.lens or camera.resolution != first.resolution:
            raise NerfConversionError(
                f"Camera '{camera.name}' differs in lens or resolution from '{first.name}'; "
                f"all cameras must share one rectilinear lens", camera.name
            )

    lens: Rectilinear = first.lens
    width, height = first.resolution
    offset = np.asarray(scene.offset, dtype=np.float64)

    frames = []
    for camera in cfg.cameras:
        pose = camera.pose()
        matrix = np.eye(4)
        matrix[:3, :3] = pose.rotation @ AXIS_FLIP
        matrix[:3, 3] = pose.position * scene.scale + offset
        frames.append(NerfFrame(
            file_path=posixpath.normpath(posixpath.join(path_prefix, camera.image)) if path_prefix
            else camera.image,
            transform_matrix=matrix,
        ))

    return NerfTransforms(
        camera_angle_x=lens.angle_x,
        camera_angle_y=lens.angle_y,
        fl_x=lens.focal / lens.sensor_w * width,
        fl_y=lens.focal / lens.sensor_h * height,
        cx=width / 2.0,
        cy=height / 2.0,
        w=width,
        h=height,
        scale=scene.scale,
        offset=(float(offset[0]), float(offset[1]), float(offset[2])),
        aabb_scale=aabb_scale,
        frames=frames,
    )


def fit_unit_cube(minimum: np.ndarray, maximum: np.ndarray) -> SceneTransform:
    """
    Scale and offset mapping a bounding box into the unit cube, centered at 0.5

    Args:
        minimum: Lower box corner
        maximum: Upper box corner

    Returns:
        SceneTransform with scale 1 / (2 * largest extent)
    """
    minimum = np.asarray(minimum, dtype=np.float64)
    maximum = np.asarray(maximum, dtype=np.float64)
    largest = float(np.max(maximum - minimum))
    scale = 1.0 / (2.0 * largest) if largest > 0 else 1.0
    center = (minimum + maximum) / 2.0
    offset = 0.5 - center * scale
    return SceneTransform(scale=scale, offset=tuple(float(c) for c in offset))


def _spec_bounds(spec) -> Tuple[np.ndarray, np.ndarray]:
    center = np.asarray(spec.center, dtype=np.float64)
    if isinstance(spec, CuboidSpec):
        half = np.asarray(spec.size, dtype=np.float64) / 2.0
    elif isinstance(spec, SphereSpec):
        half = np.full(3, spec.diameter / 2.0)
    elif isinstance(spec, CornersSpec):
        half = np.full(3, spec.size / 2.0)
    else:
        raise NerfConversionError(f"Unknown rig description: {type(spec).__name__}")
    return center - half, center + half


def scene_defaults(scene: str) -> SceneTransform:
    """
    Default scale and offset of a published scene

    The box covering all of the scene's rigs is fitted into the unit cube, so
    cuboid, sphere and corner captures of one scene share a frame.

    Args:
        scene: Scene name, one of KNOWN_SCENES

    Returns:
        SceneTransform
    """
    if scene not in KNOWN_SCENES:
        raise NerfConversionError(
            f"Unknown scene '{scene}'; known scenes: {', '.join(KNOWN_SCENES)}"
        )
    prefix = scene.replace('_', '-') + '-'
    bounds = [_spec_bounds(spec) for name, spec in PRESETS.items() if name.startswith(prefix)]
    minimum = np.min([b[0] for b in bounds], axis=0)
    maximum = np.max([b[1] for b in bounds], axis=0)
    return fit_unit_cube(minimum, maximum)


def resolve_scene_transform(
    cfg: LightfieldConfig,
    scene: Optional[str] = None,
    override: Optional[Dict[str, Any]] = None,
    scale: Optional[float] = None,
    offset: Optional[Tuple[float, float, float]] = None
) -> SceneTransform:
    """
    Pick the scale and offset for a conversion

    Explicit values win, then the settings override for the scene, then the
    scene's defaults. The manifest's own camera bounds are fitted when no
    scene is named, or for an unknown scene that carries explicit values.

    Args:
        cfg: Manifest being converted
        scene: Scene name
        override: Per-scene settings with optional 'scale' and 'offset'
        scale: Explicit scale
        offset: Explicit offset

    Returns:
        SceneTransform
    """
    override = override or {}
    explicit = scale is not None or offset is not None or bool(override)
    if scene is not None and (scene in KNOWN_SCENES or not explicit):
        base = scene_defaults(scene)
    elif cfg.cameras:
        extent = layout_extent(np.array([camera.position for camera in cfg.cameras]))
        base = fit_unit_cube(extent.minimum, extent.maximum)
    else:
        base = SceneTransform()

    chosen_scale = scale if scale is not None else override.get('scale', base.scale)
    chosen_offset = offset if offset is not None else override.get('offset', base.offset)
    return SceneTransform(scale=float(chosen_scale), offset=tuple(float(c) for c in chosen_offset))


def emit_transforms(transforms: NerfTransforms) -> bytes:
    return (json.dumps(transforms.to_dict(), indent=2) + '\n').encode('utf-8')


def save_transforms(transforms: NerfTransforms, path: PathLike):
    """Write transforms JSON atomically"""
    write_bytes_atomic(path, emit_transforms(transforms))
    logger.debug(f"Wrote NeRF transforms {path} ({len(transforms.frames)} frames)")
