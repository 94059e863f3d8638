"""
Light Field Camera Manifest
Parses, validates and emits the lightfield.json camera configuration
"""

import json
import math
import posixpath
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.config.logging_config import get_logger
from src.geometry.lens import (
    EquidistantFisheye,
    Equirectangular,
    LensError,
    LensModel,
    Rectilinear,
    Resolution,
)
from src.geometry.pose import CameraPose
from src.rig.generator import RigLayout
from src.utils.file_utils import PathLike, is_safe_relative_path, write_bytes_atomic

logger = get_logger(__name__)

UNIT = 'meters'
QUATERNION_TOLERANCE = 1e-9

_LENS_TYPES = {
    EquidistantFisheye.kind: (EquidistantFisheye, ('fov',)),
    Equirectangular.kind: (Equirectangular, ('h_fov', 'v_fov')),
    Rectilinear.kind: (Rectilinear, ('focal', 'sensor_w', 'sensor_h')),
}
_CAMERA_FIELDS = ('name', 'sequence', 'position', 'rotation', 'lens', 'resolution', 'image')
_TOP_FIELDS = ('scene_name', 'unit', 'cameras')


class ManifestError(ValueError):
    """Base exception for camera manifest problems"""

    def __init__(self, message: str, camera: Optional[str] = None):
        """
        Initialize exception

        Args:
            message: Error message
            camera: Name (or index) of the offending camera, if any
        """
        self.camera = camera
        prefix = f"camera '{camera}': " if camera is not None else ''
        super().__init__(f"{prefix}{message}")


class ManifestSyntaxError(ManifestError):
    """Raised when the manifest is not well-formed JSON"""
    pass


class ManifestFieldError(ManifestError):
    """Raised when a required field is missing or has the wrong type"""
    pass


class ManifestInvariantError(ManifestError):
    """Raised when field values violate manifest invariants"""
    pass


class ImagePatternError(ValueError):
    """Raised when an image pattern cannot name every camera of a rig"""

    def __init__(self, pattern: str, message: str):
        self.pattern = pattern
        super().__init__(f"image pattern {pattern!r}: {message}")


class ManifestFileError(OSError):
    """Raised when a manifest file cannot be read"""

    def __init__(self, path: PathLike, message: str):
        self.path = str(path)
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class CameraEntry:
    """One camera of the manifest; unknown JSON fields are kept in extra/lens_extra"""

    name: str
    sequence: int
    position: Tuple[float, float, float]
    rotation: Tuple[float, float, float, float]
    lens: LensModel
    resolution: Resolution
    image: str
    depth: Optional[str] = None
    extra: Dict[str, Any] = field(default_factory=dict)
    lens_extra: Dict[str, Any] = field(default_factory=dict)

    def pose(self) -> CameraPose:
        return CameraPose.from_quaternion(self.position, self.rotation)


@dataclass(frozen=True)
class LightfieldConfig:
    scene_name: str
    cameras: Tuple[CameraEntry, ...]
    extra: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.cameras)

    def sequences(self) -> List[int]:
        return [camera.sequence for camera in self.cameras]

    def with_cameras(self, cameras: Sequence[CameraEntry]) -> 'LightfieldConfig':
        return replace(self, cameras=tuple(cameras))


def lens_to_json(lens: LensModel, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Tagged JSON object for a lens; angles in radians, lengths in millimeters"""
    _, params = _LENS_TYPES[lens.kind]
    obj: Dict[str, Any] = {'type': lens.kind}
    obj.update({name: float(getattr(lens, name)) for name in params})
    obj.update(extra or {})
    return obj


def lens_from_json(obj: Any, camera: Optional[str] = None) -> Tuple[LensModel, Dict[str, Any]]:
    """
    Build a lens from its tagged JSON object

    Args:
        obj: Parsed JSON value
        camera: Camera name for error messages

    Returns:
        Tuple of (lens, unknown fields)
    """
    if not isinstance(obj, dict):
        raise ManifestFieldError("'lens' must be an object", camera)
    kind = obj.get('type')
    if kind not in _LENS_TYPES:
        raise ManifestFieldError(
            f"unknown lens type {kind!r}; expected one of {', '.join(_LENS_TYPES)}", camera
        )
    cls, params = _LENS_TYPES[kind]
    values = {}
    for name in params:
        if name not in obj:
            raise ManifestFieldError(f"lens '{kind}' is missing '{name}'", camera)
        values[name] = _number(obj[name], f"lens.{name}", camera)
    try:
        lens = cls(**values)
    except LensError as e:
        raise ManifestInvariantError(str(e), camera)
    extra = {k: v for k, v in obj.items() if k != 'type' and k not in params}
    return lens, extra


def parse_config(data: Union[bytes, str]) -> LightfieldConfig:
    """
    Parse and strictly validate a camera manifest

    Args:
        data: UTF-8 JSON document

    Returns:
        LightfieldConfig

    Raises:
        ManifestSyntaxError: If the document is not valid JSON
        ManifestFieldError: If a required field is missing or mistyped
        ManifestInvariantError: If values violate manifest invariants
    """
    try:
        if isinstance(data, bytes):
            data = data.decode('utf-8')
        doc = json.loads(data)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ManifestSyntaxError(f"malformed JSON: {e}")

    if not isinstance(doc, dict):
        raise ManifestFieldError("top level must be an object")
    for name in _TOP_FIELDS:
        if name not in doc:
            raise ManifestFieldError(f"missing field '{name}'")
    if not isinstance(doc['scene_name'], str):
        raise ManifestFieldError("'scene_name' must be a string")
    if doc['unit'] != UNIT:
        raise ManifestInvariantError(f"'unit' must be '{UNIT}', got {doc['unit']!r}")
    if not isinstance(doc['cameras'], list):
        raise ManifestFieldError("'cameras' must be a list")

    cameras = tuple(_parse_camera(index, obj) for index, obj in enumerate(doc['cameras']))
    _check_unique(cameras)

    extra = {k: v for k, v in doc.items() if k not in _TOP_FIELDS}
    return LightfieldConfig(scene_name=doc['scene_name'], cameras=cameras, extra=extra)


def _parse_camera(index: int, obj: Any) -> CameraEntry:
    label = str(index)
    if not isinstance(obj, dict):
        raise ManifestFieldError("camera entry must be an object", label)
    if isinstance(obj.get('name'), str):
        label = obj['name']
    for name in _CAMERA_FIELDS:
        if name not in obj:
            raise ManifestFieldError(f"missing field '{name}'", label)
    if not isinstance(obj['name'], str) or not obj['name']:
        raise ManifestFieldError("'name' must be a non-empty string", label)

    sequence = obj['sequence']
    if isinstance(sequence, bool) or not isinstance(sequence, int) or sequence < 0:
        raise ManifestFieldError(f"'sequence' must be an integer >= 0, got {sequence!r}", label)

    position = _vector(obj['position'], 3, 'position', label)
    rotation = _vector(obj['rotation'], 4, 'rotation', label)
    norm = math.sqrt(sum(c * c for c in rotation))
    if abs(norm - 1.0) > QUATERNION_TOLERANCE:
        raise ManifestInvariantError(f"rotation quaternion is not unit-norm (norm {norm:.12g})", label)

    resolution = obj['resolution']
    if (not isinstance(resolution, list) or len(resolution) != 2
            or any(isinstance(v, bool) or not isinstance(v, int) or v < 1 for v in resolution)):
        raise ManifestFieldError(f"'resolution' must be [W, H] with W, H >= 1, got {resolution!r}", label)

    lens, lens_extra = lens_from_json(obj['lens'], label)

    image = _relative_path(obj['image'], 'image', label)
    depth = None
    if obj.get('depth') is not None:
        depth = _relative_path(obj['depth'], 'depth', label)

    known = set(_CAMERA_FIELDS) | {'depth'}
    return CameraEntry(
        name=obj['name'],
        sequence=sequence,
        position=position,
        rotation=rotation,
        lens=lens,
        resolution=(resolution[0], resolution[1]),
        image=image,
        depth=depth,
        extra={k: v for k, v in obj.items() if k not in known},
        lens_extra=lens_extra,
    )


def _number(value: Any, field_name: str, camera: Optional[str]) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ManifestFieldError(f"'{field_name}' must be a finite number, got {value!r}", camera)
    return float(value)


def _vector(value: Any, size: int, field_name: str, camera: str) -> tuple:
    if not isinstance(value, list) or len(value) != size:
        raise ManifestFieldError(f"'{field_name}' must be a list of {size} numbers", camera)
    return tuple(_number(v, field_name, camera) for v in value)


def _relative_path(value: Any, field_name: str, camera: str) -> str:
    if not isinstance(value, str) or not value:
        raise ManifestFieldError(f"'{field_name}' must be a non-empty string", camera)
    if not is_safe_relative_path(value):
        raise ManifestInvariantError(
            f"'{field_name}' must be a relative path without '..', got {value!r}", camera
        )
    return value


def _check_unique(cameras: Sequence[CameraEntry]):
    seen_sequences: Dict[int, str] = {}
    seen_names = set()
    seen_images: Dict[str, str] = {}
    for camera in cameras:
        if camera.sequence in seen_sequences:
            raise ManifestInvariantError(
                f"sequence {camera.sequence} already used by '{seen_sequences[camera.sequence]}'",
                camera.name
            )
        if camera.name in seen_names:
            raise ManifestInvariantError("duplicate camera name", camera.name)
        seen_sequences[camera.sequence] = camera.name
        seen_names.add(camera.name)
        image = posixpath.normpath(camera.image)
        if image in seen_images:
            raise ManifestInvariantError(
                f"image {camera.image!r} already used by '{seen_images[image]}'", camera.name
            )
        seen_images[image] = camera.name


def config_to_dict(cfg: LightfieldConfig) -> Dict[str, Any]:
    """JSON-ready mapping with known fields first and unknown fields preserved"""
    cameras = []
    for camera in cfg.cameras:
        obj: Dict[str, Any] = {
            'name': camera.name,
            'sequence': camera.sequence,
            'position': list(camera.position),
            'rotation': list(camera.rotation),
            'lens': lens_to_json(camera.lens, camera.lens_extra),
            'resolution': list(camera.resolution),
            'image': camera.image,
        }
        if camera.depth is not None:
            obj['depth'] = camera.depth
        obj.update(camera.extra)
        cameras.append(obj)

    doc: Dict[str, Any] = {'scene_name': cfg.scene_name, 'unit': UNIT, 'cameras': cameras}
    doc.update(cfg.extra)
    return doc


def emit_config(cfg: LightfieldConfig) -> bytes:
    """Serialize a manifest as indented UTF-8 JSON with a trailing newline"""
    return (json.dumps(config_to_dict(cfg), indent=2, ensure_ascii=False) + '\n').encode('utf-8')


def load_config(path: PathLike) -> LightfieldConfig:
    """
    Read and parse a manifest file

    Raises:
        ManifestFileError: If the file cannot be read
        ManifestError: If the content is invalid
    """
    try:
        data = Path(path).read_bytes()
    except FileNotFoundError:
        raise ManifestFileError(path, "file not found")
    except OSError as e:
        raise ManifestFileError(path, str(e))
    cfg = parse_config(data)
    logger.debug(f"Loaded manifest {path}: scene '{cfg.scene_name}', {len(cfg)} cameras")
    return cfg


def save_config(cfg: LightfieldConfig, path: PathLike):
    """Write a manifest file atomically"""
    write_bytes_atomic(path, emit_config(cfg))
    logger.debug(f"Wrote manifest {path} ({len(cfg)} cameras)")


def camera_entry_from_pose(
    name: str,
    sequence: int,
    pose: CameraPose,
    lens: LensModel,
    resolution: Resolution,
    image: str,
    depth: Optional[str] = None
) -> CameraEntry:
    """Build a manifest entry from a pose, storing the rotation as a [w, x, y, z] quaternion"""
    quat = pose.to_quaternion()
    return CameraEntry(
        name=name,
        sequence=sequence,
        position=tuple(float(c) for c in pose.position),
        rotation=tuple(float(c) for c in quat / np.linalg.norm(quat)),
        lens=lens,
        resolution=(int(resolution[0]), int(resolution[1])),
        image=image,
        depth=depth,
    )


def format_image_path(pattern: str, name: str, sequence: int) -> str:
    """Fill an image pattern such as 'exr/{name}.exr' or 'png/{sequence:04d}.png'"""
    try:
        return pattern.format(name=name, sequence=sequence)
    except KeyError as e:
        raise ImagePatternError(pattern, f"unknown field {e}; use {{name}} or {{sequence}}")
    except (IndexError, ValueError) as e:
        raise ImagePatternError(pattern, str(e))


def config_from_layout(
    layout: RigLayout,
    scene_name: str,
    image_pattern: str = 'exr/{name}.exr'
) -> LightfieldConfig:
    """
    Manifest for a generated rig

    Args:
        layout: Generated rig
        scene_name: Scene name recorded in the manifest
        image_pattern: Relative image path, formatted with name and sequence

    Returns:
        LightfieldConfig

    Raises:
        ImagePatternError: If the pattern uses other fields or gives two cameras one path
        ManifestInvariantError: If an image path leaves the manifest directory
    """
    cameras = tuple(
        camera_entry_from_pose(
            camera.name, camera.sequence, camera.pose, camera.lens, camera.resolution,
            format_image_path(image_pattern, camera.name, camera.sequence),
        )
        for camera in layout.cameras
    )
    for camera in cameras:
        _relative_path(camera.image, 'image', camera.name)
    if len({posixpath.normpath(camera.image) for camera in cameras}) < len(cameras):
        raise ImagePatternError(
            image_pattern, "must contain {name} or {sequence} so every camera gets its own file"
        )
    return LightfieldConfig(scene_name=scene_name, cameras=cameras)


def split_train_eval(cfg: LightfieldConfig) -> Tuple[LightfieldConfig, LightfieldConfig]:
    """
    Split views by sequence parity: even for training, odd for evaluation

    Args:
        cfg: Manifest

    Returns:
        Tuple of (train, eval) manifests, camera order preserved
    """
    train = [camera for camera in cfg.cameras if camera.sequence % 2 == 0]
    evaluation = [camera for camera in cfg.cameras if camera.sequence % 2 == 1]
    return cfg.with_cameras(train), cfg.with_cameras(evaluation)
