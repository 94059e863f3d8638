"""
Lens Models
Maps continuous pixel coordinates to camera-space ray directions and back

Camera space: right-handed, +Z forward (optical axis), +X right, +Y down.
Pixel (0, 0) is the top-left corner of the top-left pixel; pixel centers
sit at half-integers.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

Resolution = Tuple[int, int]

# Slack on the valid-region tests so that exact boundary rays survive rounding
ANGLE_TOLERANCE = 1e-12
PIXEL_TOLERANCE = 1e-6


class LensError(ValueError):
    """Exception raised for invalid lens parameters"""

    def __init__(self, lens: str, parameter: str, message: str):
        """
        Initialize exception

        Args:
            lens: Lens type name
            parameter: Offending parameter
            message: Error message
        """
        self.lens = lens
        self.parameter = parameter
        super().__init__(f"{lens}: {message}")


@dataclass(frozen=True)
class EquidistantFisheye:
    """Equidistant fish-eye lens (r = f * theta), circular image inscribed in min(W, H)"""

    fov: float = math.pi

    kind = 'equidistant_fisheye'

    def __post_init__(self):
        if not 0 < self.fov <= 2 * math.pi:
            raise LensError(self.kind, 'fov', f"fov must be in (0, 2*pi], got {self.fov}")

    def _to_rays(self, resolution: Resolution, u: np.ndarray, v: np.ndarray):
        width, height = resolution
        radius = min(width, height) / 2.0
        du = u - width / 2.0
        dv = v - height / 2.0
        rho = np.hypot(du, dv)
        theta = rho / radius * (self.fov / 2.0)
        psi = np.arctan2(dv, du)
        sin_theta = np.sin(theta)
        dirs = np.stack(
            [sin_theta * np.cos(psi), sin_theta * np.sin(psi), np.cos(theta)], axis=-1
        )
        return dirs, rho <= radius

    def _to_pixels(self, resolution: Resolution, dirs: np.ndarray):
        width, height = resolution
        radius = min(width, height) / 2.0
        x, y, z = dirs[..., 0], dirs[..., 1], dirs[..., 2]
        theta = np.arctan2(np.hypot(x, y), z)
        psi = np.arctan2(y, x)
        rho = theta / (self.fov / 2.0) * radius
        u = width / 2.0 + rho * np.cos(psi)
        v = height / 2.0 + rho * np.sin(psi)
        return u, v, theta <= self.fov / 2.0 + ANGLE_TOLERANCE


@dataclass(frozen=True)
class Equirectangular:
    """Equirectangular panorama: longitude/latitude linear in u/v"""

    h_fov: float = 2 * math.pi
    v_fov: float = math.pi

    kind = 'equirectangular'

    def __post_init__(self):
        if not 0 < self.h_fov <= 2 * math.pi:
            raise LensError(self.kind, 'h_fov', f"h_fov must be in (0, 2*pi], got {self.h_fov}")
        if not 0 < self.v_fov <= math.pi:
            raise LensError(self.kind, 'v_fov', f"v_fov must be in (0, pi], got {self.v_fov}")

    def _to_rays(self, resolution: Resolution, u: np.ndarray, v: np.ndarray):
        width, height = resolution
        lam = (u / width - 0.5) * self.h_fov
        phi = (0.5 - v / height) * self.v_fov
        cos_phi = np.cos(phi)
        dirs = np.stack([cos_phi * np.sin(lam), -np.sin(phi), cos_phi * np.cos(lam)], axis=-1)
        return dirs, np.ones(np.shape(lam), dtype=bool)

    def _to_pixels(self, resolution: Resolution, dirs: np.ndarray):
        width, height = resolution
        x, y, z = dirs[..., 0], dirs[..., 1], dirs[..., 2]
        lam = np.arctan2(x, z)
        phi = np.arctan2(-y, np.hypot(x, z))
        u = (lam / self.h_fov + 0.5) * width
        v = (0.5 - phi / self.v_fov) * height
        valid = (np.abs(lam) <= self.h_fov / 2.0 + ANGLE_TOLERANCE) & (
            np.abs(phi) <= self.v_fov / 2.0 + ANGLE_TOLERANCE
        )
        return u, v, valid


@dataclass(frozen=True)
class Rectilinear:
    """Perspective pinhole lens; focal length and sensor size in millimeters"""

    focal: float
    sensor_w: float
    sensor_h: float

    kind = 'rectilinear'

    def __post_init__(self):
        for name in ('focal', 'sensor_w', 'sensor_h'):
            value = getattr(self, name)
            if not value > 0:
                raise LensError(self.kind, name, f"{name} must be > 0, got {value}")

    @property
    def angle_x(self) -> float:
        """Full horizontal field of view in radians"""
        return 2.0 * math.atan(self.sensor_w / (2.0 * self.focal))

    @property
    def angle_y(self) -> float:
        """Full vertical field of view in radians"""
        return 2.0 * math.atan(self.sensor_h / (2.0 * self.focal))

    def _to_rays(self, resolution: Resolution, u: np.ndarray, v: np.ndarray):
        width, height = resolution
        sx = (u / width - 0.5) * self.sensor_w
        sy = (v / height - 0.5) * self.sensor_h
        sz = np.full(np.shape(sx), self.focal)
        rays = np.stack([sx, sy, sz], axis=-1)
        dirs = rays / np.linalg.norm(rays, axis=-1, keepdims=True)
        return dirs, np.ones(np.shape(sx), dtype=bool)

    def _to_pixels(self, resolution: Resolution, dirs: np.ndarray):
        width, height = resolution
        x, y, z = dirs[..., 0], dirs[..., 1], dirs[..., 2]
        ahead = z > 0
        safe_z = np.where(ahead, z, 1.0)
        u = (self.focal * x / safe_z / self.sensor_w + 0.5) * width
        v = (self.focal * y / safe_z / self.sensor_h + 0.5) * height
        inside = (
            (u >= -PIXEL_TOLERANCE) & (u <= width + PIXEL_TOLERANCE)
            & (v >= -PIXEL_TOLERANCE) & (v <= height + PIXEL_TOLERANCE)
        )
        return u, v, ahead & inside


LensModel = Union[EquidistantFisheye, Equirectangular, Rectilinear]


def _check_resolution(resolution: Resolution):
    width, height = resolution
    if width < 1 or height < 1:
        raise ValueError(f"Resolution must be at least 1x1, got {width}x{height}")


def pixels_to_rays(
    lens: LensModel,
    resolution: Resolution,
    u: np.ndarray,
    v: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Map arrays of pixel coordinates to unit camera-space ray directions

    Args:
        lens: Lens model
        resolution: Image size (W, H)
        u: Horizontal pixel coordinates
        v: Vertical pixel coordinates (same shape as u)

    Returns:
        Tuple of (directions with a trailing axis of 3, validity mask)
    """
    _check_resolution(resolution)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    return lens._to_rays(resolution, u, v)


def rays_to_pixels(
    lens: LensModel,
    resolution: Resolution,
    dirs: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Map arrays of unit camera-space directions to pixel coordinates

    Args:
        lens: Lens model
        resolution: Image size (W, H)
        dirs: Unit directions, trailing axis of 3

    Returns:
        Tuple of (u, v, validity mask); u and v are meaningless where invalid
    """
    _check_resolution(resolution)
    dirs = np.asarray(dirs, dtype=np.float64)
    with np.errstate(divide='ignore', invalid='ignore'):
        return lens._to_pixels(resolution, dirs)


def pixel_to_ray(
    lens: LensModel,
    resolution: Resolution,
    pixel: Tuple[float, float]
) -> Optional[np.ndarray]:
    """
    Map one pixel coordinate to its unit camera-space ray

    Args:
        lens: Lens model
        resolution: Image size (W, H)
        pixel: Continuous pixel coordinate (u, v)

    Returns:
        Unit direction, or None when the pixel lies outside the lens's image region
    """
    dirs, valid = pixels_to_rays(lens, resolution, np.array(pixel[0]), np.array(pixel[1]))
    if not bool(valid):
        return None
    return dirs


def ray_to_pixel(
    lens: LensModel,
    resolution: Resolution,
    direction: np.ndarray
) -> Optional[Tuple[float, float]]:
    """
    Map one unit camera-space direction to its pixel coordinate

    Args:
        lens: Lens model
        resolution: Image size (W, H)
        direction: Unit direction (x, y, z)

    Returns:
        Pixel coordinate (u, v), or None when the ray is outside the lens field of view
    """
    u, v, valid = rays_to_pixels(lens, resolution, np.asarray(direction, dtype=np.float64))
    if not bool(valid):
        return None
    return float(u), float(v)


def describe_lens(lens: LensModel) -> str:
    """Short human-readable lens description for logs"""
    if isinstance(lens, EquidistantFisheye):
        return f"fisheye {math.degrees(lens.fov):g}deg"
    if isinstance(lens, Equirectangular):
        return f"equirect {math.degrees(lens.h_fov):g}x{math.degrees(lens.v_fov):g}deg"
    return f"rectilinear {lens.focal:g}mm {lens.sensor_w:g}x{lens.sensor_h:g}mm"
