"""
Depth Conventions
Conversions between Z-depth (distance along the optical axis) and ray length
"""

import numpy as np

# Rays this close to the projection plane have no usable Z-depth
DEPTH_EPSILON = 1e-6

Z_DEPTH = 'z'
RAY_LENGTH = 'raylen'


class DepthConversionError(ValueError):
    """Exception raised when a depth value cannot be converted"""

    def __init__(self, message: str, direction_z: float):
        """
        Initialize exception

        Args:
            message: Error message
            direction_z: Z component of the offending ray
        """
        self.direction_z = direction_z
        super().__init__(message)


def depth_z_to_raylen(z: float, direction: np.ndarray) -> float:
    """
    Convert Z-depth to Euclidean distance along a camera-space ray

    Args:
        z: Z-depth in meters (>= 0)
        direction: Unit camera-space direction

    Returns:
        Ray length in meters

    Raises:
        DepthConversionError: If the ray is at or behind the projection plane, or z < 0
    """
    dz = float(direction[2])
    if dz <= DEPTH_EPSILON:
        raise DepthConversionError(
            f"Z-depth is undefined for rays with d.z <= {DEPTH_EPSILON} (d.z = {dz})", dz
        )
    if z < 0:
        raise DepthConversionError(f"Z-depth must be >= 0, got {z}", dz)
    return z / dz


def raylen_to_depth_z(t: float, direction: np.ndarray) -> float:
    """
    Convert a ray length to Z-depth; the result is <= 0 for backward rays

    Args:
        t: Ray length in meters (>= 0)
        direction: Unit camera-space direction

    Returns:
        Z-depth in meters
    """
    return t * float(direction[2])


def raylen_plane_to_depth(
    raylen: np.ndarray,
    dirs: np.ndarray,
    interpretation: str = Z_DEPTH
) -> np.ndarray:
    """
    Convert a plane of ray lengths to the requested depth convention

    Surfaces without a positive Z-depth (behind the projection plane) and
    misses map to +infinity.

    Args:
        raylen: Ray lengths, +inf for misses
        dirs: Unit camera-space directions matching raylen, trailing axis of 3
        interpretation: 'z' for Z-depth or 'raylen' for Euclidean distance

    Returns:
        Depth plane in meters
    """
    if interpretation == RAY_LENGTH:
        return np.array(raylen, dtype=np.float64)
    if interpretation != Z_DEPTH:
        raise ValueError(f"Unknown depth interpretation: {interpretation}")

    dz = dirs[..., 2]
    with np.errstate(invalid='ignore'):
        depth = raylen * dz
    return np.where(np.isfinite(raylen) & (dz > DEPTH_EPSILON), depth, np.inf)
