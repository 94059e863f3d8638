"""
Camera Poses
World-from-camera rigid transforms and quaternion conversion

World space is right-handed with +Z up.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial.transform import Rotation

ROTATION_TOLERANCE = 1e-9
WORLD_UP = (0.0, 0.0, 1.0)
POLE_FALLBACK_UP = (1.0, 0.0, 0.0)


class PoseError(ValueError):
    """Exception raised for an invalid camera pose"""
    pass


def is_proper_rotation(matrix: np.ndarray, tolerance: float = ROTATION_TOLERANCE) -> bool:
    """
    Check that a 3x3 matrix is orthonormal with determinant +1

    Args:
        matrix: Candidate rotation
        tolerance: Absolute tolerance per element and on the determinant

    Returns:
        True if the matrix is a proper rotation
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape != (3, 3) or not np.all(np.isfinite(matrix)):
        return False
    gram_error = np.max(np.abs(matrix.T @ matrix - np.eye(3)))
    return gram_error <= tolerance and abs(np.linalg.det(matrix) - 1.0) <= tolerance


@dataclass(frozen=True, eq=False)
class CameraPose:
    """Camera position (meters, world) and world-from-camera rotation"""

    position: np.ndarray
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        position = np.array(self.position, dtype=np.float64).reshape(3)
        rotation = np.array(self.rotation, dtype=np.float64)
        if not np.all(np.isfinite(position)):
            raise PoseError(f"Camera position must be finite, got {position}")
        if not is_proper_rotation(rotation):
            raise PoseError("Camera orientation is not a proper rotation")
        position.setflags(write=False)
        rotation.setflags(write=False)
        object.__setattr__(self, 'position', position)
        object.__setattr__(self, 'rotation', rotation)

    @property
    def forward(self) -> np.ndarray:
        """Optical axis (camera +Z) in world space"""
        return self.rotation[:, 2]

    def camera_to_world(self, dirs: np.ndarray) -> np.ndarray:
        """Rotate camera-space directions into world space"""
        return np.asarray(dirs) @ self.rotation.T

    def to_quaternion(self) -> np.ndarray:
        """
        Get the orientation as a unit quaternion [w, x, y, z]

        The sign is fixed so that w >= 0.

        Returns:
            Quaternion array
        """
        x, y, z, w = Rotation.from_matrix(self.rotation).as_quat()
        quat = np.array([w, x, y, z])
        if w < 0:
            quat = -quat
        return quat

    @classmethod
    def from_quaternion(cls, position: Sequence[float], quaternion: Sequence[float]) -> 'CameraPose':
        """
        Build a pose from a position and a [w, x, y, z] quaternion

        Args:
            position: Camera position in meters
            quaternion: World-from-camera rotation [w, x, y, z]

        Returns:
            CameraPose
        """
        w, x, y, z = (float(c) for c in quaternion)
        return cls(position, Rotation.from_quat([x, y, z, w]).as_matrix())

    @classmethod
    def look_along(
        cls,
        position: Sequence[float],
        forward: Sequence[float],
        up: Sequence[float] = WORLD_UP,
        fallback_up: Sequence[float] = POLE_FALLBACK_UP
    ) -> 'CameraPose':
        """
        Build a pose whose optical axis points along a world direction

        Camera -Y (image up) is the world up-vector projected perpendicular to
        the optical axis; when forward is parallel to up, fallback_up is used.

        Args:
            position: Camera position in meters
            forward: Optical axis direction in world space
            up: Preferred world up-vector
            fallback_up: Up-vector used when forward is parallel to up

        Returns:
            CameraPose
        """
        f = np.asarray(forward, dtype=np.float64)
        norm = np.linalg.norm(f)
        if norm == 0:
            raise PoseError("Forward direction must be non-zero")
        f = f / norm

        up_perp = _perpendicular_part(np.asarray(up, dtype=np.float64), f)
        if np.linalg.norm(up_perp) < ROTATION_TOLERANCE:
            up_perp = _perpendicular_part(np.asarray(fallback_up, dtype=np.float64), f)
        down = -up_perp / np.linalg.norm(up_perp)
        right = np.cross(down, f)
        return cls(position, np.column_stack([right, down, f]))


def _perpendicular_part(vector: np.ndarray, axis: np.ndarray) -> np.ndarray:
    return vector - np.dot(vector, axis) * axis
