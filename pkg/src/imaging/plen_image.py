"""
Plenoptic Image Container
Linear-radiance RGB plane with optional depth and a validity mask
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np


class ImageFormatError(ValueError):
    """Exception raised when image planes violate the container invariants"""
    pass


@dataclass(frozen=True, eq=False)
class PlenImage:
    """
    Image planes indexed [row, column]

    rgb is (H, W, 3) linear radiance, depth is (H, W) meters or None, valid is
    (H, W) bool where False marks unmapped pixels (outside the fisheye circle,
    no source sample). Planes are read-only once constructed.
    """

    rgb: np.ndarray
    valid: np.ndarray
    depth: Optional[np.ndarray] = None

    def __post_init__(self):
        rgb = np.array(self.rgb, dtype=np.float64)
        valid = np.array(self.valid, dtype=bool)
        if rgb.ndim != 3 or rgb.shape[2] != 3:
            raise ImageFormatError(f"rgb must have shape (H, W, 3), got {rgb.shape}")
        if valid.shape != rgb.shape[:2]:
            raise ImageFormatError(
                f"valid mask shape {valid.shape} does not match image {rgb.shape[:2]}"
            )
        if np.any(~(rgb[valid] >= 0)):
            raise ImageFormatError("rgb components must be >= 0 on valid pixels")

        depth = None
        if self.depth is not None:
            depth = np.array(self.depth, dtype=np.float64)
            if depth.shape != rgb.shape[:2]:
                raise ImageFormatError(
                    f"depth shape {depth.shape} does not match image {rgb.shape[:2]}"
                )
            if np.any(~(depth[valid] >= 0)):
                raise ImageFormatError("depth must be >= 0 on valid pixels")
            depth.setflags(write=False)

        rgb.setflags(write=False)
        valid.setflags(write=False)
        object.__setattr__(self, 'rgb', rgb)
        object.__setattr__(self, 'valid', valid)
        object.__setattr__(self, 'depth', depth)

    @classmethod
    def from_rgb(
        cls,
        rgb: np.ndarray,
        depth: Optional[np.ndarray] = None,
        valid: Optional[np.ndarray] = None
    ) -> 'PlenImage':
        """Build an image, treating every pixel as valid unless a mask is given"""
        rgb = np.asarray(rgb)
        if valid is None:
            valid = np.ones(rgb.shape[:2], dtype=bool)
        return cls(rgb=rgb, valid=valid, depth=depth)

    @property
    def width(self) -> int:
        return self.rgb.shape[1]

    @property
    def height(self) -> int:
        return self.rgb.shape[0]

    @property
    def resolution(self) -> Tuple[int, int]:
        """Image size as (W, H)"""
        return self.width, self.height

    @property
    def has_depth(self) -> bool:
        return self.depth is not None

    def without_depth(self) -> 'PlenImage':
        return PlenImage(rgb=self.rgb, valid=self.valid)

    def __repr__(self) -> str:
        return f"PlenImage({self.width}x{self.height}, depth={self.has_depth})"
