"""
Image Comparison
PSNR and absolute-error metrics between two images over a region
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import ndimage

from src.imaging.plen_image import PlenImage

# Relative depth jump between neighbouring pixels treated as a silhouette
SILHOUETTE_JUMP = 0.05


class ImageMismatchError(ValueError):
    """Raised when two images cannot be compared"""

    def __init__(self, message: str, shape_a: Tuple[int, int], shape_b: Tuple[int, int]):
        """
        Initialize exception

        Args:
            message: Error message
            shape_a: Size (W, H) of the first image
            shape_b: Size (W, H) of the second image
        """
        self.shape_a = shape_a
        self.shape_b = shape_b
        super().__init__(message)


@dataclass(frozen=True)
class ImageComparison:
    """Metrics over the jointly valid pixels of a region"""

    psnr_db: float
    max_abs: float
    mean_abs: float
    pixel_count: int
    depth_max_abs: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping; infinite PSNR is reported as the string 'inf'"""
        result = asdict(self)
        for key, value in result.items():
            if isinstance(value, float) and math.isinf(value):
                result[key] = 'inf'
        if self.depth_max_abs is None:
            del result['depth_max_abs']
        return result


def compare_images(
    a: PlenImage,
    b: PlenImage,
    region_mask: Optional[np.ndarray] = None,
    exposure_stops: float = 0.0
) -> ImageComparison:
    """
    Compare two images in linear RGB

    Both images are scaled by the same exposure before measuring; PSNR uses
    a peak of 1.0. When both images carry depth, the largest depth difference
    over pixels where both depths are finite is reported too.

    Args:
        a: First image
        b: Second image
        region_mask: Optional (H, W) mask restricting the comparison
        exposure_stops: Exposure applied to both images

    Returns:
        ImageComparison

    Raises:
        ImageMismatchError: If sizes differ or no pixel is valid in both images
    """
    if a.resolution != b.resolution:
        raise ImageMismatchError(
            f"Cannot compare images of different sizes: "
            f"{a.width}x{a.height} vs {b.width}x{b.height}",
            a.resolution, b.resolution
        )

    mask = a.valid & b.valid
    if region_mask is not None:
        region_mask = np.asarray(region_mask, dtype=bool)
        if region_mask.shape != mask.shape:
            raise ImageMismatchError(
                f"Region mask shape {region_mask.shape} does not match image {mask.shape}",
                a.resolution, b.resolution
            )
        mask &= region_mask

    count = int(np.count_nonzero(mask))
    if count == 0:
        raise ImageMismatchError(
            "No pixels are valid in both images within the region", a.resolution, b.resolution
        )

    scale = 2.0 ** exposure_stops
    diff = np.abs(a.rgb[mask] - b.rgb[mask]) * scale
    mse = float(np.mean(diff * diff))
    psnr = math.inf if mse == 0 else 10.0 * math.log10(1.0 / mse)

    depth_max_abs = None
    if a.depth is not None and b.depth is not None:
        both = mask & np.isfinite(a.depth) & np.isfinite(b.depth)
        if np.any(both):
            depth_max_abs = float(np.max(np.abs(a.depth[both] - b.depth[both])))

    return ImageComparison(
        psnr_db=psnr,
        max_abs=float(diff.max()),
        mean_abs=float(diff.mean()),
        pixel_count=count,
        depth_max_abs=depth_max_abs,
    )


def central_region_mask(resolution: Tuple[int, int], fraction: float = 0.8) -> np.ndarray:
    """
    Mask of the centered box covering a fraction of each image dimension

    Args:
        resolution: Image size (W, H)
        fraction: Fraction of width and height kept, in (0, 1]

    Returns:
        (H, W) boolean mask of pixels whose centers lie in the box
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    width, height = resolution
    margin = (1.0 - fraction) / 2.0
    u = np.arange(width) + 0.5
    v = np.arange(height) + 0.5
    in_u = (u >= margin * width) & (u <= (1.0 - margin) * width)
    in_v = (v >= margin * height) & (v <= (1.0 - margin) * height)
    return in_v[:, None] & in_u[None, :]


def away_from_silhouettes(
    depth: np.ndarray,
    margin_px: int = 3,
    rel_jump: float = SILHOUETTE_JUMP
) -> np.ndarray:
    """
    Mask of pixels at least margin_px away from any depth discontinuity

    A discontinuity sits between 4-neighbours whose depths differ by more
    than rel_jump relative to the nearer one, or where only one is finite.

    Args:
        depth: (H, W) depth plane, +inf for misses
        margin_px: Chessboard distance kept clear of silhouettes
        rel_jump: Relative depth jump treated as an edge

    Returns:
        (H, W) boolean mask
    """
    depth = np.asarray(depth, dtype=np.float64)
    edges = np.zeros(depth.shape, dtype=bool)

    for axis in (0, 1):
        first = np.take(depth, np.arange(depth.shape[axis] - 1), axis=axis)
        second = np.take(depth, np.arange(1, depth.shape[axis]), axis=axis)
        finite = np.isfinite(first) & np.isfinite(second)
        with np.errstate(invalid='ignore'):
            jump = np.abs(first - second) > rel_jump * np.minimum(first, second)
        step = np.where(finite, jump, np.isfinite(first) != np.isfinite(second))
        pad_after = [(0, 0), (0, 0)]
        pad_after[axis] = (0, 1)
        pad_before = [(0, 0), (0, 0)]
        pad_before[axis] = (1, 0)
        edges |= np.pad(step, pad_after) | np.pad(step, pad_before)

    if margin_px > 0 and np.any(edges):
        edges = ndimage.binary_dilation(
            edges, structure=np.ones((3, 3), dtype=bool), iterations=margin_px
        )
    return ~edges
