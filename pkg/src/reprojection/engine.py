"""
Reprojection Engine
Converts an image (and depth) from one lens model to another at the same camera pose
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from src.config.logging_config import get_logger
from src.geometry.lens import LensModel, Resolution, describe_lens, pixels_to_rays, rays_to_pixels
from src.imaging.plen_image import PlenImage
from src.reprojection.sampling import (
    RowRange,
    average_samples,
    center_coordinates,
    map_row_chunks,
    row_chunks,
    sample_coordinates,
)

logger = get_logger(__name__)

MAX_SCALE = 8.0


class ColorFilter(str, Enum):
    """Color fetch filter"""
    NEAREST = 'nearest'
    BILINEAR = 'bilinear'


class ReprojectParamsError(ValueError):
    """Exception raised for invalid reprojection parameters"""
    pass


@dataclass(frozen=True)
class ReprojectParams:
    """Destination lens, output scale, supersampling grid side and color filter"""

    dst_lens: LensModel
    scale: float = 1.0
    samples: int = 1
    color_filter: ColorFilter = ColorFilter.BILINEAR

    def __post_init__(self):
        if not 0 < self.scale <= MAX_SCALE:
            raise ReprojectParamsError(f"scale must be in (0, {MAX_SCALE:g}], got {self.scale}")
        if isinstance(self.samples, bool) or not isinstance(self.samples, int) or self.samples < 1:
            raise ReprojectParamsError(f"samples must be an integer >= 1, got {self.samples!r}")
        object.__setattr__(self, 'color_filter', ColorFilter(self.color_filter))


def output_resolution(resolution: Resolution, scale: float) -> Resolution:
    """
    Destination size: each dimension rounded to nearest, at least 1

    Args:
        resolution: Source size (W, H)
        scale: Output scale factor

    Returns:
        Destination size (W, H)
    """
    width, height = resolution
    return (
        max(1, math.floor(width * scale + 0.5)),
        max(1, math.floor(height * scale + 0.5)),
    )


def reproject(
    src: PlenImage,
    src_lens: LensModel,
    params: ReprojectParams,
    workers: int = 1
) -> PlenImage:
    """
    Reproject an image to a different lens sharing the same camera pose

    Every destination pixel averages samples x samples stratified sub-pixel
    rays in linear radiance; rays that land outside the source lens or on
    invalid source pixels do not contribute, and pixels with no contributing
    ray are invalid. Depth comes from the pixel-center ray with a nearest
    fetch and is passed through unchanged.

    Args:
        src: Source image
        src_lens: Lens the source image was captured with
        params: Reprojection parameters
        workers: Threads used over row chunks; output does not depend on it

    Returns:
        Reprojected image
    """
    dst_res = output_resolution(src.resolution, params.scale)
    width, height = dst_res
    chunks = row_chunks(height, width, params.samples)

    logger.debug(
        f"Reprojecting {src.width}x{src.height} {describe_lens(src_lens)} -> "
        f"{width}x{height} {describe_lens(params.dst_lens)}, samples={params.samples}, "
        f"filter={params.color_filter.value}, chunks={len(chunks)}"
    )

    def render_rows(rows: RowRange):
        return _reproject_rows(src, src_lens, params, dst_res, rows)

    parts = map_row_chunks(render_rows, chunks, workers)

    rgb = np.concatenate([part[0] for part in parts], axis=0)
    valid = np.concatenate([part[1] for part in parts], axis=0)
    depth = None
    if src.depth is not None:
        depth = np.concatenate([part[2] for part in parts], axis=0)
    return PlenImage(rgb=rgb, valid=valid, depth=depth)


def _reproject_rows(
    src: PlenImage,
    src_lens: LensModel,
    params: ReprojectParams,
    dst_res: Resolution,
    rows: RowRange
) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    width, _ = dst_res

    u, v = sample_coordinates(rows, width, params.samples)
    dirs, dst_ok = pixels_to_rays(params.dst_lens, dst_res, u, v)
    su, sv, src_ok = rays_to_pixels(src_lens, src.resolution, dirs)
    mapped = dst_ok & src_ok

    if params.color_filter is ColorFilter.NEAREST:
        colors, ok = _fetch_nearest(src, su, sv, mapped)
    else:
        colors, ok = _fetch_bilinear(src, su, sv, mapped)

    rgb, valid = average_samples(colors, ok)

    depth = None
    if src.depth is not None:
        cu, cv = center_coordinates(rows, width)
        center_dirs, center_ok = pixels_to_rays(params.dst_lens, dst_res, cu, cv)
        csu, csv, csrc_ok = rays_to_pixels(src_lens, src.resolution, center_dirs)
        ix, iy = _nearest_index(src, csu, csv, center_ok & csrc_ok)
        fetched = center_ok & csrc_ok & src.valid[iy, ix]
        depth = np.where(fetched & valid, src.depth[iy, ix], np.inf)

    return rgb, valid, depth


def _nearest_index(src: PlenImage, su: np.ndarray, sv: np.ndarray, mapped: np.ndarray):
    su = np.where(mapped, su, 0.0)
    sv = np.where(mapped, sv, 0.0)
    ix = np.clip(np.floor(su), 0, src.width - 1).astype(np.intp)
    iy = np.clip(np.floor(sv), 0, src.height - 1).astype(np.intp)
    return ix, iy


def _fetch_nearest(src: PlenImage, su: np.ndarray, sv: np.ndarray, mapped: np.ndarray):
    ix, iy = _nearest_index(src, su, sv, mapped)
    return src.rgb[iy, ix], mapped & src.valid[iy, ix]


def _fetch_bilinear(src: PlenImage, su: np.ndarray, sv: np.ndarray, mapped: np.ndarray):
    # Interpolate between pixel centers; invalid or out-of-image taps get zero weight
    x = np.where(mapped, su, 0.5) - 0.5
    y = np.where(mapped, sv, 0.5) - 0.5
    x0 = np.floor(x)
    y0 = np.floor(y)
    fx = x - x0
    fy = y - y0

    acc = np.zeros(x.shape + (3,))
    weight_sum = np.zeros(x.shape)
    for dy, wy in ((0, 1.0 - fy), (1, fy)):
        for dx, wx in ((0, 1.0 - fx), (1, fx)):
            xi = x0 + dx
            yi = y0 + dy
            inside = mapped & (xi >= 0) & (xi < src.width) & (yi >= 0) & (yi < src.height)
            xi = np.clip(xi, 0, src.width - 1).astype(np.intp)
            yi = np.clip(yi, 0, src.height - 1).astype(np.intp)
            weight = np.where(inside & src.valid[yi, xi], wx * wy, 0.0)
            acc += weight[..., None] * src.rgb[yi, xi]
            weight_sum += weight

    ok = mapped & (weight_sum > 0)
    colors = acc / np.where(ok, weight_sum, 1.0)[..., None]
    return colors, ok
