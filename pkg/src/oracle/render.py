"""
Oracle Rendering
Renders the analytic scene through any lens to produce ground-truth color and depth
"""

from typing import Tuple

import numpy as np

from src.config.logging_config import get_logger
from src.geometry.depth import Z_DEPTH, raylen_plane_to_depth
from src.geometry.lens import LensModel, Resolution, describe_lens, pixels_to_rays
from src.geometry.pose import CameraPose
from src.imaging.plen_image import PlenImage
from src.oracle.scene import OracleScene, trace_rays
from src.reprojection.sampling import (
    RowRange,
    average_samples,
    center_coordinates,
    map_row_chunks,
    row_chunks,
    sample_coordinates,
)

logger = get_logger(__name__)


def render_oracle(
    scene: OracleScene,
    pose: CameraPose,
    lens: LensModel,
    resolution: Resolution,
    samples: int = 1,
    depth_interpretation: str = Z_DEPTH,
    workers: int = 1
) -> PlenImage:
    """
    Render the scene from a camera

    Each pixel averages samples x samples stratified rays (the grid the
    reprojection engine uses); pixels with no ray inside the lens's image
    region are invalid. Depth is taken from the pixel-center ray.

    Args:
        scene: Scene to render
        pose: Camera pose
        lens: Camera lens
        resolution: Image size (W, H)
        samples: Supersampling grid side
        depth_interpretation: 'z' for Z-depth, 'raylen' for Euclidean distance
        workers: Threads used over row chunks; output does not depend on it

    Returns:
        Rendered image with depth
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    width, height = resolution
    chunks = row_chunks(height, width, samples)

    logger.debug(
        f"Rendering oracle {width}x{height} {describe_lens(lens)} at "
        f"{np.round(pose.position, 4).tolist()}, samples={samples}"
    )

    def render_rows(rows: RowRange):
        return _render_rows(scene, pose, lens, resolution, samples, depth_interpretation, rows)

    parts = map_row_chunks(render_rows, chunks, workers)
    return PlenImage(
        rgb=np.concatenate([p[0] for p in parts], axis=0),
        valid=np.concatenate([p[1] for p in parts], axis=0),
        depth=np.concatenate([p[2] for p in parts], axis=0),
    )


def _render_rows(
    scene: OracleScene,
    pose: CameraPose,
    lens: LensModel,
    resolution: Resolution,
    samples: int,
    depth_interpretation: str,
    rows: RowRange
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    width, _ = resolution

    u, v = sample_coordinates(rows, width, samples)
    dirs, ok = pixels_to_rays(lens, resolution, u, v)
    colors, _ = trace_rays(scene, pose.position, pose.camera_to_world(dirs))

    rgb, valid = average_samples(colors, ok)

    cu, cv = center_coordinates(rows, width)
    center_dirs, center_ok = pixels_to_rays(lens, resolution, cu, cv)
    _, raylen = trace_rays(scene, pose.position, pose.camera_to_world(center_dirs))
    depth = raylen_plane_to_depth(raylen, center_dirs, depth_interpretation)
    depth = np.where(valid & center_ok, depth, np.inf)

    return rgb, valid, depth
