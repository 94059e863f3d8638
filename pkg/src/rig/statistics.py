"""
Rig Statistics
Camera spacing and interpolation-volume estimates for generated layouts
"""

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from src.rig.generator import RigLayout


class RigStatisticsError(ValueError):
    """Raised when a statistic is undefined for the given camera positions"""
    pass


def unique_positions(layout: RigLayout) -> np.ndarray:
    """Distinct camera positions (cameras duplicated on cuboid edges count once)"""
    return np.unique(layout.positions(), axis=0)


def mean_nn_distance(layout: RigLayout) -> float:
    """
    Mean distance from each camera to its nearest non-overlapping neighbour

    Co-located cameras (the per-face duplicates on cuboid edges) are not
    neighbours of each other; every camera still contributes one term.

    Args:
        layout: Camera layout

    Returns:
        Mean distance in meters

    Raises:
        RigStatisticsError: If fewer than two distinct positions exist
    """
    distinct = unique_positions(layout)
    if len(distinct) < 2:
        raise RigStatisticsError("Mean neighbour distance needs at least two distinct camera positions")

    tree = cKDTree(distinct)
    distances, _ = tree.query(layout.positions(), k=2)
    return float(np.mean(distances[:, 1]))


def hull_volume(layout: RigLayout) -> float:
    """
    Volume of the convex hull of the distinct camera positions

    For an outward-facing rig of 180 degree cameras this estimates the
    immersive interpolation volume.

    Args:
        layout: Camera layout

    Returns:
        Volume in cubic meters

    Raises:
        RigStatisticsError: If the positions do not span a volume
    """
    distinct = unique_positions(layout)
    if len(distinct) < 4:
        raise RigStatisticsError(
            f"Hull volume needs at least 4 distinct positions, got {len(distinct)}"
        )
    try:
        hull = ConvexHull(distinct)
    except QhullError as e:
        raise RigStatisticsError(f"Camera positions are degenerate (coplanar or collinear): {e}")
    return float(hull.volume)
