"""
Pixel Sampling
Stratified sub-pixel grids and row-chunked evaluation shared by reprojection and rendering
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Tuple, TypeVar

import numpy as np

# Upper bound on rays evaluated per chunk; keeps 2048^2 x 64-sample jobs in memory
SAMPLE_BUDGET = 1 << 19

T = TypeVar('T')
RowRange = Tuple[int, int]


def stratified_offsets(samples: int) -> np.ndarray:
    """
    Sub-pixel offsets of a regular s x s grid at cell centers

    Args:
        samples: Grid side s (>= 1)

    Returns:
        (s*s, 2) array of (du, dv) in [0, 1), row-major over dv then du
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    ticks = (np.arange(samples) + 0.5) / samples
    dv, du = np.meshgrid(ticks, ticks, indexing='ij')
    return np.stack([du.ravel(), dv.ravel()], axis=-1)


def row_chunks(height: int, width: int, samples: int, budget: int = SAMPLE_BUDGET) -> List[RowRange]:
    """
    Split image rows into chunks of bounded ray count

    The split depends only on the image size and sample count, never on the
    number of workers, so results are identical for any schedule.

    Args:
        height: Image height
        width: Image width
        samples: Grid side per pixel
        budget: Maximum rays per chunk

    Returns:
        List of half-open (first_row, end_row) ranges
    """
    rows_per_chunk = max(1, budget // max(1, width * samples * samples))
    return [(r, min(height, r + rows_per_chunk)) for r in range(0, height, rows_per_chunk)]


def sample_coordinates(rows: RowRange, width: int, samples: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Continuous coordinates of every stratified sample in a row range

    Returns:
        (u, v) arrays shaped (rows, width, samples*samples)
    """
    first, end = rows
    offsets = stratified_offsets(samples)
    x = np.arange(width, dtype=np.float64)[None, :, None]
    y = np.arange(first, end, dtype=np.float64)[:, None, None]
    u = x + offsets[None, None, :, 0]
    v = y + offsets[None, None, :, 1]
    return np.broadcast_arrays(u, v)


def center_coordinates(rows: RowRange, width: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pixel-center coordinates of a row range

    Returns:
        (u, v) arrays shaped (rows, width)
    """
    first, end = rows
    u = np.arange(width, dtype=np.float64)[None, :] + 0.5
    v = np.arange(first, end, dtype=np.float64)[:, None] + 0.5
    return np.broadcast_arrays(u, v)


def map_row_chunks(fn: Callable[[RowRange], T], chunks: List[RowRange], workers: int = 1) -> List[T]:
    """
    Evaluate fn over row chunks, in order, optionally on a thread pool

    Args:
        fn: Function of a row range; must only read shared data
        chunks: Row ranges
        workers: Thread count (1 = inline)

    Returns:
        Results in chunk order
    """
    if workers <= 1 or len(chunks) <= 1:
        return [fn(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def average_samples(colors: np.ndarray, ok: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Mean color of the contributing samples of each pixel

    The mean is clamped to the per-channel range of its samples, so pixels
    whose samples agree reproduce that color exactly.

    Args:
        colors: (..., n, 3) sample colors
        ok: (..., n) mask of contributing samples

    Returns:
        (rgb, valid) with rgb (..., 3) and valid (...) true where any sample contributed
    """
    count = np.count_nonzero(ok, axis=-1)
    valid = count > 0
    taken = ok[..., None]
    mean = np.where(taken, colors, 0.0).sum(axis=-2) / np.maximum(count, 1)[..., None]
    low = np.where(taken, colors, np.inf).min(axis=-2)
    high = np.where(taken, colors, -np.inf).max(axis=-2)
    rgb = np.where(valid[..., None], np.clip(mean, low, high), 0.0)
    return rgb, valid
