"""
OpenEXR Image I/O
Reads and writes scanline EXR files with half-float R, G, B and optional Z or A channels
"""

from pathlib import Path
from typing import Dict, Optional

import Imath
import numpy as np
import OpenEXR

from src.config.logging_config import get_logger
from src.imaging.plen_image import PlenImage
from src.utils.file_utils import PathLike, atomic_output

logger = get_logger(__name__)

DEPTH_CHANNEL = 'Z'
DEPTH_CHANNEL_ALIASES = ('Z', 'depth', 'Depth', 'depth.Z', 'Depth.Z')
COLOR_CHANNELS = ('R', 'G', 'B')
ALPHA_CHANNEL = 'A'

HALF = Imath.PixelType(Imath.PixelType.HALF)
FLOAT = Imath.PixelType(Imath.PixelType.FLOAT)
_NUMPY_TYPES = {
    Imath.PixelType.HALF: np.float16,
    Imath.PixelType.FLOAT: np.float32,
}


class ExrError(OSError):
    """Base exception for EXR reading problems"""

    def __init__(self, path: PathLike, message: str):
        """
        Initialize exception

        Args:
            path: File being read
            message: Error message
        """
        self.path = str(path)
        super().__init__(f"{path}: {message}")


class ExrMissingError(ExrError):
    """Raised when the EXR file does not exist"""
    pass


class ExrFormatError(ExrError):
    """Raised for unreadable files or unsupported channel layouts"""
    pass


class ExrDimensionError(ExrError):
    """Raised when channel data does not match the data window"""
    pass


def read_exr(path: PathLike) -> PlenImage:
    """
    Read an EXR file into a PlenImage

    Half-float values are widened exactly. Pixels stored as black with
    depth +infinity, or with A = 0, are read back as invalid.

    Args:
        path: EXR file path

    Returns:
        PlenImage with depth present iff the file carries a depth channel

    Raises:
        ExrMissingError: If the file does not exist
        ExrFormatError: If the file is not a scanline EXR with R, G, B channels
        ExrDimensionError: If channel data does not match the image size
    """
    exr = _open(path)
    try:
        header = exr.header()
        channels = header['channels']

        missing = [c for c in COLOR_CHANNELS if c not in channels]
        if missing:
            raise ExrFormatError(
                path, f"missing color channel(s) {', '.join(missing)}; found {sorted(channels)}"
            )

        width, height = _data_window_size(header)
        rgb = np.stack(
            [_read_channel(exr, path, name, channels[name], width, height) for name in COLOR_CHANNELS],
            axis=-1,
        )
        depth_name = _find_depth_channel(channels)
        depth = None
        if depth_name is not None:
            depth = _read_channel(exr, path, depth_name, channels[depth_name], width, height)
        alpha = None
        if ALPHA_CHANNEL in channels:
            alpha = _read_channel(exr, path, ALPHA_CHANNEL, channels[ALPHA_CHANNEL], width, height)
    finally:
        exr.close()

    rgb = _sanitize_color(path, rgb)
    valid = np.ones((height, width), dtype=bool) if alpha is None else alpha > 0
    if depth is None:
        return PlenImage.from_rgb(rgb, valid=valid)

    depth = _sanitize_depth(path, depth)
    valid &= ~(np.all(rgb == 0, axis=-1) & np.isinf(depth))
    return PlenImage(rgb=rgb, valid=valid, depth=depth)


def read_depth_exr(path: PathLike) -> np.ndarray:
    """
    Read a standalone depth EXR

    The depth channel is looked up by its aliases first; a single-channel
    file is accepted whatever its channel is named.

    Args:
        path: EXR file path

    Returns:
        (H, W) depth plane in meters
    """
    exr = _open(path)
    try:
        header = exr.header()
        channels = header['channels']
        width, height = _data_window_size(header)
        name = _find_depth_channel(channels)
        if name is None:
            if len(channels) != 1:
                raise ExrFormatError(
                    path, f"no depth channel among {sorted(channels)} (expected one of "
                    f"{', '.join(DEPTH_CHANNEL_ALIASES)})"
                )
            name = next(iter(channels))
        depth = _read_channel(exr, path, name, channels[name], width, height)
    finally:
        exr.close()
    return _sanitize_depth(path, depth)


def write_exr(img: PlenImage, path: PathLike):
    """
    Write a PlenImage as a half-float scanline EXR

    R, G, B (and Z when the image has depth) are stored losslessly with ZIP
    compression. Invalid pixels are stored black with depth +infinity; an
    image without depth that has invalid pixels also gets an A channel
    (0 = invalid) so the mask survives the round trip.

    Args:
        img: Image to store
        path: Output path (written atomically)
    """
    rgb = np.where(img.valid[..., None], img.rgb, 0.0)
    planes: Dict[str, np.ndarray] = {name: rgb[..., i] for i, name in enumerate(COLOR_CHANNELS)}
    if img.depth is not None:
        planes[DEPTH_CHANNEL] = np.where(img.valid, img.depth, np.inf)
    elif not np.all(img.valid):
        planes[ALPHA_CHANNEL] = img.valid.astype(np.float64)

    header = OpenEXR.Header(img.width, img.height)
    header['channels'] = {name: Imath.Channel(HALF) for name in planes}
    header['compression'] = Imath.Compression(Imath.Compression.ZIP_COMPRESSION)

    pixels = {
        name: np.ascontiguousarray(plane.astype(np.float16)).tobytes()
        for name, plane in planes.items()
    }

    with atomic_output(path) as tmp_path:
        out = OpenEXR.OutputFile(str(tmp_path), header)
        try:
            out.writePixels(pixels)
        finally:
            out.close()

    logger.debug(f"Wrote EXR {path} ({img.width}x{img.height}, channels={list(planes)})")


def _open(path: PathLike):
    file_path = Path(path)
    if not file_path.is_file():
        raise ExrMissingError(path, "file not found")
    try:
        exr = OpenEXR.InputFile(str(file_path))
    except (OSError, RuntimeError, ValueError, TypeError) as e:
        raise ExrFormatError(path, f"not a readable OpenEXR file ({e})")
    if 'tiles' in exr.header():
        exr.close()
        raise ExrFormatError(path, "tiled EXR files are not supported")
    return exr


def _data_window_size(header):
    window = header['dataWindow']
    return window.max.x - window.min.x + 1, window.max.y - window.min.y + 1


def _find_depth_channel(channels) -> Optional[str]:
    return next((name for name in DEPTH_CHANNEL_ALIASES if name in channels), None)


def _read_channel(exr, path: PathLike, name: str, channel, width: int, height: int) -> np.ndarray:
    if channel.xSampling != 1 or channel.ySampling != 1:
        raise ExrDimensionError(
            path, f"channel '{name}' is subsampled ({channel.xSampling}x{channel.ySampling})"
        )
    pixel_type = channel.type.v
    if pixel_type not in _NUMPY_TYPES:
        raise ExrFormatError(path, f"channel '{name}' has unsupported pixel type {channel.type}")

    raw = exr.channel(name, HALF if pixel_type == Imath.PixelType.HALF else FLOAT)
    data = np.frombuffer(raw, dtype=_NUMPY_TYPES[pixel_type])
    if data.size != width * height:
        raise ExrDimensionError(
            path, f"channel '{name}' holds {data.size} values, expected {width}x{height}"
        )
    return data.reshape(height, width).astype(np.float64)


def _sanitize_color(path: PathLike, rgb: np.ndarray) -> np.ndarray:
    bad = ~(rgb >= 0)
    if np.any(bad):
        logger.warning(f"{path}: clamped {int(np.count_nonzero(bad))} negative/NaN color values to 0")
        rgb = np.where(bad, 0.0, rgb)
    return rgb


def _sanitize_depth(path: PathLike, depth: np.ndarray) -> np.ndarray:
    bad = ~(depth >= 0)
    if np.any(bad):
        logger.warning(f"{path}: {int(np.count_nonzero(bad))} negative/NaN depth values set to +inf")
        depth = np.where(bad, np.inf, depth)
    return depth
