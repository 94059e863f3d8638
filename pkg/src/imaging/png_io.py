"""
PNG Output
Writes display-referred images as 8-bit sRGB PNG files
"""

import numpy as np
from PIL import Image

from src.config.logging_config import get_logger
from src.imaging.plen_image import PlenImage
from src.imaging.tonemap import quantize_8bit, srgb_encode
from src.utils.file_utils import PathLike, atomic_output

logger = get_logger(__name__)

# Accepted overshoot of display values before rejecting the image
RANGE_TOLERANCE = 1e-9


class DisplayRangeError(ValueError):
    """Raised when a PNG is requested for values outside [0, 1]"""
    pass


def write_png(img: PlenImage, path: PathLike):
    """
    Write a display-referred image as an 8-bit sRGB PNG

    Depth is never written. Images with invalid pixels are stored as RGBA
    with black, alpha 0 on those pixels; fully valid images are stored as RGB.

    Args:
        img: Display-referred image with components in [0, 1]
        path: Output path (written atomically)

    Raises:
        DisplayRangeError: If components lie outside [0, 1]; tone map first
    """
    rgb = img.rgb[img.valid]
    if rgb.size and (rgb.min() < -RANGE_TOLERANCE or rgb.max() > 1.0 + RANGE_TOLERANCE):
        raise DisplayRangeError(
            f"PNG output needs display values in [0, 1], got [{rgb.min():.4g}, {rgb.max():.4g}]; "
            f"apply tone mapping first"
        )

    pixels = quantize_8bit(srgb_encode(np.clip(img.rgb, 0.0, 1.0)))
    pixels[~img.valid] = 0

    if np.all(img.valid):
        image = Image.fromarray(np.ascontiguousarray(pixels))
    else:
        alpha = np.where(img.valid, 255, 0).astype(np.uint8)
        image = Image.fromarray(np.ascontiguousarray(np.dstack([pixels, alpha])))

    with atomic_output(path) as tmp_path:
        image.save(tmp_path, format='PNG')

    logger.debug(f"Wrote PNG {path} ({img.width}x{img.height}, mode={image.mode})")
