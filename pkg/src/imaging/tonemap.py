"""
Tone Mapping
Exposure adjustment, extended Reinhard compression and sRGB encoding
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.imaging.plen_image import PlenImage

# Rec. 709 luminance weights
LUMINANCE_WEIGHTS = np.array([0.2126, 0.7152, 0.0722])


class ToneMapError(ValueError):
    """Exception raised for invalid tone-mapping parameters"""
    pass


@dataclass(frozen=True)
class ToneMapParams:
    """Exposure in stops (scale 2^stops) and optional Reinhard white luminance"""

    exposure_stops: float = 0.0
    reinhard_white: Optional[float] = None

    def __post_init__(self):
        if self.reinhard_white is not None and not self.reinhard_white > 0:
            raise ToneMapError(f"reinhard_white must be > 0, got {self.reinhard_white}")

    @property
    def exposure_scale(self) -> float:
        return 2.0 ** self.exposure_stops


def luminance(rgb: np.ndarray) -> np.ndarray:
    """Relative luminance of linear RGB values"""
    return np.asarray(rgb, dtype=np.float64) @ LUMINANCE_WEIGHTS


def extended_reinhard(lum: np.ndarray, white: float) -> np.ndarray:
    """
    Extended Reinhard operator: L (1 + L / Lw^2) / (1 + L)

    Maps L = white to exactly 1.

    Args:
        lum: Scene luminance
        white: Smallest luminance mapped to pure white

    Returns:
        Display luminance
    """
    lum = np.asarray(lum, dtype=np.float64)
    return lum * (1.0 + lum / (white * white)) / (1.0 + lum)


def tonemap(img: PlenImage, params: ToneMapParams) -> PlenImage:
    """
    Convert a linear-radiance image to display-referred values in [0, 1]

    Exposure is applied first, then Reinhard on luminance with RGB ratios
    preserved, then clamping. Depth and validity pass through unchanged.

    Args:
        img: Linear-radiance image
        params: Tone-mapping parameters

    Returns:
        Display-referred image
    """
    rgb = img.rgb * params.exposure_scale

    if params.reinhard_white is not None:
        lum = luminance(rgb)
        mapped = extended_reinhard(lum, params.reinhard_white)
        ratio = np.divide(mapped, lum, out=np.zeros_like(lum), where=lum > 0)
        rgb = rgb * ratio[..., None]

    rgb = np.clip(rgb, 0.0, 1.0)
    rgb = np.where(img.valid[..., None], rgb, 0.0)
    return PlenImage(rgb=rgb, valid=img.valid, depth=img.depth)


def srgb_encode(linear: np.ndarray) -> np.ndarray:
    """Standard sRGB transfer function for values in [0, 1]"""
    linear = np.asarray(linear, dtype=np.float64)
    return np.where(
        linear <= 0.0031308,
        12.92 * linear,
        1.055 * np.power(np.maximum(linear, 0.0031308), 1.0 / 2.4) - 0.055,
    )


def quantize_8bit(encoded: np.ndarray) -> np.ndarray:
    """Quantize [0, 1] values to bytes, rounding half away from zero"""
    return np.floor(np.clip(encoded, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
