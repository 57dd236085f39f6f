"""Color plumbing: gamma model, Gray World illuminant scaling, opponent space.

Images are (H, W, 3) float64 arrays.  Display encoding is modeled as a pure
2.2 power law (not the piecewise sRGB curve); negative intermediates use the
signed convention sign(v)*|v|^g so the maps stay odd and invertible.

The opponent space follows the IPT construction: linear RGB to cone-like
LMS through the D65-normalized Hunt-Pointer-Estevez matrix, a signed 0.43
power, then the opponent matrix giving an intensity channel I and two
chroma channels (labeled ITP in user-facing text).
"""

from __future__ import annotations

import numpy as np

from .errors import BlackImage, NegativeInput

GAMMA = 2.2
OPPONENT_EXPONENT = 0.43

# linear sRGB (D65) -> CIE XYZ
RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])

# XYZ (D65-normalized) -> LMS, Hunt-Pointer-Estevez
XYZ_TO_LMS = np.array([
    [0.4002, 0.7075, -0.0807],
    [-0.2280, 1.1500, 0.0612],
    [0.0, 0.0, 0.9184],
])

# nonlinear LMS' -> opponent (intensity + two chroma axes)
LMS_TO_OPPONENT = np.array([
    [0.4000, 0.4000, 0.2000],
    [4.4550, -4.8510, 0.3960],
    [0.8056, 0.3572, -1.1628],
])

RGB_TO_LMS = XYZ_TO_LMS @ RGB_TO_XYZ
LMS_TO_RGB = np.linalg.inv(RGB_TO_LMS)
OPPONENT_TO_LMS = np.linalg.inv(LMS_TO_OPPONENT)

# linear-light luminance weights (the Y row of RGB_TO_XYZ)
LUMA_WEIGHTS = RGB_TO_XYZ[1]


def signed_power(v: np.ndarray, exponent: float) -> np.ndarray:
    return np.sign(v) * np.abs(v) ** exponent


def gamma_decode(img: np.ndarray, *, signed: bool = True) -> np.ndarray:
    """Display-encoded -> linear radiance: v^2.2 element-wise."""
    img = np.asarray(img, dtype=np.float64)
    if not signed and np.any(img < 0):
        raise NegativeInput("negative values with signed convention disabled")
    return signed_power(img, GAMMA)


def gamma_encode(img: np.ndarray, *, signed: bool = True) -> np.ndarray:
    """Linear radiance -> display-encoded: v^(1/2.2) element-wise."""
    img = np.asarray(img, dtype=np.float64)
    if not signed and np.any(img < 0):
        raise NegativeInput("negative values with signed convention disabled")
    return signed_power(img, 1.0 / GAMMA)


def _matmul_pixels(img, m):
    return img @ m.T


def rgb_to_opponent(img: np.ndarray) -> np.ndarray:
    """Linear RGB -> opponent (I, P, T)."""
    lms = _matmul_pixels(np.asarray(img, dtype=np.float64), RGB_TO_LMS)
    return _matmul_pixels(signed_power(lms, OPPONENT_EXPONENT), LMS_TO_OPPONENT)


def opponent_to_rgb(img: np.ndarray) -> np.ndarray:
    """Opponent (I, P, T) -> linear RGB."""
    lms = signed_power(
        _matmul_pixels(np.asarray(img, dtype=np.float64), OPPONENT_TO_LMS),
        1.0 / OPPONENT_EXPONENT)
    return _matmul_pixels(lms, LMS_TO_RGB)


def illuminant(img_linear: np.ndarray, mask=None) -> np.ndarray:
    """Gray World illuminant estimate: the per-channel mean."""
    img_linear = np.asarray(img_linear, dtype=np.float64)
    pixels = img_linear if mask is None else img_linear[mask]
    est = pixels.reshape(-1, 3).mean(axis=0)
    if np.any(est < 1e-9):
        raise BlackImage(f"channel means {est} too dark for an illuminant estimate")
    return est


def gray_world_scale(src_linear: np.ndarray, tgt_linear: np.ndarray,
                     src_stats=None, tgt_stats=None):
    """Scale src per channel by L_tgt / L_src (Gray World illuminants).

    src_stats / tgt_stats optionally restrict the illuminant estimation to
    sub-images (crops); the scaling always applies to the full source.
    Returns (scaled source, L_src, L_tgt).
    """
    l_src = illuminant(src_linear if src_stats is None else src_stats)
    l_tgt = illuminant(tgt_linear if tgt_stats is None else tgt_stats)
    return np.asarray(src_linear, np.float64) * (l_tgt / l_src), l_src, l_tgt


def luminance(img_linear: np.ndarray) -> np.ndarray:
    """Linear-light luminance plane of a linear RGB image."""
    return np.asarray(img_linear, dtype=np.float64) @ LUMA_WEIGHTS
