"""Raster I/O (PNG 8/16-bit, binary PPM, PFM float) and crop geometry.

Integer formats are normalized to [0, 1] on load and quantized with
round-half-up on save; PFM floats pass through untouched.  Loaded images
are (H, W, 3) float64 arrays in display (gamma) encoding by convention.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import cv2
import numpy as np

from .errors import CorruptFile, OutOfBounds, UnsupportedFormat

MIN_CROP_SIDE = 8


@dataclass(frozen=True)
class CropRect:
    """Pixel rectangle used to restrict statistics estimation."""

    x: int
    y: int
    w: int
    h: int

    def validate(self, width: int, height: int) -> "CropRect":
        if self.w < MIN_CROP_SIDE or self.h < MIN_CROP_SIDE:
            raise OutOfBounds(f"crop {self} smaller than {MIN_CROP_SIDE} px")
        if self.x < 0 or self.y < 0 or self.x + self.w > width or self.y + self.h > height:
            raise OutOfBounds(f"crop {self} leaves image bounds {width}x{height}")
        return self

    @classmethod
    def parse(cls, text: str) -> "CropRect":
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("crop must be x,y,w,h")
        return cls(*parts)

    def __str__(self):
        return f"{self.x},{self.y},{self.w},{self.h}"


def crop_view(img: np.ndarray, rect: CropRect) -> np.ndarray:
    """Zero-copy view of the crop region, for statistics estimation."""
    rect.validate(img.shape[1], img.shape[0])
    return img[rect.y:rect.y + rect.h, rect.x:rect.x + rect.w]


def _to_three_channels(arr):
    if arr.ndim == 2:
        return np.repeat(arr[:, :, None], 3, axis=2)
    if arr.shape[2] == 4:
        return arr[:, :, :3]
    return arr


def load_image(src: Union[str, Path, bytes]) -> np.ndarray:
    """Load PNG/PPM/PFM into an (H, W, 3) float64 array.

    Integer data is normalized to [0, 1]; 8-bit inputs trigger a banding
    warning since high bit depths give visibly better transfers.
    """
    data = src if isinstance(src, bytes) else Path(src).read_bytes()
    if data[:2] in (b"P6", b"P5"):
        return _load_ppm(data)
    if data[:2] in (b"PF", b"Pf"):
        return _load_pfm(data)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _load_png(data)
    raise UnsupportedFormat("expected PNG, binary PPM (P6) or PFM")


def save_image(img: np.ndarray, fmt: str) -> bytes:
    """Encode an (H, W, 3) float image as PNG/PPM (16-bit) or PFM bytes.

    Integer formats clamp to [0, 1] and quantize round-half-up; PFM is a
    bit-exact float container.
    """
    img = np.asarray(img, dtype=np.float64)
    fmt = fmt.lower().lstrip(".")
    if fmt == "png":
        return _save_png(img, bits=16)
    if fmt == "png8":
        return _save_png(img, bits=8)
    if fmt in ("ppm", "ppm16"):
        return _save_ppm(img)
    if fmt == "pfm":
        return _save_pfm(img)
    raise UnsupportedFormat(f"cannot encode format {fmt!r}")


def format_for_path(path: Union[str, Path]) -> str:
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix in ("png", "ppm", "pfm"):
        return suffix
    raise UnsupportedFormat(f"unknown output extension {suffix!r}")


def _quantize(img, maxval):
    v = np.clip(img, 0.0, 1.0) * maxval
    return np.floor(v + 0.5)  # round half up


# --- PNG (via OpenCV; reliable 8- and 16-bit RGB support) ---


def _load_png(data: bytes) -> np.ndarray:
    arr = cv2.imdecode(np.frombuffer(data, np.uint8), cv2.IMREAD_UNCHANGED)
    if arr is None:
        raise CorruptFile("PNG decode failed (truncated or invalid)")
    if arr.ndim == 3:
        arr = cv2.cvtColor(arr, cv2.COLOR_BGRA2RGBA if arr.shape[2] == 4
                           else cv2.COLOR_BGR2RGB)
    if arr.dtype == np.uint8:
        warnings.warn("8-bit input may band; prefer 16-bit sources", stacklevel=3)
        scale = 255.0
    elif arr.dtype == np.uint16:
        scale = 65535.0
    else:
        raise UnsupportedFormat(f"PNG sample type {arr.dtype} not supported")
    return _to_three_channels(arr.astype(np.float64) / scale)


def _save_png(img: np.ndarray, bits: int) -> bytes:
    if bits == 8:
        arr = _quantize(img, 255).astype(np.uint8)
    else:
        arr = _quantize(img, 65535).astype(np.uint16)
    ok, buf = cv2.imencode(".png", cv2.cvtColor(arr, cv2.COLOR_RGB2BGR))
    if not ok:
        raise UnsupportedFormat("PNG encode failed")
    return buf.tobytes()


# --- binary PPM (P6), 8- or 16-bit big-endian per the format ---


def _load_ppm(data: bytes) -> np.ndarray:
    tokens = []
    pos = 0
    while len(tokens) < 4:
        m = re.match(rb"\s*(?:#[^\n]*\n\s*)*(\S+)", data[pos:])
        if not m:
            raise CorruptFile("PPM header truncated")
        tokens.append(m.group(1))
        pos += m.end()
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    pos += 1  # single whitespace after maxval
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise UnsupportedFormat(f"PPM magic {magic!r}")
    if maxval <= 0 or maxval > 65535:
        raise CorruptFile(f"PPM maxval {maxval} out of range")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
    count = w * h * channels
    body = data[pos:pos + count * dtype.itemsize]
    if len(body) < count * dtype.itemsize:
        raise CorruptFile("PPM pixel data truncated")
    if maxval == 255:
        warnings.warn("8-bit input may band; prefer 16-bit sources", stacklevel=3)
    arr = np.frombuffer(body, dtype=dtype, count=count).reshape(h, w, channels) \
        if channels == 3 else \
        np.frombuffer(body, dtype=dtype, count=count).reshape(h, w)
    return _to_three_channels(arr.astype(np.float64) / maxval)


def _save_ppm(img: np.ndarray) -> bytes:
    h, w = img.shape[:2]
    arr = _quantize(img, 65535).astype(">u2")
    return f"P6\n{w} {h}\n65535\n".encode() + arr.tobytes()


# --- PFM, little-endian floats (negative scale marker) ---


def _load_pfm(data: bytes) -> np.ndarray:
    parts = data.split(b"\n", 3)
    if len(parts) < 4:
        raise CorruptFile("PFM header truncated")
    magic, dims, scale_line, body = parts
    channels = 3 if magic.strip() == b"PF" else 1
    try:
        w, h = (int(t) for t in dims.split())
        scale = float(scale_line)
    except ValueError as e:
        raise CorruptFile(f"PFM header: {e}") from None
    count = w * h * channels
    if len(body) < count * 4:
        raise CorruptFile("PFM pixel data truncated")
    dtype = "<f4" if scale < 0 else ">f4"
    arr = np.frombuffer(body, dtype=dtype, count=count).reshape(h, w, channels) \
        if channels == 3 else np.frombuffer(body, dtype=dtype, count=count).reshape(h, w)
    arr = arr[::-1]  # PFM rows are bottom-up
    return _to_three_channels(arr.astype(np.float64))


def _save_pfm(img: np.ndarray) -> bytes:
    h, w = img.shape[:2]
    header = f"PF\n{w} {h}\n-1.0\n".encode()
    return header + img[::-1].astype("<f4").tobytes()
