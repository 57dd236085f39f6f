"""3D LUT baking, trilinear application and the .cube text format.

A frozen transfer recipe is baked by sending every lattice node of an
identity 33^3 table through the recipe's point-wise stages as passengers —
statistics are never recomputed, so applying one LUT to every frame of a
sequence is temporally coherent by construction.  The spectral kernel is
spatial and is therefore never baked; video diffusion applies it per frame.

Serialization follows the Adobe .cube conventions: optional TITLE,
LUT_3D_SIZE, then size^3 lines of three 6-decimal values with R varying
fastest.  In-memory entries may leave [0, 1]; they are clamped only when
written, with a warning that counts the clamped values.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import CubeParseError, SizeMismatch
from .pipeline import TransferRecipe

DEFAULT_SIZE = 33


def _lattice(size: int) -> np.ndarray:
    """Identity lattice nodes, row-major with R fastest."""
    axis = np.linspace(0.0, 1.0, size)
    b, g, r = np.meshgrid(axis, axis, axis, indexing="ij")
    return np.stack([r, g, b], axis=-1).reshape(-1, 3)


@dataclass
class Lut3D:
    """size^3 RGB lattice over the [0,1]^3 domain, R varying fastest."""

    size: int
    entries: np.ndarray  # (size^3, 3) float64
    title: Optional[str] = None

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.float64)
        if self.entries.shape != (self.size ** 3, 3):
            raise SizeMismatch(
                f"{self.entries.shape[0]} entries for size {self.size}")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("LUT entries must be finite")

    @classmethod
    def identity(cls, size: int = DEFAULT_SIZE) -> "Lut3D":
        return cls(size=size, entries=_lattice(size))

    def grid(self) -> np.ndarray:
        """Entries viewed as a (size, size, size, 3) array indexed [b,g,r]."""
        s = self.size
        return self.entries.reshape(s, s, s, 3)


def bake_lut(recipe: TransferRecipe, size: int = DEFAULT_SIZE) -> Lut3D:
    """Push the identity lattice through the recipe's point-wise stages.

    Nodes are treated as display-encoded RGB passengers; the spectral
    kernel (if any) is deliberately left out.
    """
    recipe.validate()
    nodes = _lattice(size)
    if recipe.is_identity:
        return Lut3D(size=size, entries=nodes)
    return Lut3D(size=size, entries=recipe.apply_to_values(nodes))


try:  # the JIT path is what makes real-time frame rates possible
    import numba

    @numba.njit(parallel=True, fastmath=False, cache=True)
    def _trilinear_jit(flat, grid, s, out):  # pragma: no cover - jitted
        n = flat.shape[0]
        top = s - 1
        for i in numba.prange(n):
            r = min(max(flat[i, 0], 0.0), 1.0) * top
            g = min(max(flat[i, 1], 0.0), 1.0) * top
            b = min(max(flat[i, 2], 0.0), 1.0) * top
            r0 = min(int(r), s - 2)
            g0 = min(int(g), s - 2)
            b0 = min(int(b), s - 2)
            fr = r - r0
            fg = g - g0
            fb = b - b0
            for c in range(3):
                c00 = grid[b0, g0, r0, c] * (1 - fr) + grid[b0, g0, r0 + 1, c] * fr
                c10 = grid[b0, g0 + 1, r0, c] * (1 - fr) + grid[b0, g0 + 1, r0 + 1, c] * fr
                c01 = grid[b0 + 1, g0, r0, c] * (1 - fr) + grid[b0 + 1, g0, r0 + 1, c] * fr
                c11 = grid[b0 + 1, g0 + 1, r0, c] * (1 - fr) + grid[b0 + 1, g0 + 1, r0 + 1, c] * fr
                c0 = c00 * (1 - fg) + c10 * fg
                c1 = c01 * (1 - fg) + c11 * fg
                out[i, c] = c0 * (1 - fb) + c1 * fb

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def _trilinear_numpy(flat, grid, s):
    pos = np.clip(flat, 0.0, 1.0) * (s - 1)
    idx = np.minimum(pos.astype(np.int32), s - 2)
    frac = pos - idx
    r0, g0, b0 = idx[:, 0], idx[:, 1], idx[:, 2]
    fr, fg, fb = frac[:, 0:1], frac[:, 1:2], frac[:, 2:3]

    def at(dr, dg, db):
        return grid[b0 + db, g0 + dg, r0 + dr]

    c00 = at(0, 0, 0) * (1 - fr) + at(1, 0, 0) * fr
    c10 = at(0, 1, 0) * (1 - fr) + at(1, 1, 0) * fr
    c01 = at(0, 0, 1) * (1 - fr) + at(1, 0, 1) * fr
    c11 = at(0, 1, 1) * (1 - fr) + at(1, 1, 1) * fr
    c0 = c00 * (1 - fg) + c10 * fg
    c1 = c01 * (1 - fg) + c11 * fg
    return c0 * (1 - fb) + c1 * fb


def apply_lut(img: np.ndarray, lut: Lut3D) -> np.ndarray:
    """Trilinear interpolation of a display-encoded RGB image.

    Inputs are clamped to the lattice hull; lattice-node colors reproduce
    their entries exactly.  Runs through a parallel JIT kernel when numba
    is available (needed for real-time frame rates).
    """
    img = np.asarray(img)
    shape = img.shape
    flat = np.ascontiguousarray(img.reshape(-1, 3), dtype=np.float64)
    s = lut.size
    grid = np.ascontiguousarray(lut.entries.reshape(s, s, s, 3))
    if _HAVE_NUMBA:
        out = np.empty_like(flat)
        _trilinear_jit(flat, grid, s, out)
    else:
        out = _trilinear_numpy(flat, grid, s)
    return out.reshape(shape)


def write_cube(lut: Lut3D, title: Optional[str] = None) -> bytes:
    """Serialize to .cube text; out-of-range entries clamp with a warning."""
    entries = lut.entries
    n_clamped = int(np.count_nonzero((entries < 0.0) | (entries > 1.0)))
    if n_clamped:
        warnings.warn(f"{n_clamped} LUT values clamped to [0,1] on write",
                      stacklevel=2)
    clamped = np.clip(entries, 0.0, 1.0)
    lines = []
    title = title if title is not None else lut.title
    if title:
        lines.append(f'TITLE "{title}"')
    lines.append(f"LUT_3D_SIZE {lut.size}")
    lines.extend(f"{r:.6f} {g:.6f} {b:.6f}" for r, g, b in clamped)
    return ("\n".join(lines) + "\n").encode("ascii")


def read_cube(data: Union[bytes, str]) -> Lut3D:
    """Parse .cube text, tolerating comments, blank lines and DOMAIN lines."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    size = None
    title = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        upper = line.upper()
        if upper.startswith("TITLE"):
            title = line[5:].strip().strip('"')
            continue
        if upper.startswith("LUT_3D_SIZE"):
            try:
                size = int(line.split()[1])
            except (IndexError, ValueError):
                raise CubeParseError("malformed LUT_3D_SIZE", lineno) from None
            if size < 2:
                raise CubeParseError(f"size {size} too small", lineno)
            continue
        if upper.startswith(("DOMAIN_MIN", "DOMAIN_MAX")):
            continue  # defaults assumed; values accepted and ignored
        if upper.startswith("LUT_1D_SIZE"):
            raise CubeParseError("1D LUTs are not supported", lineno)
        parts = line.split()
        if len(parts) != 3:
            raise CubeParseError(f"expected 3 values, got {len(parts)}", lineno)
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise CubeParseError(f"non-numeric data {line!r}", lineno) from None
    if size is None:
        raise CubeParseError("missing LUT_3D_SIZE line")
    if len(rows) != size ** 3:
        raise SizeMismatch(f"expected {size ** 3} data lines, got {len(rows)}")
    return Lut3D(size=size, entries=np.array(rows), title=title)
