"""The six-stage style transfer and the optics (diffusion) transfer.

Style transfer runs: gamma decode -> Gray World illuminant scale ->
opponent conversion -> per-channel decoupled moment transfer (all four
orders on the intensity channel, mean/variance on chroma by default) ->
inverse conversion -> gamma encode.  Statistics may be restricted to crop
rectangles; the resulting maps always apply to the full image.

Everything the transfer does to pixel values is frozen into a
TransferRecipe.  The output image is literally the recipe replayed on the
source, so recipes, LUT baking, batch processing and the service cannot
drift from the direct path.
"""

from __future__ import annotations

import json
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import color
from .errors import DecostyleError, RecipeIncomplete
from .imgio import CropRect, crop_view
from .moments import MomentRecipe, moment_features, transfer_moments
from .spectral import (
    EquivalentKernel,
    apply_kernel_rgb,
    build_filter_bank,
    decoupled_spectral_features,
    SpectralReference,
    transfer_kernel,
)

CHANNEL_NAMES = ("I", "P", "T")
RECIPE_VERSION = 1


@contextmanager
def _stage(name, channel=None):
    """Re-raise package errors with stage/channel context attached."""
    try:
        yield
    except DecostyleError as e:
        where = f"stage={name}" + (f" channel={channel}" if channel else "")
        raise type(e)(f"{e} [{where}]") from e


@dataclass
class TransferConfig:
    """Per-channel moment orders, statistics crops and toggles.

    Orders are prefix lengths (0 leaves a channel untouched, 4 transfers
    everything up to ortho-kurtosis).  Crops restrict statistics only.
    """

    orders_i: int = 4
    orders_p: int = 2
    orders_t: int = 2
    src_crop: Optional[CropRect] = None
    tgt_crop: Optional[CropRect] = None
    spectral: bool = False
    clamp: bool = False

    _FIELDS = ("orders_i", "orders_p", "orders_t", "src_crop", "tgt_crop",
               "spectral", "clamp")

    def __post_init__(self):
        for o in (self.orders_i, self.orders_p, self.orders_t):
            if not 0 <= int(o) <= 4:
                raise ValueError(f"channel order {o} outside 0..4")

    def orders_for(self, channel: str) -> int:
        return {"I": self.orders_i, "P": self.orders_p, "T": self.orders_t}[channel]

    def to_dict(self):
        d = {k: getattr(self, k) for k in self._FIELDS}
        d["src_crop"] = str(self.src_crop) if self.src_crop else None
        d["tgt_crop"] = str(self.tgt_crop) if self.tgt_crop else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TransferConfig":
        unknown = set(d) - set(cls._FIELDS)
        if unknown:
            raise ValueError(f"unknown config fields {sorted(unknown)}")
        kw = dict(d)
        for key in ("src_crop", "tgt_crop"):
            if kw.get(key):
                kw[key] = CropRect.parse(kw[key]) if isinstance(kw[key], str) \
                    else CropRect(**kw[key])
        return cls(**kw)


@dataclass
class TransferRecipe:
    """Frozen form of one style transfer.

    illuminant_scale and the per-channel moment recipes are point-wise and
    bake into a LUT; the spectral kernel is spatial and is applied per
    frame instead.
    """

    illuminant_scale: np.ndarray
    channels: dict  # name -> MomentRecipe
    kernel: Optional[EquivalentKernel] = None
    clamp: bool = False
    version: int = RECIPE_VERSION

    @classmethod
    def identity(cls) -> "TransferRecipe":
        return cls(illuminant_scale=np.ones(3), channels={}, kernel=None)

    @property
    def is_identity(self) -> bool:
        return not self.channels and self.kernel is None \
            and np.all(self.illuminant_scale == 1.0)

    def validate(self):
        if self.channels and set(self.channels) != set(CHANNEL_NAMES):
            raise RecipeIncomplete(
                f"recipe channels {sorted(self.channels)} incomplete")
        if np.asarray(self.illuminant_scale).shape != (3,):
            raise RecipeIncomplete("illuminant scale must have 3 entries")
        return self

    def apply(self, img: np.ndarray, *, with_kernel: bool = True) -> np.ndarray:
        """Replay the frozen transfer on a display-encoded image.

        Pure per-value arithmetic plus (optionally) the spectral kernel;
        never re-estimates statistics, so any frame or lattice node gets
        the identical treatment.
        """
        img = np.asarray(img, dtype=np.float64)
        if self.is_identity:
            return img.copy()
        self.validate()
        lin = color.gamma_decode(img)
        lin = lin * self.illuminant_scale
        if with_kernel and self.kernel is not None:
            lin = apply_kernel_rgb(lin, self.kernel)
        opp = color.rgb_to_opponent(lin)
        for i, name in enumerate(CHANNEL_NAMES):
            plane = opp[..., i]
            opp[..., i] = self.channels[name].apply(plane.ravel()).reshape(plane.shape)
        out = color.gamma_encode(color.opponent_to_rgb(opp))
        if self.clamp:
            out = np.clip(out, 0.0, 1.0)
        return out

    def apply_to_values(self, rgb_values: np.ndarray) -> np.ndarray:
        """Point-wise stages only, on an (N, 3) value list (LUT baking)."""
        flat = np.asarray(rgb_values, dtype=np.float64).reshape(-1, 1, 3)
        return self.apply(flat, with_kernel=False).reshape(-1, 3)

    @staticmethod
    def _color_record():
        # frozen with each recipe so replays are pinned to the exact
        # color math that produced them
        return {
            "gamma": color.GAMMA,
            "opponent_exponent": color.OPPONENT_EXPONENT,
            "rgb_to_lms": [[float(v) for v in row] for row in color.RGB_TO_LMS],
            "lms_to_opponent": [[float(v) for v in row]
                                for row in color.LMS_TO_OPPONENT],
        }

    def to_json(self) -> str:
        doc = {
            "v": self.version,
            "illuminant_scale": [float(v) for v in self.illuminant_scale],
            "channels": {k: r.to_dict() for k, r in self.channels.items()},
            "kernel": self.kernel.to_dict() if self.kernel else None,
            "clamp": self.clamp,
            "color": self._color_record(),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "TransferRecipe":
        doc = json.loads(text)
        unknown = set(doc) - {"v", "illuminant_scale", "channels", "kernel",
                              "clamp", "color"}
        if unknown:
            raise RecipeIncomplete(f"unknown recipe fields {sorted(unknown)}")
        if doc.get("v") != RECIPE_VERSION:
            raise RecipeIncomplete(f"unsupported recipe version {doc.get('v')!r}")
        recorded = doc.get("color")
        if recorded is not None and recorded != cls._color_record():
            raise RecipeIncomplete(
                "recipe was recorded under different color-space constants")
        try:
            return cls(
                illuminant_scale=np.array(doc["illuminant_scale"], dtype=np.float64),
                channels={k: MomentRecipe.from_dict(r)
                          for k, r in doc["channels"].items()},
                kernel=EquivalentKernel.from_dict(doc["kernel"])
                if doc.get("kernel") else None,
                clamp=bool(doc.get("clamp", False)),
            ).validate()
        except (KeyError, TypeError) as e:
            raise RecipeIncomplete(f"malformed recipe: {e}") from None


def _stats_view(img, rect: Optional[CropRect]):
    return img if rect is None else crop_view(img, rect)


def _channel_recipe(src_plane, tgt_plane, orders, channel):
    """Moment recipe for one channel; degenerate channels fall back to
    mean-only matching."""
    if orders == 0:
        return MomentRecipe(target=moment_features(src_plane, 1), orders=0, chain=[])
    eff = orders
    if eff >= 2:
        if moment_features(src_plane, 2).degenerate or \
           moment_features(tgt_plane, 2).degenerate:
            warnings.warn(
                f"channel {channel} is constant; matching mean only", stacklevel=2)
            eff = 1
    tgt_feats = moment_features(tgt_plane, eff)
    _, recipe = transfer_moments(src_plane, tgt_feats, range(1, eff + 1))
    return recipe


def build_recipe(src: np.ndarray, tgt: np.ndarray,
                 cfg: Optional[TransferConfig] = None) -> TransferRecipe:
    """Analyze a (source, target) pair and freeze the transfer map."""
    cfg = cfg or TransferConfig()
    src = np.asarray(src, dtype=np.float64)
    tgt = np.asarray(tgt, dtype=np.float64)
    if cfg.src_crop:
        cfg.src_crop.validate(src.shape[1], src.shape[0])
    if cfg.tgt_crop:
        cfg.tgt_crop.validate(tgt.shape[1], tgt.shape[0])

    with _stage("gamma-decode"):
        src_lin = color.gamma_decode(src)
        tgt_lin = color.gamma_decode(tgt)

    with _stage("gray-world"):
        src_lin, l_src, l_tgt = color.gray_world_scale(
            src_lin, tgt_lin,
            src_stats=_stats_view(src_lin, cfg.src_crop),
            tgt_stats=_stats_view(tgt_lin, cfg.tgt_crop))
        scale = l_tgt / l_src

    kernel = None
    if cfg.spectral:
        with _stage("spectral"):
            src_lum = color.luminance(_stats_view(src_lin, cfg.src_crop))
            tgt_lum = color.luminance(_stats_view(tgt_lin, cfg.tgt_crop))
            tgt_bank = build_filter_bank(tgt_lum.shape[1], tgt_lum.shape[0])
            tgt_feats = decoupled_spectral_features(
                tgt_lum, tgt_bank, SpectralReference.for_bank(tgt_bank))
            kernel = transfer_kernel(src_lum, tgt_feats)
            src_lin = apply_kernel_rgb(src_lin, kernel)

    with _stage("opponent"):
        src_opp = color.rgb_to_opponent(_stats_view(src_lin, cfg.src_crop))
        tgt_opp = color.rgb_to_opponent(_stats_view(tgt_lin, cfg.tgt_crop))

    channels = {}
    for i, name in enumerate(CHANNEL_NAMES):
        with _stage("moments", name):
            channels[name] = _channel_recipe(
                src_opp[..., i].ravel(), tgt_opp[..., i].ravel(),
                cfg.orders_for(name), name)

    return TransferRecipe(illuminant_scale=scale, channels=channels,
                          kernel=kernel, clamp=cfg.clamp).validate()


def transfer_style(src: np.ndarray, tgt: np.ndarray,
                   cfg: Optional[TransferConfig] = None):
    """Transfer the target's style onto the source.

    Returns (out, recipe); out is exactly the recipe replayed on src.
    """
    recipe = build_recipe(src, tgt, cfg)
    return recipe.apply(src), recipe


def transfer_optics(src: np.ndarray, t_ref: np.ndarray, t_diff: np.ndarray,
                    diff_crop: Optional[CropRect] = None):
    """Carry the diffusion difference of the (t_ref, t_diff) pair onto src.

    The kernel relating the pair's luminances is extracted in linear light
    (optionally from a crop of both) and convolved with the source's
    channels.  Returns (out, kernel).
    """
    from .spectral import extract_diffusion_kernel

    src = np.asarray(src, dtype=np.float64)
    with _stage("gamma-decode"):
        src_lin = color.gamma_decode(src)
        ref_lin = color.gamma_decode(np.asarray(t_ref, dtype=np.float64))
        diff_lin = color.gamma_decode(np.asarray(t_diff, dtype=np.float64))
    with _stage("kernel-extraction"):
        ref_lum = color.luminance(_stats_view(ref_lin, diff_crop))
        diff_lum = color.luminance(_stats_view(diff_lin, diff_crop))
        kernel = extract_diffusion_kernel(ref_lum, diff_lum)
    with _stage("convolution"):
        out_lin = apply_kernel_rgb(src_lin, kernel)
    with _stage("gamma-encode"):
        out = color.gamma_encode(out_lin)
    return out, kernel
