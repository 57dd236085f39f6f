"""Photorealistic style transfer via decoupled statistics.

Matches the first four decoupled moments (mean, variance, skewness,
ortho-kurtosis) and an optional power-spectrum descriptor between a source
and a target image, freezes the transform into a replayable recipe, and
bakes it into a 33^3 .cube LUT for temporally coherent video transfer.
"""

from .errors import DecostyleError
from .imgio import CropRect, crop_view, load_image, save_image
from .lut import Lut3D, apply_lut, bake_lut, read_cube, write_cube
from .moments import (
    MomentFeatures,
    MomentRecipe,
    flow_to_orthokurtosis,
    moment_features,
    normalize_mean_var,
    normalize_to_r3,
    ortho_kurtosis,
    projected_kurtosis_gradient,
    riccati_time,
    sample_moment,
    transfer_moments,
)
from .pipeline import TransferConfig, TransferRecipe, transfer_optics, transfer_style
from .spectral import (
    EquivalentKernel,
    FilterBank,
    SpectralFeatures,
    SpectralReference,
    apply_kernel_rgb,
    build_filter_bank,
    decoupled_spectral_features,
    extract_diffusion_kernel,
    spectral_features,
    spectral_normalize,
    spectral_transfer,
)

__version__ = "0.1.0"

__all__ = [
    "CropRect", "DecostyleError", "EquivalentKernel", "FilterBank",
    "Lut3D", "MomentFeatures", "MomentRecipe", "SpectralFeatures",
    "SpectralReference", "TransferConfig", "TransferRecipe",
    "apply_kernel_rgb", "apply_lut", "bake_lut", "build_filter_bank",
    "crop_view", "decoupled_spectral_features", "extract_diffusion_kernel",
    "flow_to_orthokurtosis", "load_image", "moment_features",
    "normalize_mean_var", "normalize_to_r3", "ortho_kurtosis",
    "projected_kurtosis_gradient", "read_cube", "riccati_time",
    "sample_moment", "save_image", "spectral_features", "spectral_normalize",
    "spectral_transfer", "transfer_moments", "transfer_optics",
    "transfer_style", "write_cube",
]
