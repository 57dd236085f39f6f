"""Shared synthetic imagery for pipeline-level tests.

No external assets: "photographs" are deterministic compositions of smooth
gradients, 1/f texture and color casts, kept strictly inside [0, 1] and
display-encoded like camera output.
"""

import numpy as np
import pytest


def synth_photo(seed, width=96, height=72, cast=None):
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width]
    sky = (y / height)[..., None] * np.array([0.20, 0.35, 0.55])
    ground = ((height - y) / height)[..., None] * np.array([0.40, 0.30, 0.18])
    fx = np.fft.fftfreq(width)
    fy = np.fft.fftfreq(height)
    f = np.hypot(fy[:, None], fx[None, :])
    texture = np.stack([
        np.fft.ifft2(np.fft.fft2(rng.standard_normal((height, width))) /
                     (0.08 + f)).real
        for _ in range(3)], axis=-1)
    texture /= max(np.abs(texture).max(), 1e-9)
    img = 0.45 * sky + 0.35 * ground + 0.18 * texture + 0.25
    if cast is None:
        cast = 0.9 + 0.2 * rng.random(3)
    img = img * cast
    return np.clip(img, 0.02, 0.98)


@pytest.fixture
def photo_pair():
    return synth_photo(1), synth_photo(2, cast=np.array([1.1, 0.95, 0.8]))
