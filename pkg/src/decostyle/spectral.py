"""Power-spectrum descriptor: radial band analysis, matching and kernels.

The descriptor of an image's spectral behavior is the mean square value
(MSV) at the output of an isotropic dyadic filter bank: three band-pass
filters, one low-pass, and an implied high-pass whose squared responses sum
to one at every frequency (a tight Parseval frame).  Together with the
luminance mean and total MSV this gives six features.

Band MSVs at the output of overlapping filters are coupled, so transfer
uses the same nested normalize/de-normalize scheme as the moments: the
gradient flow of a band MSV has a closed-form solution in the Fourier
domain — multiplication by exp(t * |H(f)|^2) followed by re-normalization
to unit MSV — and flow times are fitted numerically so the constrained
bands hit their targets.  Composing every stage collapses into a single
non-negative, zero-phase frequency response

    R(f) = gain * exp(sum_j tau_j * |H_j(f)|^2),

the equivalent kernel.  When the two analyzed images show the same scene
through different optics, that kernel approximates the optical PSF
difference, and because it is parametrized by five scalars it can be
re-evaluated exactly on any grid size.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .errors import CorruptFile, DimensionMismatch, FitDivergence

# Continuous-domain band MSV reference values for unit-variance white noise
# (B1, B2, B3, L4), kept as a cross-check against the per-grid recomputation.
PAPER_BAND_REFERENCE = (0.1829113769, 0.0383796491, 0.0092141282, 0.0030389843)

_N_BANDS = 4  # B1, B2, B3, L4


def _radial_responses(f):
    """Squared-sum-one responses (H00, B1, B2, B3, L4) at radial frequency f."""
    out = []
    low = np.ones_like(f)
    for k in range(4):
        cutoff = 2.0 ** -(k + 1)
        h0k = np.where(f <= cutoff, np.sin(np.pi * (2.0 ** k) * np.minimum(f, cutoff)), 1.0)
        out.append(low * h0k)
        low = low * np.sqrt(np.maximum(0.0, 1.0 - h0k * h0k))
    out.append(low)
    return out


@dataclass
class FilterBank:
    """Frequency-domain responses of the dyadic radial bank on one DFT grid.

    Arrays are laid out like numpy's fft2 output, shape (height, width).
    h00 is the high-pass; bands() yields (B1, B2, B3, L4) in feature order.
    """

    width: int
    height: int
    h00: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    b3: np.ndarray
    l4: np.ndarray

    def bands(self):
        return (self.b1, self.b2, self.b3, self.l4)

    def band_powers(self):
        """Squared responses of (B1, B2, B3, L4), flattened."""
        return [np.square(b).ravel() for b in self.bands()]

    def tightness_error(self) -> float:
        total = self.h00 ** 2 + self.b1 ** 2 + self.b2 ** 2 + self.b3 ** 2 + self.l4 ** 2
        return float(np.max(np.abs(total - 1.0)))


def radial_frequency_grid(width: int, height: int) -> np.ndarray:
    fx = np.fft.fftfreq(width)
    fy = np.fft.fftfreq(height)
    return np.hypot(fy[:, None], fx[None, :])


def build_filter_bank(width: int, height: int) -> FilterBank:
    """Evaluate the bank on a width x height DFT grid (both >= 8)."""
    if width < 8 or height < 8:
        raise ValueError("filter bank needs a grid of at least 8x8")
    f = radial_frequency_grid(width, height)
    h00, b1, b2, b3, l4 = _radial_responses(f)
    return FilterBank(width, height, h00, b1, b2, b3, l4)


def grid_band_reference(bank: FilterBank) -> np.ndarray:
    """Expected band MSVs for unit-variance white noise on this exact grid.

    The expectation of a band MSV is the lattice mean of the squared
    response; the DC bin is excluded because analysis subtracts the mean.
    """
    out = []
    for w in bank.band_powers():
        s = w.sum() - w[0]
        out.append(s / w.size)
    return np.array(out)


def continuous_band_reference(n: int = 4000) -> np.ndarray:
    """Midpoint quadrature of the squared responses over the unit square."""
    ax = (np.arange(n) + 0.5) / n - 0.5
    f = np.hypot(ax[:, None], ax[None, :])
    _, b1, b2, b3, l4 = _radial_responses(f)
    return np.array([(r ** 2).mean() for r in (b1, b2, b3, l4)])


@dataclass
class SpectralReference:
    """Band MSV reference values: per-grid recomputation plus the
    continuous-domain constants used as a cross-check."""

    grid: np.ndarray
    continuous: np.ndarray = field(
        default_factory=lambda: np.array(PAPER_BAND_REFERENCE))

    @classmethod
    def for_bank(cls, bank: FilterBank) -> "SpectralReference":
        return cls(grid=grid_band_reference(bank))


@dataclass
class SpectralFeatures:
    """Six-feature spectral descriptor.

    Raw form (decoupled=False): f1 mean, f2 raw mean square, f3..f6 band
    MSVs of the mean-subtracted image.  Decoupled form: f2 is the variance
    and f3..f6 are band MSVs measured at successive normalization levels.
    flow_times carries the fitted times when produced by a normalization.
    """

    f1: float
    f2: float
    f3: float
    f4: float
    f5: float
    f6: float
    decoupled: bool = False
    flow_times: Optional[tuple] = None

    def band_vector(self):
        return np.array([self.f3, self.f4, self.f5, self.f6])

    def to_dict(self):
        d = {"f1": self.f1, "f2": self.f2, "f3": self.f3, "f4": self.f4,
             "f5": self.f5, "f6": self.f6, "decoupled": self.decoupled}
        if self.flow_times is not None:
            d["flow_times"] = list(self.flow_times)
        return d

    @classmethod
    def from_dict(cls, d):
        ft = d.get("flow_times")
        return cls(f1=d["f1"], f2=d["f2"], f3=d["f3"], f4=d["f4"],
                   f5=d["f5"], f6=d["f6"], decoupled=d.get("decoupled", False),
                   flow_times=tuple(ft) if ft is not None else None)


def _check_dims(img, bank):
    if img.shape != (bank.height, bank.width):
        raise DimensionMismatch(
            f"image {img.shape} does not match bank "
            f"({bank.height}, {bank.width})")


def _centered_power(img):
    """(mean, variance, mean-subtracted DFT, its power spectrum, flat)."""
    m = float(np.mean(img))
    x = np.fft.fft2(img - m)
    x[0, 0] = 0.0
    p = (x.real ** 2 + x.imag ** 2).ravel()
    n = img.size
    var = float(p.sum()) / (n * n)
    return m, var, x, p


def spectral_features(lum: np.ndarray, bank: FilterBank) -> SpectralFeatures:
    """Measure the raw six-feature descriptor of a 2-D luminance image."""
    lum = np.asarray(lum, dtype=np.float64)
    _check_dims(lum, bank)
    m, var, _, p = _centered_power(lum)
    f2 = float(np.mean(lum * lum))
    n2 = float(lum.size) ** 2
    msvs = [float((w * p).sum()) / n2 for w in bank.band_powers()]
    return SpectralFeatures(m, f2, *msvs)


# ---------------------------------------------------------------------------
# Exponential flow fitting
# ---------------------------------------------------------------------------


def _band_state(p, wstack, t):
    """Weighted means under the flowed power spectrum p * exp(2 t.W).

    Overflow in probe evaluations is tolerated; the solver's backtracking
    rejects non-finite residuals.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        e2 = np.exp(2.0 * (t @ wstack)) if len(t) else np.ones_like(p)
        q = p * e2
        den = q.sum()
    return q, den


def _solve_flow_times(p, wlist, targets, x0=None, *,
                      tol=1e-12, max_nm_evals=2000):
    """Fit flow times so the flowed, unit-MSV spectrum hits the band targets.

    Damped Newton on the square system (analytic Jacobian); if it stalls,
    one derivative-free Nelder-Mead pass re-seeds it.  Raises FitDivergence
    when the residual stays above 1e-6.
    """
    k = len(wlist)
    wstack = np.stack(wlist)
    targets = np.asarray(targets, dtype=np.float64)

    def residual(t):
        q, den = _band_state(p, wstack, t)
        with np.errstate(invalid="ignore"):
            msv = (wstack @ q) / den
        return msv - targets, q, den, msv

    def newton(t):
        r, q, den, msv = residual(t)
        best = float(np.max(np.abs(r)))
        for _ in range(100):
            if best <= tol:
                break
            wq = (wstack * q) @ wstack.T  # <W_i W_j> * den
            jac = 2.0 * (wq / den - np.outer(msv, (wstack @ q) / den))
            try:
                step = np.linalg.solve(jac, -r)
            except np.linalg.LinAlgError:
                break
            improved = False
            for _ in range(40):
                cand = t + step
                r2, q2, den2, msv2 = residual(cand)
                n2 = float(np.max(np.abs(r2)))
                if np.isfinite(n2) and n2 < best:
                    t, r, q, den, msv, best = cand, r2, q2, den2, msv2, n2
                    improved = True
                    break
                step *= 0.5
            if not improved:
                break
        return t, best

    t = np.zeros(k) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    t, best = newton(t)
    if best > tol:
        def objective(v):
            r, *_ = residual(v)
            return float(r @ r)
        nm = minimize(objective, t, method="Nelder-Mead",
                      options={"fatol": 1e-10, "xatol": 1e-10,
                               "maxfev": max_nm_evals})
        t2, best2 = newton(np.asarray(nm.x))
        if best2 < best:
            t, best = t2, best2
    if best > 1e-6:
        raise FitDivergence(
            f"band fit stalled at residual {best:.3g} (targets {targets})")
    return t


# ---------------------------------------------------------------------------
# Decoupled analysis
# ---------------------------------------------------------------------------


def decoupled_spectral_features(lum: np.ndarray, bank: FilterBank,
                                ref: SpectralReference) -> SpectralFeatures:
    """Nested-normalization analysis of the six spectral features.

    f3 is measured on the standardized image; each further band MSV is
    measured after the previous bands have been flowed to their reference
    values, which is what decouples it from them.
    """
    lum = np.asarray(lum, dtype=np.float64)
    _check_dims(lum, bank)
    m, var, _, p = _centered_power(lum)
    if var <= 0.0:
        raise FitDivergence("constant image has no spectral shape")
    w = bank.band_powers()
    n2 = float(lum.size) ** 2

    def msv_of(wj, q, den):
        # den normalizes to unit total MSV
        return float((wj * q).sum() / den)

    q0, den0 = p, float(p.sum())
    feats = [msv_of(w[0], q0, den0)]
    times = None
    for level in range(1, _N_BANDS):
        times = _solve_flow_times(p, w[:level], ref.grid[:level],
                                  x0=None if times is None
                                  else np.append(times, 0.0))
        q, den = _band_state(p, np.stack(w[:level]), times)
        feats.append(msv_of(w[level], q, den))
    return SpectralFeatures(m, var, *feats, decoupled=True,
                            flow_times=tuple(times))


# ---------------------------------------------------------------------------
# Equivalent kernel and transfer
# ---------------------------------------------------------------------------


@dataclass
class EquivalentKernel:
    """Zero-phase kernel realizing a composed spectral normalization.

    Fully described by a scalar gain and one accumulated flow time per
    band filter; the frequency response can therefore be re-evaluated
    exactly on any grid.  The DC gain is pinned to 1 so convolution
    preserves the mean.
    """

    gain: float
    flow_times: tuple  # (tau_b1, tau_b2, tau_b3, tau_l4)
    width: int
    height: int

    def response_on(self, width: int, height: int) -> np.ndarray:
        f = radial_frequency_grid(width, height)
        _, b1, b2, b3, l4 = _radial_responses(f)
        acc = np.zeros_like(f)
        for tau, r in zip(self.flow_times, (b1, b2, b3, l4)):
            if tau != 0.0:
                acc += tau * np.square(r)
        resp = self.gain * np.exp(acc)
        resp[0, 0] = 1.0
        return resp

    @property
    def frequency_response(self) -> np.ndarray:
        return self.response_on(self.width, self.height)

    def spatial_kernel(self, max_size: int = 63,
                       energy_fraction: float = 1.0 - 1e-4) -> np.ndarray:
        """Centered, odd-sized crop of the inverse transform keeping at
        least `energy_fraction` of its energy (capped at max_size)."""
        full = np.fft.fftshift(np.fft.ifft2(self.frequency_response).real)
        cy, cx = self.height // 2, self.width // 2
        total = float((full * full).sum())
        limit = min(max_size, 2 * min(cy, cx, self.height - 1 - cy,
                                      self.width - 1 - cx) + 1)
        half = 0
        while 2 * half + 1 < limit:
            box = full[cy - half:cy + half + 1, cx - half:cx + half + 1]
            if float((box * box).sum()) >= energy_fraction * total:
                break
            half += 1
        return full[cy - half:cy + half + 1, cx - half:cx + half + 1].copy()

    def apply(self, img: np.ndarray) -> np.ndarray:
        """Convolve one 2-D plane.  Uses exact frequency-domain
        multiplication; the response is re-evaluated for the image's grid
        when its size differs from the extraction grid."""
        img = np.asarray(img, dtype=np.float64)
        if img.ndim != 2:
            raise DimensionMismatch("kernel applies to 2-D planes")
        resp = self.response_on(img.shape[1], img.shape[0])
        return np.fft.ifft2(np.fft.fft2(img) * resp).real

    def to_dict(self):
        return {"gain": self.gain, "flow_times": list(self.flow_times),
                "width": self.width, "height": self.height}

    @classmethod
    def from_dict(cls, d):
        return cls(gain=float(d["gain"]), flow_times=tuple(d["flow_times"]),
                   width=int(d["width"]), height=int(d["height"]))

    @classmethod
    def identity(cls, width: int = 64, height: int = 64):
        return cls(1.0, (0.0, 0.0, 0.0, 0.0), width, height)


def apply_kernel_rgb(img: np.ndarray, kernel: EquivalentKernel) -> np.ndarray:
    """Convolve each channel of a linear-light RGB image with the kernel."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise DimensionMismatch("expected an (H, W, 3) image")
    out = np.empty_like(img)
    resp = kernel.response_on(img.shape[1], img.shape[0])
    for c in range(3):
        out[:, :, c] = np.fft.ifft2(np.fft.fft2(img[:, :, c]) * resp).real
    return out


def _transfer_times(lum, bank, ref, tgt):
    """Accumulated flow times + gain mapping lum onto tgt's decoupled
    descriptor: normalization to the reference manifold followed by the
    nested de-normalization stages (outermost band constraint first)."""
    m, var, x, p = _centered_power(lum)
    if var <= 0.0:
        raise FitDivergence("constant source has no spectral shape")
    w = bank.band_powers()
    v = ref.grid
    des = tgt.band_vector()

    stages = [
        (3, list(v[:3])),                      # normalize B1..B3 to refs
        (4, list(v[:3]) + [des[3]]),           # impose target L4
        (3, list(v[:2]) + [des[2]]),           # impose target B3
        (2, [v[0], des[1]]),                   # impose target B2
        (1, [des[0]]),                         # impose target B1
    ]
    total = np.zeros(_N_BANDS)
    cur_p = p / p.sum() * p.size  # keep magnitudes tame; solves use ratios
    for k, targets in stages:
        t = _solve_flow_times(cur_p, w[:k], targets)
        e2 = np.exp(2.0 * (t @ np.stack(w[:k])))
        q = cur_p * e2
        cur_p = q / q.sum() * q.size
        total[:k] += t
    # The stage renormalizations compose into a single unit-MSV scaling of
    # the totally-flowed spectrum; the gain then rescales to the target's
    # standard deviation.
    e2_total = np.exp(2.0 * (total @ np.stack(w)))
    n = lum.size
    gain = math.sqrt(tgt.f2) * n / math.sqrt(float((p * e2_total).sum()))
    return m, var, x, total, gain


def transfer_kernel(src: np.ndarray, tgt: SpectralFeatures,
                    bank: Optional[FilterBank] = None,
                    ref: Optional[SpectralReference] = None) -> EquivalentKernel:
    """Equivalent kernel carrying src's luminance onto the target's
    decoupled band descriptor and variance (the mean is untouched)."""
    src = np.asarray(src, dtype=np.float64)
    if bank is None:
        bank = build_filter_bank(src.shape[1], src.shape[0])
    if ref is None:
        ref = SpectralReference.for_bank(bank)
    _check_dims(src, bank)
    if not tgt.decoupled:
        raise ValueError("spectral transfer needs decoupled target features")
    _, _, _, total, gain = _transfer_times(src, bank, ref, tgt)
    return EquivalentKernel(gain=gain, flow_times=tuple(total),
                            width=bank.width, height=bank.height)


def spectral_transfer(src: np.ndarray, tgt: SpectralFeatures,
                      bank: FilterBank, ref: SpectralReference):
    """Impose the target's decoupled spectral descriptor on src.

    Returns (out, kernel): out has the target's mean and variance and its
    re-measured decoupled band MSVs equal the target's; kernel is the
    combined equivalent filter (without the mean shift).
    """
    src = np.asarray(src, dtype=np.float64)
    _check_dims(src, bank)
    kernel = transfer_kernel(src, tgt, bank, ref)
    m = float(np.mean(src))
    x = np.fft.fft2(src - m)
    x[0, 0] = 0.0
    out = np.fft.ifft2(x * kernel.frequency_response).real + tgt.f1
    return out, kernel


def extract_diffusion_kernel(t_ref: np.ndarray, t_diffused: np.ndarray,
                             bank: Optional[FilterBank] = None) -> EquivalentKernel:
    """Kernel whose convolution carries t_ref's luminance onto t_diffused's
    spectral descriptor (band MSVs and variance; the mean is untouched).

    For two images of the same scene taken through different optics this
    approximates the PSF difference between them.
    """
    t_ref = np.asarray(t_ref, dtype=np.float64)
    t_diffused = np.asarray(t_diffused, dtype=np.float64)
    if t_ref.shape != t_diffused.shape:
        raise DimensionMismatch(
            f"image pair {t_ref.shape} vs {t_diffused.shape}")
    if bank is None:
        bank = build_filter_bank(t_ref.shape[1], t_ref.shape[0])
    ref = SpectralReference.for_bank(bank)
    tgt = decoupled_spectral_features(t_diffused, bank, ref)
    return transfer_kernel(t_ref, tgt, bank, ref)


def spectral_normalize(lum: np.ndarray, bank: FilterBank,
                       ref: SpectralReference):
    """Flow all four band MSVs to their reference values.

    Returns (normalized image, decoupled features of the input, times).
    The output has zero mean and unit MSV by construction.
    """
    lum = np.asarray(lum, dtype=np.float64)
    _check_dims(lum, bank)
    feats = decoupled_spectral_features(lum, bank, ref)
    m, var, x, p = _centered_power(lum)
    w = bank.band_powers()
    t = _solve_flow_times(p, w, ref.grid,
                          x0=np.append(feats.flow_times, 0.0))
    e2 = np.exp(2.0 * (t @ np.stack(w)))
    den = float((p * e2).sum())
    n = lum.size
    resp = np.exp(t @ np.stack(w)).reshape(lum.shape) * (n / math.sqrt(den))
    out = np.fft.ifft2(x * resp).real
    feats.flow_times = tuple(t)
    return out, feats, t


# ---------------------------------------------------------------------------
# Spatial kernel interchange format: "width height" header, row-major reals
# ---------------------------------------------------------------------------


def write_kernel_text(kernel2d: np.ndarray) -> str:
    k = np.asarray(kernel2d, dtype=np.float64)
    lines = [f"{k.shape[1]} {k.shape[0]}"]
    lines += [" ".join(repr(float(v)) for v in row) for row in k]
    return "\n".join(lines) + "\n"


def read_kernel_text(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CorruptFile("empty kernel file")
    try:
        w, h = (int(tok) for tok in lines[0].split())
        rows = [[float(tok) for tok in ln.split()] for ln in lines[1:]]
    except ValueError as e:
        raise CorruptFile(f"malformed kernel file: {e}") from None
    arr = np.array(rows, dtype=np.float64)
    if arr.shape != (h, w):
        raise CorruptFile(
            f"kernel body {arr.shape} does not match header ({h}, {w})")
    return arr
