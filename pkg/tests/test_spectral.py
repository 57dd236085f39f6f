"""Tests for the radial filter bank, band-energy fitting and kernels.

Spatial-domain sums, direct convolution and synthetically-blurred image
pairs serve as the independent oracles.
"""

import math

import numpy as np
import pytest

from decostyle import spectral as sp
from decostyle.errors import CorruptFile, DimensionMismatch


@pytest.fixture(scope="module")
def bank128():
    return sp.build_filter_bank(128, 128)


@pytest.fixture(scope="module")
def ref128(bank128):
    return sp.SpectralReference.for_bank(bank128)


def noise_image(seed, shape=(128, 128)):
    return np.random.default_rng(seed).standard_normal(shape)


def textured_image(seed, shape=(128, 128)):
    """Noise with a 1/f-ish component, closer to photographic content."""
    rng = np.random.default_rng(seed)
    f = sp.radial_frequency_grid(shape[1], shape[0])
    shaped = np.fft.ifft2(np.fft.fft2(rng.standard_normal(shape)) / (0.05 + f)).real
    return rng.standard_normal(shape) * 0.3 + shaped / shaped.std()


class TestFilterBank:
    @pytest.mark.parametrize("w,h", [(128, 128), (512, 512), (96, 160)])
    def test_tight_frame(self, w, h):
        assert sp.build_filter_bank(w, h).tightness_error() < 1e-12

    def test_dc_values(self, bank128):
        assert bank128.b1[0, 0] == 0.0
        assert bank128.b2[0, 0] == 0.0
        assert bank128.b3[0, 0] == 0.0
        assert bank128.l4[0, 0] == 1.0
        assert bank128.h00[0, 0] == 0.0

    def test_nyquist_values(self, bank128):
        # at f = 0.5 the high-pass saturates and everything else vanishes
        assert bank128.h00[0, 64] == pytest.approx(1.0, abs=1e-15)
        for b in bank128.bands():
            assert abs(b[0, 64]) < 1e-15

    def test_responses_in_unit_interval(self, bank128):
        for r in (bank128.h00, *bank128.bands()):
            assert r.min() >= 0.0 and r.max() <= 1.0 + 1e-15

    def test_radial_symmetry(self, bank128):
        # response depends on |f| only: mirroring the grid leaves it fixed
        for r in bank128.bands():
            np.testing.assert_allclose(r, np.roll(r[::-1, :], 1, axis=0), atol=1e-15)
            np.testing.assert_allclose(r, np.roll(r[:, ::-1], 1, axis=1), atol=1e-15)

    def test_too_small_grid(self):
        with pytest.raises(ValueError):
            sp.build_filter_bank(4, 128)


class TestReferenceValues:
    def test_quadrature_reproduces_continuous_constants(self):
        got = sp.continuous_band_reference(n=4000)
        np.testing.assert_allclose(got, sp.PAPER_BAND_REFERENCE, rtol=2e-6)

    def test_grid_reference_near_continuous_at_512(self):
        bank = sp.build_filter_bank(512, 512)
        grid = sp.grid_band_reference(bank)
        np.testing.assert_allclose(grid, sp.PAPER_BAND_REFERENCE, rtol=0.02)

    def test_white_noise_within_three_standard_errors(self, bank128, ref128):
        img = noise_image(3)
        feats = sp.spectral_features(img, bank128)
        n = img.size
        for got, want, w in zip(feats.band_vector(), ref128.grid,
                                bank128.band_powers()):
            se = math.sqrt(2.0 * float((w * w).sum())) / n
            assert abs(got - want) < 3.0 * se


class TestSpectralFeatures:
    def test_constant_image(self, bank128):
        feats = sp.spectral_features(np.full((128, 128), 0.75), bank128)
        assert feats.f1 == pytest.approx(0.75)
        assert feats.f2 == pytest.approx(0.75 ** 2)
        np.testing.assert_allclose(feats.band_vector(), 0.0, atol=1e-20)

    def test_parseval_audit_against_spatial_sums(self, bank128):
        # band energies summed in the pixel domain must reproduce the
        # variance; f2 - mean^2 = MSV_H00 + f3 + f4 + f5 + f6
        img = textured_image(4)
        feats = sp.spectral_features(img, bank128)
        x = np.fft.fft2(img - img.mean())
        x[0, 0] = 0.0
        spatial = [float(np.mean(np.fft.ifft2(x * r).real ** 2))
                   for r in (bank128.h00, *bank128.bands())]
        np.testing.assert_allclose(feats.band_vector(), spatial[1:], atol=1e-12)
        lhs = feats.f2 - feats.f1 ** 2
        assert lhs == pytest.approx(sum(spatial), abs=1e-10)

    def test_dimension_mismatch(self, bank128):
        with pytest.raises(DimensionMismatch):
            sp.spectral_features(np.zeros((64, 64)), bank128)


class TestFlowSolver:
    def test_forward_flow_then_normalize_recovers_reference(self, bank128, ref128):
        # push a known flow onto white noise, then ask the solver to bring
        # the band values back to the reference
        img = noise_image(5)
        w = bank128.band_powers()
        t_star = np.array([0.8, -1.1, 0.5, 1.4])
        m, var, x, p = sp._centered_power(img)
        flowed = p * np.exp(2.0 * (t_star @ np.stack(w)))
        t = sp._solve_flow_times(flowed, w, ref128.grid)
        q, den = sp._band_state(flowed, np.stack(w), t)
        msv = np.array([float((wj * q).sum() / den) for wj in w])
        np.testing.assert_allclose(msv, ref128.grid, atol=1e-8)

    def test_white_noise_times_near_zero(self, bank128, ref128):
        feats = sp.decoupled_spectral_features(noise_image(6), bank128, ref128)
        assert np.max(np.abs(feats.flow_times)) < 0.2


class TestNormalize:
    def test_blurred_input_hits_reference(self, bank128, ref128):
        img = textured_image(7)
        f = sp.radial_frequency_grid(128, 128)
        g = np.exp(-2 * np.pi ** 2 * 1.5 ** 2 * f ** 2)
        blurred = np.fft.ifft2(np.fft.fft2(img) * g).real
        out, feats, t = sp.spectral_normalize(blurred, bank128, ref128)
        assert abs(out.mean()) < 1e-12
        assert np.mean(out * out) == pytest.approx(1.0, abs=1e-12)
        measured = sp.spectral_features(out, bank128)
        np.testing.assert_allclose(measured.band_vector(), ref128.grid, atol=1e-8)
        # undoing a heavy blur takes a large correction that amplifies the
        # high band relative to the low one (the un-flowed high-pass acts
        # as the slack, so the raw signs of t are not meaningful)
        assert np.max(np.abs(t)) > 2.0
        w = bank128.band_powers()
        exponent = t @ np.stack(w)
        f = sp.radial_frequency_grid(128, 128).ravel()
        hi = exponent[np.argmin(np.abs(f - 0.25))]
        lo = exponent[np.argmin(np.abs(f - 0.02))]
        assert hi - lo > 1.0

    def test_white_noise_needs_little_flow(self, bank128, ref128):
        _, _, t = sp.spectral_normalize(noise_image(8), bank128, ref128)
        assert np.max(np.abs(t)) < 0.2


class TestTransfer:
    def test_fixed_point(self, bank128, ref128):
        img = textured_image(9)
        feats = sp.decoupled_spectral_features(img, bank128, ref128)
        out, kernel = sp.spectral_transfer(img, feats, bank128, ref128)
        np.testing.assert_allclose(out, img, atol=1e-6)
        spatial = kernel.spatial_kernel()
        assert spatial.shape == (1, 1)
        assert spatial[0, 0] == pytest.approx(1.0, abs=1e-9)

    def test_output_mean_and_msv_exact(self, bank128, ref128):
        src = textured_image(10)
        tgt = sp.decoupled_spectral_features(textured_image(11) * 2 + 1,
                                             bank128, ref128)
        out, _ = sp.spectral_transfer(src, tgt, bank128, ref128)
        assert out.mean() == pytest.approx(tgt.f1, abs=1e-10)
        assert np.mean(out * out) == pytest.approx(tgt.f2 + tgt.f1 ** 2, abs=1e-10)

    def test_transferred_decoupled_features_match(self, bank128, ref128):
        src = textured_image(12)
        tgt = sp.decoupled_spectral_features(textured_image(13), bank128, ref128)
        out, _ = sp.spectral_transfer(src, tgt, bank128, ref128)
        got = sp.decoupled_spectral_features(out, bank128, ref128)
        np.testing.assert_allclose(got.band_vector(), tgt.band_vector(), atol=1e-6)


class TestDiffusionKernel:
    def gaussian_pair(self, sigma, shape=(256, 256), seed=14):
        img = textured_image(seed, shape)
        f = sp.radial_frequency_grid(shape[1], shape[0])
        g = np.exp(-2 * np.pi ** 2 * sigma ** 2 * f ** 2)
        blurred = np.fft.ifft2(np.fft.fft2(img) * g).real
        return img, blurred, g

    def test_identity_pair_gives_delta(self):
        img = textured_image(15)
        k = sp.extract_diffusion_kernel(img, img)
        assert k.gain == pytest.approx(1.0, abs=1e-9)
        assert np.max(np.abs(k.flow_times)) < 1e-9

    def test_band_msvs_reproduced(self):
        sharp, blurred, _ = self.gaussian_pair(2.0)
        bank = sp.build_filter_bank(256, 256)
        ref = sp.SpectralReference.for_bank(bank)
        k = sp.extract_diffusion_kernel(sharp, blurred)
        out = k.apply(sharp)
        want = sp.decoupled_spectral_features(blurred, bank, ref)
        got = sp.decoupled_spectral_features(out, bank, ref)
        np.testing.assert_allclose(got.band_vector(), want.band_vector(), atol=1e-6)

    def test_band_averaged_response_matches_gaussian(self):
        sharp, blurred, g = self.gaussian_pair(2.0)
        bank = sp.build_filter_bank(256, 256)
        k = sp.extract_diffusion_kernel(sharp, blurred)
        resp = k.frequency_response
        for w in bank.band_powers():
            w2 = w.reshape(resp.shape)
            avg_r = float((w2 * resp).sum() / w2.sum())
            avg_g = float((w2 * g).sum() / w2.sum())
            assert abs(avg_r - avg_g) <= 0.05 * avg_g

    def test_pair_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            sp.extract_diffusion_kernel(np.zeros((64, 64)), np.zeros((32, 32)))

    def test_spatial_kernel_even_symmetric(self):
        sharp, blurred, _ = self.gaussian_pair(1.0)
        s = sp.extract_diffusion_kernel(sharp, blurred).spatial_kernel()
        assert s.shape[0] % 2 == 1 and s.shape == s.T.shape
        np.testing.assert_allclose(s, s[::-1, ::-1], atol=1e-8)

    def test_spatial_kernel_keeps_energy(self):
        sharp, blurred, _ = self.gaussian_pair(2.0)
        k = sp.extract_diffusion_kernel(sharp, blurred)
        full = np.fft.fftshift(np.fft.ifft2(k.frequency_response).real)
        s = k.spatial_kernel()
        assert (s * s).sum() >= (1 - 1e-4) * (full * full).sum()


class TestApplyKernel:
    def test_delta_kernel_is_identity(self):
        img = np.random.default_rng(16).random((32, 32, 3))
        out = sp.apply_kernel_rgb(img, sp.EquivalentKernel.identity(32, 32))
        np.testing.assert_allclose(out, img, atol=1e-10)

    def test_constant_image_scaled_by_dc_gain(self):
        k = sp.EquivalentKernel(gain=0.5, flow_times=(0.3, 0.0, 0.0, -0.2),
                                width=32, height=32)
        img = np.full((32, 32, 3), 0.6)
        out = sp.apply_kernel_rgb(img, k)
        # DC gain is pinned to 1, so constants pass through
        np.testing.assert_allclose(out, img, atol=1e-12)

    def test_matches_direct_spatial_convolution(self):
        rng = np.random.default_rng(17)
        img = rng.random((32, 32))
        k = sp.EquivalentKernel(gain=0.9, flow_times=(0.5, -0.4, 0.2, 0.1),
                                width=32, height=32)
        out = k.apply(img)
        # oracle: circular convolution with the full inverse-transform kernel
        full = np.fft.ifft2(k.frequency_response).real
        oracle = np.zeros_like(img)
        for dy in range(32):
            for dx in range(32):
                if abs(full[dy, dx]) > 0:
                    oracle += full[dy, dx] * np.roll(np.roll(img, dy, 0), dx, 1)
        np.testing.assert_allclose(out, oracle, atol=1e-8)

    def test_wrong_shape(self):
        with pytest.raises(DimensionMismatch):
            sp.apply_kernel_rgb(np.zeros((16, 16)), sp.EquivalentKernel.identity())


class TestDecoupling:
    def test_mean_and_scale_perturbations_leave_band_features(self, bank128, ref128):
        # moving along the gradients of the mean and of the total MSV is a
        # shift and a scaling; the decoupled band features must not move
        img = textured_image(18)
        base = sp.decoupled_spectral_features(img, bank128, ref128)
        shifted = sp.decoupled_spectral_features(img + 0.37, bank128, ref128)
        scaled = sp.decoupled_spectral_features(img * 1.9, bank128, ref128)
        np.testing.assert_allclose(shifted.band_vector(), base.band_vector(), atol=1e-6)
        np.testing.assert_allclose(scaled.band_vector(), base.band_vector(), atol=1e-6)


class TestKernelText:
    def test_round_trip(self):
        k = np.random.default_rng(19).random((5, 7))
        back = sp.read_kernel_text(sp.write_kernel_text(k))
        np.testing.assert_array_equal(back, k)

    def test_corrupt_header(self):
        with pytest.raises(CorruptFile):
            sp.read_kernel_text("3 x\n1 2 3\n")

    def test_body_size_mismatch(self):
        with pytest.raises(CorruptFile):
            sp.read_kernel_text("3 2\n1 2 3\n")


class TestKernelSerialization:
    def test_dict_round_trip(self):
        k = sp.EquivalentKernel(gain=1.25, flow_times=(0.1, 0.2, -0.3, 0.4),
                                width=64, height=48)
        back = sp.EquivalentKernel.from_dict(k.to_dict())
        assert back == k

    def test_cross_grid_response_consistent(self):
        # same parametric kernel evaluated on two grids agrees radially
        k = sp.EquivalentKernel(gain=0.8, flow_times=(0.4, 0.1, -0.2, 0.3),
                                width=64, height=64)
        r64 = k.response_on(64, 64)
        r128 = k.response_on(128, 128)
        # frequency (1/8, 0) exists on both grids
        assert r64[0, 8] == pytest.approx(r128[0, 16], rel=1e-12)


class TestDegenerateInputs:
    def test_constant_image_fit_divergence(self, bank128, ref128):
        from decostyle.errors import FitDivergence
        with pytest.raises(FitDivergence):
            sp.decoupled_spectral_features(np.ones((128, 128)), bank128, ref128)


class TestCrossCoupling:
    def test_band_cross_perturbation_reported(self, bank128, ref128, capsys):
        # higher decoupled band features are only approximately decoupled
        # from one another; the residual coupling is measured and printed,
        # not asserted
        img = textured_image(30)
        base = sp.decoupled_spectral_features(img, bank128, ref128)
        w = bank128.band_powers()
        rows = []
        for j, wj in enumerate(w):
            bump = np.fft.ifft2(np.fft.fft2(img) *
                                (1.0 + 0.05 * wj.reshape(img.shape))).real
            feats = sp.decoupled_spectral_features(bump, bank128, ref128)
            rows.append(feats.band_vector() - base.band_vector())
        with capsys.disabled():
            print("\nband cross-perturbation (rows: perturbed band; "
                  "cols: feature shift):")
            for j, row in enumerate(rows):
                print(f"  B{j + 1 if j < 3 else '/L4'}: " +
                      " ".join(f"{v:+.2e}" for v in row))
        # only sanity: boosting a band raises its own decoupled feature
        # (cross terms are reported above, deliberately unasserted)
        for j, row in enumerate(rows):
            assert row[j] > 0
