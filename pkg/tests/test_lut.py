"""LUT baking fidelity, trilinear interpolation and .cube round trips."""

import numpy as np
import pytest

from decostyle import lut as lut_mod
from decostyle import pipeline
from decostyle.errors import CubeParseError, SizeMismatch
from conftest import synth_photo


def psnr(a, b):
    mse = float(np.mean((a - b) ** 2))
    return float("inf") if mse == 0 else -10.0 * np.log10(mse)


def quantize8(img):
    return np.floor(np.clip(img, 0, 1) * 255 + 0.5) / 255


@pytest.fixture(scope="module")
def baked():
    src = synth_photo(1)
    tgt = synth_photo(2, cast=np.array([1.1, 0.95, 0.8]))
    out, recipe = pipeline.transfer_style(src, tgt)
    return src, out, recipe, lut_mod.bake_lut(recipe)


class TestIdentity:
    def test_identity_lut_maps_nodes_to_themselves(self):
        lut = lut_mod.Lut3D.identity(33)
        np.testing.assert_array_equal(lut.entries, lut_mod._lattice(33))

    def test_identity_recipe_bakes_identity_exactly(self):
        lut = lut_mod.bake_lut(pipeline.TransferRecipe.identity())
        np.testing.assert_array_equal(lut.entries, lut_mod._lattice(33))

    def test_identity_lut_leaves_images(self):
        img = synth_photo(3)
        out = lut_mod.apply_lut(img, lut_mod.Lut3D.identity())
        assert np.max(np.abs(out - img)) < 1e-7


class TestInterpolation:
    def test_exact_at_lattice_nodes(self, baked):
        *_, lut = baked
        nodes = lut_mod._lattice(lut.size)
        out = lut_mod.apply_lut(nodes.reshape(-1, 1, 3), lut).reshape(-1, 3)
        # float32 interpolation path against float64 entries
        assert np.max(np.abs(out - lut.entries)) < 1e-6

    def test_matches_handrolled_eight_corner_oracle(self, baked):
        *_, lut = baked
        rng = np.random.default_rng(7)
        colors = rng.random((256, 3))
        got = lut_mod.apply_lut(colors.reshape(-1, 1, 3), lut).reshape(-1, 3)
        grid = lut.grid()
        s = lut.size
        for c, o in zip(colors, got):
            pos = c * (s - 1)
            i = np.minimum(pos.astype(int), s - 2)
            f = pos - i
            acc = np.zeros(3)
            for dr in (0, 1):
                for dg in (0, 1):
                    for db in (0, 1):
                        w = ((f[0] if dr else 1 - f[0]) *
                             (f[1] if dg else 1 - f[1]) *
                             (f[2] if db else 1 - f[2]))
                        acc += w * grid[i[2] + db, i[1] + dg, i[0] + dr]
            np.testing.assert_allclose(o, acc, atol=1e-6)

    def test_out_of_range_inputs_clamp_to_hull(self, baked):
        *_, lut = baked
        wild = np.array([[[-0.5, 0.5, 1.7]]])
        inside = np.array([[[0.0, 0.5, 1.0]]])
        np.testing.assert_array_equal(lut_mod.apply_lut(wild, lut),
                                      lut_mod.apply_lut(inside, lut))


class TestBakeFidelity:
    def test_lut_matches_direct_pipeline(self, baked):
        src, direct, _, lut = baked
        src8 = quantize8(src)
        via_lut = lut_mod.apply_lut(src8, lut)
        direct8 = quantize8(direct)
        via8 = quantize8(via_lut)
        assert np.max(np.abs(via8 - direct8)) < 2.0 / 255
        assert psnr(via8, direct8) > 45.0

    def test_lut_on_similar_second_frame(self, baked):
        _, _, recipe, lut = baked
        frame = synth_photo(4)  # statistically similar synthetic frame
        direct = recipe.apply(frame)
        via_lut = lut_mod.apply_lut(quantize8(frame), lut)
        assert psnr(quantize8(via_lut), quantize8(direct)) > 40.0

    def test_monotone_along_neutral_axis(self, baked):
        *_, lut = baked
        grays = np.linspace(0, 1, 1024).reshape(-1, 1, 1) * np.ones(3)
        out = lut_mod.apply_lut(grays, lut)[:, 0, :]
        luma = out @ np.array([0.2126, 0.7152, 0.0722])
        assert np.all(np.diff(luma) > -1e-9)


class TestCubeFormat:
    def test_identity_two_cube_text(self):
        data = lut_mod.write_cube(lut_mod.Lut3D.identity(2)).decode()
        lines = [ln for ln in data.splitlines() if ln]
        assert lines[0] == "LUT_3D_SIZE 2"
        assert lines[1] == "0.000000 0.000000 0.000000"
        assert lines[-1] == "1.000000 1.000000 1.000000"
        assert len(lines) == 1 + 8

    def test_round_trip_within_printed_precision(self, baked):
        *_, lut = baked
        back = lut_mod.read_cube(lut_mod.write_cube(lut))
        assert back.size == lut.size
        np.testing.assert_allclose(back.entries, np.clip(lut.entries, 0, 1),
                                   atol=1e-6 / 2)

    def test_write_read_write_is_byte_stable(self, baked):
        *_, lut = baked
        first = lut_mod.write_cube(lut)
        second = lut_mod.write_cube(lut_mod.read_cube(first))
        assert first == second

    def test_title_round_trip(self):
        data = lut_mod.write_cube(lut_mod.Lut3D.identity(2), title="look 01")
        assert b'TITLE "look 01"' in data
        assert lut_mod.read_cube(data).title == "look 01"

    def test_parser_tolerates_comments_and_domain(self):
        text = ("# comment\n\nTITLE \"x\"\nDOMAIN_MIN 0 0 0\n"
                "DOMAIN_MAX 1 1 1\nLUT_3D_SIZE 2\n" +
                "\n".join(["0 0 0"] * 8) + "\n")
        assert lut_mod.read_cube(text).size == 2

    def test_size_mismatch(self):
        text = "LUT_3D_SIZE 33\n" + "\n".join(["0 0 0"] * 100)
        with pytest.raises(SizeMismatch):
            lut_mod.read_cube(text)

    def test_parse_error_carries_line_number(self):
        with pytest.raises(CubeParseError, match="line 2"):
            lut_mod.read_cube("LUT_3D_SIZE 2\n0 0\n" + "\n".join(["0 0 0"] * 7))

    def test_missing_size(self):
        with pytest.raises(CubeParseError):
            lut_mod.read_cube("0 0 0\n")

    def test_out_of_range_clamps_with_warning(self):
        lut = lut_mod.Lut3D(size=2, entries=np.full((8, 3), 1.5))
        with pytest.warns(UserWarning, match="clamped"):
            data = lut_mod.write_cube(lut)
        assert lut_mod.read_cube(data).entries.max() == 1.0
