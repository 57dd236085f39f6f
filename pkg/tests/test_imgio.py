"""Raster round trips, quantization bounds and crop geometry."""

import numpy as np
import pytest

from decostyle import imgio
from decostyle.errors import CorruptFile, OutOfBounds, UnsupportedFormat


@pytest.fixture
def img():
    return np.random.default_rng(0).random((24, 33, 3))


class TestPng:
    def test_16bit_round_trip(self, img):
        back = imgio.load_image(imgio.save_image(img, "png"))
        assert np.max(np.abs(back - img)) <= 0.5 / 65535 + 1e-12

    def test_8bit_round_trip_warns(self, img):
        data = imgio.save_image(img, "png8")
        with pytest.warns(UserWarning, match="band"):
            back = imgio.load_image(data)
        assert np.max(np.abs(back - img)) <= 0.5 / 255 + 1e-12

    def test_truncated(self, img):
        data = imgio.save_image(img, "png")
        with pytest.raises(CorruptFile):
            imgio.load_image(data[:40])


class TestPpm:
    def test_round_trip(self, img):
        back = imgio.load_image(imgio.save_image(img, "ppm"))
        assert np.max(np.abs(back - img)) <= 0.5 / 65535 + 1e-12

    def test_quantization_is_round_half_up(self):
        # 0.5/65535 quantizes up to exactly 1
        one = np.full((8, 8, 3), 0.5 / 65535)
        data = imgio.save_image(one, "ppm")
        back = imgio.load_image(data)
        np.testing.assert_allclose(back, 1.0 / 65535)

    def test_truncated_body(self, img):
        data = imgio.save_image(img, "ppm")
        with pytest.raises(CorruptFile):
            imgio.load_image(data[: len(data) // 2])

    def test_comment_in_header(self):
        data = b"P6\n# a comment\n2 2\n255\n" + bytes(12)
        with pytest.warns(UserWarning):
            back = imgio.load_image(data)
        assert back.shape == (2, 2, 3)


class TestPfm:
    def test_bit_exact_round_trip(self, img):
        img32 = img.astype(np.float32).astype(np.float64)
        back = imgio.load_image(imgio.save_image(img32, "pfm"))
        np.testing.assert_array_equal(back, img32)

    def test_out_of_range_preserved(self):
        wild = np.array([[[-0.5, 2.0, 1e6]]], dtype=np.float64)
        back = imgio.load_image(imgio.save_image(wild, "pfm"))
        np.testing.assert_array_equal(back, wild.astype(np.float32))

    def test_truncated(self, img):
        data = imgio.save_image(img, "pfm")
        with pytest.raises(CorruptFile):
            imgio.load_image(data[:30])


class TestFormats:
    def test_unknown_magic(self):
        with pytest.raises(UnsupportedFormat):
            imgio.load_image(b"GIF89a....")

    def test_unknown_encode_format(self, img):
        with pytest.raises(UnsupportedFormat):
            imgio.save_image(img, "jpeg")

    def test_format_for_path(self):
        assert imgio.format_for_path("out.PNG") == "png"
        with pytest.raises(UnsupportedFormat):
            imgio.format_for_path("out.tiff")


class TestCrop:
    def test_view_statistics_match_copy(self, img):
        rect = imgio.CropRect(3, 2, 16, 12)
        view = imgio.crop_view(img, rect)
        materialized = img[2:14, 3:19].copy()
        assert view.mean() == materialized.mean()
        assert np.shares_memory(view, img)

    def test_half_black_half_white(self):
        img = np.zeros((16, 32, 3))
        img[:, 16:] = 1.0
        rect = imgio.CropRect(16, 0, 16, 16)
        assert imgio.crop_view(img, rect).mean() == 1.0

    def test_out_of_bounds(self, img):
        with pytest.raises(OutOfBounds):
            imgio.crop_view(img, imgio.CropRect(30, 0, 16, 16))

    def test_too_small(self, img):
        with pytest.raises(OutOfBounds):
            imgio.crop_view(img, imgio.CropRect(0, 0, 4, 16))

    def test_parse(self):
        assert imgio.CropRect.parse("1,2,30,40") == imgio.CropRect(1, 2, 30, 40)
        with pytest.raises(ValueError):
            imgio.CropRect.parse("1,2,3")
