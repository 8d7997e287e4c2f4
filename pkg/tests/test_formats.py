import numpy as np
import pytest

from rigidstyle.formats import (
    FormatError,
    read_ft1,
    read_ft1_header,
    read_image,
    write_ft1,
    write_png,
)


class TestFt1:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        arr = rng.standard_normal((5, 3, 4)).astype(np.float32)
        path = tmp_path / "t.ft1"
        write_ft1(path, arr)
        back = read_ft1(path)
        assert back.dtype == np.float32
        assert np.array_equal(back, arr)
        write_ft1(tmp_path / "t2.ft1", back)
        assert (tmp_path / "t.ft1").read_bytes() == (tmp_path / "t2.ft1").read_bytes()

    def test_header_layout(self, tmp_path):
        path = tmp_path / "t.ft1"
        write_ft1(path, np.zeros((2, 3), dtype=np.float32))
        blob = path.read_bytes()
        assert blob[:4] == b"FT1\x00"
        assert blob[4] == 1 and blob[5] == 1 and blob[6] == 2 and blob[7] == 0
        dims, offset = read_ft1_header(blob)
        assert dims == (2, 3) and offset == 16
        assert len(blob) == 16 + 4 * 6

    def test_rejects_bad_magic(self):
        with pytest.raises(FormatError):
            read_ft1_header(b"NOPE" + bytes(4))

    def test_rejects_unknown_version(self, tmp_path):
        path = tmp_path / "t.ft1"
        write_ft1(path, np.zeros(2, dtype=np.float32))
        blob = bytearray(path.read_bytes())
        blob[4] = 9
        with pytest.raises(FormatError):
            read_ft1_header(bytes(blob))

    def test_rejects_unknown_dtype(self, tmp_path):
        path = tmp_path / "t.ft1"
        write_ft1(path, np.zeros(2, dtype=np.float32))
        blob = bytearray(path.read_bytes())
        blob[5] = 7
        with pytest.raises(FormatError):
            read_ft1_header(bytes(blob))

    def test_rejects_truncated_payload(self, tmp_path):
        path = tmp_path / "t.ft1"
        write_ft1(path, np.zeros(4, dtype=np.float32))
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(FormatError):
            read_ft1(path)


class TestImages:
    def test_png_round_trip_within_quantization(self, tmp_path):
        rng = np.random.default_rng(1)
        img = rng.random((9, 7, 3))
        path = tmp_path / "x.png"
        write_png(path, img)
        back = read_image(path)
        assert back.shape == img.shape
        assert np.max(np.abs(back - img)) <= 1.0 / 255.0 + 1e-6

    def test_quantization_rounds_half_up(self, tmp_path):
        # 0.5/255 quantizes to 1 (ties away from zero)
        img = np.full((1, 1, 3), 0.5 / 255.0)
        path = tmp_path / "x.png"
        write_png(path, img)
        assert read_image(path).ravel() == pytest.approx([1 / 255] * 3)

    def test_ppm_p6_read(self, tmp_path):
        path = tmp_path / "x.ppm"
        pixels = bytes([255, 0, 0, 0, 128, 0])
        path.write_bytes(b"P6\n2 1\n255\n" + pixels)
        img = read_image(path)
        assert img.shape == (1, 2, 3)
        assert img[0, 0] == pytest.approx([1.0, 0.0, 0.0])
        assert img[0, 1] == pytest.approx([0.0, 128 / 255, 0.0])

    def test_alpha_dropped(self, tmp_path):
        from PIL import Image
        rgba = np.zeros((2, 2, 4), dtype=np.uint8)
        rgba[..., 0] = 200
        rgba[..., 3] = 10
        path = tmp_path / "a.png"
        Image.fromarray(rgba, "RGBA").save(path)
        img = read_image(path)
        assert img.shape == (2, 2, 3)
        assert img[..., 0] == pytest.approx(np.full((2, 2), 200 / 255))

    def test_unreadable_image(self, tmp_path):
        path = tmp_path / "bad.png"
        path.write_bytes(b"not an image")
        with pytest.raises(FormatError):
            read_image(path)

    def test_write_is_atomic_no_leftover_temp(self, tmp_path):
        write_png(tmp_path / "x.png", np.zeros((2, 2, 3)))
        leftovers = [p for p in tmp_path.iterdir() if p.name.startswith(".tmp-")]
        assert leftovers == []
