import struct

import numpy as np
import pytest

from semlink import ppm_bytes, read_image, write_ppm
from semlink.images import read_farbfeld, read_ppm
from semlink.errors import DataError


def quantized(rng, shape):
    """A random image on the 1/255 grid, which PPM stores exactly."""
    return rng.integers(0, 256, size=shape).astype(np.float64) / 255.0


class TestPpmRoundtrip:
    def test_p6_roundtrip(self, tmp_path, rng):
        image = quantized(rng, (3, 5, 7))
        path = tmp_path / "img.ppm"
        write_ppm(path, image)
        np.testing.assert_allclose(read_ppm(path), image, atol=1e-12)

    def test_p5_roundtrip(self, tmp_path, rng):
        image = quantized(rng, (1, 4, 6))
        path = tmp_path / "img.pgm"
        write_ppm(path, image)
        back = read_ppm(path)
        assert back.shape == (1, 4, 6)
        np.testing.assert_allclose(back, image, atol=1e-12)

    def test_write_clips_out_of_range(self, tmp_path):
        image = np.array([[[-0.5, 1.5]]])
        path = tmp_path / "clip.pgm"
        write_ppm(path, image)
        back = read_ppm(path)
        np.testing.assert_array_equal(back[0, 0], [0.0, 1.0])

    def test_two_channel_rejected(self, tmp_path):
        with pytest.raises(DataError):
            ppm_bytes(np.zeros((2, 3, 3)))

    def test_header_layout(self):
        blob = ppm_bytes(np.zeros((3, 2, 4)))
        assert blob.startswith(b"P6\n4 2\n255\n")
        assert len(blob) == len(b"P6\n4 2\n255\n") + 3 * 2 * 4


class TestPpmParsing:
    def test_comments_and_whitespace(self, tmp_path):
        raw = b"P5 # magic\n# a comment line\n  2\t1 # dims\n255\n\x00\xff"
        path = tmp_path / "weird.pgm"
        path.write_bytes(raw)
        image = read_ppm(path)
        assert image.shape == (1, 1, 2)
        np.testing.assert_allclose(image[0, 0], [0.0, 1.0])

    def test_sixteen_bit_samples(self, tmp_path):
        payload = np.array([0, 32768, 65535], dtype=">u2").tobytes()
        path = tmp_path / "deep.pgm"
        path.write_bytes(b"P5\n3 1\n65535\n" + payload)
        image = read_ppm(path)
        np.testing.assert_allclose(image[0, 0], [0.0, 32768 / 65535, 1.0])

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "short.pgm"
        path.write_bytes(b"P5\n4 4\n255\n\x00\x01")
        with pytest.raises(DataError):
            read_ppm(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "header.pgm"
        path.write_bytes(b"P5\n4")
        with pytest.raises(DataError):
            read_ppm(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.ppm"
        path.write_bytes(b"P3\n1 1\n255\n0 0 0")
        with pytest.raises(DataError):
            read_ppm(path)

    def test_nonnumeric_dimension(self, tmp_path):
        path = tmp_path / "dims.pgm"
        path.write_bytes(b"P5\nwide 1\n255\n\x00")
        with pytest.raises(DataError):
            read_ppm(path)

    def test_zero_dimension(self, tmp_path):
        path = tmp_path / "zero.pgm"
        path.write_bytes(b"P5\n0 1\n255\n")
        with pytest.raises(DataError):
            read_ppm(path)


class TestFarbfeld:
    @staticmethod
    def _blob(width, height, samples):
        head = b"farbfeld" + struct.pack(">II", width, height)
        return head + np.asarray(samples, dtype=">u2").tobytes()

    def test_crafted_pixels(self, tmp_path):
        # one red and one half-gray pixel, opaque alpha
        samples = [65535, 0, 0, 65535, 32768, 32768, 32768, 65535]
        path = tmp_path / "img.ff"
        path.write_bytes(self._blob(2, 1, samples))
        image = read_farbfeld(path)
        assert image.shape == (3, 1, 2)
        np.testing.assert_allclose(image[:, 0, 0], [1.0, 0.0, 0.0])
        np.testing.assert_allclose(image[:, 0, 1], np.full(3, 32768 / 65535))

    def test_alpha_dropped(self, tmp_path):
        samples = [100, 200, 300, 0]
        path = tmp_path / "alpha.ff"
        path.write_bytes(self._blob(1, 1, samples))
        image = read_farbfeld(path)
        assert image.shape == (3, 1, 1)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.ff"
        path.write_bytes(b"notmagic" + struct.pack(">II", 1, 1) + b"\x00" * 8)
        with pytest.raises(DataError):
            read_farbfeld(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / "short.ff"
        path.write_bytes(self._blob(2, 2, [0, 0, 0, 0]))
        with pytest.raises(DataError):
            read_farbfeld(path)


class TestDispatch:
    def test_dispatch_ppm_and_farbfeld(self, tmp_path, rng):
        ppm = tmp_path / "a.ppm"
        write_ppm(ppm, quantized(rng, (3, 2, 2)))
        ff = tmp_path / "b.ff"
        ff.write_bytes(
            b"farbfeld" + struct.pack(">II", 1, 1) + np.zeros(4, dtype=">u2").tobytes()
        )
        assert read_image(ppm).shape == (3, 2, 2)
        assert read_image(ff).shape == (3, 1, 1)

    def test_unknown_format(self, tmp_path):
        path = tmp_path / "mystery.bin"
        path.write_bytes(b"GIF89a whatever")
        with pytest.raises(DataError):
            read_image(path)
