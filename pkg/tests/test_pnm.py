import numpy as np
import pytest

from selkit.errors import (
    MaxvalTooLargeError,
    MissingFileError,
    TruncatedPayloadError,
    UnsupportedFormatError,
)
from selkit.pnm import RasterImage, read_pnm, write_pnm
from selkit.rng import RngStream


def test_p5_all_zero(tmp_path):
    path = tmp_path / "z.pgm"
    path.write_bytes(b"P5\n2 2\n255\n" + bytes(4))
    img = read_pnm(path)
    assert (img.width, img.height, img.channels) == (2, 2, 1)
    assert np.array_equal(img.pixels, np.zeros(4, dtype=np.uint8))


def test_ascii_and_binary_decode_identically(tmp_path):
    pixels = [10, 20, 30, 40, 50, 60]
    ascii_path = tmp_path / "a.ppm"
    ascii_path.write_text("P3\n2 1\n255\n" + " ".join(str(v) for v in pixels) + "\n")
    binary_path = tmp_path / "b.ppm"
    binary_path.write_bytes(b"P6\n2 1\n255\n" + bytes(pixels))
    a = read_pnm(ascii_path)
    b = read_pnm(binary_path)
    assert (a.width, a.height, a.channels) == (b.width, b.height, b.channels)
    assert np.array_equal(a.pixels, b.pixels)


def test_p2_with_comments(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_text("P2 # magic\n# a comment line\n2 2\n# another\n15\n0 5\n10 15\n")
    img = read_pnm(path)
    assert np.array_equal(img.pixels, np.array([0, 5, 10, 15], dtype=np.uint8))


def test_maxval_too_large(tmp_path):
    path = tmp_path / "m.pgm"
    path.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
    with pytest.raises(MaxvalTooLargeError):
        read_pnm(path)


def test_unsupported_magic(tmp_path):
    path = tmp_path / "x.pbm"
    path.write_bytes(b"P1\n2 2\n0 1 1 0\n")
    with pytest.raises(UnsupportedFormatError):
        read_pnm(path)


def test_truncated_binary_payload(tmp_path):
    path = tmp_path / "t.pgm"
    path.write_bytes(b"P5\n4 4\n255\n" + bytes(3))
    with pytest.raises(TruncatedPayloadError):
        read_pnm(path)


def test_truncated_ascii_payload(tmp_path):
    path = tmp_path / "t.pgm"
    path.write_text("P2\n2 2\n255\n1 2 3\n")
    with pytest.raises(TruncatedPayloadError):
        read_pnm(path)


def test_binary_sample_above_maxval(tmp_path):
    path = tmp_path / "s.pgm"
    path.write_bytes(b"P5\n2 1\n15\n" + bytes([3, 99]))
    with pytest.raises(UnsupportedFormatError):
        read_pnm(path)


def test_ascii_sample_above_maxval(tmp_path):
    path = tmp_path / "s.pgm"
    path.write_text("P2\n2 1\n15\n3 99\n")
    with pytest.raises(UnsupportedFormatError):
        read_pnm(path)


def test_missing_file(tmp_path):
    with pytest.raises(MissingFileError):
        read_pnm(tmp_path / "ghost.pgm")


def test_binary_round_trip_byte_exact(tmp_path):
    stream = RngStream(70, 0)
    for channels, suffix in ((1, "pgm"), (3, "ppm")):
        pix = (stream.random(6 * 4 * channels) * 256).astype(np.uint8)
        img = RasterImage(6, 4, channels, pix)
        first = tmp_path / f"one.{suffix}"
        write_pnm(img, first)
        again = tmp_path / f"two.{suffix}"
        write_pnm(read_pnm(first), again)
        assert first.read_bytes() == again.read_bytes()
