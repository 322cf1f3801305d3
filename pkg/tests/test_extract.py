import math

import numpy as np
import pytest

from selkit.errors import (
    DegenerateVarianceError,
    EmptyCorpusError,
    EmptyInputError,
    InvalidAlphaError,
    InvalidProbabilityError,
    TooShortError,
)
from selkit.extract import (
    Channel,
    ColorHistogram,
    color_histogram,
    ewma,
    histogram_moments,
    moments,
    quantiles,
    tfidf,
    window_to_alpha,
)
from selkit.pnm import RasterImage
from selkit.rng import RngStream


class TestMoments:
    def test_hand_values(self):
        s = moments([1, 2, 3, 4])
        assert s.mean == 2.5
        assert abs(s.variance - 5.0 / 3.0) < 1e-12
        assert abs(s.skewness) < 1e-12
        # m2 = 1.25, m4 = 2.5625 -> 2.5625 / 1.5625 - 3 = -1.36
        assert abs(s.excess_kurtosis - (-1.36)) < 1e-12

    def test_constant_sample(self):
        s = moments([7.0, 7.0, 7.0])
        assert s.mean == 7.0
        assert s.variance == 0.0
        assert not s.has_higher_moments
        with pytest.raises(DegenerateVarianceError):
            s.skewness
        with pytest.raises(DegenerateVarianceError):
            s.excess_kurtosis

    def test_too_short(self):
        with pytest.raises(TooShortError):
            moments([1.0])

    def test_affine_properties(self):
        stream = RngStream(100, 0)
        for rep in range(200):
            n = 5 + int(stream.random(1)[0] * 40)
            xs = stream.normal(n, 0.0, 2.0) + stream.cauchy(n, 0.0, 0.1)
            a = 0.5 + float(stream.random(1)[0]) * 3.0
            b = float(stream.normal(1, 0.0, 5.0)[0])
            s = moments(xs)
            t = moments(a * xs + b)
            assert abs(t.mean - (a * s.mean + b)) < 1e-10 * max(1, abs(s.mean))
            assert abs(t.skewness - s.skewness) < 1e-10
            assert abs(t.excess_kurtosis - s.excess_kurtosis) < 1e-10
            flipped = moments(-xs)
            assert abs(flipped.skewness + s.skewness) < 1e-10

    def test_permutation_invariance(self):
        xs = RngStream(4, 0).normal(31)
        perm = RngStream(4, 1).permutation(31)
        a, b = moments(xs), moments(xs[perm])
        assert abs(a.mean - b.mean) < 1e-12
        assert abs(a.variance - b.variance) < 1e-12


class TestQuantiles:
    def test_even_median(self):
        assert quantiles([1, 2, 3, 4], [0.5])[0] == 2.5

    def test_boundaries(self):
        xs = [9.0, -2.0, 4.5]
        assert quantiles(xs, [0.0])[0] == -2.0
        assert quantiles(xs, [1.0])[0] == 9.0

    def test_interpolation(self):
        # h = (3 - 1) * 0.25 = 0.5 between 10 and 20
        assert quantiles([10, 20, 30], [0.25])[0] == 15.0

    def test_empty_input(self):
        with pytest.raises(EmptyInputError):
            quantiles([], [0.5])

    def test_bad_probabilities(self):
        with pytest.raises(InvalidProbabilityError):
            quantiles([1, 2], [1.5])
        with pytest.raises(InvalidProbabilityError):
            quantiles([1, 2], [0.9, 0.1])


class TestEwma:
    def test_constant_fixed_point(self):
        for alpha in (0.1, 0.5, 1.0):
            assert np.allclose(ewma([5, 5, 5], alpha), [5, 5, 5])

    def test_alpha_one_is_identity(self):
        xs = [3.0, -1.0, 2.0]
        assert np.array_equal(ewma(xs, 1.0), xs)

    def test_one_step(self):
        assert np.allclose(ewma([0.0, 1.0], 0.5), [0.0, 0.5])

    def test_bounded_by_input_range(self):
        stream = RngStream(8, 0)
        for rep in range(50):
            xs = stream.normal(30, 0.0, 3.0)
            alpha = 0.05 + 0.95 * float(stream.random(1)[0])
            path = ewma(xs, alpha)
            assert path.min() >= xs.min() - 1e-12
            assert path.max() <= xs.max() + 1e-12

    def test_invalid_alpha(self):
        for alpha in (0.0, -0.5, 1.5):
            with pytest.raises(InvalidAlphaError):
                ewma([1.0, 2.0], alpha)

    def test_window_mapping(self):
        assert window_to_alpha(1) == 1.0
        assert window_to_alpha(7) == 0.25
        assert abs(window_to_alpha(28) - 2.0 / 29.0) < 1e-15


class TestColorHistogram:
    def test_all_black_gray(self):
        img = RasterImage(2, 2, 1, np.zeros(4, dtype=np.uint8))
        (hist,) = color_histogram(img)
        assert hist.channel is Channel.GRAY
        assert hist.bins[0] == 4
        assert hist.bins[1:].sum() == 0

    def test_bin_sum_conservation(self):
        stream = RngStream(12, 0)
        pix = (stream.random(5 * 7 * 3) * 256).astype(np.uint8)
        img = RasterImage(5, 7, 3, pix)
        for hist in color_histogram(img):
            assert hist.total == 35

    def test_rgb_direct_count(self):
        img = RasterImage(2, 1, 3, np.array([255, 0, 0, 0, 255, 0], dtype=np.uint8))
        red, green, blue = color_histogram(img)
        assert red.bins[0] == 1 and red.bins[255] == 1
        assert green.bins[0] == 1 and green.bins[255] == 1
        assert blue.bins[0] == 2


class TestHistogramMoments:
    def test_all_black(self):
        hist = ColorHistogram(Channel.GRAY, np.eye(256, dtype=np.int64)[0] * 4)
        s = histogram_moments(hist)
        assert s.mean == 0.0
        with pytest.raises(DegenerateVarianceError):
            s.skewness

    def test_symmetric_two_bins(self):
        bins = np.zeros(256, dtype=np.int64)
        bins[0] = 2
        bins[255] = 2
        s = histogram_moments(ColorHistogram(Channel.GRAY, bins))
        assert s.mean == 127.5
        assert abs(s.skewness) < 1e-12

    def test_matches_expanded_pixels(self):
        stream = RngStream(13, 0)
        for rep in range(50):
            w = 2 + int(stream.random(1)[0] * 6)
            h = 2 + int(stream.random(1)[0] * 6)
            pix = (stream.random(w * h) * 256).astype(np.uint8)
            img = RasterImage(w, h, 1, pix)
            (hist,) = color_histogram(img)
            got = histogram_moments(hist)
            want = moments(pix.astype(np.float64))
            assert abs(got.mean - want.mean) < 1e-9
            assert abs(got.variance - want.variance) < 1e-9
            if want.has_higher_moments:
                assert abs(got.skewness - want.skewness) < 1e-9
                assert abs(got.excess_kurtosis - want.excess_kurtosis) < 1e-9


class TestTfidf:
    def test_absent_term_has_zero_weight(self):
        m = tfidf([["cat", "dog"], ["bird"]])
        j = m.vocabulary.index("bird")
        assert m.rows[0][j] == 0.0

    def test_ubiquitous_term_keeps_raw_count(self):
        m = tfidf([["cat", "cat"], ["cat"]])
        j = m.vocabulary.index("cat")
        assert m.rows[0][j] == 2.0
        assert m.rows[1][j] == 1.0

    def test_smoothing_value(self):
        m = tfidf([["rare"], ["other"]])
        j = m.vocabulary.index("rare")
        assert abs(m.rows[0][j] - (math.log(1.5) + 1.0)) < 1e-12

    def test_vocabulary_sorted(self):
        m = tfidf([["b", "a"], ["c"]])
        assert m.vocabulary == ("a", "b", "c")

    def test_monotone_in_count(self):
        a = tfidf([["x"], ["y"]])
        b = tfidf([["x", "x"], ["y"]])
        j = a.vocabulary.index("x")
        assert b.rows[0][j] > a.rows[0][j]
        assert (a.rows >= 0).all()

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpusError):
            tfidf([])
        with pytest.raises(EmptyCorpusError):
            tfidf([[], []])
