"""Descriptive (SEL level 2) feature extractors.

Summaries of sequences (moments, quantiles, exponential smoothing), raster
color histograms with their moment features, and unigram TF-IDF weights for
token corpora.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateVarianceError,
    EmptyCorpusError,
    EmptyInputError,
    InvalidAlphaError,
    InvalidProbabilityError,
    TooShortError,
)


@dataclass(frozen=True)
class MomentSummary:
    """First four moments of a sample.

    ``variance`` uses the n-1 denominator.  ``skewness`` is g1 = m3/m2^1.5
    and ``excess_kurtosis`` is g2 = m4/m2^2 - 3 with population central
    moments; both are undefined for a zero-variance sample, where accessing
    them raises :class:`DegenerateVarianceError`.
    """

    mean: float
    variance: float
    _skewness: float | None = field(repr=False, default=None)
    _excess_kurtosis: float | None = field(repr=False, default=None)

    @property
    def skewness(self) -> float:
        if self._skewness is None:
            raise DegenerateVarianceError("skewness is undefined for a constant sample")
        return self._skewness

    @property
    def excess_kurtosis(self) -> float:
        if self._excess_kurtosis is None:
            raise DegenerateVarianceError("kurtosis is undefined for a constant sample")
        return self._excess_kurtosis

    @property
    def has_higher_moments(self) -> bool:
        return self._skewness is not None


def moments(xs) -> MomentSummary:
    """Mean, sample variance and the standardized third/fourth moments."""
    arr = np.asarray(xs, dtype=np.float64)
    n = arr.shape[0]
    if n < 2:
        raise TooShortError("moments need at least two values")
    mean = float(arr.mean())
    d = arr - mean
    m2 = float((d * d).mean())
    variance = float((d * d).sum()) / (n - 1)
    if m2 == 0.0:
        return MomentSummary(mean, 0.0)
    m3 = float((d * d * d).mean())
    m4 = float((d * d * d * d).mean())
    return MomentSummary(mean, variance, m3 / m2**1.5, m4 / (m2 * m2) - 3.0)


def quantiles(xs, probs) -> np.ndarray:
    """Linear-interpolation quantiles: position h = (n-1)p between order
    statistics."""
    arr = np.asarray(xs, dtype=np.float64)
    if arr.shape[0] == 0:
        raise EmptyInputError("quantiles of an empty vector")
    ps = np.atleast_1d(np.asarray(probs, dtype=np.float64))
    if ps.size and (np.any(ps < 0.0) or np.any(ps > 1.0)):
        raise InvalidProbabilityError("probabilities must lie in [0, 1]")
    if np.any(np.diff(ps) < 0.0):
        raise InvalidProbabilityError("probabilities must be sorted ascending")
    srt = np.sort(arr)
    h = (arr.shape[0] - 1) * ps
    lo = np.floor(h).astype(np.int64)
    hi = np.ceil(h).astype(np.int64)
    return srt[lo] + (h - lo) * (srt[hi] - srt[lo])


def ewma(xs, alpha: float) -> np.ndarray:
    """Exponentially weighted moving average path, seeded with the first
    observation: s_t = alpha * x_t + (1 - alpha) * s_{t-1}."""
    if not 0.0 < alpha <= 1.0:
        raise InvalidAlphaError("alpha must lie in (0, 1]")
    arr = np.asarray(xs, dtype=np.float64)
    if arr.shape[0] == 0:
        raise EmptyInputError("ewma of an empty vector")
    out = np.empty_like(arr)
    s = arr[0]
    out[0] = s
    for t in range(1, arr.shape[0]):
        s = alpha * arr[t] + (1.0 - alpha) * s
        out[t] = s
    return out


def window_to_alpha(window: int) -> float:
    """Span convention mapping a window length to a smoothing factor,
    alpha = 2 / (window + 1)."""
    if window < 1:
        raise InvalidAlphaError("window must be at least 1")
    return 2.0 / (window + 1)


class Channel(Enum):
    GRAY = "gray"
    RED = "red"
    GREEN = "green"
    BLUE = "blue"


@dataclass(frozen=True)
class ColorHistogram:
    """256-bin intensity histogram of one channel; bin index equals the
    8-bit intensity."""

    channel: Channel
    bins: np.ndarray

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.int64)
        if bins.shape != (256,) or np.any(bins < 0):
            raise ValueError("histogram needs 256 non-negative counts")
        bins = bins.copy()
        bins.setflags(write=False)
        object.__setattr__(self, "bins", bins)

    @property
    def total(self) -> int:
        return int(self.bins.sum())


def color_histogram(img) -> list[ColorHistogram]:
    """Per-channel intensity histograms of an 8-bit raster image: one for
    grayscale input, three (R, G, B) for color."""
    channels = (
        [Channel.GRAY] if img.channels == 1 else [Channel.RED, Channel.GREEN, Channel.BLUE]
    )
    out = []
    for c, name in enumerate(channels):
        counts = np.bincount(img.channel(c), minlength=256)
        out.append(ColorHistogram(name, counts))
    return out


def histogram_moments(hist: ColorHistogram) -> MomentSummary:
    """Moments of the intensity distribution a histogram encodes.

    Matches ``moments`` applied to the expanded per-pixel intensity vector
    (same n-1 variance convention).
    """
    counts = hist.bins.astype(np.float64)
    n = float(counts.sum())
    if n < 2:
        raise TooShortError("histogram must cover at least two pixels")
    values = np.arange(256, dtype=np.float64)
    mean = float((counts * values).sum()) / n
    d = values - mean
    m2 = float((counts * d * d).sum()) / n
    variance = float((counts * d * d).sum()) / (n - 1.0)
    if m2 == 0.0:
        return MomentSummary(mean, 0.0)
    m3 = float((counts * d * d * d).sum()) / n
    m4 = float((counts * d * d * d * d).sum()) / n
    return MomentSummary(mean, variance, m3 / m2**1.5, m4 / (m2 * m2) - 3.0)


@dataclass(frozen=True)
class TfidfMatrix:
    """Per-document tf-idf weights over a lexicographically sorted
    vocabulary."""

    vocabulary: tuple[str, ...]
    rows: np.ndarray


def tfidf(corpus: Sequence[Sequence[str]]) -> TfidfMatrix:
    """Raw term counts weighted by smoothed inverse document frequency.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1, so a term present in every
    document keeps its raw count and nothing divides by zero.
    """
    if not corpus or all(len(doc) == 0 for doc in corpus):
        raise EmptyCorpusError("corpus must contain at least one non-empty document")
    vocab = sorted({term for doc in corpus for term in doc})
    index = {term: j for j, term in enumerate(vocab)}
    n_docs = len(corpus)
    counts = np.zeros((n_docs, len(vocab)), dtype=np.float64)
    df = np.zeros(len(vocab), dtype=np.float64)
    for i, doc in enumerate(corpus):
        for term in doc:
            counts[i, index[term]] += 1.0
        for j in set(index[term] for term in doc):
            df[j] += 1.0
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    return TfidfMatrix(tuple(vocab), counts * idf)
