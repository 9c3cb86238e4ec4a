"""Trace post-processing primitives: the moving-average smoother applied to
plotted force data and the band-energy measure used to quantify
high-frequency motion content.
"""

from __future__ import annotations

import numpy as np

__all__ = ["smooth_arma", "band_energy"]


def smooth_arma(series, window: int):
    """Centered moving average of the given window (the pure-MA special case
    of an ARMA smoother).

    Output length equals input length.  Interior points average the window
    centered on them (even windows take the extra tap on the trailing side);
    near the edges the window shrinks symmetrically.  window=1 is the
    identity.
    """
    if int(window) != window or window < 1:
        raise ValueError(f"window must be an integer >= 1, got {window}")
    window = int(window)
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("series must be a non-empty 1-D sequence")
    if window == 1:
        return x.copy()
    n = x.size
    half_l = (window - 1) // 2
    half_r = window // 2
    out = np.empty(n)
    # interior: direct window sums via convolution (exact summation, no
    # cumulative-difference cancellation)
    sums = np.convolve(x, np.ones(window), mode="full")
    lo_edge = min(half_l, n)
    hi_edge = max(n - half_r - 1, lo_edge - 1)
    if hi_edge >= lo_edge:
        idx = np.arange(lo_edge, hi_edge + 1)
        out[idx] = sums[idx + half_r] / window
    for i in range(0, min(lo_edge, n)):
        r = min(i, n - 1 - i)
        out[i] = float(np.sum(x[i - r:i + r + 1])) / (2 * r + 1)
    for i in range(max(hi_edge + 1, 0), n):
        r = min(i, n - 1 - i)
        out[i] = float(np.sum(x[i - r:i + r + 1])) / (2 * r + 1)
    return out


def band_energy(series, dt: float, f_low: float) -> float:
    """Mean-square energy of the series above f_low (Hz).

    Sum of squared DFT magnitudes over both half-spectra for |f| > f_low,
    normalized by length squared, so band + complementary AC band equals the
    total AC energy (Parseval).  Exact on pure sinusoids when an integer
    number of periods fits.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 8:
        raise ValueError("series must be 1-D with at least 8 samples")
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    nyquist = 0.5 / dt
    if not (0.0 < f_low < nyquist):
        raise ValueError(f"f_low must lie in (0, {nyquist}), got {f_low}")
    n = x.size
    spec = np.fft.fft(x)
    freqs = np.abs(np.fft.fftfreq(n, d=dt))
    mask = freqs > f_low
    return float(np.sum(np.abs(spec[mask]) ** 2) / (n * n))
