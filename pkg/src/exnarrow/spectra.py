"""Half-line Fourier transform of correlation traces into absorption spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft
from scipy.interpolate import make_interp_spline

from .errors import TruncationError
from .propagate import CorrelationTrace


@dataclass(frozen=True, eq=False)
class Spectrum:
    frequencies: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        nu = np.asarray(self.frequencies, dtype=float)
        a = np.asarray(self.values, dtype=float)
        if nu.ndim != 1 or nu.shape != a.shape:
            raise ValueError("frequencies and values must be 1-D arrays of equal length")
        if nu.size >= 2 and not np.all(np.diff(nu) > 0):
            raise ValueError("frequency grid must be strictly increasing")
        if not np.all(np.isfinite(a)):
            raise ValueError("spectrum values must be finite")
        object.__setattr__(self, "frequencies", nu)
        object.__setattr__(self, "values", a)

    @property
    def spacing(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])

    def __len__(self):
        return self.frequencies.size

    def area(self) -> float:
        return float(np.trapezoid(self.values, self.frequencies))


def frequency_grid(nu_min: float, nu_max: float, dnu: float) -> np.ndarray:
    """Uniform grid nu_min + j*dnu up to nu_max (inclusive within rounding)."""
    if not dnu > 0:
        raise ValueError("dnu must be positive")
    if not nu_max > nu_min:
        raise ValueError("nu_max must exceed nu_min")
    n = int(math.floor((nu_max - nu_min) / dnu + 1e-9)) + 1
    return nu_min + dnu * np.arange(n)


def chirp_sum(x: np.ndarray, dt: float, nu0: float, dnu: float, n_freq: int) -> np.ndarray:
    """X_j = sum_k x_k exp(i (nu0 + j dnu) k dt) for j < n_freq (Bluestein).

    Chirp phases come straight from k^2 so long traces keep full precision.
    """
    x = np.asarray(x, dtype=complex)
    n_t = x.size
    beta = dnu * dt
    k = np.arange(n_t, dtype=float)
    j = np.arange(n_freq, dtype=float)
    a = x * np.exp(1j * (nu0 * dt * k + 0.5 * beta * k * k))
    size = scipy.fft.next_fast_len(n_t + n_freq - 1)
    # kernel b[m] = exp(-i beta m^2 / 2) for m in (-(n_t-1) .. n_freq-1)
    m_pos = np.arange(n_freq, dtype=float)
    m_neg = np.arange(1, n_t, dtype=float)
    b = np.zeros(size, dtype=complex)
    b[:n_freq] = np.exp(-0.5j * beta * m_pos * m_pos)
    if n_t > 1:
        b[size - (n_t - 1):] = np.exp(-0.5j * beta * m_neg[::-1] ** 2)
    conv = scipy.fft.ifft(scipy.fft.fft(a, size) * scipy.fft.fft(b))
    return np.exp(0.5j * beta * j * j) * conv[:n_freq]


def transform(
    trace: CorrelationTrace,
    nu_min: float,
    nu_max: float,
    dnu: float,
    allow_truncated: bool = False,
    window_rate: float = 0.0,
) -> Spectrum:
    """A(nu_j) = Re sum_k w_k exp(i nu_j t_k) c(t_k) dt with trapezoidal weights.

    ``window_rate`` > 0 multiplies c(t) by exp(-rate t). The line then
    picks up an extra Lorentzian half width equal to the rate. Use it only
    for diagnostics.
    """
    if not (trace.decayed or allow_truncated):
        raise TruncationError(
            f"trace stops at t={trace.t_end:g} before decaying below its floor; "
            f"increase t_max or pass allow_truncated=True"
        )
    if window_rate < 0:
        raise ValueError("window_rate must be >= 0")
    nu = frequency_grid(nu_min, nu_max, dnu)
    c = trace.samples.astype(complex)
    weights = np.full(c.size, trace.dt)
    weights[0] *= 0.5
    if c.size > 1:
        weights[-1] *= 0.5
    if window_rate:
        weights = weights * np.exp(-window_rate * trace.times)
    values = chirp_sum(weights * c, trace.dt, nu[0], dnu, nu.size).real
    prov = dict(trace.metadata)
    prov.update(nu_min=float(nu[0]), nu_max=float(nu[-1]), dnu=float(dnu),
                window_rate=float(window_rate), truncated=not trace.decayed)
    return Spectrum(nu, values, prov)


def resample(spec: Spectrum, dnu: float) -> Spectrum:
    """Quintic-spline interpolation onto a new uniform grid over the same span."""
    if len(spec) < 2:
        raise ValueError("cannot resample an empty or single-point spectrum")
    if not dnu > 0:
        raise ValueError("dnu must be positive")
    if dnu == spec.spacing:
        return Spectrum(spec.frequencies.copy(), spec.values.copy(), dict(spec.provenance))
    nu = frequency_grid(spec.frequencies[0], spec.frequencies[-1], dnu)
    nu = nu[nu <= spec.frequencies[-1]]
    k = min(5, len(spec) - 1)
    spline = make_interp_spline(spec.frequencies, spec.values, k=k)
    prov = dict(spec.provenance, dnu=float(dnu), resampled_from=spec.spacing)
    return Spectrum(nu, spline(nu), prov)
