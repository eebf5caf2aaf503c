"""Closed-form line shapes and correlation functions.

All spectra follow the half-line convention

    A(nu) = Re int_0^inf dt exp(i nu t) c(t),

so every spectrum has total area pi (because c(0) = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .model import AggregateSpec, LorentzianBath, MarkovianBath


def spectral_density(bath: LorentzianBath, omega):
    """J(omega) = (Gamma/pi) gamma / ((omega - Omega)^2 + gamma^2)."""
    omega = np.asarray(omega, dtype=float)
    g = bath.width
    return bath.strength / np.pi * g / ((omega - bath.center_frequency) ** 2 + g**2)


def bath_correlation(bath: LorentzianBath, tau):
    """alpha(tau) = Gamma exp(-i Omega tau - gamma tau) at zero temperature."""
    tau = np.asarray(tau, dtype=float)
    return bath.strength * np.exp(-(1j * bath.center_frequency + bath.width) * tau)


def electronic_line_position(agg: AggregateSpec) -> float:
    return agg.site_energy + agg.shift


def markovian_spectrum(agg: AggregateSpec, bath: MarkovianBath, nu, normalization: str = "half-line"):
    """Lorentzian of half width Gamma_M at eps + C.

    ``normalization="half-line"`` (default) gives Gamma_M / (d^2 + Gamma_M^2),
    which is what the half-line transform of exp(-i(eps+C)t - Gamma_M t)
    produces (area pi). ``"unit-2pi"`` divides by 2 pi. That form has
    area 1/2 and peak 1/(2 pi Gamma_M).
    """
    nu = np.asarray(nu, dtype=float)
    g = bath.rate
    shape = g / ((nu - electronic_line_position(agg)) ** 2 + g**2)
    if normalization == "half-line":
        return shape
    if normalization == "unit-2pi":
        return shape / (2 * np.pi)
    raise ValueError(f"unknown normalization {normalization!r}")


@dataclass(frozen=True)
class MonomerSeriesParams:
    """Derived constants of the monomer expansion.

    ``phase`` is the full-quadrant angle of (gamma^2 - Omega^2) - 2i gamma Omega.
    With it each k-term carries (-gamma_tilde/gamma)^k. This matches the
    principal-branch arctan combined with a sign(gamma^2 - Omega^2) factor,
    and it stays well defined at gamma = Omega.
    """

    strength: float
    width: float
    center_frequency: float
    w: complex
    gamma_tilde: float
    omega_tilde: float
    theta: float
    phase: float

    @classmethod
    def from_bath(cls, bath: LorentzianBath) -> "MonomerSeriesParams":
        g, om, gam = bath.width, bath.center_frequency, bath.strength
        denom = g**2 + om**2
        gt = gam * g / denom
        ot = gam * om / denom
        theta = 2 * gt * ot / gam if gam > 0 else 0.0
        phase = math.atan2(-2 * g * om, g**2 - om**2)
        return cls(gam, g, om, complex(g, om), gt, ot, theta, phase)

    @property
    def principal_q(self) -> float:
        """arctan(-2 gamma Omega / (gamma^2 - Omega^2)), principal branch."""
        return math.atan(-2 * self.width * self.center_frequency / (self.width**2 - self.center_frequency**2))

    @property
    def prefactor(self) -> float:
        """exp((gamma_tilde^2 - Omega_tilde^2) / Gamma) multiplying the k-sum."""
        if self.strength == 0:
            return 1.0
        return math.exp((self.gamma_tilde**2 - self.omega_tilde**2) / self.strength)

    @property
    def ratio(self) -> float:
        """gamma_tilde / gamma = Gamma / (gamma^2 + Omega^2), the k-term geometric factor."""
        return self.strength / (self.width**2 + self.center_frequency**2)


def analytic_monomer_correlation(bath: LorentzianBath, eps: float, t):
    """c(t) = exp(-i eps t - (Gamma/w^2)(w t + exp(-w t) - 1)), w = i Omega + gamma."""
    t = np.asarray(t, dtype=float)
    w = complex(bath.width, bath.center_frequency)
    wt = w * t
    # expm1 keeps the small-t cancellation accurate
    g = bath.strength / w**2 * (wt + np.expm1(-wt))
    return np.exp(-1j * eps * t - g)


def _series_terms(p: MonomerSeriesParams, series_tol: float, k_cap: int = 100_000) -> int:
    """Number of k-terms whose bound ratio^k / k! / (gamma_tilde + k gamma) reaches series_tol."""
    r = p.ratio
    if r == 0:
        return 1
    log_tol = math.log(series_tol)
    for k in range(k_cap):
        width = p.gamma_tilde + k * p.width
        log_bound = k * math.log(r) - math.lgamma(k + 1) - math.log(width)
        if k > r and log_bound < log_tol:
            return k + 1
    return k_cap


def analytic_monomer_spectrum(
    bath: LorentzianBath, eps: float, nu, series_tol: float = 1e-12, n_terms: int | None = None
):
    """Monomer absorption from the exact series of complex Lorentzians.

    Term k is a Lorentzian centred at eps + k Omega - Omega_tilde with
    half width gamma_tilde + k gamma. Its weight is (gamma_tilde/gamma)^k / k!.
    Summation stops once the k-th term bound drops below ``series_tol``.
    """
    if not series_tol > 0:
        raise ValueError("series_tol must be positive")
    if bath.width <= 0:
        raise ValueError("the series requires a damped bath (width > 0)")
    if bath.huang_rhys == 0:
        raise ValueError("X = 0 gives a delta line at eps; the series has no finite limit")
    nu = np.asarray(nu, dtype=float)
    p = MonomerSeriesParams.from_bath(bath)
    n = n_terms if n_terms is not None else _series_terms(p, series_tol)
    k = np.arange(n)
    if p.ratio > 0:
        log_mag = k * math.log(p.ratio) - gammaln(k + 1)
    else:
        log_mag = np.where(k == 0, 0.0, -np.inf)
    angle = p.theta - k * p.phase
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    weight = sign * np.exp(log_mag)
    out = np.zeros(nu.shape)
    d0 = nu - eps + p.omega_tilde
    for kk in range(n):
        d = d0 - kk * p.center_frequency
        wdt = p.gamma_tilde + kk * p.width
        den = d * d + wdt * wdt
        # A_k = cos(theta - k q) Im L_k + sin(theta - k q) Re L_k
        a_k = (math.cos(angle[kk]) * wdt + math.sin(angle[kk]) * d) / den
        out += weight[kk] * a_k
    return p.prefactor * out


def analytic_a0_peak(bath: LorentzianBath, eps: float, nu, include_prefactor: bool = False):
    """The k = 0 term: gamma_tilde/(d^2 + gamma_tilde^2) (cos theta + sin theta d/gamma_tilde).

    Here d = nu + Omega_tilde - eps. With ``include_prefactor`` the overall
    exp((gamma_tilde^2 - Omega_tilde^2)/Gamma) factor of the full series is applied.
    """
    nu = np.asarray(nu, dtype=float)
    p = MonomerSeriesParams.from_bath(bath)
    d = nu + p.omega_tilde - eps
    gt = p.gamma_tilde
    a0 = gt / (d**2 + gt**2) * (math.cos(p.theta) + math.sin(p.theta) * d / gt)
    return p.prefactor * a0 if include_prefactor else a0
