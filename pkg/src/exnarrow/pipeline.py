"""basis -> propagate -> transform for one (aggregate, bath) point.

Handles the default frequency window and resolution, and escalates the
Fock-space truncation until the spectrum stops changing.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .basis import MAX_DIMENSION, EffectiveHamiltonian, enumerate_basis
from .errors import ConvergenceError
from .model import AggregateSpec, LorentzianBath, MarkovianBath, build_electronic_hamiltonian
from .propagate import (
    DEFAULT_FLOOR,
    DEFAULT_TOL,
    CorrelationTrace,
    propagate_correlation,
    propagate_markovian_correlation,
)
from .spectra import Spectrum, transform

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NumericalOptions:
    """Knobs shared by every numerical run; ``None`` means "use the default rule"."""

    max_quanta: int | None = None
    m_start: int = 4
    m_limit: int = 16
    m_tol: float = 1e-4
    dt: float | None = None
    t_max: float | None = None
    tol: float = DEFAULT_TOL
    floor: float = DEFAULT_FLOOR
    dnu: float | None = None
    nu_halfwidth: float = 50.0
    nu_min: float | None = None
    nu_max: float | None = None
    certify: bool = True
    max_dimension: int = MAX_DIMENSION

    def as_dict(self) -> dict:
        return asdict(self)


def bath_record(bath) -> dict:
    if isinstance(bath, MarkovianBath):
        return {"kind": "markovian", "rate": bath.rate}
    return {
        "kind": "lorentzian",
        "huang_rhys": bath.huang_rhys,
        "width": bath.width,
        "center_frequency": bath.center_frequency,
    }


def default_dnu(agg: AggregateSpec, bath) -> float:
    """Resolve the narrowest expected line with about 40 points per FWHM."""
    if isinstance(bath, MarkovianBath):
        return bath.rate / 20
    gt = bath.strength * bath.width / (bath.width**2 + bath.center_frequency**2)
    if gt <= 0:
        return 0.01 * bath.center_frequency
    return gt / (20 * agg.n_monomers)


def default_window(agg: AggregateSpec, halfwidth: float) -> tuple[float, float]:
    """From ``halfwidth`` below the bright line to ``halfwidth`` above the band top."""
    top = float(np.linalg.eigvalsh(build_electronic_hamiltonian(agg)).max())
    return agg.bright_energy - halfwidth, top + halfwidth


def _grid(agg, bath, opts: NumericalOptions):
    lo, hi = default_window(agg, opts.nu_halfwidth)
    lo = opts.nu_min if opts.nu_min is not None else lo
    hi = opts.nu_max if opts.nu_max is not None else hi
    return lo, hi, opts.dnu or default_dnu(agg, bath)


def _provenance(agg: AggregateSpec, bath) -> dict:
    return {
        "N": agg.n_monomers,
        "V": agg.coupling,
        "site_energy": agg.site_energy,
        "boundary": agg.boundary.value,
        "C": agg.shift,
        "bath": bath_record(bath),
    }


def vibronic_trace(agg: AggregateSpec, bath: LorentzianBath, max_quanta: int, opts: NumericalOptions) -> CorrelationTrace:
    basis = enumerate_basis(agg, max_quanta, opts.max_dimension)
    h = EffectiveHamiltonian(basis, bath)
    return propagate_correlation(h, agg, dt=opts.dt, t_max=opts.t_max, tol=opts.tol,
                                 floor=opts.floor, certify=opts.certify)


def aggregate_spectrum(agg: AggregateSpec, bath, opts: NumericalOptions | None = None):
    """Return (Spectrum, CorrelationTrace) for one aggregate.

    With ``max_quanta=None`` the truncation starts at ``m_start`` and rises
    in steps of two. It stops at the first M where going to M+2 changes
    the spectrum by less than ``m_tol`` times the peak height. The M+2
    spectrum is returned.
    """
    opts = opts or NumericalOptions()
    lo, hi, dnu = _grid(agg, bath, opts)
    prov = _provenance(agg, bath)
    if isinstance(bath, MarkovianBath):
        trace = propagate_markovian_correlation(agg, bath, dt=opts.dt, t_max=opts.t_max, tol=opts.tol,
                                                floor=opts.floor, certify=opts.certify)
        spec = transform(trace, lo, hi, dnu)
        spec.provenance.update(prov)
        return spec, trace

    if opts.max_quanta is not None:
        trace = vibronic_trace(agg, bath, opts.max_quanta, opts)
        spec = transform(trace, lo, hi, dnu)
        spec.provenance.update(prov, max_quanta_converged=None)
        return spec, trace

    m = opts.m_start
    trace = vibronic_trace(agg, bath, m, opts)
    spec = transform(trace, lo, hi, dnu)
    while True:
        if m + 2 > opts.m_limit:
            raise ConvergenceError(
                f"Fock truncation did not converge to {opts.m_tol:g} by M={opts.m_limit} "
                f"(N={agg.n_monomers}, V={agg.coupling:g})"
            )
        trace2 = vibronic_trace(agg, bath, m + 2, opts)
        spec2 = transform(trace2, lo, hi, dnu)
        change = float(np.max(np.abs(spec2.values - spec.values)) / np.max(spec2.values))
        log.info("N=%d V=%g: M=%d -> %d changes spectrum by %.3g of peak",
                 agg.n_monomers, agg.coupling, m, m + 2, change)
        if change < opts.m_tol:
            spec2.provenance.update(prov, max_quanta_converged=m, m_change=change)
            return spec2, trace2
        m += 2
        trace, spec = trace2, spec2
