"""Peak statistics, sum rules, narrowing sweeps and the strong-coupling comparison."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic import analytic_monomer_spectrum
from .errors import AmbiguityError, MetadataMismatchError, RangeError
from .model import AggregateSpec, LorentzianBath, MarkovianBath
from .pipeline import NumericalOptions, aggregate_spectrum, bath_record
from .spectra import Spectrum, frequency_grid


@dataclass(frozen=True)
class PeakStats:
    peak_position: float
    peak_height: float
    fwhm: float
    mean: float
    variance: float
    area: float

    @property
    def std_dev(self) -> float:
        return math.sqrt(self.variance)


def _crossing(nu, a, i_below, i_above, half):
    """Linear interpolation of the half-maximum crossing between two adjacent points."""
    x0, x1 = nu[i_below], nu[i_above]
    y0, y1 = a[i_below], a[i_above]
    return x0 + (half - y0) * (x1 - x0) / (y1 - y0)


def peak_stats(spec: Spectrum) -> PeakStats:
    """FWHM of the dominant peak plus global moments of the whole spectrum.

    The half-maximum crossings are searched outward from the global
    maximum, so a shoulder only widens the FWHM if it stays above half height.
    """
    nu, a = spec.frequencies, spec.values
    n = a.size
    if n < 3:
        raise RangeError("spectrum too short for peak analysis")
    top = a.max()
    where = np.flatnonzero(a == top)
    if where.size > 1:
        if np.all(np.diff(where) == 1):
            warnings.warn(f"flat maximum over {where.size} points; using the leftmost at nu={nu[where[0]]:g}")
        else:
            raise AmbiguityError(
                f"equal maxima at nu={nu[where[0]]:g} and nu={nu[where[1]]:g}"
            )
    i = int(where[0])
    if i == 0 or i == n - 1:
        raise RangeError(f"maximum at the grid edge (nu={nu[i]:g}); widen the frequency window")

    y0, y1, y2 = a[i - 1], a[i], a[i + 1]
    curv = y0 - 2 * y1 + y2
    offset = 0.5 * (y0 - y2) / curv if curv < 0 else 0.0
    position = nu[i] + offset * (nu[1] - nu[0])
    height = y1 - 0.25 * (y0 - y2) * offset

    half = 0.5 * height
    left = i
    while left > 0 and a[left] > half:
        left -= 1
    right = i
    while right < n - 1 and a[right] > half:
        right += 1
    if a[left] > half or a[right] > half:
        raise RangeError("half-maximum crossing lies outside the frequency grid")
    fwhm = _crossing(nu, a, right - 1, right, half) - _crossing(nu, a, left, left + 1, half)

    area = float(np.trapezoid(a, nu))
    mean = float(np.trapezoid(nu * a, nu) / area)
    variance = float(np.trapezoid((nu - mean) ** 2 * a, nu) / area)
    return PeakStats(float(position), float(height), float(fwhm), mean, variance, area)


@dataclass(frozen=True)
class SumRuleRow:
    coupling: float
    shift: float
    mean: float
    area: float
    variance: float


@dataclass(frozen=True)
class SumRuleReport:
    n_monomers: int
    rows: tuple[SumRuleRow, ...]
    site_energy: float
    expected_variance: float | None
    max_mean_error: float        # |mean - (eps + C)|
    max_mean_shift_error: float  # |(mean_V - mean_ref) - (C_V - C_ref)|
    max_area_deviation: float    # relative to the first spectrum
    max_variance_deviation: float  # relative to expected_variance, or to the first spectrum

    def passes(self, mean_tol: float, area_rtol: float, variance_rtol: float) -> bool:
        return (self.max_mean_error <= mean_tol and self.max_mean_shift_error <= mean_tol
                and self.max_area_deviation <= area_rtol and self.max_variance_deviation <= variance_rtol)


def sum_rule_report(spectra) -> SumRuleReport:
    """Check mean shift by C, V-independent area and V-independent variance."""
    spectra = list(spectra)
    if len(spectra) < 2:
        raise ValueError("sum rules need at least two spectra")
    ref = spectra[0].provenance
    for s in spectra[1:]:
        p = s.provenance
        for key in ("N", "bath", "site_energy"):
            if p.get(key) != ref.get(key):
                raise MetadataMismatchError(f"spectra disagree on {key}: {ref.get(key)!r} vs {p.get(key)!r}")
    rows = []
    for s in spectra:
        st = peak_stats(s)
        rows.append(SumRuleRow(s.provenance["V"], s.provenance["C"], st.mean, st.area, st.variance))
    rows.sort(key=lambda r: (abs(r.coupling), r.coupling))
    eps = ref["site_energy"]
    bath = ref["bath"]
    expected = bath["center_frequency"] ** 2 * bath["huang_rhys"] if bath["kind"] == "lorentzian" else None
    r0 = rows[0]
    mean_err = max(abs(r.mean - (eps + r.shift)) for r in rows)
    shift_err = max(abs((r.mean - r0.mean) - (r.shift - r0.shift)) for r in rows)
    area_dev = max(abs(r.area - r0.area) / abs(r0.area) for r in rows)
    var_ref = expected if expected else r0.variance
    var_dev = max(abs(r.variance - var_ref) / var_ref for r in rows)
    return SumRuleReport(ref["N"], tuple(rows), eps, expected, mean_err, shift_err, area_dev, var_dev)


@dataclass(frozen=True)
class NarrowingPoint:
    coupling: float
    fwhm: float
    fwhm_times_n: float
    mean: float
    variance: float
    area: float
    peak_position: float
    peak_height: float
    max_quanta: int | None = None


@dataclass(frozen=True)
class NarrowingCurve:
    n_monomers: int
    points: tuple[NarrowingPoint, ...]
    bath: dict
    monomer_fwhm: float | None = None

    @property
    def couplings(self) -> np.ndarray:
        return np.array([p.coupling for p in self.points])

    @property
    def fwhms(self) -> np.ndarray:
        return np.array([p.fwhm for p in self.points])

    def saturation_ratio(self) -> np.ndarray:
        """FWHM * N in units of the monomer FWHM."""
        return np.array([p.fwhm_times_n for p in self.points]) / self.monomer_fwhm


def monomer_fwhm(bath, dnu: float | None = None, halfwidth: float = 10.0, series_tol: float = 1e-12) -> float:
    """FWHM of the isolated monomer line (the analytic series for a Lorentzian bath)."""
    if isinstance(bath, MarkovianBath):
        return 2 * bath.rate
    gt = bath.strength * bath.width / (bath.width**2 + bath.center_frequency**2)
    dnu = dnu or gt / 200
    nu = frequency_grid(-halfwidth, halfwidth, dnu)
    return peak_stats(Spectrum(nu, analytic_monomer_spectrum(bath, 0.0, nu, series_tol))).fwhm


def _sweep_job(args):
    agg, bath, opts = args
    spec, _ = aggregate_spectrum(agg, bath, opts)
    st = peak_stats(spec)
    n = agg.n_monomers
    return NarrowingPoint(agg.coupling, st.fwhm, st.fwhm * n, st.mean, st.variance, st.area,
                          st.peak_position, st.peak_height, spec.provenance.get("max_quanta_converged"))


def narrowing_sweep(
    n_list,
    v_list,
    bath,
    opts: NumericalOptions | None = None,
    site_energy: float = 0.0,
    workers: int = 1,
) -> dict[int, NarrowingCurve]:
    """FWHM against V for each N; the output order is deterministic whatever the scheduling."""
    opts = opts or NumericalOptions()
    v_sorted = sorted({float(v) for v in v_list}, key=lambda v: (abs(v), v))
    jobs = [(AggregateSpec(int(n), site_energy, v), bath, opts) for n in n_list for v in v_sorted]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_sweep_job, jobs))
    else:
        points = [_sweep_job(j) for j in jobs]
    ref = monomer_fwhm(bath)
    curves = {}
    for idx, n in enumerate(n_list):
        chunk = points[idx * len(v_sorted):(idx + 1) * len(v_sorted)]
        curves[int(n)] = NarrowingCurve(int(n), tuple(chunk), bath_record(bath), ref)
    return curves


@dataclass(frozen=True, eq=False)
class StrongCouplingReport:
    n_monomers: int
    coupling: float
    deviation: float
    peak_height: float
    numeric: Spectrum = field(repr=False)
    reference: np.ndarray = field(repr=False)


def strong_coupling_compare(
    n_monomers: int,
    coupling: float,
    bath: LorentzianBath,
    opts: NumericalOptions | None = None,
    site_energy: float = 0.0,
    series_tol: float = 1e-12,
) -> StrongCouplingReport:
    """Sup-norm distance between the exact N-mer spectrum and the monomer
    line with X -> X/N shifted by C, relative to the numeric peak height."""
    agg = AggregateSpec(n_monomers, site_energy, coupling)
    spec, _ = aggregate_spectrum(agg, bath, opts)
    ref = analytic_monomer_spectrum(bath.scaled(1.0 / n_monomers), agg.bright_energy, spec.frequencies, series_tol)
    height = float(spec.values.max())
    deviation = float(np.max(np.abs(spec.values - ref)) / height)
    return StrongCouplingReport(n_monomers, float(coupling), deviation, height, spec, ref)
