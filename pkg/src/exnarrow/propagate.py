"""Time propagation and the dipole autocorrelation function c(t).

The integrator is classical fixed-step RK4. It runs in a frame rotating at
the bright-state energy ``eps + C``. The stored samples are the lab-frame
values ``c(t) = <Psi0|exp(-i H t)|Psi0>``. Removing the rotation is exact.
It only keeps the dominant component slowly varying when |V| is large.

Each run is certified by repeating it at twice the step and applying
Richardson's estimate ``|c_dt - c_2dt| / 15`` for the fourth-order error.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .basis import EffectiveHamiltonian
from .errors import IntegratorDivergenceError, StepSizeError
from .model import AggregateSpec, MarkovianBath, bright_state, build_electronic_hamiltonian

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
DEFAULT_FLOOR = 1e-8
MAX_STEPS = 50_000_000


@dataclass(frozen=True, eq=False)
class CorrelationTrace:
    """c(t_k) sampled at t_k = k * dt, k = 0..K."""

    dt: float
    samples: np.ndarray = field(repr=False)
    decayed: bool
    metadata: dict = field(default_factory=dict)
    norms: np.ndarray | None = field(default=None, repr=False)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.samples.shape[0])

    @property
    def t_end(self) -> float:
        return self.dt * (self.samples.shape[0] - 1)

    def __len__(self):
        return self.samples.shape[0]


def spectral_radius_bound(matrix: sp.spmatrix, shift: float) -> float:
    """Gershgorin bound on |lambda - shift| over the spectrum of ``matrix``."""
    m = sp.csr_matrix(matrix)
    diag = m.diagonal()
    absrow = np.asarray(abs(m).sum(axis=1)).ravel() - np.abs(diag)
    return float(np.max(np.abs(diag - shift) + absrow)) if m.shape[0] else 0.0


def default_time_step(radius: float, omega: float = 1.0) -> float:
    """0.01/Omega, reduced so that dt * radius <= 0.5 keeps fast components accurate."""
    return min(0.01 / omega, 0.5 / max(radius, 1e-300))


def default_t_max(agg: AggregateSpec, bath, floor: float = DEFAULT_FLOOR) -> float:
    """Long enough for the narrowest expected line to decay below ``floor``.

    For a Lorentzian bath the slowest relevant decay rate is about
    gamma_tilde / N (strong-coupling limit); we allow a 1.35x margin.
    """
    if isinstance(bath, MarkovianBath):
        return max(200.0, 1.5 * math.log(1 / floor) / bath.rate)
    omega = bath.center_frequency
    base = max(200.0 / omega, 10.0 / bath.width) if bath.width > 0 else 200.0 / omega
    gt = bath.strength * bath.width / (bath.width**2 + omega**2)
    if gt > 0:
        base = max(base, 1.35 * agg.n_monomers * math.log(1 / floor) / gt)
    return base


def _run(matrix, psi0, shift, dt, t_max, floor):
    n_steps = int(math.ceil(t_max / dt - 1e-9))
    if n_steps > MAX_STEPS:
        raise StepSizeError(f"{n_steps} steps of dt={dt:g} exceed the limit of {MAX_STEPS}")
    m = sp.csr_matrix(matrix, dtype=complex)
    overlaps, norms, _, status = _kernels.rk4_correlation(
        m.indptr.astype(np.int64), m.indices.astype(np.int64), m.data, float(shift),
        np.ascontiguousarray(psi0, dtype=complex), float(dt), n_steps, float(floor),
    )
    return overlaps, norms, status


def evolve_state(matrix, psi: np.ndarray, dt: float, n_steps: int, shift: float = 0.0) -> np.ndarray:
    """Apply ``n_steps`` RK4 steps of d/dt psi = -i (matrix - shift) psi."""
    m = sp.csr_matrix(matrix, dtype=complex)
    _, _, out, status = _kernels.rk4_correlation(
        m.indptr.astype(np.int64), m.indices.astype(np.int64), m.data, float(shift),
        np.ascontiguousarray(psi, dtype=complex), float(dt), int(n_steps), 0.0,
    )
    if status == _kernels.STATUS_DIVERGED:
        raise IntegratorDivergenceError("state norm became non-finite")
    return out


def integrate_correlation(
    matrix,
    psi0: np.ndarray,
    shift: float,
    dt: float,
    t_max: float,
    tol: float = DEFAULT_TOL,
    floor: float = DEFAULT_FLOOR,
    certify: bool = True,
    max_refinements: int = 4,
    metadata: dict | None = None,
) -> CorrelationTrace:
    """Shared driver: RK4 in the rotating frame plus step-doubling certification."""
    if not dt > 0 or not t_max > 0:
        raise ValueError("dt and t_max must be positive")
    if certify and not tol > 0:
        raise ValueError("tol must be positive")
    for attempt in range(max_refinements + 1):
        fine, norms, status = _run(matrix, psi0, shift, dt, t_max, floor)
        if status == _kernels.STATUS_DIVERGED:
            if not certify or attempt == max_refinements:
                raise IntegratorDivergenceError(f"state norm diverged at dt={dt:g}")
            dt /= 2
            continue
        error = float("nan")
        if certify:
            coarse, _, cstatus = _run(matrix, psi0, shift, 2 * dt, t_max, floor)
            if cstatus == _kernels.STATUS_DIVERGED:
                error = float("inf")
            else:
                k = min(len(coarse), (len(fine) + 1) // 2)
                error = float(np.max(np.abs(fine[: 2 * k : 2] - coarse[:k]))) / 15.0
            if not error <= tol:
                if attempt == max_refinements:
                    raise StepSizeError(
                        f"estimated error {error:.3g} exceeds tol={tol:g} even at dt={dt:g}"
                    )
                log.info("error estimate %.3g > tol %.3g at dt=%g; halving", error, tol, dt)
                dt /= 2
                continue
        break
    t = dt * np.arange(len(fine))
    samples = fine * np.exp(-1j * shift * t)
    meta = dict(metadata or {})
    meta.update(
        dt=dt, t_max_requested=float(t_max), t_end=float(t[-1]), tol=float(tol), floor=float(floor),
        error_estimate=error, reference_energy=float(shift),
        decayed=status == _kernels.STATUS_DECAYED,
    )
    return CorrelationTrace(dt, samples, status == _kernels.STATUS_DECAYED, meta, norms)


def propagate_correlation(
    h: EffectiveHamiltonian,
    agg: AggregateSpec | None = None,
    dt: float | None = None,
    t_max: float | None = None,
    tol: float = DEFAULT_TOL,
    floor: float = DEFAULT_FLOOR,
    certify: bool = True,
) -> CorrelationTrace:
    """c(t) for the vibronic aggregate, initial state bright (x) vacuum."""
    agg = agg or h.basis.agg
    if agg != h.basis.agg:
        raise ValueError("aggregate does not match the Hamiltonian's basis")
    matrix = h.to_sparse()
    shift = agg.bright_energy
    if dt is None:
        dt = default_time_step(spectral_radius_bound(matrix, shift), h.bath.center_frequency)
    if t_max is None:
        t_max = default_t_max(agg, h.bath, floor)
    psi0 = h.basis.vacuum_state(bright_state(agg))
    meta = dict(dimension=h.dimension, max_quanta=h.basis.max_total_quanta)
    return integrate_correlation(matrix, psi0, shift, dt, t_max, tol, floor, certify, metadata=meta)


def markovian_matrix(agg: AggregateSpec, bath: MarkovianBath) -> np.ndarray:
    return build_electronic_hamiltonian(agg) - 1j * bath.rate * np.eye(agg.n_monomers)


def propagate_markovian_correlation(
    agg: AggregateSpec,
    bath: MarkovianBath,
    dt: float | None = None,
    t_max: float | None = None,
    tol: float = DEFAULT_TOL,
    floor: float = DEFAULT_FLOOR,
    certify: bool = True,
) -> CorrelationTrace:
    """c(t) for d/dt psi = (-i H_sys - Gamma_M) psi on the electronic space."""
    matrix = sp.csr_matrix(markovian_matrix(agg, bath))
    shift = agg.bright_energy
    if dt is None:
        dt = default_time_step(spectral_radius_bound(matrix, shift))
    if t_max is None:
        t_max = default_t_max(agg, bath, floor)
    meta = dict(dimension=agg.n_monomers, max_quanta=0)
    return integrate_correlation(matrix, bright_state(agg), shift, dt, t_max, tol, floor, certify, metadata=meta)
