"""Physical parameter records and the one-exciton electronic Hamiltonian.

Energies are in units of the bath centre frequency ``Omega`` (1 by default).
Only identical monomers with nearest-neighbour coupling are modelled: a
single monomer, an open dimer, or a ring of ``N >= 3`` sites.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


class Boundary(str, enum.Enum):
    MONOMER = "monomer"
    OPEN_DIMER = "open_dimer"
    RING = "ring"

    @classmethod
    def for_size(cls, n_monomers: int) -> "Boundary":
        """The only boundary type allowed for a chain of this length."""
        if n_monomers == 1:
            return cls.MONOMER
        if n_monomers == 2:
            return cls.OPEN_DIMER
        return cls.RING


@dataclass(frozen=True)
class AggregateSpec:
    """Geometry and energetics of an N-monomer chain.

    ``boundary`` defaults to the one implied by ``n_monomers``. Passing an
    inconsistent value (e.g. a ring of two) raises ``ConfigurationError``.
    For a monomer the coupling is kept but has no effect.
    """

    n_monomers: int
    site_energy: float = 0.0
    coupling: float = 0.0
    boundary: Boundary | None = None

    def __post_init__(self):
        n = self.n_monomers
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise ConfigurationError(f"n_monomers must be a positive integer, got {n!r}")
        for name in ("site_energy", "coupling"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")
        expected = Boundary.for_size(int(n))
        boundary = expected if self.boundary is None else Boundary(self.boundary)
        if boundary is not expected:
            raise ConfigurationError(
                f"boundary {boundary.value!r} is invalid for N={n}: "
                f"ring needs N >= 3, open_dimer needs N = 2, monomer needs N = 1"
            )
        object.__setattr__(self, "n_monomers", int(n))
        object.__setattr__(self, "site_energy", float(self.site_energy))
        object.__setattr__(self, "coupling", float(self.coupling))
        object.__setattr__(self, "boundary", boundary)

    @property
    def shift(self) -> float:
        """Band-edge shift C of the bright state: V for a dimer, 2V for a ring."""
        if self.boundary is Boundary.RING:
            return 2.0 * self.coupling
        if self.boundary is Boundary.OPEN_DIMER:
            return self.coupling
        return 0.0

    @property
    def bright_energy(self) -> float:
        return self.site_energy + self.shift

    def with_coupling(self, coupling: float) -> "AggregateSpec":
        return AggregateSpec(self.n_monomers, self.site_energy, coupling, self.boundary)


@dataclass(frozen=True)
class LorentzianBath:
    """Lorentzian spectral density centred at ``center_frequency`` with
    Huang-Rhys factor ``huang_rhys`` and half width ``width``."""

    huang_rhys: float
    width: float
    center_frequency: float = 1.0

    def __post_init__(self):
        if not (self.center_frequency > 0 and math.isfinite(self.center_frequency)):
            raise ConfigurationError("center_frequency must be > 0")
        if not (self.huang_rhys >= 0 and math.isfinite(self.huang_rhys)):
            raise ConfigurationError("huang_rhys must be >= 0")
        # width = 0 is allowed internally (undamped mode); the physical bath needs > 0
        if not (self.width >= 0 and math.isfinite(self.width)):
            raise ConfigurationError("width must be >= 0")
        for name in ("huang_rhys", "width", "center_frequency"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def strength(self) -> float:
        """Gamma = Omega^2 X, the value of the bath correlation function at zero."""
        return self.center_frequency**2 * self.huang_rhys

    @property
    def pseudomode_coupling(self) -> float:
        """kappa = Omega sqrt(X); kappa^2 equals ``strength``."""
        return self.center_frequency * math.sqrt(self.huang_rhys)

    def scaled(self, factor: float) -> "LorentzianBath":
        """Same bath with the Huang-Rhys factor multiplied by ``factor``."""
        return LorentzianBath(self.huang_rhys * factor, self.width, self.center_frequency)


@dataclass(frozen=True)
class MarkovianBath:
    """Memoryless bath; each site dephases at ``rate``."""

    rate: float

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ConfigurationError(f"Markovian rate must be > 0, got {self.rate!r}")
        object.__setattr__(self, "rate", float(self.rate))


def build_electronic_hamiltonian(agg: AggregateSpec) -> np.ndarray:
    """Real symmetric N x N one-exciton Hamiltonian."""
    n = agg.n_monomers
    h = np.eye(n) * agg.site_energy
    if agg.boundary is Boundary.OPEN_DIMER:
        h[0, 1] = h[1, 0] = agg.coupling
    elif agg.boundary is Boundary.RING:
        idx = np.arange(n)
        h[idx, (idx + 1) % n] = agg.coupling
        h[(idx + 1) % n, idx] = agg.coupling
    return h


def bright_state(agg: AggregateSpec) -> np.ndarray:
    """Uniform superposition of all one-exciton states (unit norm)."""
    n = agg.n_monomers
    return np.full(n, 1.0 / math.sqrt(n), dtype=complex)
