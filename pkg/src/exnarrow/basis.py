"""Truncated one-exciton x pseudomode Fock space.

Each monomer carries one damped harmonic pseudomode at the bath centre
frequency. At zero temperature, starting from the vibrational vacuum, the
absorption correlation function evolves under the non-Hermitian operator

    H_eff = H_sys (x) 1 + sum_n (Omega - i gamma) m_n - kappa sum_n P_n (b_n + b_n^+)

with no quantum-jump contributions, so propagation with ``H_eff`` is exact
for a Lorentzian spectral density (up to Fock-space truncation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, ResourceError
from .model import AggregateSpec, LorentzianBath, build_electronic_hamiltonian

MAX_DIMENSION = 2_000_000


def _vibrational_configurations(n_modes: int, max_quanta: int) -> np.ndarray:
    """All occupation tuples with total <= max_quanta, lexicographically ordered."""
    rows: list[tuple[int, ...]] = []

    def extend(prefix: tuple[int, ...], left: int):
        if len(prefix) == n_modes:
            rows.append(prefix)
            return
        for m in range(left + 1):
            extend(prefix + (m,), left - m)

    extend((), max_quanta)
    return np.array(rows, dtype=np.int64).reshape(len(rows), n_modes)


@dataclass(frozen=True, eq=False)
class VibronicBasis:
    """States are ``(site, occupations)`` pairs; the dense index is
    ``site * n_vib + vib_index`` where ``vib_index`` runs over occupation
    tuples in lexicographic order."""

    agg: AggregateSpec
    max_total_quanta: int
    occupations: np.ndarray = field(repr=False)
    _vib_index: dict = field(repr=False)

    @property
    def n_sites(self) -> int:
        return self.agg.n_monomers

    @property
    def n_vib(self) -> int:
        return self.occupations.shape[0]

    @property
    def dimension(self) -> int:
        return self.n_sites * self.n_vib

    def index(self, site: int, occupations) -> int:
        key = tuple(int(m) for m in occupations)
        if not 0 <= site < self.n_sites or key not in self._vib_index:
            raise KeyError((site, key))
        return site * self.n_vib + self._vib_index[key]

    def state(self, i: int) -> tuple[int, tuple[int, ...]]:
        site, j = divmod(int(i), self.n_vib)
        return site, tuple(int(m) for m in self.occupations[j])

    @cached_property
    def total_quanta(self) -> np.ndarray:
        return self.occupations.sum(axis=1)

    @cached_property
    def raise_index(self) -> np.ndarray:
        """raise_index[n, j]: vib index of configuration j with one more
        quantum in mode n, or -1 when that would exceed the truncation."""
        table = np.full((self.n_sites, self.n_vib), -1, dtype=np.int64)
        for j, occ in enumerate(self.occupations):
            if occ.sum() >= self.max_total_quanta:
                continue
            for n in range(self.n_sites):
                up = occ.copy()
                up[n] += 1
                table[n, j] = self._vib_index[tuple(int(m) for m in up)]
        return table

    def vacuum_state(self, electronic: np.ndarray) -> np.ndarray:
        """Embed an electronic vector as ``electronic (x) |vacuum>``."""
        electronic = np.asarray(electronic, dtype=complex)
        if electronic.shape != (self.n_sites,):
            raise DimensionError(f"expected {self.n_sites} amplitudes, got {electronic.shape}")
        psi = np.zeros((self.n_sites, self.n_vib), dtype=complex)
        psi[:, 0] = electronic
        return psi.ravel()


def basis_dimension(n_sites: int, max_quanta: int) -> int:
    return n_sites * math.comb(n_sites + max_quanta, max_quanta)


def enumerate_basis(agg: AggregateSpec, max_quanta: int, max_dimension: int = MAX_DIMENSION) -> VibronicBasis:
    if max_quanta < 0:
        raise ValueError("max_quanta must be >= 0")
    dim = basis_dimension(agg.n_monomers, max_quanta)
    if dim > max_dimension:
        raise ResourceError(
            f"basis dimension {dim} for N={agg.n_monomers}, M={max_quanta} "
            f"exceeds the cap of {max_dimension}"
        )
    occ = _vibrational_configurations(agg.n_monomers, max_quanta)
    index = {tuple(int(m) for m in row): j for j, row in enumerate(occ)}
    return VibronicBasis(agg, int(max_quanta), occ, index)


@dataclass(frozen=True, eq=False)
class EffectiveHamiltonian:
    basis: VibronicBasis
    bath: LorentzianBath

    @cached_property
    def electronic(self) -> np.ndarray:
        return build_electronic_hamiltonian(self.basis.agg)

    @cached_property
    def vibrational_diagonal(self) -> np.ndarray:
        b = self.bath
        return (b.center_frequency - 1j * b.width) * self.basis.total_quanta

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    def to_sparse(self) -> sp.csr_matrix:
        """Assembled CSR form of the same operator (used by the propagator)."""
        basis = self.basis
        n, nv = basis.n_sites, basis.n_vib
        kappa = self.bath.pseudomode_coupling
        h = sp.kron(sp.csr_matrix(self.electronic), sp.identity(nv, format="csr"))
        h = h + sp.kron(sp.identity(n, format="csr"), sp.diags(self.vibrational_diagonal))
        j = np.arange(nv)
        for site in range(n):
            up = basis.raise_index[site]
            ok = up >= 0
            amp = np.sqrt(basis.occupations[ok, site] + 1.0)
            x = sp.coo_matrix(
                (np.concatenate([amp, amp]), (np.concatenate([j[ok], up[ok]]), np.concatenate([up[ok], j[ok]]))),
                shape=(nv, nv),
            )
            proj = sp.coo_matrix(([1.0], ([site], [site])), shape=(n, n))
            h = h - kappa * sp.kron(proj, x)
        h = sp.csr_matrix(h, dtype=complex)
        h.sum_duplicates()
        h.eliminate_zeros()
        h.sort_indices()
        return h

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


def apply_effective_hamiltonian(h: EffectiveHamiltonian, v: np.ndarray) -> np.ndarray:
    """Matrix-free ``H_eff @ v`` in O(dimension * N) time."""
    basis = h.basis
    v = np.asarray(v)
    if v.shape != (basis.dimension,):
        raise DimensionError(f"vector of shape {v.shape} does not match basis dimension {basis.dimension}")
    vv = v.reshape(basis.n_sites, basis.n_vib)
    out = (h.electronic @ vv).astype(complex)
    out += h.vibrational_diagonal[None, :] * vv
    kappa = h.bath.pseudomode_coupling
    if kappa:
        for site in range(basis.n_sites):
            up = basis.raise_index[site]
            ok = np.nonzero(up >= 0)[0]
            amp = kappa * np.sqrt(basis.occupations[ok, site] + 1.0)
            # lowering: b|m+1> = sqrt(m+1)|m>;  raising is its transpose
            out[site, ok] -= amp * vv[site, up[ok]]
            out[site, up[ok]] -= amp * vv[site, ok]
    return out.ravel()
