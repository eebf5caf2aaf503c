import numpy as np
import pytest

from exnarrow.errors import ConfigurationError
from exnarrow.model import (
    AggregateSpec,
    Boundary,
    LorentzianBath,
    MarkovianBath,
    bright_state,
    build_electronic_hamiltonian,
)


def test_monomer_hamiltonian():
    assert build_electronic_hamiltonian(AggregateSpec(1, 0.0)).tolist() == [[0.0]]


def test_dimer_hamiltonian():
    h = build_electronic_hamiltonian(AggregateSpec(2, 0.0, -1.0))
    assert h.tolist() == [[0.0, -1.0], [-1.0, 0.0]]
    assert np.allclose(np.linalg.eigvalsh(h), [-1.0, 1.0])


def test_trimer_ring_eigenvalues():
    h = build_electronic_hamiltonian(AggregateSpec(3, 0.0, -1.0))
    assert np.allclose(np.linalg.eigvalsh(h), [-2.0, 1.0, 1.0])


@pytest.mark.parametrize("n", [3, 4, 6, 7, 12])
@pytest.mark.parametrize("v", [-2.0, 0.3])
def test_ring_eigenvalues_are_cosine_band(n, v):
    eps = 0.7
    h = build_electronic_hamiltonian(AggregateSpec(n, eps, v))
    expected = np.sort(eps + 2 * v * np.cos(2 * np.pi * np.arange(n) / n))
    assert np.allclose(np.linalg.eigvalsh(h), expected, atol=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3, 6])
def test_energy_offset_is_identity_shift(n):
    h0 = build_electronic_hamiltonian(AggregateSpec(n, 0.0, -1.3))
    h1 = build_electronic_hamiltonian(AggregateSpec(n, 2.5, -1.3))
    assert np.array_equal(h1, h0 + 2.5 * np.eye(n))
    assert np.array_equal(h1, h1.T)


@pytest.mark.parametrize("n,v,expected", [(2, -1.0, -1.0), (3, -1.0, -2.0), (6, -2.0, -4.0), (1, -5.0, 0.0)])
def test_shift(n, v, expected):
    assert AggregateSpec(n, 0.0, v).shift == expected


def test_bright_state():
    assert np.allclose(bright_state(AggregateSpec(1)), [1.0])
    assert np.allclose(bright_state(AggregateSpec(4)), [0.5] * 4)


@pytest.mark.parametrize("n,v", [(2, -1.0), (3, -1.0), (5, -0.4), (8, -3.0)])
def test_bright_state_is_eigenvector(n, v):
    agg = AggregateSpec(n, 0.2, v)
    h = build_electronic_hamiltonian(agg)
    psi = bright_state(agg)
    assert np.allclose(h @ psi, agg.bright_energy * psi, atol=1e-14)
    # for V < 0 it is the lowest state of the band
    w, u = np.linalg.eigh(h)
    assert abs(abs(np.vdot(u[:, 0], psi)) - 1) < 1e-12


@pytest.mark.parametrize("n,boundary", [(2, "ring"), (3, "open_dimer"), (1, "ring"), (4, "monomer")])
def test_invalid_boundary(n, boundary):
    with pytest.raises(ConfigurationError):
        AggregateSpec(n, 0.0, -1.0, boundary)


@pytest.mark.parametrize("n", [0, -1, 2.5])
def test_invalid_size(n):
    with pytest.raises(ConfigurationError):
        AggregateSpec(n)


def test_boundary_default():
    assert AggregateSpec(2).boundary is Boundary.OPEN_DIMER
    assert AggregateSpec(3, boundary="ring").boundary is Boundary.RING


def test_lorentzian_bath_derived():
    bath = LorentzianBath(0.3, 0.4, 1.7)
    assert bath.strength == 1.7**2 * 0.3
    assert bath.pseudomode_coupling**2 == pytest.approx(bath.strength, rel=1e-15)
    assert bath.scaled(0.5).huang_rhys == 0.15


@pytest.mark.parametrize("kw", [dict(huang_rhys=-0.1, width=0.4), dict(huang_rhys=0.3, width=-1),
                                dict(huang_rhys=0.3, width=0.4, center_frequency=0)])
def test_lorentzian_bath_rejects(kw):
    with pytest.raises(ConfigurationError):
        LorentzianBath(**kw)


@pytest.mark.parametrize("rate", [0.0, -1.0, float("nan")])
def test_markovian_bath_rejects(rate):
    with pytest.raises(ConfigurationError):
        MarkovianBath(rate)
