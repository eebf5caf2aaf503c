import numpy as np
import pytest
import scipy.sparse as sp

from exnarrow.analytic import analytic_monomer_correlation
from exnarrow.basis import EffectiveHamiltonian, enumerate_basis
from exnarrow.errors import IntegratorDivergenceError, StepSizeError
from exnarrow.model import AggregateSpec, LorentzianBath, MarkovianBath, bright_state
from exnarrow.propagate import (
    default_t_max,
    evolve_state,
    integrate_correlation,
    propagate_correlation,
    propagate_markovian_correlation,
)


def hamiltonian(n, v, m, x=0.3, g=0.4, eps=0.0):
    agg = AggregateSpec(n, eps, v)
    return agg, EffectiveHamiltonian(enumerate_basis(agg, m), LorentzianBath(x, g))


def test_free_monomer_phase():
    agg, h = hamiltonian(1, 0.0, 2, x=0.0, g=0.0, eps=0.7)
    tr = propagate_correlation(h, dt=0.01, t_max=20.0)
    assert np.max(np.abs(tr.samples - np.exp(-0.7j * tr.times))) < 1e-12


def test_monomer_matches_closed_form():
    agg, h = hamiltonian(1, 0.0, 12)
    tr = propagate_correlation(h, t_max=60.0)
    ref = analytic_monomer_correlation(h.bath, 0.0, tr.times)
    assert np.max(np.abs(tr.samples - ref)) < 1e-6


def test_truncation_convergence_for_monomer():
    ref_t = np.linspace(0, 30, 3001)
    ref = analytic_monomer_correlation(LorentzianBath(0.3, 0.4), 0.0, ref_t)
    errs = []
    for m in (2, 4, 8):
        _, h = hamiltonian(1, 0.0, m)
        tr = propagate_correlation(h, dt=0.01, t_max=30.0)
        errs.append(np.max(np.abs(tr.samples - ref)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-5


@pytest.mark.parametrize("n,v,eps,line", [(1, 0.0, 0.0, 0.0), (2, -1.0, 0.0, -1.0), (3, -1.0, 0.2, -1.8),
                                          (6, -2.0, 0.0, -4.0)])
def test_markovian_closed_form(n, v, eps, line):
    bath = MarkovianBath(0.5)
    tr = propagate_markovian_correlation(AggregateSpec(n, eps, v), bath)
    ref = np.exp(-1j * line * tr.times - 0.5 * tr.times)
    assert np.max(np.abs(tr.samples - ref)) < 1e-6
    assert tr.decayed


@pytest.mark.parametrize("n,v", [(2, -0.3), (4, 1.7), (5, -20.0)])
def test_markovian_modulus(n, v):
    tr = propagate_markovian_correlation(AggregateSpec(n, 0.0, v), MarkovianBath(0.2), t_max=30.0)
    assert np.allclose(np.abs(tr.samples), np.exp(-0.2 * tr.times), atol=1e-6)


def test_norm_conserved_without_damping():
    _, h = hamiltonian(2, -1.0, 6, g=0.0)
    tr = propagate_correlation(h, dt=0.01, t_max=50.0, tol=1e-6)
    assert np.max(np.abs(tr.norms - 1.0)) <= 1e-6
    assert np.all(np.abs(tr.samples) <= 1 + 1e-6)


def test_norm_decreases_with_damping():
    _, h = hamiltonian(3, -1.0, 3)
    tr = propagate_correlation(h, t_max=30.0)
    assert np.all(np.diff(tr.norms) <= 1e-12)
    assert tr.samples[0] == pytest.approx(1.0, abs=1e-15)
    assert np.all(np.abs(tr.samples) <= np.sqrt(tr.norms) + 1e-12)


def test_time_reversal_without_damping():
    agg, h = hamiltonian(2, -1.0, 4, g=0.0)
    m = h.to_sparse()
    psi0 = h.basis.vacuum_state(bright_state(agg))
    fwd = evolve_state(m, psi0, 0.005, 2000)
    back = evolve_state(-m, fwd, 0.005, 2000)
    assert np.max(np.abs(back - psi0)) < 1e-5


def test_step_halving_agrees():
    _, h = hamiltonian(2, -2.0, 4)
    a = propagate_correlation(h, dt=0.01, t_max=40.0, certify=False)
    b = propagate_correlation(h, dt=0.005, t_max=40.0, certify=False)
    assert np.max(np.abs(a.samples - b.samples[::2][: len(a)])) < 1e-4 * np.max(np.abs(a.samples))


def test_rotating_frame_does_not_change_result():
    agg, h = hamiltonian(2, -3.0, 4)
    m = h.to_sparse()
    psi0 = h.basis.vacuum_state(bright_state(agg))
    a = integrate_correlation(m, psi0, 0.0, 0.002, 20.0, certify=False)
    b = integrate_correlation(m, psi0, agg.bright_energy, 0.002, 20.0, certify=False)
    assert np.max(np.abs(a.samples - b.samples)) < 1e-7


def test_large_step_is_refined_when_certifying():
    _, h = hamiltonian(2, -1.0, 3)
    tr = propagate_correlation(h, dt=0.2, t_max=20.0, tol=1e-6)
    assert tr.dt < 0.2
    assert tr.metadata["error_estimate"] <= 1e-6


def test_divergence_reported():
    _, h = hamiltonian(2, -20.0, 3)
    with pytest.raises(IntegratorDivergenceError):
        propagate_correlation(h, dt=1.0, t_max=200.0, certify=False)


def test_step_size_error_when_refinement_exhausted():
    agg, h = hamiltonian(2, -1.0, 3)
    psi0 = h.basis.vacuum_state(bright_state(agg))
    with pytest.raises(StepSizeError):
        integrate_correlation(h.to_sparse(), psi0, 0.0, 0.3, 20.0, tol=1e-10, max_refinements=0)


def test_early_exit_below_floor():
    _, h = hamiltonian(1, 0.0, 6)
    tr = propagate_correlation(h, t_max=1e4, floor=1e-4)
    assert tr.decayed
    assert tr.t_end < 1e4
    assert tr.norms[-1] < 1e-8  # squared norm below floor^2


def test_default_t_max_grows_with_n():
    bath = LorentzianBath(0.3, 0.4)
    assert default_t_max(AggregateSpec(6), bath) > default_t_max(AggregateSpec(2), bath) >= 200.0
    assert default_t_max(AggregateSpec(3), MarkovianBath(0.5)) >= 200.0


def test_metadata_records_settings():
    _, h = hamiltonian(1, 0.0, 4)
    tr = propagate_correlation(h, t_max=10.0)
    for key in ("dt", "t_end", "error_estimate", "reference_energy", "decayed", "dimension", "max_quanta"):
        assert key in tr.metadata


def test_invalid_arguments():
    agg, h = hamiltonian(1, 0.0, 2)
    with pytest.raises(ValueError):
        integrate_correlation(sp.identity(3), np.ones(3), 0.0, -0.1, 1.0)
    with pytest.raises(ValueError):
        propagate_correlation(h, agg=AggregateSpec(2))
