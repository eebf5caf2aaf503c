"""Zero-temperature absorption spectra of exciton chains and their exchange narrowing."""

from .analysis import PeakStats, narrowing_sweep, peak_stats, strong_coupling_compare, sum_rule_report
from .analytic import (
    analytic_a0_peak,
    analytic_monomer_correlation,
    analytic_monomer_spectrum,
    bath_correlation,
    electronic_line_position,
    markovian_spectrum,
)
from .basis import EffectiveHamiltonian, VibronicBasis, apply_effective_hamiltonian, enumerate_basis
from .model import (
    AggregateSpec,
    Boundary,
    LorentzianBath,
    MarkovianBath,
    bright_state,
    build_electronic_hamiltonian,
)
from .pipeline import NumericalOptions, aggregate_spectrum
from .propagate import CorrelationTrace, propagate_correlation, propagate_markovian_correlation
from .spectra import Spectrum, resample, transform

__version__ = "0.1.0"
