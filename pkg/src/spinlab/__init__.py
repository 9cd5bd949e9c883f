"""spinlab: a numerical laboratory for finite quantum spin systems."""

from . import climit, fcs, gapbound, locality, spectra, spinops, ssep
from .climit import classical_partition, quantum_partition, sandwich_check
from .fcs import aklt_triple, correlation_length, fcs_expectation, two_point_function
from .gapbound import aklt_chain, certify_gap, martingale_gap_bound, refined_gap_bound
from .locality import (
    correlation_scan,
    dynamic_commutator_profile,
    fit_decay,
    lieb_robinson_envelope,
)
from .spectra import (
    eigen_spectrum,
    foel_check,
    lieb_mattis_check,
    sector_gap,
    spin_level_table,
)
from .spinops import (
    ModelSpec,
    SpinGraph,
    SpinValue,
    build_hamiltonian,
    magnetization_sectors,
    model_from_json,
    spin_matrices,
)
from .ssep import aldous_scan, heisenberg_equivalence_check, ssep_generator

__version__ = "0.1.0"

__all__ = [
    "climit", "fcs", "gapbound", "locality", "spectra", "spinops", "ssep",
    "classical_partition", "quantum_partition", "sandwich_check",
    "aklt_triple", "correlation_length", "fcs_expectation", "two_point_function",
    "aklt_chain", "certify_gap", "martingale_gap_bound", "refined_gap_bound",
    "correlation_scan", "dynamic_commutator_profile", "fit_decay",
    "lieb_robinson_envelope",
    "eigen_spectrum", "foel_check", "lieb_mattis_check", "sector_gap",
    "spin_level_table",
    "ModelSpec", "SpinGraph", "SpinValue", "build_hamiltonian",
    "magnetization_sectors", "model_from_json", "spin_matrices",
    "aldous_scan", "heisenberg_equivalence_check", "ssep_generator",
]
