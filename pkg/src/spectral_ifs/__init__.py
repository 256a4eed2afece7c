"""Spectral analysis of affine iterated function systems built from Hadamard triples."""
from .cycles import ExtremeCycle, find_extreme_cycles, verify_cycle
from .ifs import MapFamily, chi_B, mu_hat
from .spectrum import SpectrumSet, completeness_function, encode, generate_lambda, orthogonality_defect
from .triple import (
    DigitSet,
    HadamardTriple,
    LatticeBasis,
    check_hadamard,
    dual_lattice,
    is_expansive,
    load_triple,
    make_triple,
    regularity_rank,
)

__version__ = "0.1.0"

__all__ = [
    "DigitSet",
    "ExtremeCycle",
    "HadamardTriple",
    "LatticeBasis",
    "MapFamily",
    "SpectrumSet",
    "check_hadamard",
    "chi_B",
    "completeness_function",
    "dual_lattice",
    "encode",
    "find_extreme_cycles",
    "generate_lambda",
    "is_expansive",
    "load_triple",
    "make_triple",
    "mu_hat",
    "orthogonality_defect",
    "regularity_rank",
    "verify_cycle",
]
