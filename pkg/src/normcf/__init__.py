"""Norm-associated continued fractions and the Dirichlet spectrum of planar norms."""
from .critdet import critdet, critical_determinant, delta_general, delta_p, rho
from .dynamics import RegionLabel, classify, map_M, measure_S, simulate, sup_D_over_region
from .exactnum import AmbiguousComparison, PrecisionExhausted, QuadSurd, surd
from .fcf import Membership, in_singularization_area, lattice_oracle, s_expand
from .norms import Norm, PNorm, parse_norm
from .regcf import RegularCF, parse_alpha
from .spectrum import D_F, D_p, delta_limsup, min_delta_p

__version__ = "0.1.0"

__all__ = [
    "AmbiguousComparison", "D_F", "D_p", "Membership", "Norm", "PNorm", "PrecisionExhausted",
    "QuadSurd", "RegionLabel", "RegularCF", "classify", "critdet", "critical_determinant",
    "delta_general", "delta_limsup", "delta_p", "in_singularization_area", "lattice_oracle",
    "map_M", "measure_S", "min_delta_p", "parse_alpha", "parse_norm", "rho", "s_expand",
    "simulate", "surd", "sup_D_over_region",
]
