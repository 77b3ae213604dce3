"""Multilinear restricted weak-type interpolation on finite measure spaces."""
from .spaces import MeasureSpace, SimpleFunction, SubsetWitness, make_space, measure_of, subset, function, indicator
from .lorentz import dual_exponent, lp_norm, weak_norm, lorentz1_rearrangement, lorentz1_dual
from .forms import Kernel, make_kernel, evaluate_form, adjoint_apply
from .exponents import (
    ExponentTuple, CombinationWeights, RegionDescription, validate_tuple, classify,
    convex_combination, solve_combination, interior_membership, deduce_strong_region,
)
from .constants import (
    EstimateClaim, Exhaustive, RandomSearch, AscentConfig, char_quotient,
    restricted_weak_constant, strong_type_lower,
)
from .interp import explicit_constant, verify_theorem, trace_proof, ProofTrace, TheoremReport

__version__ = "0.1.0"
