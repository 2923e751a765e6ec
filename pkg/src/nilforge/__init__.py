"""nilforge: exact rational arithmetic for commutative nilpotent
algebras, nil-polynomials and affine homogeneity of nil-hypersurfaces."""

__version__ = "0.1.0"

from .exactlin import (QQ, AffineMap, LinearSolution, Matrix, rat,
                       rational_spectrum, rref_solve, sparse_kernel,
                       sparse_solve)
from .mpoly import MPoly, MPolyParseError, parse, polarize
from .algebra import (AlgebraError, Grading, NilAlgebra, Pointing, Subspace,
                      adapted_decomposition, algebra_from_json,
                      algebra_to_json, derivation_algebra, grading_index3,
                      smash_product)
from .milnor import MilnorError, MilnorResult, milnor_algebra
from .nilpoly import (EquivalenceWitness, NilPolyError, NilPolynomial,
                      binary_quartic_invariants, e6_family,
                      equivalence_witness_check, family_degree3,
                      family_degree4, leading_form_analysis, nil_polynomial,
                      nilpoly_from_json, nilpoly_to_json, reconstruct_algebra,
                      regenerate_from_2_3, shift_pointing)
from .homogeneity import (GradingReport, HomogeneityReport, aff_lie_algebra,
                          grading_necessary_test, homogeneity_report,
                          jacobi_membership, transitivity_witness)
