"""Exact kernel for q-deformed Heisenberg relations on tensor words with Clifford calculus."""

from .calculus import CalculusError, PolyFunction, cauchy_riemann, difference_op, dirac, is_monogenic, laplacian, partial
from .clifford import Blade, CliffordError, Multivector, all_blades, blade_product, mv_add, mv_mul
from .parser import ParseError, parse_expression, parse_polyfunction, parse_scalar
from .rewrite import (
    BudgetExceeded,
    Presentation,
    RewriteError,
    RewriteRule,
    check_identity,
    critical_pairs,
    load_presentation,
    normalize,
    parse_presentation,
    preset,
    termination_witness,
)
from .scalars import GaussianRational, Monomial, Scalar, ScalarError, scalar_add, scalar_limit_q1, scalar_mul
from .terms import Expression, Gen, TensorDegreeError, canonicalize, expr_add, expr_mul_word, expr_scale, expr_tensor
from .verify import (
    VerificationReport,
    derive_plane_relations,
    quantum_det,
    verify_classical_limit,
    verify_lemma_f1,
    verify_prop_bold,
    verify_prop_nonmonogenic,
    verify_theorem_monogenic,
)

__version__ = "0.1.0"
