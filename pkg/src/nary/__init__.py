"""Exact structure-constant workbench for n-Lie, n-pre-Lie and n-L-dendriform algebras."""
from .core import BilinearForm, Covector, LinearMap, SkewPattern, StructureTensor, invert, parse_rational
from .ldendriform import NLDendriform, check_ldend, hessian_to_ldend, o_to_ldend, rb_to_ldend
from .nlie import NLieAlgebra, NLieRep, check_n_lie, check_rep, rb_search, require_verified, verify
from .nprelie import NPreLieAlgebra, NPreLieRep, check_nprelie, check_pre_rep, sub_adjacent
from .report import ParseError, PreconditionError, Report, SearchSpaceError, UnverifiedError, Violation

__all__ = [
    "BilinearForm", "Covector", "LinearMap", "SkewPattern", "StructureTensor", "invert", "parse_rational",
    "NLDendriform", "check_ldend", "hessian_to_ldend", "o_to_ldend", "rb_to_ldend",
    "NLieAlgebra", "NLieRep", "check_n_lie", "check_rep", "rb_search", "require_verified", "verify",
    "NPreLieAlgebra", "NPreLieRep", "check_nprelie", "check_pre_rep", "sub_adjacent",
    "ParseError", "PreconditionError", "Report", "SearchSpaceError", "UnverifiedError", "Violation",
]
