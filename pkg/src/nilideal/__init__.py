"""Exact free associative algebra toolkit for Lie-nilpotency ideals T(n)."""

from .freealg import GF, QQ, ZZ, MultiDegree, Poly, Ring, bracket, left_normed, substitute
from .generators import builtin_specs, enumerate_component, family, family_poly, get_spec
from .lattice import field_membership, lattice_membership, rank, span_equal
from .reducer import Certificate, reduce, reduce_t5_element, verify_certificate
from .textfmt import format_poly, parse_poly

__all__ = [
    "GF", "QQ", "ZZ", "MultiDegree", "Poly", "Ring", "bracket", "left_normed", "substitute",
    "builtin_specs", "enumerate_component", "family", "family_poly", "get_spec",
    "field_membership", "lattice_membership", "rank", "span_equal",
    "Certificate", "reduce", "reduce_t5_element", "verify_certificate",
    "format_poly", "parse_poly",
]
__version__ = "0.1.0"
