"""Exact differential forms on Lie algebras, generalized G2 spinors and T-duality."""

from .exterior import (
    Form,
    FormSyntaxError,
    basis,
    contract,
    exp_two_form,
    format_form,
    hodge_star,
    interior_product,
    parse_form,
    volume_form,
    wedge,
)

__version__ = "0.1.0"
