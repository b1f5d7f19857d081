"""Python interface to the NCBF verifier."""

import json

from ._ncbf import (
    Activation,
    Bounder,
    DimensionError,
    DynamicsError,
    Network,
    NetworkError,
    System,
    deriv_bounds,
    inner_product_upper,
    jacobian_bounds,
    load_weights,
    make_system,
    network_from_json,
    preactivation_bounds,
    search_boundary,
    taylor_bounds,
    verify_json,
)

__all__ = [
    "Activation",
    "Bounder",
    "DimensionError",
    "DynamicsError",
    "Network",
    "NetworkError",
    "System",
    "deriv_bounds",
    "inner_product_upper",
    "jacobian_bounds",
    "load_weights",
    "make_system",
    "network_from_json",
    "preactivation_bounds",
    "search_boundary",
    "taylor_bounds",
    "verify",
]


def verify(system, net, cells, **kwargs):
    """Run the verifier and return the report as a dict (with per-leaf certificates)."""
    if isinstance(cells, int):
        cells = [cells]
    return json.loads(verify_json(system, net, list(cells), **kwargs))
