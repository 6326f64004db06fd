"""Built-in example networks and codes.

Only ``fig2`` has a fully stated topology.  ``fig1_reconstruction`` and
``reverse_butterfly`` are reconstructions chosen to match every quantity
quoted for them.
"""

from __future__ import annotations

from .lincode import LinearCode, code_from_columns
from .netmodel import Network, build_network


def fig2() -> Network:
    return build_network(
        2,
        [("e1", "s1", "rho"), ("e2", "s1", "v"), ("e3", "s2", "v"), ("e4", "s2", "rho"), ("e5", "v", "rho")],
        sources=["s1", "s2"],
        sink="rho",
    )


def fig1_reconstruction() -> Network:
    return build_network(
        2,
        [
            ("e1", "s1", "w"), ("e2", "s1", "w"), ("e3", "s1", "w"),
            ("e4", "s2", "w"), ("e5", "s2", "rho"), ("e6", "s2", "rho"),
            ("e7", "w", "rho"),
        ],
        sources=["s1", "s2"],
        sink="rho",
    )


def reverse_butterfly() -> Network:
    return build_network(
        2,
        [
            ("e1", "s1", "n1"), ("e2", "s1", "n2"), ("e3", "s2", "n2"), ("e4", "s2", "n3"),
            ("e5", "n2", "n4"), ("e6", "n4", "n1"), ("e7", "n4", "n3"),
            ("e8", "n1", "rho"), ("e9", "n3", "rho"),
        ],
        sources=["s1", "s2"],
        sink="rho",
    )


def example2_code() -> LinearCode:
    """The (2, 1) user-secure code on ``fig2`` over F_2.

    Rows are (x1, x2, y1, y2): U_e1 = x1+x2, U_e2 = x2, U_e3 = y1,
    U_e4 = y1+y2, U_e5 = x2+y1.
    """
    return code_from_columns(2, 2, 0, 2, {
        "e1": [1, 1, 0, 0],
        "e2": [0, 1, 0, 0],
        "e3": [0, 0, 1, 0],
        "e4": [0, 0, 1, 1],
        "e5": [0, 1, 1, 0],
    })


NETWORKS = {
    "fig2": (fig2, "stated: two-source network of the user-secure examples"),
    "fig1_reconstruction": (fig1_reconstruction, "reconstruction: matches C_min=1, D_min=3, A_min=2"),
    "reverse_butterfly": (reverse_butterfly, "reconstruction: reverse butterfly with global cut {e8, e9}"),
}

CODES = {
    "example2": (example2_code, "fig2", "stated: (2, 1) user-secure code over F_2"),
}


def get_network(name: str) -> Network:
    return NETWORKS[name][0]()


def get_code(name: str) -> LinearCode:
    return CODES[name][0]()
