"""Secure and user-secure sum computation over networks.

Finite-field linear algebra (``galois``), network model (``netmodel``), cut
quantities (``cutlab``), linear codes (``lincode``), security verification
(``sentinel``), capacity bounds (``bounds``) and constructions (``forge``).
"""

from __future__ import annotations

from .bounds import BoundsReport, analyze
from .galois import FieldMatrix, PrimeField
from .lincode import LinearCode, check_decodable, check_local, parse_code, serialize_code
from .netmodel import Network, build_network, parse_network, serialize_network
from .sentinel import SECURE, USER_SECURE, SecurityVerdict, entropy_oracle, sweep

__all__ = [
    "BoundsReport", "FieldMatrix", "LinearCode", "Network", "PrimeField", "SECURE", "SecurityVerdict",
    "USER_SECURE", "analyze", "build_network", "check_decodable", "check_local", "entropy_oracle",
    "parse_code", "parse_network", "serialize_code", "serialize_network", "sweep",
]
