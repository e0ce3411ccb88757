"""Affine Deligne-Lusztig varieties of GL_3 in the affine Grassmannian for basic b:
exact lattice arithmetic over F_{q^m}((t)), the Bruhat-Tits building of SL_3,
and brute-force oracles for the component structure."""

__version__ = "0.1.0"

from .ff import FieldCtx, FieldElem, field  # noqa: E402
from .series import TSeries  # noqa: E402
from .latmat import Mat3, Vertex, hermite_form, smith_decompose, vertex_of  # noqa: E402
from .cartan import CochClass, Cocharacter, inv, inv_prime  # noqa: E402
from .adlv import (B1, B2, ONE, BasicB, classify, compute_M, compute_M_prime,  # noqa: E402
                   dimension, enumerate_points, membership, nonempty)

__all__ = ["FieldCtx", "FieldElem", "field", "TSeries", "Mat3", "Vertex", "hermite_form",
           "smith_decompose", "vertex_of", "CochClass", "Cocharacter", "inv", "inv_prime",
           "BasicB", "ONE", "B1", "B2", "classify", "compute_M", "compute_M_prime",
           "dimension", "enumerate_points", "membership", "nonempty"]
