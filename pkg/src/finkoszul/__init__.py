"""Exact computations with Koszul complexes of FI^op-modules.

The package builds the complexes C(b, a), their normalized cosimplicial
models and the ordered-partition complex over the integers, computes
cohomology ranks and symmetric-group characters, and tabulates Rk(b, a),
the dimension of the space of homomorphisms between tensor powers.
"""

__version__ = "0.1.0"
