"""Centralized numerical tolerances.

Two tiers: ALGEBRAIC_TOL bounds single algebraic identities (hermiticity,
state normalization at construction), ACCUMULATED_TOL bounds quantities
assembled from many floating-point operations (unitary contractions,
marginal sums, norms after evolution).
"""

ALGEBRAIC_TOL = 1e-12
ACCUMULATED_TOL = 1e-10
