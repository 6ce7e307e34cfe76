"""
Services for concentra.

Exhaustive cube computations, convex distance and the inequality
verifiers, G(n, p) sampling, cycle statistics, Monte Carlo experiments
and report I/O.
"""
