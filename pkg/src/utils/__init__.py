"""
Shared utilities: configuration, exceptions, logging, seeded streams,
the min-norm solver, ordered parallel map and summary statistics.
"""
