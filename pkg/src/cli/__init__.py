"""
Command-line interface: verify-cube, graph and mc.
"""
