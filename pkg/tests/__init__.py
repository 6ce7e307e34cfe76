"""
Test suite for concentra.

Organized by unit, contract, integration and quality tests; full-size
acceptance sweeps carry the `slow` marker.
"""
