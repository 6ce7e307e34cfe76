"""
concentra

A verification lab for a deviation inequality on the Boolean cube and
its application to k-cycle counts in G(n, p).
"""

__version__ = "1.0.0"
__author__ = "concentra developers"
