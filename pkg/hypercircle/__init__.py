"""
Hyper-ideal circle patterns: Delaunay ingest, branched covers, the
variational solve, hyperbolic layout, realizability checks and sphere
doubling.
"""

from hypercircle.errors import HypercircleError, InputError

__all__ = ['HypercircleError', 'InputError']
