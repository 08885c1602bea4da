"""
drsubmod: minimization of DR-submodular functions over mixed-integer sets
defined by box constraints and monotonicity constraints on a directed rooted
forest, via the convex hull of the epigraph and exact separation.
"""

__version__ = "0.1.0"
