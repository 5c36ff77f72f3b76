"""
Core package for computing with FI^m-modules over prime fields.

Modules are realized pointwise on a truncated grid of objects; the package
evaluates finite presentations, computes minimal resolutions and
regularity, shift and derivative functors, torsion vectors and the tree of
quotients V/K_iV, and verifies the surrounding inequalities on random
instances.
"""

__version__ = "0.1.0"
