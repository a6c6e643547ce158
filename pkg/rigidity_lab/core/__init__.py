"""Computational core of rigidity-lab.

One module per analysis: linear algebra of hyperbolic matrices
(``matrix_core``), root data and resonance (``rootdata``), nilpotent Lie
algebras and their central towers (``nilpotent``), toral semiconjugacies
(``semiconj``), cone certificates (``cones``) and twisted lifting
obstructions (``cohomology``).
"""
