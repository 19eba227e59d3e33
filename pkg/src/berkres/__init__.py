"""Exact toolkit for reduction loci of rational maps on the Berkovich line.

Submodules: valfield (valued-field backends), ratmap (pairs of binary forms),
berktree (type II points and the tree geometry), redtheory (intrinsic
reductions and depths), hypres (resultant functions and minimization),
harness (verification pipeline and report), cli (command line front end).
"""

from .valfield import FieldConfig

__all__ = ["FieldConfig"]
__version__ = "0.1.0"
