"""Density lower bounds for sign and size events of Hecke eigenvalues.

``bounds`` evaluates the closed-form bounds, ``optimizer`` runs the max-min
searches, ``empirical`` compares them with exact eigenform data and
Sato-Tate samples, and ``cli`` wraps everything in the ``hecke-bounds``
command.
"""

__version__ = "0.1.0"
