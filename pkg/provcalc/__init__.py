"""Calcul de mises à jour avec suivi de provenance"""

__version__ = "0.1.0"
