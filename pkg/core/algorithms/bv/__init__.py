"""
Symplectic and BV algorithms.

Usage:
    from core.algorithms.bv import BVOperations
    report = BVOperations.check_master_equation(omega, theta)
"""

from .bv_operations import BVOperations, residual_by_hbar

__all__ = ['BVOperations', 'residual_by_hbar']
