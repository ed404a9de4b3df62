"""
Controllers package initialization.
Exposes all controller classes for easy import.
"""
from .solve_controller import SolveController
from .transform_controller import TransformController
from .verify_controller import VerifyController

__all__ = ['SolveController', 'TransformController', 'VerifyController']
