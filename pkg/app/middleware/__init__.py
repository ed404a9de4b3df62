"""
Middleware for command execution.
"""
from .error_handler import handle_errors

__all__ = ['handle_errors']
