"""
Utilities package.
Helper functions and utilities for the application.
"""
