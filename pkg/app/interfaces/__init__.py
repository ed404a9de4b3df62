"""
Abstract interfaces for services.

Defines abstract base classes (ABCs) so controllers and the numeric
service depend on these abstractions rather than concrete implementations.
"""

from abc import ABC, abstractmethod
from typing import Callable

import numpy as np


class Stepper(ABC):
    """
    One step of an explicit integrator for y' = f(t, y).

    Benefits:
    - The drift checks do not care which scheme produced the trajectory
    - Easy to mock for testing
    """

    @abstractmethod
    def step(
        self,
        f: Callable[[float, np.ndarray], np.ndarray],
        t: float,
        y: np.ndarray,
        h: float
    ) -> np.ndarray:
        """
        Advance the state by one step.

        Args:
            f: Right-hand side
            t: Current time
            y: Current state
            h: Step size

        Returns:
            State at t + h
        """
        pass

    @abstractmethod
    def get_name(self) -> str:
        """
        Get the name of this scheme.

        Returns:
            Scheme name (e.g., 'rk4')
        """
        pass


class ReportRenderer(ABC):
    """
    Abstract interface for report writers.

    Allows different output formats (human text, machine JSON).
    """

    @abstractmethod
    def render(self, report: dict) -> str:
        """
        Render a report dictionary.

        Args:
            report: Output of Report.to_dict()

        Returns:
            Complete document text
        """
        pass
