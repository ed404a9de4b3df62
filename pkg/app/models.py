"""
Problem and report data models.

These models provide:
- Type safety and validation
- Fail Fast validation (errors caught early)
- Stable dictionary renderings for the report writers
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from app.constants import (
    DEFAULT_ETA_T_DEGREE,
    DEFAULT_ETA_X_DEGREE,
    DEFAULT_GAUGE_DEGREE,
    DEFAULT_GAUGE_T_DEGREE,
    DEFAULT_STEP,
    DEFAULT_T_END,
    DEFAULT_ZETA_DEGREE,
    EXIT_ASSERTION_FAILED,
    EXIT_OK,
    REPORT_SCHEMA_VERSION,
)
from app.exceptions import ValidationError


@dataclass
class AnsatzConfig:
    """
    Basis configuration for the generator ansatz.

    ``frequencies`` is None for automatic detection from the linearised
    equations of motion; an empty list disables sin/cos/exp factors.
    """

    zeta_degree: int = DEFAULT_ZETA_DEGREE
    eta_t_degree: int = DEFAULT_ETA_T_DEGREE
    eta_x_degree: int = DEFAULT_ETA_X_DEGREE
    gauge_t_degree: int = DEFAULT_GAUGE_T_DEGREE
    gauge_degree: int = DEFAULT_GAUGE_DEGREE
    inverse_coords: bool = False
    frequencies: Optional[List[Fraction]] = None
    zeta_depends_on_x: bool = False

    def __post_init__(self):
        from app.validators import validate_degree

        for name in ('zeta_degree', 'eta_t_degree', 'eta_x_degree', 'gauge_t_degree', 'gauge_degree'):
            is_valid, error_msg = validate_degree(name, getattr(self, name))
            if not is_valid:
                raise ValidationError(name, error_msg)
        if self.frequencies is not None:
            if any(f <= 0 for f in self.frequencies):
                raise ValidationError('frequencies', 'frequencies must be positive rationals')
            self.frequencies = sorted(set(Fraction(f) for f in self.frequencies))

    def to_dict(self) -> dict:
        return {
            'zeta_degree': self.zeta_degree,
            'eta_t_degree': self.eta_t_degree,
            'eta_x_degree': self.eta_x_degree,
            'gauge_t_degree': self.gauge_t_degree,
            'gauge_degree': self.gauge_degree,
            'inverse_coords': self.inverse_coords,
            'frequencies': None if self.frequencies is None else [str(f) for f in self.frequencies],
            'zeta_depends_on_x': self.zeta_depends_on_x,
        }


@dataclass
class NumericConfig:
    """Integration settings; tolerances left as None fall back to the runtime config."""

    initial_states: List[List[float]] = field(default_factory=list)
    t_end: float = DEFAULT_T_END
    step: float = DEFAULT_STEP
    tol_abs: Optional[float] = None
    tol_rel: Optional[float] = None

    def __post_init__(self):
        from app.validators import validate_initial_state, validate_step, validate_tolerance

        is_valid, error_msg = validate_step(self.step, self.t_end)
        if not is_valid:
            raise ValidationError('step', error_msg)
        for name in ('tol_abs', 'tol_rel'):
            is_valid, error_msg = validate_tolerance(name, getattr(self, name))
            if not is_valid:
                raise ValidationError(name, error_msg)
        if not self.initial_states:
            raise ValidationError('initial', 'at least one initial state is required')
        for state in self.initial_states:
            is_valid, error_msg = validate_initial_state(state)
            if not is_valid:
                raise ValidationError('initial', error_msg)


@dataclass
class TransformConfig:
    """Point transformation x = x_of(x', t'), t = t_of(x', t') plus gauge data, as text."""

    t_of: str
    x_of: Dict[str, str]
    gauge: str = '0'
    F: str = '0'
    cyclic_index: int = 0
    integral: Optional[str] = None


@dataclass
class ExpectedIntegral:
    name: str
    text: str
    line: Optional[int] = None


@dataclass
class ProblemFile:
    """Parsed problem file; expression fields are still text."""

    path: str
    coordinates: List[str]
    order: int
    lagrangian: str
    parameters: Dict[str, Fraction] = field(default_factory=dict)
    ansatz: AnsatzConfig = field(default_factory=AnsatzConfig)
    numeric: Optional[NumericConfig] = None
    transform: Optional[TransformConfig] = None
    expected: List[ExpectedIntegral] = field(default_factory=list)
    lines: Dict[str, int] = field(default_factory=dict)

    def line_of(self, key: str) -> Optional[int]:
        return self.lines.get(key)

    def __post_init__(self):
        from app.validators import validate_coordinates, validate_order

        is_valid, error_msg = validate_coordinates(self.coordinates)
        if not is_valid:
            raise ValidationError('coordinates', error_msg)
        is_valid, error_msg = validate_order(self.order)
        if not is_valid:
            raise ValidationError('order', error_msg)
        if self.transform is not None:
            unknown = set(self.transform.x_of) - set(self.coordinates)
            if unknown:
                raise ValidationError('x_of', f"undeclared coordinates: {', '.join(sorted(unknown))}")
            missing = [c for c in self.coordinates if c not in self.transform.x_of]
            if missing:
                raise ValidationError('x_of', f"missing maps for: {', '.join(missing)}")
            if not 0 <= self.transform.cyclic_index < len(self.coordinates):
                raise ValidationError('cyclic_index', f'must be in 0..{len(self.coordinates) - 1}')


@dataclass
class Report:
    """
    Everything one pipeline run established.

    Human and machine renderings are both built from ``to_dict()`` so they
    carry identical facts.
    """

    command: str
    problem: str
    seed: int
    coordinates: List[str] = field(default_factory=list)
    sign_convention: Optional[int] = None
    el_equations: List[str] = field(default_factory=list)
    generators: List[dict] = field(default_factory=list)
    charges: List[dict] = field(default_factory=list)
    span_matches: List[dict] = field(default_factory=list)
    drift: List[dict] = field(default_factory=list)
    transform: Optional[dict] = None
    warnings: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def failures(self) -> List[str]:
        failed = [f"expected integral {m['name']} not in span" for m in self.span_matches if not m['contained']]
        failed += [
            f"drift of {d['name']} exceeds tolerance (state {d['state']})"
            for d in self.drift if not d['within_tolerance']
        ]
        if self.transform:
            failed += [f"transform check {name} failed" for name, ok in self.transform.get('checks', {}).items() if not ok]
        return failed

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_ASSERTION_FAILED

    def to_dict(self, include_timings: bool = False) -> dict:
        data = {
            'schema': REPORT_SCHEMA_VERSION,
            'command': self.command,
            'problem': self.problem,
            'seed': self.seed,
            'coordinates': self.coordinates,
            'sign_convention': self.sign_convention,
            'el_equations': self.el_equations,
            'generators': self.generators,
            'charges': self.charges,
            'span_matches': self.span_matches,
            'drift': self.drift,
            'transform': self.transform,
            'warnings': self.warnings,
            'verdict': 'pass' if self.passed else 'fail',
            'failures': self.failures,
        }
        if include_timings:
            data['timings'] = {name: round(seconds, 6) for name, seconds in self.timings.items()}
        return data
