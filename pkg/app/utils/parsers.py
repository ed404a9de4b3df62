"""
Problem-file parsing utilities.

The format is line oriented:

    format = 1
    coordinates = x, y
    order = 2
    lagrangian = (1/2)*(x''^2 - x'^2)

    [parameters]
    m = 1

    [ansatz] / [numeric] / [transform] / [expected]
    key = value

'#' starts a comment line. Keys are unique within a section except
``initial`` in [numeric], which may repeat (one line per initial state).
"""
import os
from fractions import Fraction
from typing import Dict, List, Tuple

from app.constants import (
    COMMENT_PREFIX,
    FREQUENCIES_AUTO,
    FREQUENCIES_NONE,
    KNOWN_SECTIONS,
    SECTION_ANSATZ,
    SECTION_EXPECTED,
    SECTION_NUMERIC,
    SECTION_PARAMETERS,
    SECTION_TRANSFORM,
)
from app.exceptions import InputError, ProblemFileError
from app.models import (
    AnsatzConfig,
    ExpectedIntegral,
    NumericConfig,
    ProblemFile,
    TransformConfig,
)
from app.validators import validate_format_version, validate_frequencies_keyword

TOP_LEVEL = '__top__'
TOP_LEVEL_KEYS = ('format', 'coordinates', 'order', 'lagrangian')
ANSATZ_INT_KEYS = ('zeta_degree', 'eta_t_degree', 'eta_x_degree', 'gauge_t_degree', 'gauge_degree')
ANSATZ_BOOL_KEYS = ('inverse_coords', 'zeta_depends_on_x')
NUMERIC_KEYS = ('initial', 't_end', 'step', 'tol_abs', 'tol_rel')
TRANSFORM_KEYS = ('t_of', 'gauge', 'F', 'cyclic_index', 'integral')
TRUE_WORDS = ('true', 'yes', 'on', '1')
FALSE_WORDS = ('false', 'no', 'off', '0')

Entry = Tuple[str, str, int]


def _split_entries(content: str) -> Dict[str, List[Entry]]:
    """Group (key, value, line) by section, checking syntax and duplicates."""
    sections: Dict[str, List[Entry]] = {TOP_LEVEL: []}
    current = TOP_LEVEL
    seen_format = False
    for number, raw in enumerate(content.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(COMMENT_PREFIX):
            continue
        if line.startswith('['):
            if not line.endswith(']'):
                raise ProblemFileError(f"malformed section header '{line}'", line=number)
            current = line[1:-1].strip()
            if current not in KNOWN_SECTIONS:
                raise ProblemFileError(f"unknown section [{current}]", line=number)
            if current in sections:
                raise ProblemFileError(f"section [{current}] appears twice", line=number)
            sections[current] = []
            continue
        if '=' not in line:
            raise ProblemFileError(f"expected 'key = value', got '{line}'", line=number)
        key, value = (part.strip() for part in line.split('=', 1))
        if not key:
            raise ProblemFileError("empty key", line=number)
        if not seen_format:
            if current != TOP_LEVEL or key != 'format':
                raise ProblemFileError("first entry must be the 'format = 1' header", line=number)
            seen_format = True
        duplicate = any(k == key for k, _, _ in sections[current])
        if duplicate and not (current == SECTION_NUMERIC and key == 'initial'):
            raise ProblemFileError(f"duplicate key '{key}'", line=number)
        sections[current].append((key, value, number))
    if not seen_format:
        raise ProblemFileError("missing 'format = 1' header")
    return sections


def _as_int(key: str, value: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ProblemFileError(f"'{key}' must be an integer, got '{value}'", line=line)


def _as_float(key: str, value: str, line: int) -> float:
    try:
        if '/' in value:
            return float(Fraction(value.replace(' ', '')))
        return float(value)
    except (ValueError, ZeroDivisionError):
        raise ProblemFileError(f"'{key}' must be a number, got '{value}'", line=line)


def _as_bool(key: str, value: str, line: int) -> bool:
    word = value.lower()
    if word in TRUE_WORDS:
        return True
    if word in FALSE_WORDS:
        return False
    raise ProblemFileError(f"'{key}' must be true or false, got '{value}'", line=line)


def _as_rational(key: str, value: str, line: int) -> Fraction:
    from app.services.expression_parser import parse_rational

    try:
        return parse_rational(value)
    except InputError as e:
        raise ProblemFileError(f"'{key}': {e.message}", line=line)


def _check_keys(section: str, entries: List[Entry], allowed) -> None:
    for key, _, line in entries:
        if key not in allowed:
            raise ProblemFileError(f"unknown key '{key}' in [{section}]", line=line)


def _build_ansatz(entries: List[Entry], lines: Dict[str, int]) -> AnsatzConfig:
    _check_keys(SECTION_ANSATZ, entries, ANSATZ_INT_KEYS + ANSATZ_BOOL_KEYS + ('frequencies',))
    values = {}
    for key, value, line in entries:
        lines[f'{SECTION_ANSATZ}.{key}'] = line
        if key in ANSATZ_INT_KEYS:
            values[key] = _as_int(key, value, line)
        elif key in ANSATZ_BOOL_KEYS:
            values[key] = _as_bool(key, value, line)
        else:
            is_valid, error_msg = validate_frequencies_keyword(value)
            if not is_valid:
                raise ProblemFileError(error_msg, line=line)
            values[key] = _frequencies(value, line)
    return AnsatzConfig(**values)


def _frequencies(value: str, line: int):
    """'auto' -> None (detect), 'none' -> [], otherwise a list of rationals."""
    if value.lower() == FREQUENCIES_AUTO:
        return None
    if value.lower() == FREQUENCIES_NONE:
        return []
    return [_as_rational('frequencies', item, line) for item in value.split(',')]


def _build_numeric(entries: List[Entry], lines: Dict[str, int]) -> NumericConfig:
    _check_keys(SECTION_NUMERIC, entries, NUMERIC_KEYS)
    values = {'initial_states': []}
    for key, value, line in entries:
        lines[f'{SECTION_NUMERIC}.{key}'] = line
        if key == 'initial':
            values['initial_states'].append([_as_float(key, item.strip(), line) for item in value.split(',')])
        else:
            values[key] = _as_float(key, value, line)
    return NumericConfig(**values)


def _build_transform(entries: List[Entry], lines: Dict[str, int]) -> TransformConfig:
    values: Dict[str, object] = {'x_of': {}}
    for key, value, line in entries:
        lines[f'{SECTION_TRANSFORM}.{key}'] = line
        if key.startswith('x_of.'):
            values['x_of'][key[len('x_of.'):]] = value
        elif key == 'cyclic_index':
            values[key] = _as_int(key, value, line)
        elif key in TRANSFORM_KEYS:
            values[key] = value
        else:
            raise ProblemFileError(f"unknown key '{key}' in [{SECTION_TRANSFORM}]", line=line)
    if 't_of' not in values:
        raise ProblemFileError(f"[{SECTION_TRANSFORM}] needs t_of")
    return TransformConfig(**values)


def parse_problem_text(content: str, path: str = '<string>') -> ProblemFile:
    """
    Parse problem-file text.

    Parameters are collected before anything else so expressions may use them.

    Raises:
        ProblemFileError: malformed content, with the offending line
        ValidationError: a field fails validation
    """
    sections = _split_entries(content)
    lines: Dict[str, int] = {}

    top = {}
    _check_keys('top level', sections[TOP_LEVEL], TOP_LEVEL_KEYS)
    for key, value, line in sections[TOP_LEVEL]:
        top[key] = (value, line)
        lines[key] = line
    version_text, version_line = top['format']
    is_valid, error_msg = validate_format_version(_as_int('format', version_text, version_line))
    if not is_valid:
        raise ProblemFileError(error_msg, line=version_line)
    for required in ('coordinates', 'order', 'lagrangian'):
        if required not in top:
            raise ProblemFileError(f"missing top-level key '{required}'")

    parameters: Dict[str, Fraction] = {}
    for key, value, line in sections.get(SECTION_PARAMETERS, []):
        parameters[key] = _as_rational(key, value, line)
        lines[f'{SECTION_PARAMETERS}.{key}'] = line

    ansatz = _build_ansatz(sections.get(SECTION_ANSATZ, []), lines)
    numeric = _build_numeric(sections[SECTION_NUMERIC], lines) if SECTION_NUMERIC in sections else None
    transform = _build_transform(sections[SECTION_TRANSFORM], lines) if SECTION_TRANSFORM in sections else None
    expected = [ExpectedIntegral(key, value, line) for key, value, line in sections.get(SECTION_EXPECTED, [])]

    coordinates = [c.strip() for c in top['coordinates'][0].split(',') if c.strip()]
    return ProblemFile(
        path=path,
        coordinates=coordinates,
        order=_as_int('order', *top['order']),
        lagrangian=top['lagrangian'][0],
        parameters=parameters,
        ansatz=ansatz,
        numeric=numeric,
        transform=transform,
        expected=expected,
        lines=lines,
    )


def read_problem_file(path: str) -> ProblemFile:
    """
    Read and parse a problem file from disk.

    Raises:
        ProblemFileError: the file is missing, unreadable or malformed
    """
    if not os.path.isfile(path):
        raise ProblemFileError("file not found", path=path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            content = f.read()
    except OSError as e:
        raise ProblemFileError(f"cannot read file: {e}", path=path)
    try:
        return parse_problem_text(content, path)
    except ProblemFileError as e:
        e.path = path
        e.details['path'] = path
        raise
