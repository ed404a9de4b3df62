import os
import random
from fractions import Fraction

import pytest

from app import create_app
from app.config import config
from app.services.calculus_service import LagrangianSpec, euler_lagrange
from app.services.conserved_service import sign_convention
from app.services.expression_parser import parse

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'fixtures')


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES_DIR, f'{name}.problem')


@pytest.fixture
def app():
    return create_app()


@pytest.fixture(autouse=True)
def restore_config():
    """CLI overrides mutate the config singleton; put it back after each test."""
    saved = config.to_dict()
    yield
    for name, value in saved.items():
        setattr(config, name, value)
    euler_lagrange.cache_clear()
    sign_convention.cache_clear()


@pytest.fixture
def rng():
    return random.Random(20240613)


@pytest.fixture
def spinning():
    """L = (x''^2 - x'^2)/2."""
    return LagrangianSpec(1, 2, parse("(1/2)*(x''^2 - x'^2)", ['x']), ('x',))


@pytest.fixture
def hd_oscillator():
    return LagrangianSpec(1, 2, parse("(1/2)*(x''^2 - x^2)", ['x']), ('x',))


@pytest.fixture
def cs_particle():
    params = {'m': Fraction(1), 'lambda': Fraction(2)}
    text = "(lambda/2)*(y'*x'' - x'*y'') + (m/2)*(x'^2 + y'^2)"
    return LagrangianSpec(2, 2, parse(text, ['x', 'y'], params), ('x', 'y'))


@pytest.fixture
def quartic():
    return LagrangianSpec(1, 2, parse("x'^4 + 3*x^2*x''^2", ['x']), ('x',))


@pytest.fixture
def problem_file(tmp_path):
    """Write problem-file text to a temporary file and return its path."""
    def write(text: str, name: str = 'case.problem') -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def build_random_expr(rng: random.Random, n_coords: int = 2, max_order: int = 3, terms: int = 3, trans: bool = True):
    """Small random polynomial in t and jet variables, optionally with sin/cos/exp factors."""
    from app.services.expression import ONE, Expr, TransKind

    result = Expr()
    for _ in range(rng.randint(1, terms)):
        term = Expr.constant(Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
        for _ in range(rng.randint(0, 2)):
            term = term * Expr.jet(rng.randrange(n_coords), rng.randint(0, max_order))
        if rng.random() < 0.4:
            term = term * Expr.time(rng.randint(1, 2))
        if trans and rng.random() < 0.3:
            kind = rng.choice([TransKind.SIN, TransKind.COS, TransKind.EXP])
            term = term * Expr.trans(kind, Fraction(rng.choice([-2, -1, 1, 2]), rng.randint(1, 2)))
        result = result + term
    return result if not result.is_zero() else ONE


def random_jet_point(rng: random.Random, n_coords: int = 2, max_order: int = 8):
    from app.services.expression import JetVar

    return {JetVar(i, k): rng.uniform(-1.5, 1.5) for i in range(n_coords) for k in range(max_order + 1)}


@pytest.fixture
def random_expr():
    return build_random_expr
