import random
from fractions import Fraction

import pytest
import sympy

from app.exceptions import SymmetryError, ValidationError
from app.models import AnsatzConfig
from app.services.calculus_service import LagrangianSpec
from app.services.expression import ONE, ZERO, Expr
from app.services.expression_parser import parse
from app.services.symmetry_service import (
    SymmetryGenerator,
    assemble_system,
    build_ansatz,
    characteristic_frequencies,
    determining_identity,
    determining_identity_second_order,
    extract_generators,
    find_symmetries,
)
from tests.conftest import build_random_expr

HD_CONFIG = AnsatzConfig(gauge_t_degree=0, gauge_degree=1)


def px(text):
    return parse(text, ['x'])


class TestDeterminingIdentity:
    def test_time_translation(self, spinning):
        assert determining_identity(spinning, ONE, [ZERO], ZERO).is_zero()

    def test_shift(self, spinning):
        assert determining_identity(spinning, ZERO, [ONE], ZERO).is_zero()

    def test_boost_needs_gauge(self, spinning):
        boost = [Expr.time()]
        assert not determining_identity(spinning, ZERO, boost, ZERO).is_zero()
        assert determining_identity(spinning, ZERO, boost, -Expr.jet(0)).is_zero()

    def test_scaling_is_not_a_symmetry(self, spinning):
        assert not determining_identity(spinning, ZERO, [Expr.jet(0)], ZERO).is_zero()

    def test_wrong_eta_length(self, spinning):
        with pytest.raises(SymmetryError):
            determining_identity(spinning, ZERO, [ONE, ONE], ZERO)

    @pytest.mark.parametrize("seed", range(20))
    def test_explicit_second_order_form_agrees(self, seed, quartic):
        rng = random.Random(seed)
        zeta, eta, gauge = (build_random_expr(rng, n_coords=1, max_order=1) for _ in range(3))
        general = determining_identity(quartic, zeta, [eta], gauge)
        explicit = determining_identity_second_order(quartic, zeta, [eta], gauge)
        assert general == explicit

    def test_explicit_form_rejects_other_orders(self):
        spec = LagrangianSpec(1, 1, px("(1/2)*x'^2"), ('x',))
        with pytest.raises(SymmetryError):
            determining_identity_second_order(spec, ONE, [ZERO], ZERO)


class TestCharacteristicFrequencies:
    def test_spinning(self, spinning):
        assert characteristic_frequencies(spinning) == [Fraction(1)]

    def test_hd_oscillator(self, hd_oscillator):
        assert characteristic_frequencies(hd_oscillator) == [Fraction(1)]

    def test_cs_particle(self, cs_particle):
        assert characteristic_frequencies(cs_particle) == [Fraction(1, 2)]

    def test_nonlinear_equations(self, quartic):
        assert characteristic_frequencies(quartic) == []

    def test_irrational_roots_are_skipped(self, mocker):
        mock_logger = mocker.patch('app.services.symmetry_service.logger')
        spec = LagrangianSpec(1, 2, px("(1/2)*x''^2 - x'^2"), ('x',))
        assert characteristic_frequencies(spec) == []
        assert mock_logger.warning.called


class TestAnsatz:
    def test_gauge_never_contains_constant(self, spinning):
        ansatz = build_ansatz(spinning, AnsatzConfig(frequencies=[]))
        assert ONE not in ansatz.gauge_basis

    def test_unknown_count(self, spinning):
        ansatz = build_ansatz(spinning, AnsatzConfig(zeta_degree=0, eta_t_degree=0, eta_x_degree=0,
                                                     gauge_t_degree=0, gauge_degree=1, frequencies=[]))
        # zeta: 1; eta: 1; gauge: x, x'
        assert ansatz.unknown_count == 4
        assert len(ansatz.slots) == 4

    def test_inverse_coordinates(self, quartic):
        ansatz = build_ansatz(quartic, AnsatzConfig(eta_t_degree=0, eta_x_degree=1, inverse_coords=True, frequencies=[]))
        assert Expr.jet(0) ** -1 in ansatz.eta_basis[0]

    def test_instantiate_length(self, spinning):
        ansatz = build_ansatz(spinning, AnsatzConfig(frequencies=[]))
        with pytest.raises(SymmetryError):
            ansatz.instantiate([Fraction(1)])

    def test_negative_frequency(self):
        with pytest.raises(ValidationError):
            AnsatzConfig(frequencies=[Fraction(-1)])


class TestFindSymmetries:
    def test_spinning_particle(self, spinning):
        _, system, generators = find_symmetries(spinning, AnsatzConfig())
        assert len(generators) == 5
        assert system.unknown_count == system.matrix.cols

    def test_hd_oscillator(self, hd_oscillator):
        _, _, generators = find_symmetries(hd_oscillator, HD_CONFIG)
        assert len(generators) == 5

    def test_generators_satisfy_identity(self, cs_particle):
        _, _, generators = find_symmetries(cs_particle, AnsatzConfig(gauge_degree=1))
        assert len(generators) == 8
        for g in generators:
            assert determining_identity(cs_particle, g.zeta, g.eta, g.gauge).is_zero()

    def test_basis_is_reproducible(self, spinning):
        first = find_symmetries(spinning, AnsatzConfig())[2]
        second = find_symmetries(spinning, AnsatzConfig())[2]
        assert [(g.zeta, g.eta, g.gauge) for g in first] == [(g.zeta, g.eta, g.gauge) for g in second]

    def test_zero_vector_is_rejected(self, spinning):
        ansatz = build_ansatz(spinning, AnsatzConfig(frequencies=[]))
        with pytest.raises(SymmetryError):
            extract_generators(ansatz, [[Fraction(0)] * ansatz.unknown_count])

    def test_rows_are_monomial_coefficients(self, spinning):
        ansatz = build_ansatz(spinning, AnsatzConfig(frequencies=[]))
        system = assemble_system(spinning, ansatz)
        assert len(system.rows) == len(system.monomials)
        assert len(set(system.monomials)) == len(system.monomials)


class TestSymmetryGenerator:
    def test_characteristics(self):
        g = SymmetryGenerator(ONE, [ZERO], ZERO)
        assert g.characteristics == [-Expr.jet(0, 1)]

    def test_sum_and_scale(self):
        a = SymmetryGenerator(ONE, [ZERO], ZERO)
        b = SymmetryGenerator(ZERO, [ONE], Expr.jet(0))
        combined = a + b.scaled(Fraction(2))
        assert combined.zeta == ONE
        assert combined.eta == [Expr.constant(2)]
        assert combined.gauge == Expr.jet(0) * 2
        assert not combined.is_null()


SMALL_CONFIG = AnsatzConfig(zeta_degree=1, eta_t_degree=1, eta_x_degree=0,
                            gauge_t_degree=0, gauge_degree=1, frequencies=[])
FREE_CONFIG = AnsatzConfig(zeta_degree=0, eta_t_degree=3, eta_x_degree=0,
                           gauge_t_degree=1, gauge_degree=1, frequencies=[])


def free_second_order():
    """L = x''^2 / 2, so E(L) = x''''."""
    return LagrangianSpec(1, 2, px("(1/2)*x''^2"), ('x',))


def dense_rank(system) -> int:
    if not system.rows:
        return 0
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in system.rows]).rank()


class TestCompletenessWithinAnsatz:
    @pytest.mark.parametrize("name,config", [
        ("spinning", SMALL_CONFIG),
        ("hd_oscillator", SMALL_CONFIG),
        ("quartic", SMALL_CONFIG),
        ("cs_particle", AnsatzConfig(zeta_degree=0, eta_t_degree=0, eta_x_degree=0,
                                     gauge_t_degree=0, gauge_degree=1, frequencies=[])),
        ("free", FREE_CONFIG),
    ])
    def test_nullity_matches_dense_rank(self, request, name, config):
        spec = free_second_order() if name == "free" else request.getfixturevalue(name)
        _, system, generators = find_symmetries(spec, config)
        assert system.unknown_count <= 12
        assert len(generators) == system.unknown_count - dense_rank(system)

    @pytest.mark.parametrize("name", ["spinning", "hd_oscillator", "cs_particle"])
    def test_enlarging_a_basis_never_loses_generators(self, request, name):
        spec = request.getfixturevalue(name)
        base = dict(zeta_degree=0, eta_t_degree=0, eta_x_degree=0,
                    gauge_t_degree=0, gauge_degree=1, frequencies=[])
        count = len(find_symmetries(spec, AnsatzConfig(**base))[2])
        for field in ('zeta_degree', 'eta_t_degree', 'eta_x_degree', 'gauge_t_degree', 'gauge_degree'):
            larger = dict(base, **{field: base[field] + 1})
            assert len(find_symmetries(spec, AnsatzConfig(**larger))[2]) >= count, field
        with_trig = dict(base, frequencies=[Fraction(1)])
        assert len(find_symmetries(spec, AnsatzConfig(**with_trig))[2]) >= count


class TestFreeSecondOrder:
    @pytest.mark.parametrize("eta,gauge", [
        ("1", "0"),
        ("t", "0"),
        ("t^2", "2*x'"),
        ("t^3", "6*t*x' - 6*x"),
    ])
    def test_polynomial_translations(self, eta, gauge):
        spec = free_second_order()
        assert determining_identity(spec, ZERO, [px(eta)], px(gauge)).is_zero()

    def test_search_finds_time_and_cubic_translations(self):
        _, _, generators = find_symmetries(free_second_order(), FREE_CONFIG)
        assert len(generators) == 5
