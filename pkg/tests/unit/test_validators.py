import pytest
from app.validators import (
    validate_coordinates,
    validate_degree,
    validate_format_version,
    validate_frequencies_keyword,
    validate_identifier,
    validate_initial_state,
    validate_order,
    validate_output_format,
    validate_step,
    validate_tolerance,
)
from app.constants import OUTPUT_FORMATS


class TestValidators:
    @pytest.mark.parametrize("name,is_valid", [
        ("x", True),
        ("theta_2", True),
        ("t", False),
        ("sin", False),
        ("2x", False),
        ("", False),
    ])
    def test_validate_identifier(self, name, is_valid):
        result, error = validate_identifier(name)
        assert result == is_valid
        assert (error is None) == is_valid

    @pytest.mark.parametrize("names,is_valid", [
        (["x", "y"], True),
        ([], False),
        (["x", "x"], False),
        (["x", "D"], False),
    ])
    def test_validate_coordinates(self, names, is_valid):
        assert validate_coordinates(names)[0] == is_valid

    def test_validate_order(self):
        assert validate_order(2)[0] is True
        assert validate_order(0)[0] is False

    def test_validate_degree(self):
        assert validate_degree("zeta_degree", 0)[0] is True
        valid, msg = validate_degree("zeta_degree", -1)
        assert valid is False
        assert "zeta_degree" in msg

    def test_validate_frequencies_keyword(self):
        assert validate_frequencies_keyword("auto")[0] is True
        assert validate_frequencies_keyword("  ")[0] is False

    @pytest.mark.parametrize("step,t_end,is_valid", [
        (0.001, 10.0, True),
        (0.001, 0.0, True),
        (0.0, 10.0, False),
        (float("nan"), 10.0, False),
        (0.001, -1.0, False),
    ])
    def test_validate_step(self, step, t_end, is_valid):
        assert validate_step(step, t_end)[0] == is_valid

    def test_validate_tolerance(self):
        assert validate_tolerance("tol_abs", None)[0] is True
        assert validate_tolerance("tol_abs", 1e-7)[0] is True
        assert validate_tolerance("tol_abs", 0.0)[0] is False
        assert validate_tolerance("tol_abs", float("inf"))[0] is False

    def test_validate_initial_state(self):
        assert validate_initial_state([1.0, 0.0])[0] is True
        assert validate_initial_state([])[0] is False
        assert validate_initial_state([1.0, float("nan")])[0] is False
        valid, msg = validate_initial_state([1.0, 0.0], dimension=4)
        assert valid is False
        assert "dimension is 4" in msg

    def test_validate_format_version(self):
        assert validate_format_version(1)[0] is True
        assert validate_format_version(2)[0] is False

    def test_validate_output_format(self):
        for fmt in OUTPUT_FORMATS:
            assert validate_output_format(fmt)[0] is True
        assert validate_output_format("xml")[0] is False
