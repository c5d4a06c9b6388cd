"""Material constants, EOS, and closed-form wave speeds."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epwave.material import (DEFAULT_STAGE_MODULUS, HardeningStage,
                             MaterialProperties, copper, density_from_pressure,
                             elastic_wave_speed, general_wave_speed,
                             plastic_wave_speed_perfect, pressure_from_density)


class TestMaterialProperties:
    def test_copper_constants(self):
        mat = copper()
        assert mat.bulk_modulus == 1.40e11
        assert mat.shear_modulus == 4.5e10
        assert mat.youngs_modulus == 1.22e11
        assert mat.rest_density == 8930.0
        assert mat.initial_yield == 9.0e7

    def test_default_single_stage(self):
        mat = copper()
        assert len(mat.hardening_stages) == 1
        assert mat.hardening_stages[0] == HardeningStage(9.0e7, 0.0)

    def test_poisson_ratio(self):
        # nu = E/(2 mu) - 1 = 122/90 - 1 = 0.3556
        assert copper().poisson_ratio == pytest.approx(0.35556, rel=1e-4)

    def test_rejects_nonpositive_moduli(self):
        with pytest.raises(ValueError):
            MaterialProperties(bulk_modulus=-1.0, shear_modulus=4.5e10,
                               youngs_modulus=1.22e11, rest_density=8930.0,
                               initial_yield=9.0e7)

    def test_rejects_inconsistent_elastic_constants(self):
        with pytest.raises(ValueError, match="inconsistent"):
            MaterialProperties(bulk_modulus=5.0e10, shear_modulus=4.5e10,
                               youngs_modulus=1.22e11, rest_density=8930.0,
                               initial_yield=9.0e7)

    def test_rejects_descending_stages(self):
        with pytest.raises(ValueError, match="ascending"):
            copper(hardening_stages=(HardeningStage(9.0e7, 1e10),
                                     HardeningStage(8.0e7, 1e10)))

    def test_rejects_stage_mismatch_with_initial_yield(self):
        with pytest.raises(ValueError, match="initial_yield"):
            copper(hardening_stages=(HardeningStage(8.0e7, 1e10),))

    def test_stage_tables(self):
        mat = copper(hardening_stages=(HardeningStage(9.0e7, 1e10),
                                       HardeningStage(1.2e8, 2e10)))
        assert np.allclose(mat.stage_yields, [9.0e7, 1.2e8])
        assert np.allclose(mat.stage_moduli, [1e10, 2e10])


class TestEquationOfState:
    def test_rest_state_pressure(self, mat):
        assert pressure_from_density(mat.rest_density, mat) == 0.0

    def test_known_value(self, mat):
        # p = k ln(rho/rho0): 0.5% compression -> 1.4e11 * ln(1.005)
        p = pressure_from_density(8930.0 * 1.005, mat)
        assert p == pytest.approx(1.4e11 * math.log(1.005), rel=1e-12)

    def test_rejects_nonpositive_density(self, mat):
        with pytest.raises(ValueError):
            pressure_from_density(0.0, mat)

    @settings(max_examples=150, deadline=None)
    @given(rho=st.floats(min_value=4000.0, max_value=20000.0))
    def test_round_trip(self, rho):
        mat = copper()
        p = pressure_from_density(rho, mat)
        assert density_from_pressure(p, mat) == pytest.approx(rho, rel=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(r1=st.floats(min_value=5000.0, max_value=15000.0),
           r2=st.floats(min_value=5000.0, max_value=15000.0))
    def test_monotone_in_density(self, r1, r2):
        mat = copper()
        if r1 == r2:
            return
        lo, hi = sorted((r1, r2))
        assert pressure_from_density(lo, mat) < pressure_from_density(hi, mat)

    def test_reference_pressure_offset(self):
        mat = MaterialProperties(bulk_modulus=1.40e11, shear_modulus=4.5e10,
                                 youngs_modulus=1.22e11, rest_density=8930.0,
                                 initial_yield=9.0e7, reference_pressure=1.0e5)
        assert pressure_from_density(8930.0, mat) == pytest.approx(1.0e5)
        assert density_from_pressure(1.0e5, mat) == pytest.approx(8930.0)


class TestWaveSpeeds:
    def test_elastic_speed_value(self, mat):
        # sqrt((1.4e11 + 6e10)/8930) = 4732.485
        assert elastic_wave_speed(mat) == pytest.approx(4732.485, abs=0.01)

    def test_plastic_speed_value(self, mat):
        # sqrt(1.4e11/8930) = 3959.481
        assert plastic_wave_speed_perfect(mat) == pytest.approx(3959.481, abs=0.01)

    def test_general_speed_limits(self, mat):
        assert general_wave_speed(mat, 0.0) == pytest.approx(elastic_wave_speed(mat))
        assert general_wave_speed(mat, 1.0, 0.0) == pytest.approx(
            plastic_wave_speed_perfect(mat))

    def test_general_speed_large_modulus_recovers_elastic(self, mat):
        # B -> infinity makes plastic loading as stiff as elastic
        assert general_wave_speed(mat, 1.0, 1e18) == pytest.approx(
            elastic_wave_speed(mat), rel=1e-6)

    @settings(max_examples=100, deadline=None)
    @given(modulus=st.floats(min_value=0.0, max_value=1e12))
    def test_plastic_speed_between_limits(self, modulus):
        mat = copper()
        c = general_wave_speed(mat, 1.0, modulus)
        assert plastic_wave_speed_perfect(mat) - 1e-9 <= c
        assert c <= elastic_wave_speed(mat) + 1e-9

    def test_rejects_negative_modulus(self, mat):
        with pytest.raises(ValueError):
            general_wave_speed(mat, 1.0, -1.0)

    def test_default_stage_modulus_positive(self):
        assert DEFAULT_STAGE_MODULUS > 0.0
