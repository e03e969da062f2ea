"""
平均场与单位换算单元测试
"""

import math
from dataclasses import replace
import pytest
import sys
from pathlib import Path

from scipy import constants

# 添加项目根目录到 Python 路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.physics.errors import MeanFieldNotConverged, ParameterError
from src.physics.meanfield import (
    APPROXIMATE, SELF_CONSISTENT, MeanFields, PhysicalParams, coupling_from_physical,
    drive_amplitude, effective_params, iterate_mean_field, solve_mean_field,
    thermal_occupation, to_dimensionless,
)


TWO_PI = 2 * math.pi


@pytest.fixture
def experiment():
    """微波腔实验参数（红边带驱动）"""
    omega_b = TWO_PI * 65e6
    omega_C = TWO_PI * 4.93e9
    return PhysicalParams(
        omega_C=omega_C, omega_L=omega_C - omega_b, omega_b=omega_b,
        M=1e-15, L=5e-11, laser_power=1e-12, temperature=0.02,
        kappa=TWO_PI * 215e3, gamma=TWO_PI * 15e3, xi=1e6,
    )


class TestThermalOccupation:
    """Bose 占据数测试"""

    def test_zero_temperature(self):
        assert thermal_occupation(0.0, 1e9) == 0.0

    def test_high_temperature_limit(self):
        """测试高温极限 n ≈ k_B T/(ħω) − ½"""
        T, omega = 300.0, TWO_PI * 1e6
        classical = constants.k * T / (constants.hbar * omega)

        assert thermal_occupation(T, omega) == pytest.approx(classical - 0.5, rel=1e-6)

    def test_deep_quantum_regime(self):
        """测试 ħω ≫ k_B T 时为 0"""
        assert thermal_occupation(1e-3, TWO_PI * 1e15) == 0.0

    def test_invalid(self):
        with pytest.raises(ParameterError):
            thermal_occupation(-1.0, 1.0)

    def test_ln2_gives_one(self):
        """测试 ħω/(k_B T) = ln 2 时 n = 1"""
        omega = TWO_PI * 65e6
        T = constants.hbar * omega / (constants.k * math.log(2.0))

        assert thermal_occupation(T, omega) == pytest.approx(1.0, rel=1e-12)


class TestPhysicalConversion:
    """物理量换算测试"""

    def test_to_dimensionless(self):
        assert to_dimensionless(TWO_PI * 215e3, TWO_PI * 65e6) == pytest.approx(215e3 / 65e6)

    def test_coupling_magnitude(self, experiment):
        """测试单光子耦合量级 g ∈ (2π·1 MHz, 2π·10 MHz)"""
        g = coupling_from_physical(experiment)

        assert TWO_PI * 1e6 < g < TWO_PI * 1e7

    def test_drive_amplitude(self, experiment):
        """测试 |η|² = 2κR/(ħω_L)"""
        eta = drive_amplitude(experiment)
        expected = 2 * experiment.kappa * experiment.laser_power / (constants.hbar * experiment.omega_L)

        assert eta ** 2 == pytest.approx(expected)

    def test_coupling_scaling(self, experiment):
        """测试 g ∝ 1/L 且 g ∝ 1/√M"""
        g = coupling_from_physical(experiment)

        assert coupling_from_physical(replace(experiment, L=2 * experiment.L)) == pytest.approx(g / 2)
        assert coupling_from_physical(replace(experiment, M=4 * experiment.M)) == pytest.approx(g / 2)

    def test_drive_scaling(self, experiment):
        """测试 |η| ∝ √R 且 |η| ∝ √κ"""
        eta = drive_amplitude(experiment)

        assert drive_amplitude(replace(experiment, laser_power=4 * experiment.laser_power)) == \
            pytest.approx(2 * eta)
        assert drive_amplitude(replace(experiment, kappa=2 * experiment.kappa)) == \
            pytest.approx(math.sqrt(2) * eta)

    def test_invalid_physical_params(self, experiment):
        """测试非法物理参数"""
        with pytest.raises(ParameterError):
            PhysicalParams(**{**experiment.__dict__, 'M': 0.0})
        with pytest.raises(ParameterError):
            PhysicalParams(**{**experiment.__dict__, 'temperature': -1.0})


class TestMeanField:
    """平均场求解测试"""

    def test_approximate_mode(self):
        """测试近似模式 a_s = η/(κ + iΔ)"""
        mf = iterate_mean_field(eta=2.0, delta_a=1.0, kappa=0.5, gamma=0.01, omega_b=1.0,
                                g=0.01, xi=0.0, mode=APPROXIMATE)

        assert mf.a_s == pytest.approx(2.0 / complex(0.5, 1.0))
        assert mf.delta_tilde == 1.0
        assert mf.converged

    def test_self_consistent_without_shifts(self):
        """测试无频移时自洽解等于裸失谐"""
        mf = iterate_mean_field(eta=2.0, delta_a=1.0, kappa=0.5, gamma=0.01, omega_b=1.0,
                                g=0.0, xi=0.0, mode=SELF_CONSISTENT)

        assert mf.converged
        assert mf.delta_tilde == pytest.approx(1.0)

    def test_self_consistent_fixed_point(self):
        """测试自洽解满足不动点方程"""
        eta, delta_a, kappa, gamma, omega_b, g, xi = 0.5, 1.0, 0.5, 0.01, 1.0, 0.01, 0.05
        mf = iterate_mean_field(eta, delta_a, kappa, gamma, omega_b, g, xi, mode=SELF_CONSISTENT)
        b_s = -g * abs(mf.a_s) ** 2 / complex(gamma, omega_b)

        assert mf.converged
        assert mf.b_s == pytest.approx(b_s)
        assert mf.delta_tilde == pytest.approx(
            delta_a + 2 * g * b_s.real + 2 * xi * abs(mf.a_s) ** 2, rel=1e-9)

    @pytest.mark.parametrize('mode', [APPROXIMATE, SELF_CONSISTENT])
    def test_no_drive(self, mode):
        """测试 η = 0 时 a_s = b_s = 0"""
        mf = iterate_mean_field(eta=0.0, delta_a=1.0, kappa=0.5, gamma=0.01, omega_b=1.0,
                                g=0.01, xi=0.05, mode=mode)

        assert mf.converged
        assert mf.a_s == 0
        assert mf.b_s == 0
        assert mf.delta_tilde == pytest.approx(1.0)

    def test_bare_cavity_value(self):
        """测试 g = ξ = 0, η = κ = Δ = 1 时 a_s = 0.5 − 0.5i, b_s = 0"""
        for mode in (APPROXIMATE, SELF_CONSISTENT):
            mf = iterate_mean_field(eta=1.0, delta_a=1.0, kappa=1.0, gamma=0.01, omega_b=1.0,
                                    g=0.0, xi=0.0, mode=mode)

            assert mf.a_s == pytest.approx(complex(0.5, -0.5))
            assert mf.b_s == pytest.approx(0j)

    def test_small_xi_convergence(self):
        """测试 ξ → 0 时自洽解趋于近似解，且 a_s 相对差不超过 10·|Δ̃−Δ|/Δ"""
        delta_a = 1.0
        shifts = []
        for xi in (1e-2, 1e-3, 1e-4):
            kwargs = dict(eta=0.5, delta_a=delta_a, kappa=0.5, gamma=0.01, omega_b=1.0,
                          g=0.0, xi=xi)
            exact = iterate_mean_field(**kwargs, mode=SELF_CONSISTENT)
            approx = iterate_mean_field(**kwargs, mode=APPROXIMATE)
            shift = abs(exact.delta_tilde - delta_a)

            assert exact.converged
            assert abs(exact.a_s - approx.a_s) / abs(approx.a_s) <= 10 * shift / delta_a
            shifts.append(shift)

        # 频移 2ξ|a_s|² 随 ξ 线性减小
        assert shifts[0] / shifts[1] == pytest.approx(10.0, rel=0.05)
        assert shifts[1] / shifts[2] == pytest.approx(10.0, rel=0.05)

    def test_unknown_mode(self):
        with pytest.raises(ParameterError):
            iterate_mean_field(1.0, 1.0, 0.5, 0.01, 1.0, 0.0, 0.0, mode='exact')

    def test_rotated_frame_real_amplitude(self, experiment):
        """测试旋转坐标下 a_s 为正实数且模不变"""
        rotated = solve_mean_field(experiment)
        plain = solve_mean_field(experiment, rotate_frame=False)

        assert rotated.a_s.imag == 0.0
        assert rotated.a_s.real > 0
        assert abs(rotated.a_s) == pytest.approx(abs(plain.a_s))


class TestEffectiveParams:
    """线性化参数换算测试"""

    def test_experiment(self, experiment):
        """测试实验参数换算"""
        mf = solve_mean_field(experiment)
        p = effective_params(mf, experiment)

        assert p.omega_b == 1.0
        assert p.kappa == pytest.approx(215e3 / 65e6)
        assert p.gamma == pytest.approx(15e3 / 65e6)
        assert p.delta_a == pytest.approx(1.0)
        assert p.coupling_G == pytest.approx(
            coupling_from_physical(experiment) * abs(mf.a_s) / experiment.omega_b)
        assert p.chi_mag == pytest.approx(2 * experiment.xi * abs(mf.a_s) ** 2 / experiment.omega_b)
        # a_s 为实数时 χ = −2iξa_s² 指向 −i
        assert p.phi == pytest.approx(-math.pi / 2)
        assert p.n_b > 0

    def test_not_converged(self, experiment):
        """测试未收敛平均场报错"""
        mf = MeanFields(a_s=1.0 + 0j, b_s=0j, delta_tilde=1.0, converged=False, iterations=10)

        with pytest.raises(MeanFieldNotConverged):
            effective_params(mf, experiment)

    def test_phase_branch(self, experiment):
        """测试 φ 落在 (−π, π]"""
        # a_s² = i: χ = 2ξ，φ = 0；a_s² = −i: χ = −2ξ，φ = π
        h = math.sqrt(0.5)
        for a_s, expected in ((complex(h, h), 0.0), (complex(h, -h), math.pi)):
            mf = MeanFields(a_s=a_s, b_s=0j, delta_tilde=1.0, converged=True, iterations=0)
            p = effective_params(mf, experiment)

            assert p.phi == pytest.approx(expected, abs=1e-12)
