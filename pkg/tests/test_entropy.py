"""
熵产生率单元测试
"""

import math
import pytest
import sys
from pathlib import Path

import numpy as np

# 添加项目根目录到 Python 路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.physics.entropy import (
    EntropyBreakdown, divergence_gap, entropy_production, entropy_production_offdiagonal,
    entropy_production_trace, irreversible_drift, is_near_divergence,
)
from src.physics.errors import DivergentDenominator, NotSupported, SingularSystem
from src.physics.gaussian_core import EffectiveParams, build_model
from src.physics.lyapunov import solve_steady_covariance, spectral_abscissa


def steady_state(p: EffectiveParams):
    A, D = build_model(p)
    return solve_steady_covariance(A, D), A, D


def decoupled_mu_a(p: EffectiveParams) -> float:
    """G = 0 时腔模式的闭式熵产生率 2κχ²/(κ² + Δ² − χ²)（n_a = 0）"""
    return 2 * p.kappa * p.chi_mag ** 2 / (p.kappa ** 2 + p.delta_a ** 2 - p.chi_mag ** 2)


class TestEntropyBreakdown:
    """熵产生率拆解测试"""

    def test_pi_s_is_sum(self):
        """测试 Π_s = μ_a + μ_b"""
        b = EntropyBreakdown(mu_a=0.3, mu_b=-0.1)

        assert b.pi_s == pytest.approx(0.2)
        assert b.to_dict() == {'pi_s': pytest.approx(0.2), 'mu_a': 0.3, 'mu_b': -0.1}


class TestEquilibrium:
    """平衡态测试"""

    def test_equilibrium_zero(self):
        """测试 G=0, χ=0 的随机参数下 Π_s 为零"""
        rng = np.random.default_rng(2024)
        for _ in range(100):
            p = EffectiveParams(
                delta_a=rng.uniform(-3, 3), kappa=rng.uniform(0.05, 3.0),
                gamma=rng.uniform(1e-3, 0.5), coupling_G=0.0, chi_mag=0.0,
                n_b=rng.uniform(0, 100),
            )
            V, _, _ = steady_state(p)
            breakdown = entropy_production(V, p)

            assert abs(breakdown.pi_s) <= 1e-10 * (p.kappa + p.gamma)


class TestDecoupledCavity:
    """G = 0 时的腔模式闭式结果"""

    @pytest.mark.parametrize('delta_a,chi,phi', [
        (1.0, 0.3, 0.0),
        (-1.0, 0.3, 0.0),
        (0.5, 0.45, 0.8 * math.pi),
        (2.0, 0.5, 1.3),
    ])
    def test_closed_form(self, delta_a, chi, phi):
        """测试 μ_a 闭式且 μ_b = 0"""
        p = EffectiveParams(delta_a=delta_a, kappa=0.5, coupling_G=0.0, chi_mag=chi, phi=phi)
        V, _, _ = steady_state(p)
        breakdown = entropy_production(V, p)

        assert breakdown.mu_a == pytest.approx(decoupled_mu_a(p), rel=1e-9)
        assert abs(breakdown.mu_b) < 1e-12

    def test_even_in_detuning_and_phase_independent(self):
        """测试 μ_a 关于 Δ 偶、与 φ 无关"""
        values = []
        for delta_a in (1.2, -1.2):
            for phi in (0.0, 0.8 * math.pi, 1.9):
                p = EffectiveParams(delta_a=delta_a, kappa=0.5, coupling_G=0.0,
                                    chi_mag=0.4, phi=phi)
                V, _, _ = steady_state(p)
                values.append(entropy_production(V, p).mu_a)

        np.testing.assert_allclose(values, values[0], rtol=1e-9)

    def test_increases_with_chi(self):
        """测试 μ_a 随 χ 单调增大"""
        mus = []
        for chi in (0.0, 0.3, 0.5):
            p = EffectiveParams(delta_a=1.0, kappa=0.5, coupling_G=0.0, chi_mag=chi)
            V, _, _ = steady_state(p)
            mus.append(entropy_production(V, p).mu_a)

        assert mus[0] < mus[1] < mus[2]


class TestThreeForms:
    """三种形式等价性测试"""

    def test_forms_agree(self):
        """测试模式形式、迹形式、非对角形式两两一致"""
        rng = np.random.default_rng(99)
        checked = 0
        while checked < 1000:
            kappa = rng.uniform(0.2, 2.0)
            p = EffectiveParams(
                delta_a=rng.uniform(-3, 3), kappa=kappa, gamma=rng.uniform(0.01, 0.2),
                coupling_G=rng.uniform(0, 0.3), chi_mag=rng.uniform(0, 0.9 * kappa),
                phi=rng.uniform(0, 2 * math.pi), n_b=rng.uniform(0, 50),
            )
            A, D = build_model(p)
            if spectral_abscissa(A) > -1e-2:
                continue
            V = solve_steady_covariance(A, D)

            modes = entropy_production(V, p).pi_s
            trace = entropy_production_trace(V, irreversible_drift(p), D)
            offdiag = entropy_production_offdiagonal(V, p)
            scale = max(abs(modes), 1e-6)

            assert abs(modes - trace) <= 1e-8 * scale
            assert abs(modes - offdiag) <= 1e-8 * scale
            checked += 1

    def test_trace_form_with_cavity_occupation(self):
        """测试 n_a > 0 时迹形式仍与模式形式一致"""
        p = EffectiveParams(delta_a=1.0, kappa=0.5, coupling_G=0.1, chi_mag=0.2,
                            phi=0.3, n_b=10, n_a=2.0)
        V, A, D = steady_state(p)

        assert entropy_production_trace(V, irreversible_drift(p), D) == pytest.approx(
            entropy_production(V, p).pi_s, rel=1e-10)

    def test_offdiag_requires_zero_cavity_occupation(self):
        """测试非对角形式仅支持 n_a = 0"""
        p = EffectiveParams(n_a=0.5)

        with pytest.raises(NotSupported):
            entropy_production_offdiagonal(0.5 * np.eye(4), p)

    def test_trace_form_singular_diffusion(self):
        """测试扩散矩阵奇异时报错"""
        p = EffectiveParams()

        with pytest.raises(SingularSystem):
            entropy_production_trace(0.5 * np.eye(4), irreversible_drift(p), np.zeros((4, 4)))


class TestDivergence:
    """κ² = χ²cos²φ 处的发散测试"""

    def test_divergent_denominator(self):
        """测试分母为零时报错"""
        p = EffectiveParams(kappa=0.5, chi_mag=0.5, phi=0.0)

        assert divergence_gap(p) == 0.0
        assert is_near_divergence(p)
        with pytest.raises(DivergentDenominator):
            entropy_production_offdiagonal(0.5 * np.eye(4), p)

    def test_diagnostic_flag(self):
        """测试接近发散时记录诊断"""
        p = EffectiveParams(delta_a=0.0, kappa=0.5000001, chi_mag=0.5, phi=0.0)
        V, _, _ = steady_state(p)

        assert 'near_divergence' in entropy_production(V, p).diagnostics

    def test_blows_up_before_instability(self):
        """测试 κ ↓ χ 时 Π_s 远超 κ = 2χ 的值，越过边界后不稳定"""
        base = EffectiveParams(delta_a=0.0, coupling_G=0.1, chi_mag=0.5, phi=0.0, n_b=10)
        near = base.with_values(kappa=0.50005)
        reference = base.with_values(kappa=1.0)

        V_near, A_near, _ = steady_state(near)
        V_ref, _, _ = steady_state(reference)

        assert entropy_production(V_near, near).pi_s > 1e3 * entropy_production(V_ref, reference).pi_s
        A_beyond, _ = build_model(base.with_values(kappa=0.49))
        assert spectral_abscissa(A_beyond) > 0


class TestDecouplingLimit:
    """大失谐下熵产生率趋于零"""

    def test_large_detuning(self):
        """测试 Π_s(Δ=50) < 10⁻³ · max_{|Δ|≤3} Π_s"""
        base = EffectiveParams(kappa=0.5, gamma=0.01, coupling_G=0.1, chi_mag=0.0, n_b=10)
        peak = 0.0
        for delta_a in np.linspace(-3, 3, 121):
            p = base.with_values(delta_a=float(delta_a))
            A, D = build_model(p)
            if spectral_abscissa(A) >= -1e-6:
                continue
            V = solve_steady_covariance(A, D)
            peak = max(peak, entropy_production(V, p).pi_s)

        far = base.with_values(delta_a=50.0)
        V_far, _, _ = steady_state(far)

        assert peak > 0
        assert entropy_production(V_far, far).pi_s < 1e-3 * peak
