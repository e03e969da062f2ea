"""
高斯模型核心单元测试
"""

import math
import pytest
import sys
from pathlib import Path

import numpy as np

# 添加项目根目录到 Python 路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.physics.errors import NonPhysicalState, ParameterError
from src.physics.gaussian_core import (
    DRIFT_STRUCTURAL_ZEROS, CovarianceMatrix, EffectiveParams, build_diffusion,
    build_drift, build_model, check_physical, symplectic_eigenvalues, symplectic_form,
)


class TestEffectiveParams:
    """模型参数测试"""

    def test_defaults(self):
        """测试默认值"""
        p = EffectiveParams()

        assert p.omega_b == 1.0
        assert p.kappa == 0.5
        assert p.gamma == 0.01
        assert p.n_a == 0.0

    def test_numpy_scalars_accepted(self):
        """测试 numpy 标量被接受并转为 float"""
        p = EffectiveParams(kappa=np.float64(0.7), n_b=np.int64(3))

        assert type(p.kappa) is float
        assert type(p.n_b) is float
        assert p.n_b == 3.0

    @pytest.mark.parametrize('changes', [
        {'kappa': 0.0},
        {'gamma': -0.1},
        {'omega_b': 0.0},
        {'coupling_G': -0.1},
        {'chi_mag': -1.0},
        {'n_b': -1.0},
        {'n_a': -0.5},
        {'delta_a': math.nan},
        {'phi': math.inf},
    ])
    def test_invalid_values(self, changes):
        """测试非法参数"""
        with pytest.raises(ParameterError):
            EffectiveParams(**changes)

    def test_bool_rejected(self):
        """测试布尔值不算实数参数"""
        with pytest.raises(ParameterError):
            EffectiveParams(kappa=True)

    def test_with_values_revalidates(self):
        """测试 with_values 重新校验"""
        p = EffectiveParams()
        q = p.with_values(chi_mag=0.3)

        assert q.chi_mag == 0.3
        assert p.chi_mag == 0.0
        with pytest.raises(ParameterError):
            p.with_values(kappa=-1.0)

    def test_from_dict_unknown_field(self):
        """测试未知字段报错"""
        with pytest.raises(ParameterError):
            EffectiveParams.from_dict({'kappa': 0.5, 'chi': 0.1})

    def test_chi_components(self):
        """测试 χcosφ 与 χsinφ"""
        p = EffectiveParams(chi_mag=0.5, phi=math.pi / 3)

        assert p.chi_cos == pytest.approx(0.25)
        assert p.chi_sin == pytest.approx(0.5 * math.sqrt(3) / 2)


class TestDriftAndDiffusion:
    """漂移与扩散矩阵测试"""

    @pytest.fixture
    def params(self):
        return EffectiveParams(delta_a=0.7, kappa=0.5, gamma=0.02, coupling_G=0.15,
                               chi_mag=0.3, phi=0.8 * math.pi, n_b=5.0, n_a=0.5)

    def test_drift_entries(self, params):
        """测试漂移矩阵元素"""
        A = build_drift(params)
        c, s = params.chi_cos, params.chi_sin

        assert A.shape == (4, 4)
        assert A[0, 0] == pytest.approx(-0.5 + c)
        assert A[0, 1] == pytest.approx(0.7 + s)
        assert A[1, 0] == pytest.approx(-0.7 + s)
        assert A[1, 1] == pytest.approx(-0.5 - c)
        assert A[1, 2] == 0.15
        assert A[3, 0] == 0.15
        assert A[2, 2] == A[3, 3] == -0.02
        assert A[2, 3] == 1.0
        assert A[3, 2] == -1.0

    def test_structural_zeros(self, params):
        """测试恒为零的位置"""
        A = build_drift(params)

        for i, j in DRIFT_STRUCTURAL_ZEROS:
            assert A[i, j] == 0.0

    def test_read_only(self, params):
        """测试返回矩阵只读"""
        A, D = build_model(params)

        with pytest.raises(ValueError):
            A[0, 0] = 1.0
        with pytest.raises(ValueError):
            D[0, 0] = 1.0

    def test_diffusion_diagonal(self, params):
        """测试扩散矩阵"""
        D = build_diffusion(params.kappa, params.gamma, params.n_b, params.n_a)

        np.testing.assert_allclose(np.diag(D), [1.0, 1.0, 0.22, 0.22])
        assert np.count_nonzero(D - np.diag(np.diag(D))) == 0

    def test_diffusion_invalid(self):
        """测试非法扩散参数"""
        with pytest.raises(ParameterError):
            build_diffusion(0.0, 0.1, 1.0)
        with pytest.raises(ParameterError):
            build_diffusion(0.5, 0.1, -1.0)


class TestSymplectic:
    """辛结构与物理性测试"""

    def test_symplectic_form(self):
        """测试 Ω² = −I 且反对称"""
        omega = symplectic_form(2)

        np.testing.assert_array_equal(omega @ omega, -np.eye(4))
        np.testing.assert_array_equal(omega.T, -omega)

    def test_vacuum_eigenvalues(self):
        """测试真空态辛本征值为 1/2"""
        nus = symplectic_eigenvalues(0.5 * np.eye(4))

        assert nus == pytest.approx((0.5, 0.5))

    def test_thermal_eigenvalues(self):
        """测试热态辛本征值 n + 1/2（升序）"""
        V = np.diag([3.5, 3.5, 1.5, 1.5])

        assert symplectic_eigenvalues(V) == pytest.approx((1.5, 3.5))

    def test_squeezed_state_is_pure(self):
        """测试单模压缩真空仍是纯态"""
        r = 0.8
        V = 0.5 * np.diag([math.exp(2 * r), math.exp(-2 * r), 1.0, 1.0])

        assert symplectic_eigenvalues(V) == pytest.approx((0.5, 0.5))
        assert check_physical(V)

    def test_nonsymmetric_rejected(self):
        """测试非对称矩阵报错"""
        V = 0.5 * np.eye(4)
        V[0, 1] = 0.1

        with pytest.raises(NonPhysicalState):
            symplectic_eigenvalues(V)

    def test_check_physical(self):
        """测试不确定性关系检查"""
        assert check_physical(0.5 * np.eye(4))
        assert not check_physical(0.4 * np.eye(4))
        assert not check_physical(-np.eye(4))
        # 归一化改为真空方差 1
        assert check_physical(np.eye(4), vacuum=1.0)
        assert not check_physical(0.6 * np.eye(4), vacuum=1.0)


class TestCovarianceMatrix:
    """协方差矩阵类型测试"""

    @pytest.fixture
    def V(self):
        M = np.arange(16, dtype=float).reshape(4, 4)
        return CovarianceMatrix(M + M.T)

    def test_shape_check(self):
        """测试形状校验"""
        with pytest.raises(NonPhysicalState):
            CovarianceMatrix(np.eye(3))

    def test_blocks(self, V):
        """测试块访问"""
        M = V.entries

        np.testing.assert_array_equal(V.V_a, M[:2, :2])
        np.testing.assert_array_equal(V.V_b, M[2:, 2:])
        np.testing.assert_array_equal(V.C, M[:2, 2:])
        assert V.n_modes == 2

    def test_element_is_one_based(self, V):
        """测试 1 起始下标"""
        assert V.element(1, 4) == V.entries[0, 3]

    def test_upper_triangle(self, V):
        """测试上三角展开"""
        tri = V.upper_triangle()

        assert list(tri) == ['v11', 'v12', 'v13', 'v14', 'v22', 'v23', 'v24', 'v33', 'v34', 'v44']
        assert tri['v23'] == V.entries[1, 2]

    def test_entries_copied_and_frozen(self):
        """测试构造时复制且只读"""
        M = np.eye(4)
        V = CovarianceMatrix(M)
        M[0, 0] = 9.0

        assert V.entries[0, 0] == 1.0
        with pytest.raises(ValueError):
            V.entries[0, 0] = 2.0

    def test_scaled(self, V):
        """测试缩放"""
        np.testing.assert_array_equal(V.scaled(2.0).entries, 2.0 * V.entries)
