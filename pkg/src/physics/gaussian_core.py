"""
高斯核心模块
定义线性化模型的无量纲参数，构造漂移矩阵 A 与扩散矩阵 D，
并提供协方差矩阵的辛本征值与物理性检查

约定：
- 所有频率、速率以 ω_b 为单位（内部 ω_b = 1）
- 正交分量顺序 (x_a, p_a, x_b, p_b)
- 真空方差为 1/2，物理性阈值 ν ≥ 1/2
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field, fields, replace, asdict
from typing import Any, Dict, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from .errors import NonPhysicalState, ParameterError


VACUUM_VARIANCE = 0.5

# 漂移矩阵 / 扩散矩阵均以 4×4 实数组表示
DriftMatrix = NDArray[np.float64]
DiffusionMatrix = NDArray[np.float64]

# A 中恒为零的位置（0 起始下标）
DRIFT_STRUCTURAL_ZEROS = ((0, 2), (0, 3), (1, 3), (2, 0), (2, 1), (3, 1))


@dataclass(frozen=True)
class EffectiveParams:
    """线性化模型的无量纲参数（单位 ω_b）"""
    delta_a: float = 1.0
    omega_b: float = 1.0
    kappa: float = 0.5
    gamma: float = 0.01
    coupling_G: float = 0.1
    chi_mag: float = 0.0
    phi: float = 0.0
    n_b: float = 10.0
    n_a: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, numbers.Real) or isinstance(value, bool):
                raise ParameterError(f"参数 {f.name} 必须为实数，得到 {value!r}")
            if not math.isfinite(value):
                raise ParameterError(f"参数 {f.name} 必须有限，得到 {value!r}")
            # 统一存为 float，保证哈希与输出格式一致
            object.__setattr__(self, f.name, float(value))

        if self.kappa <= 0:
            raise ParameterError(f"kappa 必须大于 0，得到 {self.kappa}")
        if self.gamma <= 0:
            raise ParameterError(f"gamma 必须大于 0，得到 {self.gamma}")
        if self.omega_b <= 0:
            raise ParameterError(f"omega_b 必须大于 0，得到 {self.omega_b}")
        if self.coupling_G < 0:
            raise ParameterError(f"coupling_G 必须非负，得到 {self.coupling_G}")
        if self.chi_mag < 0:
            raise ParameterError(f"chi_mag 必须非负，得到 {self.chi_mag}")
        if self.n_b < 0 or self.n_a < 0:
            raise ParameterError(f"热占据数必须非负，得到 n_b={self.n_b}, n_a={self.n_a}")

    @property
    def chi_cos(self) -> float:
        """χ cos φ"""
        return self.chi_mag * math.cos(self.phi)

    @property
    def chi_sin(self) -> float:
        """χ sin φ"""
        return self.chi_mag * math.sin(self.phi)

    def with_values(self, **changes: float) -> "EffectiveParams":
        """返回修改了部分字段的新参数（重新校验）"""
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, float]:
        """转换为字典"""
        return asdict(self)

    @classmethod
    def field_names(cls) -> Tuple[str, ...]:
        """所有字段名（按声明顺序）"""
        return tuple(f.name for f in fields(cls))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EffectiveParams":
        """
        从字典构造，未知字段报错

        Args:
            data: 字段字典

        Returns:
            EffectiveParams: 参数对象
        """
        unknown = set(data) - set(cls.field_names())
        if unknown:
            raise ParameterError(f"未知参数: {sorted(unknown)}")
        return cls(**data)


def build_drift(p: EffectiveParams) -> DriftMatrix:
    """
    构造漂移矩阵 A

    Args:
        p: 模型参数

    Returns:
        DriftMatrix: 4×4 漂移矩阵，行列顺序 (x_a, p_a, x_b, p_b)
    """
    c, s = p.chi_cos, p.chi_sin
    G = p.coupling_G
    A = np.array([
        [-p.kappa + c, p.delta_a + s, 0.0, 0.0],
        [-p.delta_a + s, -p.kappa - c, G, 0.0],
        [0.0, 0.0, -p.gamma, p.omega_b],
        [G, 0.0, -p.omega_b, -p.gamma],
    ], dtype=float)
    A.setflags(write=False)
    return A


def build_diffusion(kappa: float, gamma: float,
                    n_b: float, n_a: float = 0.0) -> DiffusionMatrix:
    """
    构造扩散矩阵 D = diag(κ(2n_a+1), κ(2n_a+1), γ(2n_b+1), γ(2n_b+1))

    Args:
        kappa: 腔衰减率
        gamma: 机械阻尼
        n_b: 机械热占据数
        n_a: 腔热占据数（默认 0）

    Returns:
        DiffusionMatrix: 4×4 对角矩阵
    """
    if kappa <= 0 or gamma <= 0:
        raise ParameterError(f"衰减率必须大于 0，得到 kappa={kappa}, gamma={gamma}")
    if n_b < 0 or n_a < 0:
        raise ParameterError(f"热占据数必须非负，得到 n_b={n_b}, n_a={n_a}")

    cavity = kappa * (2.0 * n_a + 1.0)
    mechanics = gamma * (2.0 * n_b + 1.0)
    D = np.diag([cavity, cavity, mechanics, mechanics]).astype(float)
    D.setflags(write=False)
    return D


def build_model(p: EffectiveParams) -> Tuple[DriftMatrix, DiffusionMatrix]:
    """同时构造 (A, D)"""
    return build_drift(p), build_diffusion(p.kappa, p.gamma, p.n_b, p.n_a)


def symplectic_form(n_modes: int = 2) -> NDArray[np.float64]:
    """
    块对角辛形式 Ω = ⊕ [[0, 1], [-1, 0]]

    Args:
        n_modes: 模式数

    Returns:
        NDArray: 2n×2n 反对称矩阵
    """
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), block)


@dataclass(frozen=True)
class CovarianceMatrix:
    """
    对称协方差矩阵 V_ij = ⟨{δu_i, δu_j}⟩/2

    双模情形下提供块访问：V_a（腔）、V_b（机械）、C（关联块）
    """
    entries: NDArray[np.float64] = field(repr=False)

    def __post_init__(self):
        V = np.array(self.entries, dtype=float, copy=True)
        if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
            raise NonPhysicalState(f"协方差矩阵必须为 2n×2n 方阵，得到形状 {V.shape}")
        V.setflags(write=False)
        object.__setattr__(self, 'entries', V)

    @property
    def n_modes(self) -> int:
        return self.entries.shape[0] // 2

    @property
    def V_a(self) -> NDArray[np.float64]:
        """腔模式 2×2 块"""
        return self.entries[0:2, 0:2]

    @property
    def V_b(self) -> NDArray[np.float64]:
        """机械模式 2×2 块"""
        return self.entries[2:4, 2:4]

    @property
    def C(self) -> NDArray[np.float64]:
        """关联块（行 1–2 × 列 3–4）"""
        return self.entries[0:2, 2:4]

    def element(self, i: int, j: int) -> float:
        """按 1 起始下标取元素 V_ij"""
        return float(self.entries[i - 1, j - 1])

    def scaled(self, factor: float) -> "CovarianceMatrix":
        """返回 factor·V"""
        return CovarianceMatrix(factor * self.entries)

    def upper_triangle(self) -> Dict[str, float]:
        """上三角元素，键为 v11, v12, ..."""
        n = self.entries.shape[0]
        return {
            f"v{i + 1}{j + 1}": float(self.entries[i, j])
            for i in range(n) for j in range(i, n)
        }

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)


CovarianceLike = Union[CovarianceMatrix, NDArray[np.float64]]


def as_array(V: CovarianceLike) -> NDArray[np.float64]:
    """取出底层数组"""
    if isinstance(V, CovarianceMatrix):
        return V.entries
    return np.asarray(V, dtype=float)


def is_symmetric(M: NDArray[np.float64], rtol: float = 1e-10) -> bool:
    """相对 max|M| 判断对称"""
    scale = max(float(np.max(np.abs(M))), 1e-300)
    return bool(np.max(np.abs(M - M.T)) <= rtol * scale)


def symplectic_eigenvalues(V: CovarianceLike) -> Tuple[float, ...]:
    """
    计算辛本征值（iΩV 本征值对的绝对值，升序）

    Args:
        V: 对称正定协方差矩阵

    Returns:
        Tuple[float, ...]: n 个辛本征值，双模时为 (ν₁, ν₂)
    """
    M = as_array(V)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise NonPhysicalState(f"协方差矩阵形状错误: {M.shape}")
    if not is_symmetric(M):
        raise NonPhysicalState("协方差矩阵不对称")
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError as e:
        raise NonPhysicalState("协方差矩阵非正定") from e

    n_modes = M.shape[0] // 2
    omega = symplectic_form(n_modes)
    # iΩV 的本征值成对出现 ±ν
    spectrum = np.sort(np.abs(np.linalg.eigvals(1j * omega @ M)))
    return tuple(float(nu) for nu in spectrum[0::2])


def check_physical(V: CovarianceLike, tol: float = 1e-9,
                   vacuum: float = VACUUM_VARIANCE) -> bool:
    """
    检查不确定性关系：最小辛本征值 ≥ 1/2 − tol

    Args:
        V: 对称协方差矩阵
        tol: 容差
        vacuum: 真空方差（其他归一化约定下传入对应值）

    Returns:
        bool: 是否物理
    """
    try:
        nus = symplectic_eigenvalues(V)
    except NonPhysicalState:
        return False
    return min(nus) >= vacuum - tol
