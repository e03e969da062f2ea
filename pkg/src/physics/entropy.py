"""
熵产生率模块
稳态不可逆熵产生率 Π_s 的三种等价形式：
- 模式分解形式 Π_s = μ_a + μ_b
- 迹形式 2 Tr((A^irr)ᵀ D⁻¹ A^irr V) + Tr(A^irr)
- 协方差非对角元形式（仅 n_a = 0）
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np
from numpy.typing import NDArray

from .errors import DivergentDenominator, NotSupported, SingularSystem
from .gaussian_core import CovarianceLike, EffectiveParams, as_array


logger = logging.getLogger(__name__)

# Π_s 非负性检查阈值
NEGATIVITY_TOL = 1e-9
# 分母 κ² − χ²cos²φ 的相对接近零阈值
DIVERGENCE_RTOL = 1e-6


@dataclass(frozen=True)
class EntropyBreakdown:
    """熵产生率拆解（单位 ω_b）"""
    mu_a: float
    mu_b: float
    diagnostics: List[str] = field(default_factory=list, compare=False)

    @property
    def pi_s(self) -> float:
        """总熵产生率"""
        return self.mu_a + self.mu_b

    def to_dict(self) -> Dict[str, float]:
        """转换为字典"""
        return {'pi_s': self.pi_s, 'mu_a': self.mu_a, 'mu_b': self.mu_b}


def divergence_gap(p: EffectiveParams) -> float:
    """κ² − χ²cos²φ"""
    return p.kappa ** 2 - p.chi_cos ** 2


def is_near_divergence(p: EffectiveParams, rtol: float = DIVERGENCE_RTOL) -> bool:
    """分母是否在 rtol·κ² 以内接近零"""
    return abs(divergence_gap(p)) < rtol * p.kappa ** 2


def entropy_production(V: CovarianceLike, p: EffectiveParams) -> EntropyBreakdown:
    """
    模式分解形式的熵产生率

    μ_a = 2κ((V₁₁+V₂₂)/(2n_a+1) − 1)，μ_b = 2γ((V₃₃+V₄₄)/(2n_b+1) − 1)

    Args:
        V: 稳态协方差矩阵
        p: 模型参数

    Returns:
        EntropyBreakdown: (Π_s, μ_a, μ_b)
    """
    M = as_array(V)
    mu_a = 2.0 * p.kappa * ((M[0, 0] + M[1, 1]) / (2.0 * p.n_a + 1.0) - 1.0)
    mu_b = 2.0 * p.gamma * ((M[2, 2] + M[3, 3]) / (2.0 * p.n_b + 1.0) - 1.0)

    diagnostics = []
    if is_near_divergence(p):
        diagnostics.append('near_divergence')
    if mu_a + mu_b < -NEGATIVITY_TOL:
        diagnostics.append('negative_pi_s')
        logger.warning(f"熵产生率为负: Π_s = {mu_a + mu_b:.3e}（参数 {p}）")

    return EntropyBreakdown(mu_a=float(mu_a), mu_b=float(mu_b), diagnostics=diagnostics)


def irreversible_drift(p: EffectiveParams) -> NDArray[np.float64]:
    """A^irr = diag(−κ, −κ, −γ, −γ)"""
    return np.diag([-p.kappa, -p.kappa, -p.gamma, -p.gamma])


def entropy_production_trace(V: CovarianceLike, A_irr: NDArray[np.float64],
                             D: NDArray[np.float64]) -> float:
    """
    迹形式的熵产生率 2 Tr((A^irr)ᵀ D⁻¹ A^irr V) + Tr(A^irr)

    Args:
        V: 协方差矩阵
        A_irr: 不可逆漂移部分（对角）
        D: 扩散矩阵

    Returns:
        float: Π_s
    """
    M = as_array(V)
    A_irr = np.asarray(A_irr, dtype=float)
    D = np.asarray(D, dtype=float)
    try:
        D_inv_A = np.linalg.solve(D, A_irr)
    except np.linalg.LinAlgError as e:
        raise SingularSystem("扩散矩阵 D 奇异，迹形式不可用") from e
    return float(2.0 * np.trace(A_irr.T @ D_inv_A @ M) + np.trace(A_irr))


def entropy_production_offdiagonal(V: CovarianceLike, p: EffectiveParams,
                                   rtol: float = DIVERGENCE_RTOL) -> float:
    """
    用协方差非对角元 V₁₂、V₁₄、V₂₃ 表示的熵产生率

    Args:
        V: 稳态协方差矩阵
        p: 模型参数（要求 n_a = 0）
        rtol: 分母接近零的相对阈值

    Returns:
        float: Π_s
    """
    if p.n_a != 0:
        raise NotSupported(f"非对角形式仅适用于 n_a = 0，得到 n_a={p.n_a}")

    gap = divergence_gap(p)
    if abs(gap) < rtol * p.kappa ** 2:
        raise DivergentDenominator(
            f"κ² − χ²cos²φ = {gap:.3e} 接近零（κ={p.kappa}, χcosφ={p.chi_cos:.6g}）"
        )

    M = as_array(V)
    kappa, c, s, G = p.kappa, p.chi_cos, p.chi_sin, p.coupling_G
    # κ tanφ · χcosφ 写作 κ χ sinφ，避免 cosφ = 0 时的 tanφ 奇点
    return float(
        2.0 * kappa * c ** 2 / gap
        + 4.0 * kappa * (c * p.delta_a + kappa * s) / gap * M[0, 1]
        + 2.0 * G / (2.0 * p.n_b + 1.0) * M[0, 3]
        + 2.0 * kappa * G / (kappa + c) * M[1, 2]
    )
