"""
Lyapunov 模块
漂移矩阵稳定性判定，以及稳态协方差方程 A V + V Aᵀ = −D 的求解

求解器与维度无关（任意 n×n），模型构造器只负责双模情形。
"""

import logging
from typing import List, Optional

import numpy as np
from numpy.typing import NDArray

from .errors import SingularSystem, UnstableSystem
from .gaussian_core import CovarianceMatrix, as_array, CovarianceLike


logger = logging.getLogger(__name__)

# 稳定性默认相对容差：tol = STABILITY_RTOL · ‖A‖₂
STABILITY_RTOL = 1e-10
# 残差上界：‖AV + VAᵀ + D‖_F ≤ RESIDUAL_RTOL · ‖D‖_F
RESIDUAL_RTOL = 1e-10


def spectral_abscissa(A: NDArray[np.float64]) -> float:
    """A 的谱横坐标 max Re λ(A)"""
    return float(np.max(np.linalg.eigvals(np.asarray(A, dtype=float)).real))


def stability_tolerance(A: NDArray[np.float64], rtol: float = STABILITY_RTOL) -> float:
    """与 ‖A‖₂ 成比例的稳定性容差，保证扫描与尺度无关"""
    return rtol * float(np.linalg.norm(np.asarray(A, dtype=float), 2))


def is_stable(A: NDArray[np.float64], tol: Optional[float] = None) -> bool:
    """
    本征值判据：所有本征值实部 < −tol

    Args:
        A: 方阵
        tol: 容差，默认 1e-10·‖A‖

    Returns:
        bool: 是否渐近稳定
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"漂移矩阵必须为方阵，得到形状 {A.shape}")
    if tol is None:
        tol = stability_tolerance(A)
    return spectral_abscissa(A) < -tol


def hurwitz_determinants(A: NDArray[np.float64]) -> List[float]:
    """
    特征多项式 det(sI − A) 的 Hurwitz 主子式

    Args:
        A: n×n 方阵

    Returns:
        List[float]: Δ₁ … Δₙ
    """
    coeffs = np.poly(np.asarray(A, dtype=float)).real
    n = len(coeffs) - 1
    H = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            k = 2 * j - i + 1
            if 0 <= k <= n:
                H[i, j] = coeffs[k]
    return [float(np.linalg.det(H[:m, :m])) for m in range(1, n + 1)]


def is_stable_hurwitz(A: NDArray[np.float64]) -> bool:
    """Routh–Hurwitz 判据（系数表形式，仅用作交叉检查）"""
    coeffs = np.poly(np.asarray(A, dtype=float)).real
    if np.any(coeffs <= 0):
        return False
    return all(d > 0 for d in hurwitz_determinants(A))


def lyapunov_residual(A: NDArray[np.float64], D: NDArray[np.float64],
                      V: CovarianceLike) -> float:
    """Frobenius 残差 ‖AV + VAᵀ + D‖_F"""
    A = np.asarray(A, dtype=float)
    M = as_array(V)
    return float(np.linalg.norm(A @ M + M @ A.T + np.asarray(D, dtype=float), 'fro'))


def solve_steady_covariance(
    A: NDArray[np.float64],
    D: NDArray[np.float64],
    stability_tol: Optional[float] = None,
    residual_rtol: float = RESIDUAL_RTOL,
) -> CovarianceMatrix:
    """
    求解 A V + V Aᵀ = −D

    将矩阵方程按列堆叠为 (I⊗A + A⊗I) vec(V) = −vec(D) 后稠密求解，
    结果对称化。

    Args:
        A: 稳定的 n×n 漂移矩阵
        D: n×n 扩散矩阵
        stability_tol: 稳定性容差，默认 1e-10·‖A‖
        residual_rtol: 残差相对上界（超出时记录警告）

    Returns:
        CovarianceMatrix: 稳态协方差矩阵
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    n = A.shape[0]
    if D.shape != A.shape:
        raise ValueError(f"A 与 D 形状不一致: {A.shape} vs {D.shape}")

    if not is_stable(A, stability_tol):
        raise UnstableSystem(f"漂移矩阵不稳定，谱横坐标 {spectral_abscissa(A):.3e}")

    eye = np.eye(n)
    K = np.kron(eye, A) + np.kron(A, eye)
    cond = np.linalg.cond(K)
    if not np.isfinite(cond) or cond > 1.0 / (n * n * np.finfo(float).eps):
        raise SingularSystem(f"Lyapunov 线性方程组数值奇异，条件数 {cond:.3e}")

    try:
        vec = np.linalg.solve(K, -D.reshape(-1, order='F'))
    except np.linalg.LinAlgError as e:
        raise SingularSystem(f"Lyapunov 线性方程组求解失败: {e}") from e

    V = vec.reshape((n, n), order='F')
    V = 0.5 * (V + V.T)

    residual = lyapunov_residual(A, D, V)
    bound = residual_rtol * float(np.linalg.norm(D, 'fro'))
    if residual > bound:
        logger.warning(f"Lyapunov 残差 {residual:.3e} 超过上界 {bound:.3e}")

    return CovarianceMatrix(V)
