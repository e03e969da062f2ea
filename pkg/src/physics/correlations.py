"""
量子关联模块
Rényi-2 熵、高斯 Rényi-2 互信息，以及对机械模式做单模高斯测量的量子失协

失协中的测量下确界没有解析式，这里在纯种子族 σ_m(λ, θ) 上数值最小化：
先在 (log λ, θ) 网格上粗搜，再用 Nelder-Mead 单纯形细化。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize

from .errors import NonPhysicalState, ParameterError
from .gaussian_core import (
    VACUUM_VARIANCE, CovarianceLike, CovarianceMatrix, as_array, check_physical,
)


logger = logging.getLogger(__name__)

# 失协裁剪到 0 时允许的数值噪声
CLIP_TOL = 1e-9


@dataclass(frozen=True)
class OptimizerSettings:
    """测量优化设置"""
    n_lambda: int = 40
    n_theta: int = 20
    lambda_min: float = 1e-3
    lambda_max: float = 1e3
    rtol: float = 1e-9
    max_iter: int = 2000
    # 单纯形细化时 log10 λ 的允许范围（超出粗网格以逼近零差极限）
    refine_decades: float = 8.0

    def __post_init__(self):
        if self.n_lambda < 2 or self.n_theta < 1:
            raise ParameterError(f"网格过小: n_lambda={self.n_lambda}, n_theta={self.n_theta}")
        if not 0 < self.lambda_min < self.lambda_max:
            raise ParameterError(f"λ 范围无效: [{self.lambda_min}, {self.lambda_max}]")
        if self.rtol <= 0 or self.max_iter <= 0:
            raise ParameterError("rtol 与 max_iter 必须为正")


@dataclass(frozen=True)
class MeasurementSeed:
    """单模纯高斯测量种子 (λ, θ)"""
    lam: float
    theta: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"压缩参数 λ 必须大于 0，得到 {self.lam}")
        object.__setattr__(self, 'theta', float(self.theta) % math.pi)

    def covariance(self, vacuum: float = VACUUM_VARIANCE) -> NDArray[np.float64]:
        """σ_m = vacuum · R(θ) diag(λ, 1/λ) R(θ)ᵀ，det σ_m = vacuum²"""
        return _seed_covariances(np.array([math.log(self.lam)]),
                                 np.array([self.theta]), vacuum)[0]


@dataclass
class DiscordResult:
    """失协计算结果"""
    discord: float
    mutual_info: float
    classical: float
    seed: MeasurementSeed
    grid_min: float
    refined_min: float
    status: str = 'converged'
    diagnostics: List[str] = field(default_factory=list)


def _seed_covariances(log_lams: NDArray[np.float64], thetas: NDArray[np.float64],
                      vacuum: float) -> NDArray[np.float64]:
    """批量构造种子协方差，返回形状 (N, 2, 2)"""
    lam = np.exp(log_lams)
    c, s = np.cos(thetas), np.sin(thetas)
    a, b = lam, 1.0 / lam
    out = np.empty(lam.shape + (2, 2))
    out[..., 0, 0] = a * c * c + b * s * s
    out[..., 1, 1] = a * s * s + b * c * c
    out[..., 0, 1] = out[..., 1, 0] = (a - b) * c * s
    return vacuum * out


def _half_logdet(M: NDArray[np.float64]) -> NDArray[np.float64]:
    """½ ln det，非正定时返回 +inf"""
    sign, logdet = np.linalg.slogdet(M)
    return np.where(sign > 0, 0.5 * logdet, np.inf)


def _blocks(V: CovarianceLike) -> Tuple[NDArray, NDArray, NDArray]:
    M = as_array(V)
    if M.shape != (4, 4):
        raise NonPhysicalState(f"需要双模 4×4 协方差矩阵，得到 {M.shape}")
    return M[0:2, 0:2], M[2:4, 2:4], M[0:2, 2:4]


def _require_physical(V: CovarianceLike, vacuum: float) -> None:
    if not check_physical(V, vacuum=vacuum):
        raise NonPhysicalState("协方差矩阵不满足不确定性关系")


def renyi2_entropy(Vblock: CovarianceLike, vacuum: float = VACUUM_VARIANCE) -> float:
    """
    高斯态 Rényi-2 熵 ½ ln det(Vblock / vacuum)

    真空约定 1/2 下即 ½ ln det(2V)，纯态为 0。

    Args:
        Vblock: 单模或多模协方差矩阵
        vacuum: 真空方差

    Returns:
        float: S₂
    """
    M = as_array(Vblock)
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError as e:
        raise NonPhysicalState("协方差矩阵非正定") from e
    return float(_half_logdet(M / vacuum))


def mutual_information(V: CovarianceLike, vacuum: float = VACUUM_VARIANCE) -> float:
    """
    高斯 Rényi-2 互信息 I = ½ ln(det V_a · det V_b / det V)

    对整体缩放不变，可直接用 V 计算。

    Args:
        V: 双模协方差矩阵
        vacuum: 真空方差（仅用于物理性检查）

    Returns:
        float: I ≥ 0
    """
    _require_physical(V, vacuum)
    V_a, V_b, _ = _blocks(V)
    value = _half_logdet(V_a) + _half_logdet(V_b) - _half_logdet(as_array(V))
    return float(value)


def conditional_covariance(V: CovarianceLike, m: MeasurementSeed,
                           vacuum: float = VACUUM_VARIANCE) -> NDArray[np.float64]:
    """
    对机械模式做种子 m 的高斯测量后，腔模式的条件协方差
    V_a − C (V_b + σ_m)⁻¹ Cᵀ

    Args:
        V: 双模协方差矩阵
        m: 测量种子
        vacuum: 真空方差

    Returns:
        NDArray: 2×2 对称正定矩阵
    """
    V_a, V_b, C = _blocks(V)
    cond = V_a - C @ np.linalg.solve(V_b + m.covariance(vacuum), C.T)
    return 0.5 * (cond + cond.T)


def _conditional_half_logdet(V_a, V_b, C, log_lams, thetas, vacuum):
    """批量计算 ½ ln det(条件协方差)"""
    sigma_m = _seed_covariances(log_lams, thetas, vacuum)
    inv = np.linalg.inv(V_b[None, :, :] + sigma_m)
    cond = V_a[None, :, :] - C[None, :, :] @ inv @ C.T[None, :, :]
    return _half_logdet(cond)


def gaussian_discord(V: CovarianceLike, opt: Optional[OptimizerSettings] = None,
                     vacuum: float = VACUUM_VARIANCE) -> DiscordResult:
    """
    高斯 Rényi-2 量子失协 D = I − J（测量作用于机械模式 b）

    Args:
        V: 双模协方差矩阵
        opt: 优化设置
        vacuum: 真空方差；V 按 c 缩放时传入 c·vacuum，结果不变

    Returns:
        DiscordResult: 失协、互信息、单向经典关联与最优种子
    """
    opt = opt or OptimizerSettings()
    _require_physical(V, vacuum)
    V_a, V_b, C = _blocks(V)
    mutual = mutual_information(V, vacuum)

    # 粗网格
    log_lams = np.linspace(math.log(opt.lambda_min), math.log(opt.lambda_max), opt.n_lambda)
    thetas = np.linspace(0.0, math.pi, opt.n_theta, endpoint=False)
    LL, TT = np.meshgrid(log_lams, thetas, indexing='ij')
    values = _conditional_half_logdet(V_a, V_b, C, LL.ravel(), TT.ravel(), vacuum)
    best = int(np.argmin(values))
    grid_min = float(values[best])
    x0 = np.array([LL.ravel()[best], TT.ravel()[best]])

    def objective(x: NDArray[np.float64]) -> float:
        return float(_conditional_half_logdet(V_a, V_b, C, x[:1], x[1:], vacuum)[0])

    # 单纯形细化，初始单纯形取一个网格步长
    step_l = log_lams[1] - log_lams[0]
    step_t = math.pi / opt.n_theta
    simplex = np.array([x0, x0 + [step_l, 0.0], x0 + [0.0, step_t]])
    bound = opt.refine_decades * math.log(10.0)
    result = minimize(
        objective, x0, method='Nelder-Mead',
        bounds=[(-bound, bound), (None, None)],
        options={
            'initial_simplex': simplex,
            'xatol': opt.rtol,
            'fatol': opt.rtol * max(abs(grid_min), 1e-12),
            'maxiter': opt.max_iter,
        },
    )

    status = 'converged' if result.success else 'max_iter'
    diagnostics = []
    if not result.success:
        diagnostics.append('optimizer_not_converged')
        logger.warning(f"失协优化未收敛，采用当前最优值: {result.message}")

    # 细化结果不劣于粗网格
    if float(result.fun) <= grid_min:
        refined_min = float(result.fun)
        x_best = np.asarray(result.x, dtype=float)
    else:
        refined_min = grid_min
        x_best = x0

    classical = float(_half_logdet(V_a)) - refined_min
    raw = mutual - classical
    if raw < -CLIP_TOL:
        diagnostics.append('clipped')
        logger.warning(f"失协为负 {raw:.3e}，已裁剪为 0")

    return DiscordResult(
        discord=max(raw, 0.0),
        mutual_info=mutual,
        classical=classical,
        seed=MeasurementSeed(lam=math.exp(x_best[0]), theta=x_best[1]),
        grid_min=grid_min,
        refined_min=refined_min,
        status=status,
        diagnostics=diagnostics,
    )


def one_way_classical_correlation(V: CovarianceLike, opt: Optional[OptimizerSettings] = None,
                                  vacuum: float = VACUUM_VARIANCE) -> float:
    """单向经典关联 J = I − D ≥ 0"""
    return gaussian_discord(V, opt, vacuum).classical
