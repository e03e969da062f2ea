"""
平均场模块
把物理输入（SI 单位）换算为模型参数，求经典稳态平均场 a_s、b_s，
并给出线性化模型所需的 EffectiveParams (G, |χ|, φ)

坐标旋转约定：默认选取驱动相位 θ = arg(κ + iΔ̃_a)，使 a_s 为正实数，
此时 G = g a_s 为实数，φ 在该旋转坐标中测量。
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional

from scipy import constants

from .errors import MeanFieldNotConverged, ParameterError
from .gaussian_core import EffectiveParams


logger = logging.getLogger(__name__)

APPROXIMATE = 'approximate'
SELF_CONSISTENT = 'self_consistent'

MAX_ITERATIONS = 10_000
REL_TOL = 1e-12
DAMPING = 0.5


@dataclass(frozen=True)
class PhysicalParams:
    """物理参数（SI 单位，频率与速率为 rad/s）"""
    omega_C: float
    omega_L: float
    omega_b: float
    M: float
    L: float
    laser_power: float
    temperature: float
    kappa: float
    gamma: float
    xi: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        positive = ('omega_C', 'omega_L', 'omega_b', 'M', 'L', 'kappa', 'gamma')
        for name in positive:
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} 必须大于 0，得到 {getattr(self, name)}")
        if self.laser_power < 0:
            raise ParameterError(f"laser_power 不能为负，得到 {self.laser_power}")
        if self.temperature < 0:
            raise ParameterError(f"temperature 不能为负，得到 {self.temperature}")
        if self.xi < 0:
            raise ParameterError(f"xi 不能为负，得到 {self.xi}")

    @property
    def delta_a(self) -> float:
        """腔失谐 Δ_a = ω_C − ω_L [rad/s]"""
        return self.omega_C - self.omega_L


@dataclass(frozen=True)
class MeanFields:
    """稳态平均场（a_s、b_s 无量纲，delta_tilde 以 ω_b 为单位）"""
    a_s: complex
    b_s: complex
    delta_tilde: float
    converged: bool
    iterations: int
    residual: float = 0.0


def to_dimensionless(value: float, omega_b: float) -> float:
    """SI 频率/速率换算为 ω_b 单位"""
    return value / omega_b


def coupling_from_physical(p: PhysicalParams) -> float:
    """
    单光子光力耦合 g = sqrt(ħ/(M ω_b)) · ω_C / L

    Args:
        p: 物理参数

    Returns:
        float: g [rad/s]
    """
    return math.sqrt(constants.hbar / (p.M * p.omega_b)) * p.omega_C / p.L


def drive_amplitude(p: PhysicalParams) -> float:
    """
    驱动幅度 |η| = sqrt(2κR/(ħω_L))

    Args:
        p: 物理参数

    Returns:
        float: |η| [s⁻¹]
    """
    return math.sqrt(2.0 * p.kappa * p.laser_power / (constants.hbar * p.omega_L))


def thermal_occupation(T: float, omega_b: float) -> float:
    """
    Bose 占据数 n = 1/(exp(ħω/(k_B T)) − 1)，T = 0 时为 0

    Args:
        T: 温度 [K]
        omega_b: 模式频率 [rad/s]

    Returns:
        float: 平均热占据数
    """
    if T < 0 or omega_b <= 0:
        raise ParameterError(f"需要 T ≥ 0 且 ω > 0，得到 T={T}, ω={omega_b}")
    if T == 0:
        return 0.0
    x = constants.hbar * omega_b / (constants.k * T)
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


def iterate_mean_field(
    eta: complex,
    delta_a: float,
    kappa: float,
    gamma: float,
    omega_b: float,
    g: float,
    xi: float,
    mode: str = APPROXIMATE,
    max_iterations: int = MAX_ITERATIONS,
    rel_tol: float = REL_TOL,
) -> MeanFields:
    """
    求解平均场方程
    a_s = η/(κ + iΔ̃_a)，b_s = −g|a_s|²/(γ + iω_b)，Δ̃_a = Δ_a + 2g Re b_s + 2ξ|a_s|²

    所有频率参数使用同一单位（结果中的 delta_tilde 换算为 ω_b 单位）。

    Args:
        eta: 复驱动 η
        delta_a: 裸失谐
        kappa, gamma, omega_b: 衰减率与机械频率
        g: 单光子耦合
        xi: 非线性强度
        mode: approximate（取 Δ̃_a ≃ Δ_a）或 self_consistent（阻尼不动点迭代）
        max_iterations: 最大迭代次数
        rel_tol: 相对变化收敛阈值

    Returns:
        MeanFields: 平均场结果
    """
    if mode not in (APPROXIMATE, SELF_CONSISTENT):
        raise ParameterError(f"不支持的平均场模式: {mode}")

    def fields_at(delta_tilde: float):
        a_s = eta / complex(kappa, delta_tilde)
        b_s = -g * abs(a_s) ** 2 / complex(gamma, omega_b)
        return a_s, b_s

    def update(delta_tilde: float) -> float:
        a_s, b_s = fields_at(delta_tilde)
        return delta_a + 2.0 * g * b_s.real + 2.0 * xi * abs(a_s) ** 2

    if mode == APPROXIMATE:
        a_s, b_s = fields_at(delta_a)
        return MeanFields(a_s=a_s, b_s=b_s, delta_tilde=delta_a / omega_b,
                          converged=True, iterations=0)

    scale = max(abs(delta_a), kappa)
    delta_tilde = delta_a
    converged = False
    residual = math.inf
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        target = update(delta_tilde)
        residual = abs(target - delta_tilde) / scale
        if residual < rel_tol:
            delta_tilde = target
            converged = True
            break
        delta_tilde = (1.0 - DAMPING) * delta_tilde + DAMPING * target

    if not converged:
        logger.warning(f"平均场迭代 {max_iterations} 次未收敛，残差 {residual:.3e}（可能处于双稳区）")
    else:
        residual = abs(update(delta_tilde) - delta_tilde) / scale

    a_s, b_s = fields_at(delta_tilde)
    return MeanFields(a_s=a_s, b_s=b_s, delta_tilde=delta_tilde / omega_b,
                      converged=converged, iterations=iterations, residual=residual)


def solve_mean_field(p: PhysicalParams, mode: str = APPROXIMATE,
                     rotate_frame: bool = True) -> MeanFields:
    """
    求解物理参数下的稳态平均场

    Args:
        p: 物理参数
        mode: approximate 或 self_consistent
        rotate_frame: True 时选取 θ 使 a_s 为正实数；False 时使用 p.theta

    Returns:
        MeanFields: 平均场结果
    """
    g = coupling_from_physical(p)
    eta_mag = drive_amplitude(p)
    result = iterate_mean_field(
        eta=eta_mag * cmath.exp(1j * p.theta), delta_a=p.delta_a, kappa=p.kappa,
        gamma=p.gamma, omega_b=p.omega_b, g=g, xi=p.xi, mode=mode,
    )
    if not rotate_frame:
        return result

    # 相位旋转不改变 |a_s|，因而不改变 Δ̃_a；只需把 a_s 转到正实轴
    theta = math.atan2(result.delta_tilde * p.omega_b, p.kappa)
    a_s = eta_mag * cmath.exp(1j * theta) / complex(p.kappa, result.delta_tilde * p.omega_b)
    return MeanFields(a_s=complex(a_s.real, 0.0), b_s=result.b_s,
                      delta_tilde=result.delta_tilde, converged=result.converged,
                      iterations=result.iterations, residual=result.residual)


def effective_params(mf: MeanFields, p: PhysicalParams,
                     n_a: Optional[float] = None) -> EffectiveParams:
    """
    由平均场得到线性化模型参数（单位 ω_b）

    G = |g a_s|，χ = −2iξ a_s²，|χ| = 2ξ|a_s|²，φ = atan2(Im χ, Re χ) ∈ (−π, π]
    失谐取平均场给出的 Δ̃_a（近似模式下即 Δ_a）

    Args:
        mf: 已收敛的平均场
        p: 物理参数
        n_a: 腔热占据数，默认按腔频率与温度计算

    Returns:
        EffectiveParams: 无量纲模型参数
    """
    if not mf.converged:
        raise MeanFieldNotConverged(f"平均场未收敛（迭代 {mf.iterations} 次，残差 {mf.residual:.3e}）")

    g = coupling_from_physical(p)
    chi = -2j * p.xi * mf.a_s ** 2
    chi_mag = abs(chi)
    phi = math.atan2(chi.imag, chi.real) if chi_mag > 0 else 0.0
    if phi == -math.pi:
        phi = math.pi
    if n_a is None:
        n_a = thermal_occupation(p.temperature, p.omega_C)

    return EffectiveParams(
        delta_a=mf.delta_tilde,
        omega_b=1.0,
        kappa=to_dimensionless(p.kappa, p.omega_b),
        gamma=to_dimensionless(p.gamma, p.omega_b),
        coupling_G=to_dimensionless(g * abs(mf.a_s), p.omega_b),
        chi_mag=to_dimensionless(chi_mag, p.omega_b),
        phi=phi,
        n_b=thermal_occupation(p.temperature, p.omega_b),
        n_a=n_a,
    )
