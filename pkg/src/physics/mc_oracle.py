"""
随机模拟校验模块
直接积分线性 Langevin 方程 dR = A R dt + S dW（S Sᵀ = D），
用时间与轨迹平均的二阶矩独立校验 Lyapunov 稳态解

两种离散格式：
- euler：Euler–Maruyama，要求 dt·‖A‖ < 0.1
- exact：OU 过程精确离散（矩阵指数 + Van Loan 积分协方差），无离散偏差
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numba as nb
import numpy as np
from numpy.typing import NDArray
from scipy.linalg import expm

from .errors import SimulationSettingsError, UnstableSystem
from .gaussian_core import CovarianceMatrix, CovarianceLike, as_array
from .lyapunov import is_stable


logger = logging.getLogger(__name__)

# Euler 格式稳定裕度 dt·‖A‖ < EULER_MARGIN
EULER_MARGIN = 0.1
# 每次从随机流抽取的步数
BLOCK_STEPS = 4096
# 每个任务处理的轨迹数（固定，保证结果与线程数无关；内核释放 GIL，各组并行）
CHUNK_TRAJECTORIES = 8


@dataclass(frozen=True)
class SimulationSettings:
    """随机模拟设置（时间单位 1/ω_b）"""
    dt: float = 1e-3
    t_burn: float = 1e3
    t_sample: float = 1e4
    n_traj: int = 32
    rng_seed: int = 20240101
    scheme: str = 'euler'
    workers: Optional[int] = None

    def __post_init__(self):
        if not self.dt > 0:
            raise SimulationSettingsError(f"dt 必须大于 0，得到 {self.dt}")
        if not (self.t_burn > 0 and self.t_sample > 0):
            raise SimulationSettingsError(
                f"t_burn 与 t_sample 必须大于 0，得到 {self.t_burn}, {self.t_sample}"
            )
        if self.t_sample < self.dt:
            raise SimulationSettingsError("t_sample 至少为一个时间步")
        if self.n_traj < 2:
            raise SimulationSettingsError(f"至少需要 2 条轨迹估计误差，得到 {self.n_traj}")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise SimulationSettingsError(f"rng_seed 必须为 64 位非负整数，得到 {self.rng_seed}")
        if self.scheme not in ('euler', 'exact'):
            raise SimulationSettingsError(f"不支持的离散格式: {self.scheme}")

    @property
    def n_burn(self) -> int:
        return int(math.ceil(self.t_burn / self.dt))

    @property
    def n_sample(self) -> int:
        return int(math.ceil(self.t_sample / self.dt))


def noise_factor(D: NDArray[np.float64]) -> NDArray[np.float64]:
    """
    扩散矩阵的平方根因子 S（S Sᵀ = D）

    对角 D 直接开方；一般情形用本征分解，允许半正定。
    """
    D = np.asarray(D, dtype=float)
    if np.count_nonzero(D - np.diag(np.diag(D))) == 0:
        diag = np.diag(D)
        if np.any(diag < 0):
            raise SimulationSettingsError("扩散矩阵存在负对角元")
        return np.diag(np.sqrt(diag))
    w, U = np.linalg.eigh(0.5 * (D + D.T))
    if np.min(w) < -1e-12 * max(np.max(np.abs(w)), 1.0):
        raise SimulationSettingsError("扩散矩阵不是半正定")
    return U @ np.diag(np.sqrt(np.clip(w, 0.0, None)))


def exact_transition(A: NDArray[np.float64], D: NDArray[np.float64],
                     dt: float) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    OU 过程一步的精确转移：Φ = e^{A dt}，Q = ∫₀^dt e^{As} D e^{Aᵀs} ds

    Q 由 Van Loan 分块矩阵指数得到，不依赖 Lyapunov 解。
    """
    n = A.shape[0]
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = -A
    block[:n, n:] = D
    block[n:, n:] = A.T
    F = expm(block * dt)
    phi = F[n:, n:].T
    Q = phi @ F[:n, n:]
    return phi, 0.5 * (Q + Q.T)


@nb.njit(cache=True, nogil=True)
def _propagate(step_matrix, noise_matrix, noise, R, first, acc):
    """
    推进一个块：R ← M·R + N·ξ，从第 first 步起把 R Rᵀ 累加进 acc

    Args:
        step_matrix: 单步转移 M，(n, n)
        noise_matrix: 噪声因子 N，(n, n)
        noise: 标准正态数，(steps, k, n)
        R: 各轨迹状态，(k, n)，原地更新
        first: 块内开始计入样本的步
        acc: 外积累加器，(k, n, n)，原地更新
    """
    steps, k, n = noise.shape
    new = np.empty(n)
    for s in range(steps):
        for t in range(k):
            for i in range(n):
                v = 0.0
                for j in range(n):
                    v += step_matrix[i, j] * R[t, j] + noise_matrix[i, j] * noise[s, t, j]
                new[i] = v
            for i in range(n):
                R[t, i] = new[i]
            if s >= first:
                for i in range(n):
                    for j in range(n):
                        acc[t, i, j] += R[t, i] * R[t, j]


def _run_chunk(step_matrix: NDArray[np.float64], noise_matrix: NDArray[np.float64],
               rngs: List[np.random.Generator], n_burn: int, n_sample: int) -> NDArray[np.float64]:
    """
    模拟一组轨迹，返回每条轨迹的平均外积，形状 (k, n, n)

    ξ 来自各轨迹自己的随机流，时间步进在编译内核中完成。
    """
    n = step_matrix.shape[0]
    k = len(rngs)
    R = np.zeros((k, n))
    acc = np.zeros((k, n, n))
    total = n_burn + n_sample
    done = 0
    while done < total:
        steps = min(BLOCK_STEPS, total - done)
        noise = np.stack([rng.standard_normal((steps, n)) for rng in rngs], axis=1)
        # 只累计燃烧期之后的样本
        first = max(0, n_burn - done)
        _propagate(step_matrix, noise_matrix, noise, R, first, acc)
        done += steps
    return acc / n_sample


def _simulate(A: NDArray[np.float64], D: NDArray[np.float64],
              s: SimulationSettings) -> Tuple[CovarianceMatrix, NDArray[np.float64]]:
    n = A.shape[0]
    if s.scheme == 'euler':
        step_matrix = np.eye(n) + A * s.dt
        noise_matrix = math.sqrt(s.dt) * noise_factor(D)
    else:
        step_matrix, Q = exact_transition(A, D, s.dt)
        noise_matrix = noise_factor(Q)
    step_matrix = np.ascontiguousarray(step_matrix)
    noise_matrix = np.ascontiguousarray(noise_matrix)

    # 每条轨迹的随机流由 (seed, 轨迹序号) 派生，与线程调度无关
    rngs = [np.random.default_rng([s.rng_seed, k]) for k in range(s.n_traj)]
    chunks = [rngs[i:i + CHUNK_TRAJECTORIES] for i in range(0, s.n_traj, CHUNK_TRAJECTORIES)]

    logger.debug(f"随机模拟: scheme={s.scheme}, 步数={s.n_burn}+{s.n_sample}, 轨迹={s.n_traj}")
    with ThreadPoolExecutor(max_workers=s.workers) as executor:
        parts = list(executor.map(
            lambda chunk: _run_chunk(step_matrix, noise_matrix, chunk, s.n_burn, s.n_sample),
            chunks,
        ))

    per_traj = np.concatenate(parts, axis=0)
    V_est = per_traj.mean(axis=0)
    stderr = per_traj.std(axis=0, ddof=1) / math.sqrt(s.n_traj)
    return CovarianceMatrix(0.5 * (V_est + V_est.T)), stderr


def _check_inputs(A: NDArray[np.float64], D: NDArray[np.float64]) -> Tuple[NDArray, NDArray]:
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    if D.shape != A.shape:
        raise ValueError(f"A 与 D 形状不一致: {A.shape} vs {D.shape}")
    if not is_stable(A):
        raise UnstableSystem("漂移矩阵不稳定，随机模拟没有稳态")
    return A, D


def estimate_steady_covariance(
    A: NDArray[np.float64],
    D: NDArray[np.float64],
    s: SimulationSettings,
) -> Tuple[CovarianceMatrix, NDArray[np.float64]]:
    """
    用 Euler–Maruyama 轨迹估计稳态协方差

    Args:
        A: 稳定漂移矩阵
        D: 扩散矩阵
        s: 模拟设置（scheme 字段被忽略，固定为 euler）

    Returns:
        Tuple[CovarianceMatrix, NDArray]: (V_est, 逐元素标准误差)
    """
    A, D = _check_inputs(A, D)
    margin = s.dt * float(np.linalg.norm(A, 2))
    if margin >= EULER_MARGIN:
        raise SimulationSettingsError(
            f"dt·‖A‖ = {margin:.3g} 超过 Euler 稳定裕度 {EULER_MARGIN}"
        )
    if s.scheme != 'euler':
        s = replace(s, scheme='euler')
    return _simulate(A, D, s)


def estimate_steady_covariance_exact(
    A: NDArray[np.float64],
    D: NDArray[np.float64],
    s: SimulationSettings,
) -> Tuple[CovarianceMatrix, NDArray[np.float64]]:
    """用 OU 精确离散估计稳态协方差（任意 dt 无离散偏差）"""
    A, D = _check_inputs(A, D)
    if s.scheme != 'exact':
        s = replace(s, scheme='exact')
    return _simulate(A, D, s)


def compare_to_lyapunov(V_est: CovarianceLike, stderr: NDArray[np.float64],
                        V_ref: CovarianceLike) -> NDArray[np.float64]:
    """
    逐元素 z 分数 |V_est − V_ref| / stderr

    Returns:
        NDArray: 与 V 同形状的 z 分数矩阵
    """
    diff = np.abs(as_array(V_est) - as_array(V_ref))
    floor = np.finfo(float).tiny
    return diff / np.maximum(np.asarray(stderr, dtype=float), floor)
