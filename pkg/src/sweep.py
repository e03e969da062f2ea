"""
参数扫描模块
对配置中的网格逐点求解稳态并计算请求的输出

每个网格点：构造 A、D → 稳定性判断 → Lyapunov 求解 → 各项输出。
单点失败只记录在该行（status/error），不会中断整个扫描。
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .config_loader import SweepConfig, resolve_workers
from .physics.correlations import gaussian_discord, mutual_information, renyi2_entropy
from .physics.entropy import (
    entropy_production, entropy_production_offdiagonal, entropy_production_trace,
    irreversible_drift,
)
from .physics.errors import DivergentDenominator, NotSupported, OptomechError
from .physics.gaussian_core import EffectiveParams, build_model, check_physical, symplectic_eigenvalues
from .physics.lyapunov import is_stable, solve_steady_covariance, stability_tolerance
from .physics.mc_oracle import compare_to_lyapunov, estimate_steady_covariance, estimate_steady_covariance_exact


logger = logging.getLogger(__name__)

STATUS_OK = 'ok'
STATUS_UNSTABLE = 'unstable'
STATUS_ERROR = 'error'

COVARIANCE_COLUMNS = ('v11', 'v12', 'v13', 'v14', 'v22', 'v23', 'v24', 'v33', 'v34', 'v44')
SYMPLECTIC_COLUMNS = ('nu_1', 'nu_2')
ORACLE_COLUMN = 'oracle_max_z'

_ENTROPY_OUTPUTS = {'pi_s', 'mu_a', 'mu_b'}
_DISCORD_OUTPUTS = {'discord', 'one_way_classical'}


def output_columns(outputs: List[str], with_oracle: bool = False) -> List[str]:
    """
    请求的输出展开为数据列

    Args:
        outputs: 规范顺序的输出名
        with_oracle: 是否附加随机模拟校验列

    Returns:
        List[str]: 列名
    """
    columns = []
    for name in outputs:
        if name == 'covariance':
            columns.extend(COVARIANCE_COLUMNS)
        elif name == 'sympl_eigs':
            columns.extend(SYMPLECTIC_COLUMNS)
        else:
            columns.append(name)
    if with_oracle:
        columns.append(ORACLE_COLUMN)
    return columns


@dataclass
class SweepRecord:
    """单个网格点的结果"""
    index: int
    axis_values: Dict[str, float]
    params: EffectiveParams
    stable: bool = False
    values: Dict[str, float] = field(default_factory=dict)
    status: str = STATUS_OK
    error: Optional[str] = None
    diagnostics: List[str] = field(default_factory=list)

    def value(self, column: str) -> float:
        """取某列的值，缺失为 NaN"""
        return self.values.get(column, math.nan)

    def to_dict(self, columns: List[str]) -> Dict[str, Any]:
        """转换为字典（JSON 行）"""
        row: Dict[str, Any] = dict(self.axis_values)
        for column in columns:
            row[column] = self.value(column)
        row['stable'] = self.stable
        row['status'] = self.status
        row['error'] = self.error
        row['diagnostics'] = list(self.diagnostics)
        return row


@dataclass
class SweepResult:
    """扫描结果：按轴的行优先顺序排列的记录"""
    config: SweepConfig
    records: List[SweepRecord] = field(default_factory=list)
    started_at: Optional[str] = None
    finished_at: Optional[str] = None

    @property
    def axis_names(self) -> List[str]:
        return [axis.name for axis in self.config.axes]

    @property
    def columns(self) -> List[str]:
        """输出数据列（不含轴列与 stable）"""
        return output_columns(self.config.outputs, self.config.oracle is not None)

    @property
    def header(self) -> List[str]:
        """CSV 表头：轴、输出、stable"""
        return self.axis_names + self.columns + ['stable']

    def stats(self) -> Dict[str, Any]:
        """稳定/失败/诊断计数"""
        diagnostics: Dict[str, int] = {}
        for record in self.records:
            for tag in record.diagnostics:
                diagnostics[tag] = diagnostics.get(tag, 0) + 1
        return {
            'points': len(self.records),
            'stable': sum(1 for r in self.records if r.stable),
            'unstable': sum(1 for r in self.records if r.status == STATUS_UNSTABLE),
            'errors': sum(1 for r in self.records if r.status == STATUS_ERROR),
            'diagnostics': dict(sorted(diagnostics.items())),
        }

    def select(self, **fixed: float) -> List[SweepRecord]:
        """
        按参数取记录（键为 EffectiveParams 字段，浮点按 1e-12 相对比较）

        Returns:
            List[SweepRecord]: 满足条件的记录，保持扫描顺序
        """
        def matches(record: SweepRecord) -> bool:
            for name, target in fixed.items():
                value = getattr(record.params, name)
                if not math.isclose(value, target, rel_tol=1e-12, abs_tol=1e-12):
                    return False
            return True
        return [r for r in self.records if matches(r)]

    def series(self, x: str, column: str, **fixed: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        取一条曲线 (x, y)，按 x 升序

        Args:
            x: 横轴的 EffectiveParams 字段
            column: 输出列
            **fixed: 其余参数的取值

        Returns:
            Tuple[np.ndarray, np.ndarray]: 横坐标与纵坐标（不稳定点为 NaN）
        """
        records = self.select(**fixed)
        xs = np.array([getattr(r.params, x) for r in records], dtype=float)
        ys = np.array([r.value(column) for r in records], dtype=float)
        order = np.argsort(xs, kind='stable')
        return xs[order], ys[order]


def grid_points(cfg: SweepConfig) -> List[Tuple[Dict[str, float], EffectiveParams]]:
    """
    按轴的行优先顺序生成网格点（第一个轴变化最慢）

    Returns:
        List[Tuple[Dict, EffectiveParams]]: (轴取值, 参数)
    """
    if not cfg.axes:
        return [({}, cfg.base)]
    points = []
    for combo in itertools.product(*(axis.values for axis in cfg.axes)):
        axis_values = {axis.name: value for axis, value in zip(cfg.axes, combo)}
        updates = {axis.field: value for axis, value in zip(cfg.axes, combo)}
        points.append((axis_values, cfg.base.with_values(**updates)))
    return points


def _nan_values(columns: List[str]) -> Dict[str, float]:
    return {column: math.nan for column in columns}


def evaluate_point(params: EffectiveParams, cfg: SweepConfig,
                   index: int = 0, axis_values: Optional[Dict[str, float]] = None) -> SweepRecord:
    """
    计算单个网格点

    Args:
        params: 模型参数
        cfg: 扫描配置（输出、求解与优化设置）
        index: 行号
        axis_values: 该点的轴取值

    Returns:
        SweepRecord: 结果记录；失败时 status='error'，输出为 NaN
    """
    columns = output_columns(cfg.outputs, cfg.oracle is not None)
    record = SweepRecord(index=index, axis_values=dict(axis_values or {}), params=params,
                         values=_nan_values(columns))
    try:
        _evaluate_into(record, cfg)
    except OptomechError as e:
        record.status = STATUS_ERROR
        record.error = f"{type(e).__name__}: {e}"
        record.values = _nan_values(columns)
        logger.warning(f"网格点 {index} 计算失败: {record.error}")
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
        record.status = STATUS_ERROR
        record.error = f"{type(e).__name__}: {e}"
        record.values = _nan_values(columns)
        logger.warning(f"网格点 {index} 计算失败: {record.error}")
    return record


def _evaluate_into(record: SweepRecord, cfg: SweepConfig) -> None:
    p = record.params
    outputs = set(cfg.outputs)
    A, D = build_model(p)
    tol = stability_tolerance(A, cfg.solver.stability_rtol)

    if not is_stable(A, tol):
        record.stable = False
        record.status = STATUS_UNSTABLE
        logger.debug(f"网格点 {record.index} 不稳定: {record.axis_values}")
        return

    V = solve_steady_covariance(A, D, stability_tol=tol, residual_rtol=cfg.solver.residual_rtol)
    record.stable = True
    if not check_physical(V, tol=cfg.solver.physical_tol):
        record.diagnostics.append('non_physical')
        logger.warning(f"网格点 {record.index} 的协方差违反不确定性关系")

    values = record.values
    M = V.entries

    if outputs & _ENTROPY_OUTPUTS:
        breakdown = entropy_production(V, p)
        record.diagnostics.extend(breakdown.diagnostics)
        for name, value in breakdown.to_dict().items():
            if name in outputs:
                values[name] = value

    if 'pi_s_trace' in outputs:
        values['pi_s_trace'] = entropy_production_trace(V, irreversible_drift(p), D)

    if 'pi_s_offdiag' in outputs:
        try:
            values['pi_s_offdiag'] = entropy_production_offdiagonal(V, p)
        except DivergentDenominator:
            record.diagnostics.append('divergent_denominator')
            logger.warning(f"网格点 {record.index} 非对角形式分母接近零，留空")
        except NotSupported:
            record.diagnostics.append('offdiag_not_supported')

    if 'mutual_info' in outputs:
        values['mutual_info'] = mutual_information(V)

    if outputs & _DISCORD_OUTPUTS:
        result = gaussian_discord(V, cfg.discord)
        if 'discord' in outputs:
            values['discord'] = result.discord
        if 'one_way_classical' in outputs:
            values['one_way_classical'] = result.classical
        if result.status != 'converged':
            record.diagnostics.append(f"discord_{result.status}")
        record.diagnostics.extend(f"discord_{tag}" for tag in result.diagnostics
                                  if tag != 'optimizer_not_converged')

    if 'renyi_a' in outputs:
        values['renyi_a'] = renyi2_entropy(V.V_a)
    if 'renyi_b' in outputs:
        values['renyi_b'] = renyi2_entropy(V.V_b)
    if 'renyi_ab' in outputs:
        values['renyi_ab'] = renyi2_entropy(M)

    if 'occupation_a' in outputs:
        values['occupation_a'] = float((M[0, 0] + M[1, 1] - 1.0) / 2.0)
    if 'occupation_b' in outputs:
        values['occupation_b'] = float((M[2, 2] + M[3, 3] - 1.0) / 2.0)

    if 'covariance' in outputs:
        values.update(V.upper_triangle())

    if 'sympl_eigs' in outputs:
        for name, nu in zip(SYMPLECTIC_COLUMNS, symplectic_eigenvalues(V)):
            values[name] = nu

    if cfg.oracle is not None:
        if cfg.oracle.scheme == 'exact':
            V_est, stderr = estimate_steady_covariance_exact(A, D, cfg.oracle)
        else:
            V_est, stderr = estimate_steady_covariance(A, D, cfg.oracle)
        values[ORACLE_COLUMN] = float(np.max(compare_to_lyapunov(V_est, stderr, V)))

    logger.debug(f"网格点 {record.index} 完成: {record.axis_values}")


def run_sweep(cfg: SweepConfig, workers: Optional[int] = None) -> SweepResult:
    """
    执行参数扫描

    网格点在有界线程池中并发计算，结果按网格顺序组装，
    与完成顺序和线程数无关。

    Args:
        cfg: 扫描配置
        workers: 线程数，默认由环境变量/配置/CPU 数决定

    Returns:
        SweepResult: 记录数等于各轴长度之积
    """
    points = grid_points(cfg)
    n_workers = workers or resolve_workers(cfg.workers)
    started_at = datetime.now().isoformat()
    logger.info(f"开始扫描 {cfg.name}: {len(points)} 个网格点，{n_workers} 个线程")

    def task(item: Tuple[int, Tuple[Dict[str, float], EffectiveParams]]) -> SweepRecord:
        index, (axis_values, params) = item
        return evaluate_point(params, cfg, index=index, axis_values=axis_values)

    with ThreadPoolExecutor(max_workers=n_workers) as executor:
        records = list(executor.map(task, enumerate(points)))

    result = SweepResult(config=cfg, records=records, started_at=started_at,
                         finished_at=datetime.now().isoformat())
    stats = result.stats()
    logger.info(
        f"扫描 {cfg.name} 完成: 稳定 {stats['stable']}，不稳定 {stats['unstable']}，"
        f"失败 {stats['errors']}"
    )
    return result
