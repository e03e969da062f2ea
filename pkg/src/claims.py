"""
扫描后检查模块
把图中的定性结论写成对 SweepResult 的检查

检查失败只记录 WARNING 并写入元信息，不改变退出码。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from .config_loader import ClaimSpec
from .sweep import SweepResult


logger = logging.getLogger(__name__)


@dataclass
class ClaimResult:
    """检查结果"""
    name: str
    passed: bool
    detail: str = ''
    data: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'passed': self.passed, 'detail': self.detail, 'data': self.data}


def detect_dips(xs: Sequence[float], ys: Sequence[float]) -> List[float]:
    """
    曲线的局部极小位置（忽略 NaN，端点不计）

    Args:
        xs: 升序横坐标
        ys: 纵坐标

    Returns:
        List[float]: 局部极小处的横坐标
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    dips = []
    for i in range(1, len(ys) - 1):
        left, mid, right = ys[i - 1], ys[i], ys[i + 1]
        if not (np.isfinite(left) and np.isfinite(mid) and np.isfinite(right)):
            continue
        if mid < left and mid <= right:
            dips.append(float(xs[i]))
    return dips


def _distinct(result: SweepResult, name: str) -> List[float]:
    return sorted({getattr(r.params, name) for r in result.records})


def _fixed(**kwargs: Optional[float]) -> Dict[str, float]:
    return {k: v for k, v in kwargs.items() if v is not None}


def mu_a_increases_with_chi(result: SweepResult, chis: Sequence[float] = (0.0, 0.3, 0.5),
                            n_b: Optional[float] = 10.0) -> ClaimResult:
    """μ_a 在每个失谐点随 χ 单调增大"""
    name = 'mu_a_increases_with_chi'
    curves = [result.series('delta_a', 'mu_a', **_fixed(chi_mag=chi, n_b=n_b)) for chi in chis]
    if any(len(xs) == 0 for xs, _ in curves):
        return ClaimResult(name, False, '缺少所需的 χ 曲线')

    xs = curves[0][0]
    stack = np.vstack([ys for _, ys in curves])
    finite = np.all(np.isfinite(stack), axis=0)
    if not np.any(finite):
        return ClaimResult(name, False, '没有所有 χ 都稳定的失谐点')
    ordered = np.all(np.diff(stack[:, finite], axis=0) > 0, axis=0)
    violations = xs[finite][~ordered]
    passed = bool(np.all(ordered))
    detail = f"{int(np.sum(ordered))}/{int(np.sum(finite))} 个可比较点满足单调"
    return ClaimResult(name, passed, detail,
                       {'violations_delta_a': [float(x) for x in violations[:20]]})


def mu_b_changes_sign(result: SweepResult, chi: float = 0.0) -> ClaimResult:
    """χ = 0 时 μ_b 在失谐扫描中变号（对每个 n_b）"""
    name = 'mu_b_changes_sign'
    per_nb = {}
    for n_b in _distinct(result, 'n_b'):
        _, ys = result.series('delta_a', 'mu_b', chi_mag=chi, n_b=n_b)
        ys = ys[np.isfinite(ys)]
        per_nb[n_b] = bool(len(ys) and np.min(ys) < 0 < np.max(ys))
    if not per_nb:
        return ClaimResult(name, False, '没有数据')
    passed = all(per_nb.values())
    detail = ', '.join(f"n_b={k:g}: {'变号' if v else '未变号'}" for k, v in per_nb.items())
    return ClaimResult(name, passed, detail, {str(k): v for k, v in per_nb.items()})


def mu_a_detuning_symmetry(result: SweepResult, chi: float = 0.0, n_b: Optional[float] = 10.0,
                           rtol: float = 0.05) -> ClaimResult:
    """
    μ_a(Δ) 与 μ_a(−Δ) 的偏差不超过曲线峰值的 rtol

    只比较两侧都稳定的点对。
    """
    name = 'mu_a_detuning_symmetry'
    xs, ys = result.series('delta_a', 'mu_a', **_fixed(chi_mag=chi, n_b=n_b))
    finite = np.isfinite(ys)
    if not np.any(finite):
        return ClaimResult(name, False, '没有数据')
    scale = float(np.max(np.abs(ys[finite])))
    worst = 0.0
    pairs = 0
    for i, x in enumerate(xs):
        if x <= 0 or not finite[i]:
            continue
        j = int(np.argmin(np.abs(xs + x)))
        if not math.isclose(xs[j], -x, rel_tol=1e-9, abs_tol=1e-12) or not finite[j]:
            continue
        pairs += 1
        worst = max(worst, abs(ys[i] - ys[j]) / scale if scale > 0 else 0.0)
    if pairs == 0:
        return ClaimResult(name, False, '没有对称的稳定点对')
    passed = worst <= rtol
    return ClaimResult(name, passed, f"{pairs} 对点，最大相对偏差 {worst:.3%}",
                       {'max_relative_deviation': worst, 'pairs': pairs})


def phase_dip_below_no_opo(result: SweepResult, chi: float = 0.5,
                           n_b: Optional[float] = 100.0) -> ClaimResult:
    """存在 φ 使 Π_s(χ) 低于无 OPO（χ = 0）的情形"""
    name = 'phase_dip_below_no_opo'
    xs, with_opo = result.series('phi', 'pi_s', **_fixed(chi_mag=chi, n_b=n_b))
    xs0, without = result.series('phi', 'pi_s', **_fixed(chi_mag=0.0, n_b=n_b))
    if len(xs) == 0 or len(xs) != len(xs0):
        return ClaimResult(name, False, '缺少可比较的相位曲线')
    below = np.isfinite(with_opo) & np.isfinite(without) & (with_opo < without)
    phis = (xs[below] / math.pi).tolist()
    passed = bool(np.any(below))
    detail = (f"φ/π ∈ [{min(phis):.3f}, {max(phis):.3f}] 内有 {len(phis)} 个点低于 χ=0"
              if passed else '没有低于 χ=0 的相位点')
    return ClaimResult(name, passed, detail, {'phi_over_pi': phis})


def phase_dip_locations(result: SweepResult) -> ClaimResult:
    """各 (χ, n_b) 曲线上 Π_s(φ) 的局部极小位置（单位 π），仅报告"""
    name = 'phase_dip_locations'
    dips = {}
    for chi in _distinct(result, 'chi_mag'):
        for n_b in _distinct(result, 'n_b'):
            xs, ys = result.series('phi', 'pi_s', chi_mag=chi, n_b=n_b)
            if len(xs) < 3:
                continue
            dips[f"chi={chi:g},n_b={n_b:g}"] = [x / math.pi for x in detect_dips(xs, ys)]
    detail = '; '.join(f"{k}: {[round(d, 3) for d in v]}" for k, v in dips.items())
    return ClaimResult(name, True, detail, dips)


def pi_s_peak_matches_mutual_info(result: SweepResult, chi: float = 0.0,
                                  atol: float = 0.2) -> ClaimResult:
    """Δ < 0 与 Δ > 0 两侧 Π_s 与 I 的峰位相差不超过 atol"""
    name = 'pi_s_peak_matches_mutual_info'
    xs, pi_s = result.series('delta_a', 'pi_s', chi_mag=chi)
    _, mutual = result.series('delta_a', 'mutual_info', chi_mag=chi)
    gaps = {}
    for label, side in (('negative', xs < 0), ('positive', xs > 0)):
        ok = side & np.isfinite(pi_s) & np.isfinite(mutual)
        if not np.any(ok):
            continue
        x_side = xs[ok]
        gaps[label] = abs(float(x_side[np.argmax(pi_s[ok])] - x_side[np.argmax(mutual[ok])]))
    if not gaps:
        return ClaimResult(name, False, '没有数据')
    passed = all(gap <= atol for gap in gaps.values())
    detail = ', '.join(f"{k}: 峰位差 {v:.3f}" for k, v in gaps.items())
    return ClaimResult(name, passed, detail, gaps)


def pi_s_opposes_correlations(result: SweepResult, chi: float = 0.5) -> ClaimResult:
    """Δ < 0 存在一段 Π_s 增大而 I、D 同时减小的区间"""
    name = 'pi_s_opposes_correlations'
    xs, pi_s = result.series('delta_a', 'pi_s', chi_mag=chi)
    _, mutual = result.series('delta_a', 'mutual_info', chi_mag=chi)
    _, discord = result.series('delta_a', 'discord', chi_mag=chi)
    if len(xs) < 2:
        return ClaimResult(name, False, '没有数据')
    mids = 0.5 * (xs[1:] + xs[:-1])
    opposing = (mids < 0) & (np.diff(pi_s) > 0) & (np.diff(mutual) < 0) & (np.diff(discord) < 0)
    found = (mids[opposing]).tolist()
    passed = bool(found)
    detail = (f"Δ ∈ [{min(found):.3f}, {max(found):.3f}] 内 {len(found)} 段相反变化"
              if passed else '未找到相反变化区间')
    return ClaimResult(name, passed, detail, {'delta_a': found})


def correlations_bounded(result: SweepResult, tol: float = 1e-9) -> ClaimResult:
    """所有稳定点满足 0 ≤ D ≤ I + tol"""
    name = 'correlations_bounded'
    checked = 0
    bad = []
    for record in result.records:
        d, i = record.value('discord'), record.value('mutual_info')
        if not (math.isfinite(d) and math.isfinite(i)):
            continue
        checked += 1
        if d < 0 or d > i + tol:
            bad.append(record.index)
    if checked == 0:
        return ClaimResult(name, False, '没有同时包含 D 与 I 的稳定点')
    return ClaimResult(name, not bad, f"{checked - len(bad)}/{checked} 点满足界",
                       {'violations': bad[:20]})


CLAIMS: Dict[str, Callable[..., ClaimResult]] = {
    'mu_a_increases_with_chi': mu_a_increases_with_chi,
    'mu_b_changes_sign': mu_b_changes_sign,
    'mu_a_detuning_symmetry': mu_a_detuning_symmetry,
    'phase_dip_below_no_opo': phase_dip_below_no_opo,
    'phase_dip_locations': phase_dip_locations,
    'pi_s_peak_matches_mutual_info': pi_s_peak_matches_mutual_info,
    'pi_s_opposes_correlations': pi_s_opposes_correlations,
    'correlations_bounded': correlations_bounded,
}


def evaluate_claims(result: SweepResult, specs: Optional[Sequence[ClaimSpec]] = None) -> List[ClaimResult]:
    """
    依次执行检查

    Args:
        result: 扫描结果
        specs: 检查项，默认取配置中的 claims

    Returns:
        List[ClaimResult]: 检查结果
    """
    specs = result.config.claims if specs is None else specs
    outcomes = []
    for spec in specs:
        func = CLAIMS.get(spec.name)
        if func is None:
            outcome = ClaimResult(spec.name, False, '未知检查项')
        else:
            try:
                outcome = func(result, **spec.params)
            except (TypeError, ValueError) as e:
                outcome = ClaimResult(spec.name, False, f"检查执行失败: {e}")
        if outcome.passed:
            logger.info(f"检查通过 [{outcome.name}] {outcome.detail}")
        else:
            logger.warning(f"检查未通过 [{outcome.name}] {outcome.detail}")
        outcomes.append(outcome)
    return outcomes
