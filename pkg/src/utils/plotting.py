"""
绘图模块
把扫描结果画成 SVG 折线图

- 横轴为第一个扫描轴
- 第二个扫描轴的每个取值为一条曲线
- 第三个扫描轴（若有）的每个取值单独成图
"""

import itertools
import math
from pathlib import Path
from typing import List, Optional

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..sweep import COVARIANCE_COLUMNS, SweepResult  # noqa: E402


# 固定 SVG 内部 id，保证重复运行输出一致
matplotlib.rcParams['svg.hashsalt'] = 'opo-entropy'

LABELS = {
    'pi_s': r'$\Pi_s$',
    'mu_a': r'$\mu_a$',
    'mu_b': r'$\mu_b$',
    'mutual_info': r'$\mathcal{I}$',
    'discord': r'$\mathcal{D}$',
    'delta_a': r'$\Delta_a/\omega_b$',
    'chi_mag': r'$\chi/\omega_b$',
    'phi': r'$\phi/\pi$',
    'n_b': r'$n_b$',
    'kappa': r'$\kappa/\omega_b$',
    'coupling_G': r'$G/\omega_b$',
}


def _axis_display(field: str, values: np.ndarray) -> np.ndarray:
    """φ 以 π 为单位显示"""
    return values / math.pi if field == 'phi' else values


def plot_sweep(result: SweepResult, output_dir: str, prefix: Optional[str] = None) -> List[str]:
    """
    每个输出列一张 SVG（协方差元素除外）

    Args:
        result: 扫描结果
        output_dir: 输出目录
        prefix: 文件名前缀，默认为扫描名

    Returns:
        List[str]: 生成的文件路径
    """
    axes = result.config.axes
    if not axes:
        return []
    prefix = prefix or result.config.name
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    x_axis = axes[0]
    series_axis = axes[1] if len(axes) > 1 else None
    panel_axis = axes[2] if len(axes) > 2 else None
    series_values = series_axis.values if series_axis else (None,)
    panel_values = panel_axis.values if panel_axis else (None,)

    files = []
    columns = [c for c in result.columns if c not in COVARIANCE_COLUMNS]
    for column, panel in itertools.product(columns, panel_values):
        fig, ax = plt.subplots(figsize=(6, 4))
        for value in series_values:
            fixed = {}
            if series_axis is not None:
                fixed[series_axis.field] = value
            if panel_axis is not None:
                fixed[panel_axis.field] = panel
            xs, ys = result.series(x_axis.field, column, **fixed)
            label = f"{series_axis.name}={value:g}" if series_axis else None
            ax.plot(_axis_display(x_axis.field, xs), ys, label=label)

        ax.set_xlabel(LABELS.get(x_axis.field, x_axis.name))
        ax.set_ylabel(LABELS.get(column, column))
        if panel_axis is not None:
            ax.set_title(f"{panel_axis.name}={panel:g}")
        if series_axis is not None:
            ax.legend()
        fig.tight_layout()

        suffix = f"_{panel_axis.name}{panel:g}" if panel_axis is not None else ''
        path = out_dir / f"{prefix}_{column}{suffix}.svg"
        fig.savefig(path, format='svg', metadata={'Date': None})
        plt.close(fig)
        files.append(str(path))
    return files
