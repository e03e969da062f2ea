"""
JSON 输出模块
生成机器可读的扫描结果与运行元信息
"""

import json
import math
import uuid
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from ..sweep import SweepResult


def _write(content: str, output_path: str) -> None:
    output_file = Path(output_path)
    try:
        output_file.parent.mkdir(parents=True, exist_ok=True)
        output_file.write_text(content, encoding='utf-8')
    except OSError as e:
        raise OSError(f"写入 {output_file} 失败: {e}") from e


def generate_json(result: SweepResult, output_path: str) -> str:
    """
    生成 JSON 行数据文件（含每点的 status、error、diagnostics）

    Args:
        result: 扫描结果
        output_path: 输出文件路径

    Returns:
        str: JSON 内容
    """
    columns = result.columns
    rows = [_make_serializable(record.to_dict(columns)) for record in result.records]
    content = json.dumps(rows, ensure_ascii=False, indent=2)
    _write(content, output_path)
    return content


def generate_meta(
    result: SweepResult,
    output_path: str,
    output_files: List[str],
    claims: Optional[List[Dict[str, Any]]] = None,
    args: Optional[Dict[str, Any]] = None,
    tool_version: str = "1.0.0",
) -> Dict[str, Any]:
    """
    生成运行元信息文件

    Args:
        result: 扫描结果
        output_path: 输出文件路径
        output_files: 输出文件列表
        claims: 检查结果
        args: 命令行参数
        tool_version: 工具版本

    Returns:
        Dict[str, Any]: 元信息
    """
    cfg = result.config
    errors = [
        {'index': r.index, 'axis_values': r.axis_values, 'error': r.error}
        for r in result.records if r.error
    ]
    meta = {
        'run_id': str(uuid.uuid4()),
        'started_at': result.started_at,
        'finished_at': result.finished_at,
        'tool_version': tool_version,
        'sweep': cfg.name,
        'args': args or {},
        'config': cfg.raw,
        'base': cfg.base.to_dict(),
        'rng_seeds': {'oracle': cfg.oracle.rng_seed if cfg.oracle else None},
        'columns': result.header,
        'stats': result.stats(),
        'claims': claims or [],
        'output_files': output_files,
        'errors': errors,
    }
    meta = _make_serializable(meta)
    _write(json.dumps(meta, ensure_ascii=False, indent=2), output_path)
    return meta


def _make_serializable(obj: Any) -> Any:
    """
    将对象转换为可 JSON 序列化的格式（NaN/inf 转为 null）

    Args:
        obj: 任意对象

    Returns:
        Any: 可序列化的对象
    """
    if obj is None or isinstance(obj, (str, bool)):
        return obj

    if isinstance(obj, (int, np.integer)):
        return int(obj)

    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None

    if isinstance(obj, datetime):
        return obj.isoformat()

    if isinstance(obj, (list, tuple)):
        return [_make_serializable(item) for item in obj]

    if isinstance(obj, dict):
        return {str(key): _make_serializable(value) for key, value in obj.items()}

    return str(obj)
