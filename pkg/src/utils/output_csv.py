"""
CSV 输出模块
列顺序固定：扫描轴（按配置顺序）、请求的输出（规范顺序）、stable
"""

import csv
import io
import math
from pathlib import Path
from typing import Any

from ..sweep import SweepResult


def format_value(value: Any) -> str:
    """
    单元格格式：浮点 17 位有效数字，NaN 为空串，布尔为 true/false
    """
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if value is None:
        return ''
    if isinstance(value, float):
        if math.isnan(value):
            return ''
        return format(value, '.17g')
    return str(value)


def render_csv(result: SweepResult) -> str:
    """
    生成 CSV 文本

    Args:
        result: 扫描结果

    Returns:
        str: CSV 内容（\\n 换行）
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(result.header)
    columns = result.columns
    for record in result.records:
        row = [format_value(float(record.axis_values[name])) for name in result.axis_names]
        row += [format_value(float(record.value(column))) for column in columns]
        row.append(format_value(record.stable))
        writer.writerow(row)
    return buffer.getvalue()


def generate_csv(result: SweepResult, output_path: str) -> str:
    """
    写出 CSV 文件

    Args:
        result: 扫描结果
        output_path: 输出文件路径

    Returns:
        str: CSV 内容
    """
    content = render_csv(result)
    output_file = Path(output_path)
    try:
        output_file.parent.mkdir(parents=True, exist_ok=True)
        with open(output_file, 'w', encoding='utf-8', newline='') as f:
            f.write(content)
    except OSError as e:
        raise OSError(f"写入 {output_file} 失败: {e}") from e
    return content
