"""
日志工具模块
提供统一的日志配置和运行日志
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional


# 日志格式
LOG_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

DEFAULT_NAME = 'opo-entropy'


def setup_logger(
    name: str = DEFAULT_NAME,
    level: str = 'INFO',
    log_file: Optional[str] = None,
    console: bool = True
) -> logging.Logger:
    """
    设置日志记录器

    Args:
        name: 日志记录器名称（库模块的 logger 挂在 'src' 下，CLI 同时配置两者）
        level: 日志级别（DEBUG, INFO, WARNING, ERROR）
        log_file: 日志文件路径
        console: 是否输出到控制台

    Returns:
        logging.Logger: 配置好的日志记录器
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, level.upper(), logging.INFO))

    # 避免重复配置
    if logger.handlers:
        return logger

    formatter = logging.Formatter(LOG_FORMAT, DATE_FORMAT)

    if console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


class RunLogger:
    """
    运行日志记录器

    收集一次 CLI 运行的可读摘要（参数、每个扫描的统计、检查结果、输出文件），
    结束后保存为 run_log.txt
    """

    def __init__(self, log_file: Optional[str] = None):
        self.log_file = Path(log_file) if log_file else None
        self.entries: List[str] = []
        self._start_time: Optional[datetime] = None

    def start(self, args: Dict[str, Any]):
        """记录运行开始"""
        self._start_time = datetime.now()
        self._log("========== 开始运行 ==========")
        self._log(f"时间: {self._start_time.isoformat()}")
        self._log(f"参数: {args}")
        self._log("")

    def log_sweep(self, name: str, stats: Dict[str, Any]):
        """
        记录单个扫描的统计

        Args:
            name: 扫描名
            stats: SweepResult.stats() 的结果
        """
        self._log(f"[{name}] 网格点 {stats['points']}，稳定 {stats['stable']}，"
                  f"不稳定 {stats['unstable']}，失败 {stats['errors']}")
        for tag, count in stats.get('diagnostics', {}).items():
            self._log(f"[{name}]   诊断 {tag}: {count}")

    def log_claims(self, name: str, claims: List[Dict[str, Any]]):
        """记录检查结果"""
        for claim in claims:
            mark = '通过' if claim['passed'] else '未通过'
            self._log(f"[{name}] 检查 {claim['name']}: {mark} {claim['detail']}")
        if claims:
            self._log("")

    def log_output(self, files: List[str]):
        """记录输出文件"""
        self._log("========== 输出文件 ==========")
        for f in files:
            self._log(f"  - {f}")
        self._log("")

    def end(self):
        """记录运行结束"""
        end_time = datetime.now()
        duration = (end_time - self._start_time).total_seconds() if self._start_time else 0
        self._log("========== 运行结束 ==========")
        self._log(f"结束时间: {end_time.isoformat()}")
        self._log(f"耗时: {duration:.2f} 秒")

    def _log(self, message: str):
        self.entries.append(message)

    def save(self):
        """保存日志到文件"""
        if not self.log_file:
            return
        self.log_file.parent.mkdir(parents=True, exist_ok=True)
        self.log_file.write_text('\n'.join(self.entries), encoding='utf-8')

    def get_content(self) -> str:
        """获取日志内容"""
        return '\n'.join(self.entries)
