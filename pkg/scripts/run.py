#!/usr/bin/env python3
"""
opo-entropy CLI 入口

含 OPO 的光力腔稳态熵产生率与量子关联的参数扫描工具

子命令:
  sweep <config>       运行配置文件中的全部扫描
  preset <name>        运行内置图预设（fig1、fig2ab、fig2c、fig3）
  point                计算单个参数点并打印报告
  validate <config>    只校验配置文件

退出码: 0 成功，1 配置错误，2 运行失败
"""

import argparse
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# 添加项目根目录到 Python 路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from rich.console import Console
from rich.table import Table

from src import __version__
from src.claims import evaluate_claims
from src.config_loader import ConfigError, ConfigLoader, OUTPUTS, SweepConfig
from src.physics.errors import OptomechError, ParameterError
from src.physics.gaussian_core import EffectiveParams
from src.sweep import STATUS_ERROR, STATUS_UNSTABLE, SweepResult, evaluate_point, output_columns, run_sweep
from src.utils.logger import RunLogger, setup_logger
from src.utils.output_csv import generate_csv
from src.utils.output_json import generate_json, generate_meta


EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def parse_args(argv: Optional[List[str]] = None):
    """解析命令行参数"""
    parser = argparse.ArgumentParser(
        description='OPO 光力腔熵产生率与量子关联扫描工具',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog='''
示例:
  python run.py preset fig1 --out results --plot
  python run.py preset fig1 --phi 0.5
  python run.py sweep config/examples/sweeps.json --out results
  python run.py point --delta-a 1 --chi 0.3 --phi 0.8
  python run.py validate config/examples/experiment.yaml
        '''
    )
    parser.add_argument(
        '--config_dir', type=str, default=None,
        help='配置目录（默认值与预设所在处，默认: 项目 config/）'
    )
    parser.add_argument(
        '--log_level', type=str, default='INFO',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
        help='日志级别（默认: INFO）'
    )
    parser.add_argument(
        '--verbose', action='store_true',
        help='详细日志输出'
    )
    parser.add_argument(
        '--workers', type=int, default=None,
        help='网格点并发线程数（默认: 环境变量 OPO_ENTROPY_WORKERS 或 CPU 数）'
    )

    sub = parser.add_subparsers(dest='command', required=True)

    p_sweep = sub.add_parser('sweep', help='运行配置文件中的扫描')
    p_sweep.add_argument('config', help='YAML 或 JSON 配置文件')
    p_sweep.add_argument('--out', type=str, default='.', help='输出目录（默认: 当前目录）')
    p_sweep.add_argument('--plot', action='store_true', help='同时生成 SVG 图')

    p_preset = sub.add_parser(
        'preset', help='运行图预设',
        description='fig1 的 φ 默认 0.8π，可用 --phi 覆盖',
    )
    p_preset.add_argument('name', choices=['fig1', 'fig2ab', 'fig2c', 'fig3'])
    p_preset.add_argument('--out', type=str, default='.', help='输出目录（默认: 当前目录）')
    p_preset.add_argument('--phi', type=float, default=None, help='覆盖基准 φ（单位 π）')
    p_preset.add_argument('--plot', action='store_true', help='同时生成 SVG 图')

    p_point = sub.add_parser('point', help='计算单个参数点')
    defaults = EffectiveParams()
    p_point.add_argument('--delta-a', dest='delta_a', type=float, default=defaults.delta_a)
    p_point.add_argument('--chi', type=float, default=defaults.chi_mag)
    p_point.add_argument('--phi', type=float, default=0.0, help='OPO 相位（单位 π）')
    p_point.add_argument('--kappa', type=float, default=defaults.kappa)
    p_point.add_argument('--gamma', type=float, default=defaults.gamma)
    p_point.add_argument('--g', type=float, default=defaults.coupling_G)
    p_point.add_argument('--nb', type=float, default=defaults.n_b)
    p_point.add_argument('--na', type=float, default=defaults.n_a)

    p_validate = sub.add_parser('validate', help='校验配置文件')
    p_validate.add_argument('config', help='YAML 或 JSON 配置文件')

    return parser.parse_args(argv)


def emit(result: SweepResult, out_dir: Path, args: Dict[str, Any], plot: bool,
         claims: List[Dict[str, Any]]) -> List[str]:
    """
    写出扫描结果：数据文件、元信息与可选的 SVG

    Args:
        result: 扫描结果
        out_dir: 输出目录
        args: 命令行参数（写入元信息）
        plot: 是否绘图
        claims: 检查结果

    Returns:
        List[str]: 生成的文件
    """
    cfg = result.config
    stem = Path(cfg.output_path) if cfg.output_path else out_dir / cfg.name
    if stem.suffix in ('.csv', '.json'):
        stem = stem.with_suffix('')
    files = []

    if cfg.format == 'json':
        data_path = str(stem.parent / f"{stem.name}.json")
        generate_json(result, data_path)
    else:
        data_path = str(stem.parent / f"{stem.name}.csv")
        generate_csv(result, data_path)
    files.append(data_path)

    if plot or cfg.plot:
        from src.utils.plotting import plot_sweep
        files.extend(plot_sweep(result, str(stem.parent), prefix=stem.name))

    meta_path = str(stem.parent / f"{stem.name}.meta.json")
    generate_meta(result, meta_path, output_files=list(files), claims=claims,
                  args=args, tool_version=__version__)
    files.append(meta_path)
    return files


def run_sweeps(sweeps: List[SweepConfig], out_dir: Path, args, logger) -> int:
    """运行一组扫描并写出结果"""
    out_dir.mkdir(parents=True, exist_ok=True)
    run_log = RunLogger(str(out_dir / 'run_log.txt'))
    run_log.start(vars(args))

    output_files = []
    for cfg in sweeps:
        logger.info(f"扫描 [{cfg.name}]: {cfg.n_points} 个网格点")
        result = run_sweep(cfg, workers=args.workers)
        run_log.log_sweep(cfg.name, result.stats())

        claims = [c.to_dict() for c in evaluate_claims(result)]
        run_log.log_claims(cfg.name, claims)

        files = emit(result, out_dir, vars(args), getattr(args, 'plot', False), claims)
        for f in files:
            logger.info(f"生成: {f}")
        output_files.extend(files)

    run_log.log_output(output_files)
    run_log.end()
    run_log.save()
    logger.info(f"运行日志: {out_dir / 'run_log.txt'}")
    return EXIT_OK


def run_point(args) -> int:
    """计算单个参数点并打印报告"""
    console = Console()
    params = EffectiveParams(
        delta_a=args.delta_a, kappa=args.kappa, gamma=args.gamma, coupling_G=args.g,
        chi_mag=args.chi, phi=args.phi * math.pi, n_b=args.nb, n_a=args.na,
    )
    cfg = SweepConfig(name='point', base=params, axes=[], outputs=list(OUTPUTS))
    record = evaluate_point(params, cfg)

    table = Table(title='单点报告')
    table.add_column('量', style='cyan')
    table.add_column('值', justify='right')
    for name, value in params.to_dict().items():
        shown = f"{value / math.pi:g} π" if name == 'phi' else f"{value:g}"
        table.add_row(name, shown)
    table.add_row('stable', str(record.stable).lower())

    if record.status == STATUS_UNSTABLE:
        console.print(table)
        console.print('[yellow]漂移矩阵不稳定，没有稳态[/yellow]')
        return EXIT_OK

    for column in output_columns(cfg.outputs):
        value = record.value(column)
        table.add_row(column, '' if math.isnan(value) else f"{value:.10g}")
    if record.diagnostics:
        table.add_row('diagnostics', ', '.join(record.diagnostics))
    console.print(table)

    if record.status == STATUS_ERROR:
        console.print(f"[red]计算失败: {record.error}[/red]")
        return EXIT_RUNTIME
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    args = parse_args(argv)

    log_level = 'DEBUG' if args.verbose else args.log_level
    logger = setup_logger(level=log_level)
    setup_logger(name='src', level=log_level)

    loader = ConfigLoader(args.config_dir)

    try:
        if args.command == 'point':
            return run_point(args)

        if args.command == 'preset':
            sweeps = loader.load_preset(args.name, phi_over_pi=args.phi)
        else:
            sweeps = loader.load(args.config)

        if args.command == 'validate':
            for cfg in sweeps:
                print(f"{cfg.name}: {len(cfg.axes)} 个轴，{cfg.n_points} 个网格点，"
                      f"输出 {', '.join(cfg.outputs)}")
            print(f"配置有效: {args.config}")
            return EXIT_OK

        return run_sweeps(sweeps, Path(args.out), args, logger)

    except ConfigError as e:
        logger.error(f"配置错误: {e}")
        return EXIT_CONFIG
    except ParameterError as e:
        logger.error(f"参数错误: {e}")
        return EXIT_CONFIG
    except (OptomechError, OSError) as e:
        logger.error(f"运行失败: {e}")
        return EXIT_RUNTIME


if __name__ == '__main__':
    sys.exit(main())
