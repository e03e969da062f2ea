"""
配置加载器模块
负责加载和验证扫描配置文件（YAML 或 JSON）

配置查找与合并：
1. 先读取 config/defaults.yaml 中的全局默认值
2. 配置文件顶层的 defaults 块覆盖全局默认值
3. 每个扫描（顶层单个扫描或 sweeps 列表中的一项）再覆盖前两者

合并策略：
- dict 递归合并
- list 与标量直接覆盖
"""

import copy
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml
from jsonschema import Draft7Validator

from .physics.correlations import OptimizerSettings
from .physics.errors import OptomechError
from .physics.gaussian_core import EffectiveParams
from .physics.mc_oracle import SimulationSettings
from .physics.meanfield import (
    APPROXIMATE, SELF_CONSISTENT, PhysicalParams, effective_params, solve_mean_field,
)


# 工作线程数环境变量
WORKERS_ENV = 'OPO_ENTROPY_WORKERS'

# 轴名称别名
AXIS_ALIASES = {'chi': 'chi_mag', 'G': 'coupling_G'}

# 可请求的输出（按 CSV 列的规范顺序）
OUTPUTS = (
    'pi_s', 'mu_a', 'mu_b', 'pi_s_trace', 'pi_s_offdiag',
    'mutual_info', 'discord', 'one_way_classical',
    'renyi_a', 'renyi_b', 'renyi_ab',
    'occupation_a', 'occupation_b',
    'covariance', 'sympl_eigs',
)

PHYSICAL_FIELDS = (
    'omega_C', 'omega_L', 'omega_b', 'M', 'L', 'laser_power', 'temperature',
    'kappa', 'gamma', 'xi', 'theta',
)

_NUMBER = {'type': 'number'}

AXIS_SCHEMA = {
    'type': 'object',
    'required': ['name'],
    'properties': {
        'name': {'enum': list(EffectiveParams.field_names()) + list(AXIS_ALIASES)},
        'min': _NUMBER,
        'max': _NUMBER,
        'count': {'type': 'integer', 'minimum': 1},
        'values': {'type': 'array', 'items': _NUMBER, 'minItems': 1},
    },
    'oneOf': [
        {'required': ['values'], 'not': {'anyOf': [{'required': ['min']}, {'required': ['count']}]}},
        {'required': ['min', 'max', 'count'], 'not': {'required': ['values']}},
    ],
    'additionalProperties': False,
}

SWEEP_SCHEMA = {
    'type': 'object',
    'required': ['name', 'axes', 'outputs'],
    'properties': {
        'name': {'type': 'string', 'minLength': 1, 'pattern': r'^[A-Za-z0-9_.\-]+$'},
        'description': {'type': 'string'},
        'phi_unit': {'enum': ['rad', 'pi']},
        'base': {
            'type': 'object',
            'properties': {name: _NUMBER for name in EffectiveParams.field_names()},
            'additionalProperties': False,
        },
        'physical': {
            'type': 'object',
            'required': ['omega_C', 'omega_L', 'omega_b', 'M', 'L', 'laser_power',
                         'temperature', 'kappa', 'gamma'],
            'properties': {
                **{name: _NUMBER for name in PHYSICAL_FIELDS},
                'mode': {'enum': [APPROXIMATE, SELF_CONSISTENT]},
                'rotate_frame': {'type': 'boolean'},
            },
            'additionalProperties': False,
        },
        'axes': {'type': 'array', 'items': AXIS_SCHEMA},
        'outputs': {
            'type': 'array', 'items': {'enum': list(OUTPUTS)},
            'minItems': 1, 'uniqueItems': True,
        },
        'oracle': {
            'type': ['object', 'null'],
            'properties': {
                'dt': _NUMBER, 't_burn': _NUMBER, 't_sample': _NUMBER,
                'n_traj': {'type': 'integer', 'minimum': 2},
                'rng_seed': {'type': 'integer', 'minimum': 0},
                'scheme': {'enum': ['euler', 'exact']},
            },
            'additionalProperties': False,
        },
        'output': {
            'type': 'object',
            'properties': {
                'path': {'type': ['string', 'null']},
                'format': {'enum': ['csv', 'json']},
                'plot': {'type': 'boolean'},
            },
            'additionalProperties': False,
        },
        'discord': {
            'type': 'object',
            'properties': {
                'n_lambda': {'type': 'integer', 'minimum': 2},
                'n_theta': {'type': 'integer', 'minimum': 1},
                'lambda_min': _NUMBER, 'lambda_max': _NUMBER,
                'rtol': _NUMBER,
                'max_iter': {'type': 'integer', 'minimum': 1},
                'refine_decades': _NUMBER,
            },
            'additionalProperties': False,
        },
        'solver': {
            'type': 'object',
            'properties': {
                'stability_rtol': _NUMBER,
                'residual_rtol': _NUMBER,
                'physical_tol': _NUMBER,
            },
            'additionalProperties': False,
        },
        'workers': {'type': ['integer', 'null'], 'minimum': 1},
        'claims': {
            'type': 'array',
            'items': {
                'anyOf': [
                    {'type': 'string'},
                    {
                        'type': 'object', 'required': ['name'],
                        'properties': {'name': {'type': 'string'}, 'params': {'type': 'object'}},
                        'additionalProperties': False,
                    },
                ],
            },
        },
    },
    'not': {'required': ['base', 'physical']},
    'additionalProperties': False,
}


class ConfigError(ValueError):
    """配置错误，携带出错字段路径、文件与行号"""

    def __init__(self, message: str, field: Optional[str] = None,
                 source: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.field = field
        self.source = source
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        location = self.source or '<config>'
        if self.line is not None:
            location = f"{location}:{self.line}"
        if self.field:
            return f"{location}: {self.field}: {self.message}"
        return f"{location}: {self.message}"


@dataclass(frozen=True)
class SolverSettings:
    """Lyapunov 求解设置"""
    stability_rtol: float = 1e-10
    residual_rtol: float = 1e-10
    physical_tol: float = 1e-9


@dataclass(frozen=True)
class AxisSpec:
    """扫描轴：name 为配置中的名称，field 为 EffectiveParams 字段"""
    name: str
    field: str
    values: Tuple[float, ...]


@dataclass(frozen=True)
class ClaimSpec:
    """扫描后检查项"""
    name: str
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class SweepConfig:
    """单个扫描的完整配置"""
    name: str
    base: EffectiveParams
    axes: List[AxisSpec]
    outputs: List[str]
    oracle: Optional[SimulationSettings] = None
    output_path: Optional[str] = None
    format: str = 'csv'
    plot: bool = False
    discord: OptimizerSettings = field(default_factory=OptimizerSettings)
    solver: SolverSettings = field(default_factory=SolverSettings)
    workers: Optional[int] = None
    claims: List[ClaimSpec] = field(default_factory=list)
    description: str = ''
    raw: Dict[str, Any] = field(default_factory=dict, repr=False)

    @property
    def n_points(self) -> int:
        """网格点总数（各轴长度之积）"""
        return int(np.prod([len(axis.values) for axis in self.axes])) if self.axes else 1


def _deep_merge(base: Any, override: Any) -> Any:
    """
    深度合并配置（override 覆盖 base）

    - dict: 递归合并
    - list/其他: 直接覆盖
    """
    if isinstance(base, dict) and isinstance(override, dict):
        merged = copy.deepcopy(base)
        for key, value in override.items():
            if key in merged:
                merged[key] = _deep_merge(merged[key], value)
            else:
                merged[key] = copy.deepcopy(value)
        return merged
    return copy.deepcopy(override)


def _format_path(parts: Sequence[Union[str, int]]) -> str:
    """['sweeps', 0, 'axes', 1] -> 'sweeps[0].axes[1]'"""
    text = ''
    for part in parts:
        if isinstance(part, int):
            text += f"[{part}]"
        else:
            text += f".{part}" if text else str(part)
    return text


def _locate_line(text: str, parts: Sequence[Union[str, int]]) -> Optional[int]:
    """
    在原始文本中定位字段所在行（1 起始）

    找不到完整路径时返回最深一级已知节点的行号；JSON 同样可用 YAML 解析。
    """
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return None
    line = None
    for part in parts:
        if node is None:
            break
        line = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            node = next((v for k, v in node.value if k.value == part), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int):
            node = node.value[part] if part < len(node.value) else None
        else:
            node = None
    if node is not None:
        line = node.start_mark.line + 1
    return line


def resolve_workers(configured: Optional[int] = None) -> int:
    """
    工作线程数：环境变量 > 配置 > CPU 数

    Args:
        configured: 配置中的 workers

    Returns:
        int: 线程数（≥ 1）
    """
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"环境变量必须为正整数，得到 {env!r}", field=WORKERS_ENV)
        if value < 1:
            raise ConfigError(f"环境变量必须为正整数，得到 {env!r}", field=WORKERS_ENV)
        return value
    if configured:
        return int(configured)
    return os.cpu_count() or 1


class ConfigLoader:
    """
    配置加载器

    负责从 YAML/JSON 文件加载扫描配置并进行验证，
    支持全局默认值合并与图预设。
    """

    def __init__(self, config_dir: Optional[str] = None):
        """
        初始化配置加载器

        Args:
            config_dir: 配置目录，默认为项目根目录下的 config/
        """
        if config_dir is None:
            project_root = Path(__file__).parent.parent
            config_dir = project_root / "config"
        self.config_dir = Path(config_dir)
        self._validator = Draft7Validator(SWEEP_SCHEMA)

    @property
    def presets_dir(self) -> Path:
        return self.config_dir / "presets"

    def available_presets(self) -> List[str]:
        """预设名列表"""
        if not self.presets_dir.exists():
            return []
        return sorted(p.stem for p in self.presets_dir.glob("*.yaml"))

    def load(self, path: Union[str, Path]) -> List[SweepConfig]:
        """
        加载配置文件

        Args:
            path: YAML 或 JSON 配置文件路径

        Returns:
            List[SweepConfig]: 解析后的扫描配置列表
        """
        path = Path(path)
        source = str(path)
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as e:
            raise ConfigError(f"无法读取配置文件: {e}", source=source)

        data = self._parse_text(text, path.suffix.lower(), source)
        return self.parse(data, source=source, text=text)

    def load_preset(self, name: str, phi_over_pi: Optional[float] = None) -> List[SweepConfig]:
        """
        加载图预设

        Args:
            name: 预设名（fig1、fig2ab、fig2c、fig3）
            phi_over_pi: 覆盖所有扫描的基准 φ（单位 π）

        Returns:
            List[SweepConfig]: 扫描配置列表
        """
        path = self.presets_dir / f"{name}.yaml"
        if not path.exists():
            raise ConfigError(
                f"未知预设 {name!r}，可选: {', '.join(self.available_presets())}",
                field='preset',
            )
        sweeps = self.load(path)
        if phi_over_pi is not None:
            for sweep in sweeps:
                sweep.base = sweep.base.with_values(phi=phi_over_pi * math.pi)
        return sweeps

    def _parse_text(self, text: str, suffix: str, source: str) -> Dict[str, Any]:
        """按扩展名解析文本"""
        try:
            if suffix == '.json':
                data = json.loads(text)
            else:
                data = yaml.safe_load(text)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            line = getattr(e, 'lineno', None)
            mark = getattr(e, 'problem_mark', None)
            if mark is not None:
                line = mark.line + 1
            raise ConfigError(f"解析失败: {e}", source=source, line=line)
        if not isinstance(data, dict):
            raise ConfigError("配置文件顶层必须是映射", source=source, line=1)
        return data

    def _load_defaults(self) -> Dict[str, Any]:
        """读取全局默认值，不存在则为空"""
        path = self.config_dir / "defaults.yaml"
        if not path.exists():
            return {}
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
        return data.get('defaults', {})

    def parse(self, data: Dict[str, Any], source: str = '<config>',
              text: Optional[str] = None) -> List[SweepConfig]:
        """
        解析已加载的配置数据

        Args:
            data: 配置字典
            source: 来源描述（用于报错）
            text: 原始文本（用于定位行号）

        Returns:
            List[SweepConfig]: 扫描配置列表
        """
        defaults = _deep_merge(self._load_defaults(), data.get('defaults', {}))

        if 'sweeps' in data:
            if not isinstance(data['sweeps'], list) or not data['sweeps']:
                raise ConfigError("sweeps 必须是非空列表", field='sweeps', source=source)
            entries = [(['sweeps', i], item) for i, item in enumerate(data['sweeps'])]
        else:
            body = {k: v for k, v in data.items() if k not in ('defaults', 'version')}
            entries = [([], body)]

        sweeps = []
        names = set()
        for prefix, item in entries:
            if not isinstance(item, dict):
                raise ConfigError("扫描配置必须是映射", field=_format_path(prefix) or None,
                                  source=source)
            sweep = self._parse_sweep(item, defaults, prefix, source, text)
            if sweep.name in names:
                raise ConfigError(f"扫描名重复: {sweep.name}",
                                  field=_format_path(prefix + ['name']), source=source)
            names.add(sweep.name)
            sweeps.append(sweep)
        return sweeps

    def _error(self, message: str, parts: Sequence[Union[str, int]],
               source: str, text: Optional[str]) -> ConfigError:
        line = _locate_line(text, parts) if text else None
        return ConfigError(message, field=_format_path(parts), source=source, line=line)

    def _parse_sweep(self, item: Dict[str, Any], defaults: Dict[str, Any],
                     prefix: List[Union[str, int]], source: str,
                     text: Optional[str]) -> SweepConfig:
        """
        合并默认值、校验并构造 SweepConfig

        Args:
            item: 单个扫描的原始配置
            defaults: 合并后的默认值
            prefix: 该扫描在文件中的路径前缀
            source: 来源
            text: 原始文本

        Returns:
            SweepConfig: 扫描配置
        """
        if 'physical' in item and 'base' in item:
            raise self._error("base 与 physical 只能给出其一", prefix + ['physical'], source, text)
        merged = _deep_merge(defaults, item)
        if 'physical' in item:
            merged.pop('base', None)

        # 取路径最深的错误，定位到具体字段
        errors = sorted(self._validator.iter_errors(merged),
                        key=lambda e: (-len(e.absolute_path), [str(p) for p in e.absolute_path]))
        if errors:
            first = errors[0]
            raise self._error(first.message, prefix + list(first.absolute_path), source, text)

        phi_scale = math.pi if merged.get('phi_unit', 'rad') == 'pi' else 1.0

        # 基准参数
        try:
            if 'physical' in merged:
                base = self._base_from_physical(merged['physical'])
            else:
                base_data = dict(merged.get('base', {}))
                if 'phi' in base_data:
                    base_data['phi'] = base_data['phi'] * phi_scale
                base = EffectiveParams.from_dict(base_data)
        except OptomechError as e:
            key = 'physical' if 'physical' in merged else 'base'
            raise self._error(str(e), prefix + [key], source, text)

        # 扫描轴
        axes = []
        seen = set()
        for i, axis_data in enumerate(merged['axes']):
            parts = prefix + ['axes', i]
            name = axis_data['name']
            field_name = AXIS_ALIASES.get(name, name)
            if field_name in seen:
                raise self._error(f"扫描轴重复: {name}", parts + ['name'], source, text)
            seen.add(field_name)
            if 'values' in axis_data:
                values = [float(v) for v in axis_data['values']]
            else:
                values = np.linspace(axis_data['min'], axis_data['max'], axis_data['count']).tolist()
            if field_name == 'phi':
                values = [v * phi_scale for v in values]
            # 每个取值都要满足 EffectiveParams 的约束，扫描途中不再报参数错误
            for value in values:
                try:
                    base.with_values(**{field_name: value})
                except OptomechError as e:
                    raise self._error(str(e), parts, source, text)
            axes.append(AxisSpec(name=name, field=field_name, values=tuple(values)))

        output = merged.get('output', {})
        plot = bool(output.get('plot', False))
        if plot and len(axes) > 3:
            raise self._error("绘图最多支持 x 轴加两个系列轴", prefix + ['output', 'plot'], source, text)

        try:
            oracle = SimulationSettings(**merged['oracle']) if merged.get('oracle') else None
            discord = OptimizerSettings(**merged.get('discord', {}))
        except OptomechError as e:
            key = 'oracle' if merged.get('oracle') else 'discord'
            raise self._error(str(e), prefix + [key], source, text)

        claims = []
        for claim in merged.get('claims', []):
            if isinstance(claim, str):
                claims.append(ClaimSpec(name=claim))
            else:
                claims.append(ClaimSpec(name=claim['name'], params=dict(claim.get('params', {}))))

        return SweepConfig(
            name=merged['name'],
            base=base,
            axes=axes,
            outputs=[name for name in OUTPUTS if name in merged['outputs']],
            oracle=oracle,
            output_path=output.get('path'),
            format=output.get('format', 'csv'),
            plot=plot,
            discord=discord,
            solver=SolverSettings(**merged.get('solver', {})),
            workers=merged.get('workers'),
            claims=claims,
            description=merged.get('description', ''),
            raw=merged,
        )

    def _base_from_physical(self, data: Dict[str, Any]) -> EffectiveParams:
        """由物理参数经平均场得到基准 EffectiveParams"""
        data = dict(data)
        mode = data.pop('mode', APPROXIMATE)
        rotate_frame = data.pop('rotate_frame', True)
        physical = PhysicalParams(**data)
        mf = solve_mean_field(physical, mode=mode, rotate_frame=rotate_frame)
        return effective_params(mf, physical)


# 便捷函数
def load_config(path: Union[str, Path], config_dir: Optional[str] = None) -> List[SweepConfig]:
    """
    便捷函数：加载扫描配置

    Args:
        path: 配置文件路径
        config_dir: 配置目录（默认值与预设所在处）

    Returns:
        List[SweepConfig]: 扫描配置列表
    """
    return ConfigLoader(config_dir).load(path)
