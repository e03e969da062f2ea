"""
异常类型模块
物理计算层统一使用的异常层次
"""


class OptomechError(Exception):
    """所有物理计算异常的基类"""


class ParameterError(OptomechError, ValueError):
    """参数不满足模型约束（如 κ ≤ 0、n_b < 0）"""


class NonPhysicalState(OptomechError, ValueError):
    """协方差矩阵不对称、非正定或违反不确定性关系"""


class UnstableSystem(OptomechError, RuntimeError):
    """漂移矩阵不稳定，稳态不存在"""


class SingularSystem(OptomechError, RuntimeError):
    """Lyapunov 线性方程组数值奇异（通常位于稳定性边界上）"""


class DivergentDenominator(OptomechError, ArithmeticError):
    """非对角形式的熵产生公式分母 κ² − χ²cos²φ 接近零"""


class NotSupported(OptomechError, NotImplementedError):
    """公式不适用于给定参数（如 n_a ≠ 0 时的非对角形式）"""


class MeanFieldNotConverged(OptomechError, RuntimeError):
    """平均场不动点迭代未收敛"""


class SimulationSettingsError(OptomechError, ValueError):
    """随机模拟设置不满足约束（如 dt·‖A‖ ≥ 0.1）"""
