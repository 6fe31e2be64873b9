"""
Exceções do simulador HDVP.

A CLI traduz cada família para um código de saída:
ConfigError → 2, SimulationError → 3, InfeasibleError → 4.
"""

from typing import Optional


class HdvpError(Exception):
    """Base de todas as exceções do projeto."""


class ConfigError(HdvpError, ValueError):
    """Arquivo de parâmetros/cenário inválido ou invariante de tipo violado."""


class InfeasibleError(HdvpError):
    """Cálculo analítico sem resposta viável (ex.: menos de um slot)."""


class InvalidTransitionError(HdvpError):
    """Operação da máquina de estados chamada em estado não permitido."""


class SplitNotNeededError(InvalidTransitionError):
    """Pelotão já cabe no limite fora de cobertura."""


class OverlapError(HdvpError, ValueError):
    """Extensões de pelotões sobrepostas na rodovia."""


class SimulationError(HdvpError):
    """
    Violação fatal de invariante durante a simulação.

    Attributes:
        tick: Passo de simulação em que a violação foi detectada
        estado: Snapshot serializado (JSON) do mundo nesse passo
    """

    def __init__(self, mensagem: str, tick: int, estado: Optional[str] = None):
        super().__init__(f"tick {tick}: {mensagem}")
        self.tick = tick
        self.estado = estado
