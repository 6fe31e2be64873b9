"""
Módulo de Monte Carlo do MAC - Simulador HDVP

Oráculo em nível de slot que valida a probabilidade de colisão fechada do
slotted ALOHA e caracteriza a latência da fila do MAC por reserva.

Gerador: NumPy PCG64 (numpy.random.Generator). A semente do TrialConfig
alimenta uma SeedSequence; as tentativas são sorteadas em blocos de tamanho
fixo, cada bloco com sua semente filha, então o resultado não depende da
ordem em que os blocos são processados.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List

import numpy as np

from erros import ConfigError
from logging_config import registrar_erro, registrar_info
from parametros import PlatoonSizeDistribution
from qos_analytics import aloha_collision_probability
from validacao import validar_inteiro_positivo, validar_positivo

# Número de sorteios (tentativas x veículos) por bloco
SORTEIOS_POR_BLOCO = 2_000_000


class ArrivalModel(Enum):
    """Instante de geração dos pacotes dentro do intervalo."""

    SYNCHRONIZED = "synchronized"
    UNIFORM_IN_INTERVAL = "uniform-in-interval"


@dataclass(frozen=True)
class TrialConfig:
    """
    Configuração de uma rodada de Monte Carlo.

    Attributes:
        trials: Número de tentativas independentes
        seed: Semente de 64 bits
        n_vehicles: Veículos disputando o meio
        n_slots: Slots por intervalo de geração (N_s)
        slot_time_s: Duração de um slot em segundos
    """

    trials: int
    seed: int
    n_vehicles: int
    n_slots: int
    slot_time_s: float = 20e-6

    def __post_init__(self):
        for nome in ("trials", "n_vehicles", "n_slots"):
            valido, mensagem = validar_inteiro_positivo(nome, getattr(self, nome))
            if not valido:
                raise ConfigError(mensagem)
        valido, mensagem = validar_positivo("slot_time_s", self.slot_time_s)
        if not valido:
            raise ConfigError(mensagem)
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed deve ser um inteiro sem sinal de 64 bits")


@dataclass(frozen=True)
class McEstimate:
    """Estimativa de Bernoulli: média, erro padrão e número de tentativas."""

    mean: float
    std_error: float
    trials: int


@dataclass(frozen=True)
class LatencyStats:
    """Estatísticas de latência (segundos) da fila do MAC por reserva."""

    mean_s: float
    p50_s: float
    p99_s: float
    max_s: float
    trials: int
    packets: int
    collisions: int


@dataclass(frozen=True)
class OracleRow:
    """Comparação entre a estimativa de Monte Carlo e a fórmula fechada."""

    n_vehicles: int
    estimate: McEstimate
    closed_form: float

    @property
    def deviation_sigmas(self) -> float:
        if self.estimate.std_error == 0:
            return 0.0 if self.estimate.mean == self.closed_form else math.inf
        return abs(self.estimate.mean - self.closed_form) / self.estimate.std_error

    @property
    def agrees(self) -> bool:
        return abs(self.estimate.mean - self.closed_form) <= 4 * self.estimate.std_error + 1e-15


def _blocos(cfg: TrialConfig):
    # (tamanho do bloco, gerador) em ordem fixa
    por_bloco = max(1, SORTEIOS_POR_BLOCO // cfg.n_vehicles)
    n_blocos = math.ceil(cfg.trials / por_bloco)
    filhas = np.random.SeedSequence(cfg.seed).spawn(n_blocos)
    restante = cfg.trials
    for filha in filhas:
        tamanho = min(por_bloco, restante)
        restante -= tamanho
        yield tamanho, np.random.Generator(np.random.PCG64(filha))


def simulate_aloha_collision(cfg: TrialConfig) -> McEstimate:
    """
    Estima por simulação a probabilidade de colisão do veículo marcado.

    Em cada tentativa todos os veículos escolhem um slot uniforme em
    [0, n_slots); o veículo 0 colide quando outro escolheu o mesmo slot.

    Args:
        cfg: Configuração da rodada

    Returns:
        McEstimate com média e erro padrão de Bernoulli
    """
    if cfg.n_vehicles == 1:
        return McEstimate(mean=0.0, std_error=0.0, trials=cfg.trials)

    colisoes = 0
    for tamanho, rng in _blocos(cfg):
        slots = rng.integers(0, cfg.n_slots, size=(tamanho, cfg.n_vehicles))
        colidiu = (slots[:, 1:] == slots[:, :1]).any(axis=1)
        colisoes += int(colidiu.sum())

    media = colisoes / cfg.trials
    erro = math.sqrt(media * (1.0 - media) / cfg.trials)

    registrar_info(
        mensagem="Monte Carlo ALOHA concluído",
        modulo="mac_montecarlo",
        funcao="simulate_aloha_collision",
        detalhes={"n_vehicles": cfg.n_vehicles, "n_slots": cfg.n_slots, "trials": cfg.trials, "mean": media},
    )
    return McEstimate(mean=media, std_error=erro, trials=cfg.trials)


def simulate_reservation_latency(
    cfg: TrialConfig,
    arrival: ArrivalModel = ArrivalModel.SYNCHRONIZED,
) -> LatencyStats:
    """
    Simula a fila FCFS do MAC por reserva, um pacote por slot.

    Cada veículo gera um pacote por intervalo (n_slots·slot_time_s).
    SYNCHRONIZED: todos em t=0; UNIFORM_IN_INTERVAL: instantes uniformes.
    Empates na fila são desfeitos por permutação aleatória. Latência =
    término do serviço - geração. Não há colisões por construção.

    Args:
        cfg: Configuração da rodada
        arrival: Modelo de chegada

    Returns:
        LatencyStats com média, mediana, p99 e máximo

    Raises:
        ConfigError: se n_vehicles > n_slots (a fila não esvazia no intervalo)
    """
    if cfg.n_vehicles > cfg.n_slots:
        registrar_erro(
            mensagem="Mais veículos que slots na fila de reserva",
            modulo="mac_montecarlo",
            funcao="simulate_reservation_latency",
            detalhes={"n_vehicles": cfg.n_vehicles, "n_slots": cfg.n_slots},
        )
        raise ConfigError("n_vehicles não pode exceder n_slots no MAC por reserva")

    intervalo = cfg.n_slots * cfg.slot_time_s
    latencias: List[np.ndarray] = []
    colisoes = 0

    for tamanho, rng in _blocos(cfg):
        if arrival is ArrivalModel.SYNCHRONIZED:
            chegadas = np.zeros((tamanho, cfg.n_vehicles))
        else:
            chegadas = rng.uniform(0.0, intervalo, size=(tamanho, cfg.n_vehicles))

        # Ordem FCFS com desempate por chave aleatória
        desempate = rng.random((tamanho, cfg.n_vehicles))
        ordem = np.lexsort((desempate, chegadas), axis=1)
        chegadas = np.take_along_axis(chegadas, ordem, axis=1)

        termino = np.empty_like(chegadas)
        fim_anterior = np.zeros(tamanho)
        for k in range(cfg.n_vehicles):
            inicio = np.maximum(chegadas[:, k], fim_anterior)
            # Serviço sobreposto ao anterior seria uma colisão
            colisoes += int(np.count_nonzero(inicio < fim_anterior))
            termino[:, k] = inicio + cfg.slot_time_s
            fim_anterior = termino[:, k]

        latencias.append((termino - chegadas).ravel())

    todas = np.concatenate(latencias)
    stats = LatencyStats(
        mean_s=float(np.mean(todas)),
        p50_s=float(np.percentile(todas, 50)),
        p99_s=float(np.percentile(todas, 99)),
        max_s=float(np.max(todas)),
        trials=cfg.trials,
        packets=int(todas.size),
        collisions=colisoes,
    )

    registrar_info(
        mensagem="Monte Carlo de reserva concluído",
        modulo="mac_montecarlo",
        funcao="simulate_reservation_latency",
        detalhes={"n_vehicles": cfg.n_vehicles, "arrival": arrival.value, "mean_s": stats.mean_s},
    )
    return stats


def oracle_agreement(
    n_values: Iterable[int],
    n_slots: int,
    trials: int,
    seed: int,
) -> List[OracleRow]:
    """
    Roda o oráculo ALOHA para cada n e compara com a fórmula fechada.

    Cada n usa a semente seed + n, para que a tabela não dependa da lista.
    """
    linhas = []
    for n in n_values:
        cfg = TrialConfig(trials=trials, seed=(seed + n) % 2**64, n_vehicles=n, n_slots=n_slots)
        fechada = aloha_collision_probability(PlatoonSizeDistribution.point_mass(n), n_slots)
        linhas.append(OracleRow(n_vehicles=n, estimate=simulate_aloha_collision(cfg), closed_form=fechada))
    return linhas
