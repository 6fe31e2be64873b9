"""
Módulo de Parâmetros - Simulador HDVP

Tipos de domínio usados pelas fórmulas de capacidade e QoS (tamanho de pacote,
taxa de geração, banda, eficiência espectral, alvos de confiabilidade e latência,
geometria da via) e a leitura do arquivo JSON de parâmetros.

Unidade canônica do pacote: bits. O arquivo de configuração aceita bytes.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

from erros import ConfigError
from logging_config import registrar_erro, registrar_info
from validacao import (
    validar_chaves,
    validar_inteiro_positivo,
    validar_limiares,
    validar_pmf,
    validar_positivo,
    validar_probabilidade,
)


def exigir(resultado: Tuple[bool, str]) -> None:
    """Converte o (valido, mensagem) de validacao em ConfigError."""
    valido, mensagem = resultado
    if not valido:
        raise ConfigError(mensagem)


class MacProtocol(Enum):
    """Protocolo de acesso ao meio considerado no cálculo do tamanho do pelotão."""

    SLOTTED_ALOHA = "slotted-aloha"
    RESERVATION_BASED = "reservation-based"


class LatencyVariant(Enum):
    """
    Leitura da fórmula de latência do MAC por reserva.

    AS_PRINTED usa o expoente n-1; CALIBRATED usa expoente n e fator 1/2 na
    carga (posição média na fila).
    """

    AS_PRINTED = "as-printed"
    CALIBRATED = "calibrated"

    @classmethod
    def from_str(cls, valor: str) -> "LatencyVariant":
        try:
            return cls(valor.strip().lower().replace("_", "-"))
        except ValueError:
            opcoes = ", ".join(v.value for v in cls)
            raise ConfigError(f"Variante de latência inválida: {valor!r}. Use uma de: {opcoes}")


@dataclass(frozen=True)
class TrafficModel:
    """
    Modelo de tráfego de cada veículo.

    Attributes:
        packet_size_bits: Tamanho do pacote em bits (L_pkt)
        generation_rate: Pacotes por segundo (R_gen)
    """

    packet_size_bits: int
    generation_rate: float

    def __post_init__(self):
        exigir(validar_inteiro_positivo("packet_size_bits", self.packet_size_bits))
        exigir(validar_positivo("generation_rate", self.generation_rate))

    @classmethod
    def from_bytes(cls, packet_size_bytes: int, generation_rate: float) -> "TrafficModel":
        exigir(validar_inteiro_positivo("packet_size_bytes", packet_size_bytes))
        return cls(packet_size_bits=8 * packet_size_bytes, generation_rate=generation_rate)


@dataclass(frozen=True)
class RadioConfig:
    """
    Configuração de rádio da banda compartilhada pelos pelotões.

    Attributes:
        bandwidth_hz: Banda total B
        spectral_efficiency: Eficiência espectral S_mcs (bits/s/Hz)
        subchannel_count: Número de sub-canais N_b
    """

    bandwidth_hz: float
    spectral_efficiency: float
    subchannel_count: int = 1

    def __post_init__(self):
        exigir(validar_positivo("bandwidth_hz", self.bandwidth_hz))
        exigir(validar_positivo("spectral_efficiency", self.spectral_efficiency))
        exigir(validar_inteiro_positivo("subchannel_count", self.subchannel_count))

    @property
    def reuse_efficiency(self) -> float:
        """Eficiência de reuso η_B = 1/N_b."""
        return 1.0 / self.subchannel_count

    @property
    def subchannel_bandwidth_hz(self) -> float:
        return self.bandwidth_hz / self.subchannel_count

    def effective_bandwidth(self, per_subchannel: bool = False) -> float:
        """Banda usada no orçamento de slots: B/N_b por sub-canal, senão B."""
        return self.subchannel_bandwidth_hz if per_subchannel else self.bandwidth_hz


@dataclass(frozen=True)
class QosTarget:
    """
    Alvos de QoS.

    Attributes:
        reliability_target: Probabilidade de colisão máxima tolerada (P_target)
        latency_target_s: Latência alvo em segundos (T_target)
    """

    reliability_target: float
    latency_target_s: float

    def __post_init__(self):
        exigir(validar_probabilidade("reliability_target", self.reliability_target))
        exigir(validar_positivo("latency_target_s", self.latency_target_s))


@dataclass(frozen=True)
class RoadGeometry:
    """
    Geometria da via para a capacidade de estrada.

    Attributes:
        vehicle_length_m: Comprimento do veículo (s)
        intra_spacing_m: Espaçamento dentro do pelotão (d)
        inter_spacing_m: Espaçamento entre pelotões (D)
        speed_mps: Velocidade de regime (v)
    """

    vehicle_length_m: float
    intra_spacing_m: float
    inter_spacing_m: float
    speed_mps: float

    def __post_init__(self):
        for nome in ("vehicle_length_m", "intra_spacing_m", "inter_spacing_m", "speed_mps"):
            exigir(validar_positivo(nome, getattr(self, nome)))
        if self.inter_spacing_m <= self.intra_spacing_m:
            raise ConfigError("inter_spacing_m deve ser maior que intra_spacing_m")

    def platoon_length_m(self, n: int) -> float:
        """Comprimento nominal de um pelotão de n veículos: n·s + (n-1)·d."""
        return n * self.vehicle_length_m + (n - 1) * self.intra_spacing_m


@dataclass(frozen=True)
class PlatoonSizeDistribution:
    """
    Distribuição de probabilidade do tamanho do pelotão, Pr(N_v = n).

    Attributes:
        pmf: Pares (n, probabilidade)
    """

    pmf: Tuple[Tuple[int, float], ...]

    def __post_init__(self):
        pares = tuple((n, float(p)) for n, p in self.pmf)
        object.__setattr__(self, "pmf", pares)
        exigir(validar_pmf(pares))

    @classmethod
    def point_mass(cls, n: int) -> "PlatoonSizeDistribution":
        return cls(((n, 1.0),))

    @property
    def max_size(self) -> int:
        return max(n for n, _ in self.pmf)


@dataclass(frozen=True)
class RegulatoryCap:
    """Limite regulatório do tamanho do pelotão (N_c)."""

    max_platoon_size: int

    def __post_init__(self):
        exigir(validar_inteiro_positivo("max_platoon_size", self.max_platoon_size))


@dataclass(frozen=True)
class SignalThresholds:
    """
    Limiares de histerese do sinal de coordenação da estação base.

    Attributes:
        prepare_dbm: Abaixo deste nível o pelotão se prepara para dividir (P1)
        split_dbm: Abaixo deste nível a divisão é executada (P2)
    """

    prepare_dbm: float
    split_dbm: float

    def __post_init__(self):
        exigir(validar_limiares(self.prepare_dbm, self.split_dbm))


@dataclass(frozen=True)
class AnalysisParams:
    """Conjunto de parâmetros do planejador analítico."""

    radio: RadioConfig
    traffic: TrafficModel
    qos: QosTarget
    cap: RegulatoryCap = field(default_factory=lambda: RegulatoryCap(1000))
    geometry: Optional[RoadGeometry] = None


def parametros_tabela1(max_platoon_size: int = 1000) -> AnalysisParams:
    """
    Parâmetros de avaliação de referência: pacote de 50 bytes, 10 pacotes/s,
    S_mcs = 2, B = 10 MHz, P_target = 0.001, T_target = 3 ms, s = 1.5 m,
    d = 1 m, D = 50 m, v = 20 m/s.
    """
    return AnalysisParams(
        radio=RadioConfig(bandwidth_hz=10e6, spectral_efficiency=2.0),
        traffic=TrafficModel.from_bytes(50, 10.0),
        qos=QosTarget(reliability_target=0.001, latency_target_s=3e-3),
        cap=RegulatoryCap(max_platoon_size),
        geometry=RoadGeometry(
            vehicle_length_m=1.5, intra_spacing_m=1.0, inter_spacing_m=50.0, speed_mps=20.0
        ),
    )


# --- LEITURA DE JSON ---

CHAVES_RADIO = ("bandwidth_hz", "spectral_efficiency", "subchannel_count")
CHAVES_TRAFEGO = ("packet_size_bits", "packet_size_bytes", "generation_rate")
CHAVES_QOS = ("reliability_target", "latency_target_s")
CHAVES_GEOMETRIA = ("vehicle_length_m", "intra_spacing_m", "inter_spacing_m", "speed_mps")
CHAVES_CAP = ("max_platoon_size",)
CHAVES_LIMIARES = ("prepare_dbm", "split_dbm")


def _secao(dados: Mapping, nome: str, permitidas, obrigatorias=()) -> Dict[str, Any]:
    exigir(validar_chaves(nome, dados, permitidas, obrigatorias))
    return dict(dados)


def radio_de_dict(dados: Mapping) -> RadioConfig:
    d = _secao(dados, "radio", CHAVES_RADIO, ("bandwidth_hz", "spectral_efficiency"))
    return RadioConfig(**d)


def trafego_de_dict(dados: Mapping) -> TrafficModel:
    d = _secao(dados, "traffic", CHAVES_TRAFEGO, ("generation_rate",))
    if ("packet_size_bits" in d) == ("packet_size_bytes" in d):
        raise ConfigError("Informe exatamente um de packet_size_bits ou packet_size_bytes")
    if "packet_size_bytes" in d:
        return TrafficModel.from_bytes(d["packet_size_bytes"], d["generation_rate"])
    return TrafficModel(d["packet_size_bits"], d["generation_rate"])


def qos_de_dict(dados: Mapping) -> QosTarget:
    return QosTarget(**_secao(dados, "qos", CHAVES_QOS, CHAVES_QOS))


def geometria_de_dict(dados: Mapping) -> RoadGeometry:
    return RoadGeometry(**_secao(dados, "geometry", CHAVES_GEOMETRIA, CHAVES_GEOMETRIA))


def cap_de_dict(dados: Mapping) -> RegulatoryCap:
    return RegulatoryCap(**_secao(dados, "cap", CHAVES_CAP, CHAVES_CAP))


def limiares_de_dict(dados: Mapping) -> SignalThresholds:
    return SignalThresholds(**_secao(dados, "thresholds", CHAVES_LIMIARES, CHAVES_LIMIARES))


def parametros_de_dict(dados: Mapping) -> AnalysisParams:
    """
    Constrói AnalysisParams a partir de um objeto JSON decodificado.

    Raises:
        ConfigError: chave desconhecida, seção ausente ou valor inválido
    """
    d = _secao(dados, "params", ("radio", "traffic", "qos", "cap", "geometry"),
               ("radio", "traffic", "qos"))
    try:
        return AnalysisParams(
            radio=radio_de_dict(d["radio"]),
            traffic=trafego_de_dict(d["traffic"]),
            qos=qos_de_dict(d["qos"]),
            cap=cap_de_dict(d["cap"]) if "cap" in d else RegulatoryCap(1000),
            geometry=geometria_de_dict(d["geometry"]) if "geometry" in d else None,
        )
    except TypeError as e:
        # Tipos errados que escaparam dos validadores (ex.: string no lugar de número)
        raise ConfigError(str(e)) from e


def ler_json(caminho: str) -> Any:
    """
    Lê um documento JSON, convertendo falhas de leitura em ConfigError.
    """
    try:
        with open(caminho, "r", encoding="utf-8") as arquivo:
            return json.load(arquivo)
    except (OSError, json.JSONDecodeError) as e:
        registrar_erro(
            mensagem="Erro ao ler arquivo JSON",
            modulo="parametros",
            funcao="ler_json",
            detalhes={"caminho": str(caminho), "erro": str(e)},
            exc_info=True,
        )
        raise ConfigError(f"Não foi possível ler {caminho}: {e}") from e


def carregar_parametros(caminho: str) -> AnalysisParams:
    """
    Carrega o arquivo de parâmetros do planejador analítico.

    Args:
        caminho: Caminho do arquivo JSON

    Returns:
        AnalysisParams validado
    """
    params = parametros_de_dict(ler_json(caminho))
    registrar_info(
        mensagem="Parâmetros carregados",
        modulo="parametros",
        funcao="carregar_parametros",
        detalhes={"caminho": str(Path(caminho)), "packet_size_bits": params.traffic.packet_size_bits},
    )
    return params
