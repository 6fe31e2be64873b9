"""
Módulo de Análise de QoS - Simulador HDVP

Fórmulas fechadas de capacidade de estrada, dualidade banda/tamanho de
pelotão, eficiência de MAC, probabilidade de colisão do slotted ALOHA,
latência do MAC por reserva e limites de tamanho dentro/fora de cobertura.

Todas as funções são puras: podem ser chamadas de qualquer thread.
"""

import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple

from erros import ConfigError, InfeasibleError
from logging_config import registrar_aviso, registrar_erro, registrar_info
from parametros import (
    LatencyVariant,
    MacProtocol,
    PlatoonSizeDistribution,
    QosTarget,
    RadioConfig,
    RegulatoryCap,
    RoadGeometry,
    TrafficModel,
    exigir,
)
from validacao import validar_eficiencia, validar_inteiro_positivo

# Tolerância absoluta do piso: produtos exatos que caem um ulp abaixo do inteiro
TOLERANCIA_PISO = 1e-9

# Tamanho retornado por max_platoon_size quando nem um veículo cabe
INFEASIBLE = 0


def _piso(valor: float) -> int:
    return math.floor(valor + TOLERANCIA_PISO)


# --- CAPACIDADE DE ESTRADA ---

def road_capacity(geom: RoadGeometry, n: int) -> float:
    """
    Capacidade de estrada (veículos/s) com pelotões de n veículos.

    C = v·n / (n·s + (n-1)·d + D)

    Args:
        geom: Geometria da via
        n: Tamanho do pelotão (>= 1)

    Returns:
        Capacidade em veículos por segundo

    Raises:
        ConfigError: se n < 1
    """
    exigir(validar_inteiro_positivo("n", n))
    return geom.speed_mps * n / (geom.platoon_length_m(n) + geom.inter_spacing_m)


def road_capacity_limit(geom: RoadGeometry) -> float:
    """Limite superior v/(s+d), nunca atingido para n finito."""
    return geom.speed_mps / (geom.vehicle_length_m + geom.intra_spacing_m)


# --- ORÇAMENTO DE SLOTS ---

def slots_per_interval(radio: RadioConfig, traffic: TrafficModel, per_subchannel: bool = False) -> int:
    """
    Número de slots por intervalo de geração, N_s = ⌊S_mcs·B / (L_pkt·R_gen)⌋.

    Args:
        radio: Configuração de rádio
        traffic: Modelo de tráfego
        per_subchannel: Usa a banda de um sub-canal (B/N_b) em vez da banda total

    Returns:
        N_s >= 1

    Raises:
        InfeasibleError: se a banda não comporta nem um slot
    """
    banda = radio.effective_bandwidth(per_subchannel)
    n_slots = _piso(radio.spectral_efficiency * banda / (traffic.packet_size_bits * traffic.generation_rate))
    if n_slots < 1:
        registrar_erro(
            mensagem="Orçamento de slots menor que um slot",
            modulo="qos_analytics",
            funcao="slots_per_interval",
            detalhes={
                "bandwidth_hz": banda,
                "packet_size_bits": traffic.packet_size_bits,
                "generation_rate": traffic.generation_rate,
            },
        )
        raise InfeasibleError("Banda insuficiente: menos de um slot por intervalo de geração")
    return n_slots


def slot_time_s(radio: RadioConfig, traffic: TrafficModel, per_subchannel: bool = False) -> float:
    """Duração de um slot: L_pkt / (S_mcs·B). 20 μs com os parâmetros de referência."""
    banda = radio.effective_bandwidth(per_subchannel)
    return traffic.packet_size_bits / (radio.spectral_efficiency * banda)


# --- SLOTTED ALOHA ---

def _colisao_ponto(expoente: int, n_slots: int) -> float:
    # 1 - ((N_s-1)/N_s)^k, estável para N_s grande
    if expoente == 0:
        return 0.0
    if n_slots == 1:
        return 1.0
    return -math.expm1(expoente * math.log1p(-1.0 / n_slots))


def aloha_collision_probability(dist: PlatoonSizeDistribution, slots: int) -> float:
    """
    Probabilidade de colisão do slotted ALOHA.

    P_c = Σ_n [1 - ((N_s-1)/N_s)^(n-1)]·Pr(N_v = n)

    Args:
        dist: Distribuição do tamanho do pelotão
        slots: N_s

    Returns:
        Probabilidade em [0, 1]
    """
    exigir(validar_inteiro_positivo("slots", slots))
    return math.fsum(p * _colisao_ponto(n - 1, slots) for n, p in dist.pmf)


def max_vehicles_aloha(
    radio: RadioConfig,
    traffic: TrafficModel,
    qos: QosTarget,
    per_subchannel: bool = False,
) -> int:
    """
    Maior n com P_c(n) <= P_target (busca inteira exata, P_c é monótona em n).

    Returns:
        N_v,A

    Raises:
        InfeasibleError: se nem um veículo atende o alvo
    """
    n_slots = slots_per_interval(radio, traffic, per_subchannel)
    alvo = qos.reliability_target

    if _colisao_ponto(0, n_slots) > alvo:
        raise InfeasibleError("Nem um único veículo atende o alvo de confiabilidade")

    n = 1
    while _colisao_ponto(n, n_slots) <= alvo:
        n += 1

    registrar_info(
        mensagem=f"Máximo ALOHA: {n} veículo(s)",
        modulo="qos_analytics",
        funcao="max_vehicles_aloha",
        detalhes={"n_slots": n_slots, "reliability_target": alvo},
    )
    return n


# --- MAC POR RESERVA ---

def _latencia_ponto(n: int, n_slots: int, carga_unitaria: float, variant: LatencyVariant) -> float:
    if variant is LatencyVariant.AS_PRINTED:
        return _colisao_ponto(n - 1, n_slots) * n * carga_unitaria
    return _colisao_ponto(n, n_slots) * n * carga_unitaria / 2.0


def reservation_latency(
    dist: PlatoonSizeDistribution,
    radio: RadioConfig,
    traffic: TrafficModel,
    variant: LatencyVariant = LatencyVariant.CALIBRATED,
    per_subchannel: bool = False,
) -> float:
    """
    Latência média do MAC por reserva, em segundos.

    AS_PRINTED: Σ_n [1 - ((N_s-1)/N_s)^(n-1)]·Pr(n)·n·L_pkt·R_gen/(S_mcs·B)
    CALIBRATED: expoente n no lugar de n-1 e fator 1/2 na carga.

    Args:
        dist: Distribuição do tamanho do pelotão
        radio: Configuração de rádio
        traffic: Modelo de tráfego
        variant: Leitura da fórmula
        per_subchannel: Orçamento por sub-canal

    Returns:
        Latência em segundos

    Raises:
        InfeasibleError: se algum tamanho suportado excede N_s (a fila não esvazia)
    """
    n_slots = slots_per_interval(radio, traffic, per_subchannel)
    if dist.max_size > n_slots:
        raise InfeasibleError(
            f"Tamanho {dist.max_size} excede o número de slots {n_slots}: a fila não esvazia no intervalo"
        )
    banda = radio.effective_bandwidth(per_subchannel)
    carga_unitaria = traffic.packet_size_bits * traffic.generation_rate / (radio.spectral_efficiency * banda)
    return math.fsum(p * _latencia_ponto(n, n_slots, carga_unitaria, variant) for n, p in dist.pmf)


def max_vehicles_reservation(
    radio: RadioConfig,
    traffic: TrafficModel,
    qos: QosTarget,
    variant: LatencyVariant = LatencyVariant.CALIBRATED,
    per_subchannel: bool = False,
) -> int:
    """
    Maior n <= N_s com latência T(n) <= T_target.

    Returns:
        N_v,res
    """
    n_slots = slots_per_interval(radio, traffic, per_subchannel)
    banda = radio.effective_bandwidth(per_subchannel)
    carga_unitaria = traffic.packet_size_bits * traffic.generation_rate / (radio.spectral_efficiency * banda)
    alvo = qos.latency_target_s

    if _latencia_ponto(1, n_slots, carga_unitaria, variant) > alvo:
        raise InfeasibleError("Nem um único veículo atende o alvo de latência")

    n = 1
    while n < n_slots and _latencia_ponto(n + 1, n_slots, carga_unitaria, variant) <= alvo:
        n += 1

    registrar_info(
        mensagem=f"Máximo por reserva: {n} veículo(s)",
        modulo="qos_analytics",
        funcao="max_vehicles_reservation",
        detalhes={"n_slots": n_slots, "latency_target_s": alvo, "variant": variant.value},
    )
    return n


def mac_efficiency(
    protocol: MacProtocol,
    radio: RadioConfig,
    traffic: TrafficModel,
    qos: QosTarget,
    variant: LatencyVariant = LatencyVariant.CALIBRATED,
) -> float:
    """
    Eficiência de acesso ao meio η_MAC = N_v / N_s.

    Args:
        protocol: SLOTTED_ALOHA ou RESERVATION_BASED
        radio, traffic, qos: Parâmetros
        variant: Leitura da fórmula de latência (só para reserva)

    Returns:
        η_MAC em [0, 1]
    """
    n_slots = slots_per_interval(radio, traffic)
    if protocol is MacProtocol.SLOTTED_ALOHA:
        n_v = max_vehicles_aloha(radio, traffic, qos)
    else:
        n_v = max_vehicles_reservation(radio, traffic, qos, variant)
    return n_v / n_slots


# --- DUALIDADE BANDA / TAMANHO ---

def required_bandwidth(
    traffic: TrafficModel,
    n_vehicles: int,
    spectral_efficiency: float,
    eta_mac: float,
    eta_b: float,
) -> float:
    """
    Banda necessária (Hz): B = L_pkt·R_gen·N_v / (S_mcs·η_MAC·η_B).
    """
    exigir(validar_inteiro_positivo("n_vehicles", n_vehicles))
    exigir(validar_eficiencia("eta_mac", eta_mac))
    exigir(validar_eficiencia("eta_b", eta_b))
    if spectral_efficiency <= 0:
        raise ConfigError("spectral_efficiency deve ser maior que zero")
    return (
        traffic.packet_size_bits * traffic.generation_rate * n_vehicles
        / (spectral_efficiency * eta_mac * eta_b)
    )


def max_platoon_size(radio: RadioConfig, traffic: TrafficModel, eta_mac: float, eta_b: float) -> int:
    """
    Tamanho máximo de um pelotão: ⌊B·S_mcs·η_MAC·η_B / (L_pkt·R_gen)⌋.

    Returns:
        N_v, ou INFEASIBLE (0) quando nem um veículo cabe na banda
    """
    exigir(validar_eficiencia("eta_mac", eta_mac))
    exigir(validar_eficiencia("eta_b", eta_b))
    n_v = _piso(
        radio.bandwidth_hz * radio.spectral_efficiency * eta_mac * eta_b
        / (traffic.packet_size_bits * traffic.generation_rate)
    )
    if n_v < 1:
        registrar_aviso(
            mensagem="Tamanho de pelotão inviável para a banda informada",
            modulo="qos_analytics",
            funcao="max_platoon_size",
            detalhes={"bandwidth_hz": radio.bandwidth_hz, "eta_mac": eta_mac, "eta_b": eta_b},
        )
        return INFEASIBLE
    return n_v


# --- LIMITES POR COBERTURA ---

@dataclass(frozen=True)
class CoverageCaps:
    """Tamanhos máximos dentro (N_v,in) e fora (N_v,out) de cobertura."""

    in_coverage: int
    out_of_coverage: int


def platoon_size_in_coverage(
    radio: RadioConfig,
    traffic: TrafficModel,
    qos: QosTarget,
    cap: RegulatoryCap,
    variant: LatencyVariant = LatencyVariant.CALIBRATED,
    per_subchannel: bool = False,
) -> int:
    """N_v,in = min(N_v,res, N_c)."""
    return min(max_vehicles_reservation(radio, traffic, qos, variant, per_subchannel), cap.max_platoon_size)


def platoon_size_out_of_coverage(
    radio: RadioConfig,
    traffic: TrafficModel,
    qos: QosTarget,
    cap: RegulatoryCap,
    per_subchannel: bool = False,
) -> int:
    """N_v,out = min(N_v,A, N_c)."""
    return min(max_vehicles_aloha(radio, traffic, qos, per_subchannel), cap.max_platoon_size)


def coverage_size_caps(
    radio: RadioConfig,
    traffic: TrafficModel,
    qos: QosTarget,
    cap: RegulatoryCap,
    variant: LatencyVariant = LatencyVariant.CALIBRATED,
    per_subchannel: bool = False,
) -> CoverageCaps:
    """Calcula N_v,in e N_v,out de uma vez."""
    return CoverageCaps(
        in_coverage=platoon_size_in_coverage(radio, traffic, qos, cap, variant, per_subchannel),
        out_of_coverage=platoon_size_out_of_coverage(radio, traffic, qos, cap, per_subchannel),
    )


# --- CURVAS ---

def latency_curve(
    radio: RadioConfig,
    traffic: TrafficModel,
    n_values: Iterable[int],
    variant: LatencyVariant = LatencyVariant.CALIBRATED,
) -> List[Tuple[int, float]]:
    """Linhas (n, latência em s) do MAC por reserva para cada n."""
    return [
        (n, reservation_latency(PlatoonSizeDistribution.point_mass(n), radio, traffic, variant))
        for n in n_values
    ]


def collision_curve(radio: RadioConfig, traffic: TrafficModel, n_values: Iterable[int]) -> List[Tuple[int, float]]:
    """Linhas (n, probabilidade de colisão) do slotted ALOHA para cada n."""
    n_slots = slots_per_interval(radio, traffic)
    return [
        (n, aloha_collision_probability(PlatoonSizeDistribution.point_mass(n), n_slots))
        for n in n_values
    ]
