"""Testes das fórmulas fechadas de capacidade, ALOHA, reserva e dualidade banda/tamanho."""

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from erros import ConfigError, InfeasibleError
from parametros import (
    LatencyVariant,
    MacProtocol,
    PlatoonSizeDistribution,
    QosTarget,
    RadioConfig,
    RegulatoryCap,
)
from qos_analytics import (
    INFEASIBLE,
    aloha_collision_probability,
    collision_curve,
    coverage_size_caps,
    latency_curve,
    mac_efficiency,
    max_platoon_size,
    max_vehicles_aloha,
    max_vehicles_reservation,
    required_bandwidth,
    reservation_latency,
    road_capacity,
    road_capacity_limit,
    slot_time_s,
    slots_per_interval,
)
from spectrum_manager import reuse_efficiency


# --- CAPACIDADE DE ESTRADA ---

def test_capacidade_n10(geom):
    assert road_capacity(geom, 10) == pytest.approx(2.7027, rel=1e-4)


def test_capacidade_n1(geom):
    assert road_capacity(geom, 1) == pytest.approx(20 / 51.5, rel=1e-12)


def test_capacidade_crescente_e_abaixo_do_limite(geom):
    limite = road_capacity_limit(geom)
    assert limite == pytest.approx(8.0)
    anterior = 0.0
    for n in range(1, 10_001):
        c = road_capacity(geom, n)
        assert anterior < c < limite
        anterior = c


@pytest.mark.parametrize("n", [0, -3, 2.5])
def test_capacidade_rejeita_n_invalido(geom, n):
    with pytest.raises(ConfigError):
        road_capacity(geom, n)


# --- ORÇAMENTO DE SLOTS ---

def test_slots_tabela1(radio, traffic):
    assert slots_per_interval(radio, traffic) == 5000
    assert slot_time_s(radio, traffic) == pytest.approx(20e-6)


def test_slots_por_subcanal(traffic):
    radio = RadioConfig(bandwidth_hz=10e6, spectral_efficiency=2.0, subchannel_count=4)
    assert slots_per_interval(radio, traffic) == 5000
    assert slots_per_interval(radio, traffic, per_subchannel=True) == 1250


def test_slots_banda_insuficiente(traffic):
    with pytest.raises(InfeasibleError):
        slots_per_interval(RadioConfig(bandwidth_hz=100.0, spectral_efficiency=2.0), traffic)


# --- SLOTTED ALOHA ---

def test_aloha_tabela1_seis(radio, traffic, qos):
    assert max_vehicles_aloha(radio, traffic, qos) == 6


def test_aloha_fronteira(radio, traffic, qos):
    n_slots = slots_per_interval(radio, traffic)
    p6 = aloha_collision_probability(PlatoonSizeDistribution.point_mass(6), n_slots)
    p7 = aloha_collision_probability(PlatoonSizeDistribution.point_mass(7), n_slots)
    assert p6 == pytest.approx(9.996e-4, rel=1e-3)
    assert p6 <= qos.reliability_target < p7


def test_aloha_cem_slots(traffic):
    radio = RadioConfig(bandwidth_hz=200_000.0, spectral_efficiency=2.0)
    qos = QosTarget(reliability_target=0.05, latency_target_s=3e-3)
    assert slots_per_interval(radio, traffic) == 100
    assert max_vehicles_aloha(radio, traffic, qos) == 6


def test_aloha_um_veiculo_nunca_colide():
    assert aloha_collision_probability(PlatoonSizeDistribution.point_mass(1), 5000) == 0.0


@given(
    n_a=st.integers(1, 400),
    n_b=st.integers(1, 400),
    peso=st.floats(0.0, 1.0),
    n_slots=st.integers(1, 10_000),
)
@settings(max_examples=60, deadline=None)
def test_aloha_linear_na_distribuicao(n_a, n_b, peso, n_slots):
    if n_a == n_b:
        return
    mistura = PlatoonSizeDistribution(((n_a, peso), (n_b, 1.0 - peso)))
    p_a = aloha_collision_probability(PlatoonSizeDistribution.point_mass(n_a), n_slots)
    p_b = aloha_collision_probability(PlatoonSizeDistribution.point_mass(n_b), n_slots)
    assert aloha_collision_probability(mistura, n_slots) == pytest.approx(peso * p_a + (1 - peso) * p_b, abs=1e-12)


@given(n=st.integers(1, 2000), n_slots=st.integers(100, 10_000))
@settings(max_examples=60, deadline=None)
def test_aloha_monotona_em_n(n, n_slots):
    p = aloha_collision_probability(PlatoonSizeDistribution.point_mass(n), n_slots)
    q = aloha_collision_probability(PlatoonSizeDistribution.point_mass(n + 1), n_slots)
    assert 0.0 <= p < q <= 1.0


def test_aloha_satura_com_muitos_veiculos():
    p = aloha_collision_probability(PlatoonSizeDistribution.point_mass(500_000), 5000)
    assert p > 0.99999


# --- MAC POR RESERVA ---

def test_reserva_calibrada_394(radio, traffic, qos):
    assert max_vehicles_reservation(radio, traffic, qos) == 394


def test_reserva_como_impressa_278(radio, traffic, qos):
    assert max_vehicles_reservation(radio, traffic, qos, LatencyVariant.AS_PRINTED) == 278


def test_reserva_fronteira_calibrada(radio, traffic):
    t394 = reservation_latency(PlatoonSizeDistribution.point_mass(394), radio, traffic)
    t395 = reservation_latency(PlatoonSizeDistribution.point_mass(395), radio, traffic)
    assert t394 == pytest.approx(2.985833e-3, rel=1e-5)
    assert t394 <= 3e-3 < t395


def test_reserva_como_impressa_acima_do_alvo_em_394(radio, traffic):
    t = reservation_latency(PlatoonSizeDistribution.point_mass(394), radio, traffic, LatencyVariant.AS_PRINTED)
    assert t == pytest.approx(5.96e-3, rel=1e-2)


@given(n_a=st.integers(1, 5000), n_b=st.integers(1, 5000), peso=st.floats(0.01, 0.99))
@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
def test_latencia_linear_na_distribuicao(radio, traffic, n_a, n_b, peso):
    if n_a == n_b:
        return
    mistura = PlatoonSizeDistribution(((n_a, peso), (n_b, 1.0 - peso)))
    t_a = reservation_latency(PlatoonSizeDistribution.point_mass(n_a), radio, traffic)
    t_b = reservation_latency(PlatoonSizeDistribution.point_mass(n_b), radio, traffic)
    assert reservation_latency(mistura, radio, traffic) == pytest.approx(peso * t_a + (1 - peso) * t_b, rel=1e-9)


@pytest.mark.parametrize("variante", [LatencyVariant.CALIBRATED, LatencyVariant.AS_PRINTED])
def test_reserva_alvo_folgado_retorna_n_slots(radio, traffic, variante):
    alvo_folgado = QosTarget(reliability_target=0.001, latency_target_s=1.0)
    t_ns = reservation_latency(PlatoonSizeDistribution.point_mass(5000), radio, traffic, variante)
    assert t_ns < alvo_folgado.latency_target_s
    assert max_vehicles_reservation(radio, traffic, alvo_folgado, variante) == slots_per_interval(radio, traffic) == 5000


def test_reserva_excede_slots(traffic):
    radio = RadioConfig(bandwidth_hz=200_000.0, spectral_efficiency=2.0)
    with pytest.raises(InfeasibleError):
        reservation_latency(PlatoonSizeDistribution.point_mass(101), radio, traffic)


def test_eficiencia_reserva_maior_que_aloha(radio, traffic, qos):
    eta_res = mac_efficiency(MacProtocol.RESERVATION_BASED, radio, traffic, qos)
    eta_aloha = mac_efficiency(MacProtocol.SLOTTED_ALOHA, radio, traffic, qos)
    assert eta_res == pytest.approx(0.0788)
    assert eta_aloha == pytest.approx(0.0012)
    assert eta_res > eta_aloha


# --- DUALIDADE BANDA / TAMANHO ---

def test_banda_necessaria_394(traffic):
    assert required_bandwidth(traffic, 394, 2.0, 0.0788, 1.0) == pytest.approx(10e6)


@given(n=st.integers(1, 1000), eta_mac=st.sampled_from([1.0, 0.5, 0.0788, 0.0012]),
       eta_b=st.sampled_from([1.0, 0.5, 0.0788, 0.0012]))
@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
def test_ida_e_volta_banda_tamanho(traffic, n, eta_mac, eta_b):
    banda = required_bandwidth(traffic, n, 2.0, eta_mac, eta_b)
    radio = RadioConfig(bandwidth_hz=banda, spectral_efficiency=2.0)
    assert max_platoon_size(radio, traffic, eta_mac, eta_b) == n


def test_tamanho_inviavel_retorna_zero(traffic):
    radio = RadioConfig(bandwidth_hz=1000.0, spectral_efficiency=2.0)
    assert max_platoon_size(radio, traffic, 1.0, 1.0) == INFEASIBLE


def test_tamanho_com_eficiencias_unitarias(radio, traffic):
    assert max_platoon_size(radio, traffic, 1.0, 1.0) == 5000


def test_tamanho_cai_pela_metade_com_dois_subcanais(radio, traffic):
    assert max_platoon_size(radio, traffic, 1.0, 0.5) == 2500
    assert max_platoon_size(radio, traffic, 1.0, reuse_efficiency(2)) == 2500
    dois = RadioConfig(radio.bandwidth_hz, radio.spectral_efficiency, subchannel_count=2)
    assert max_platoon_size(dois, traffic, 1.0, dois.reuse_efficiency) == 2500
    assert max_platoon_size(dois, traffic, 0.0788, dois.reuse_efficiency) == 197


def test_eficiencia_invalida_usa_mensagem_de_validacao(radio, traffic):
    with pytest.raises(ConfigError, match=r"eta_b deve estar em \(0, 1\]"):
        max_platoon_size(radio, traffic, 1.0, 0.0)


@pytest.mark.parametrize("eta", [0.0, 1.5, -0.1])
def test_eficiencias_fora_do_intervalo(traffic, eta):
    with pytest.raises(ConfigError):
        required_bandwidth(traffic, 10, 2.0, eta, 1.0)


# --- LIMITES POR COBERTURA E CURVAS ---

def test_limites_com_nc_20(radio, traffic, qos):
    caps = coverage_size_caps(radio, traffic, qos, RegulatoryCap(20))
    assert (caps.in_coverage, caps.out_of_coverage) == (20, 6)


def test_limites_sem_nc_restritivo(radio, traffic, qos):
    caps = coverage_size_caps(radio, traffic, qos, RegulatoryCap(1000))
    assert (caps.in_coverage, caps.out_of_coverage) == (394, 6)


def test_curvas_n1(radio, traffic):
    assert latency_curve(radio, traffic, range(1, 2), LatencyVariant.AS_PRINTED) == [(1, 0.0)]
    assert collision_curve(radio, traffic, range(1, 2)) == [(1, 0.0)]


def test_curva_de_latencia_crescente(radio, traffic):
    valores = [t for _, t in latency_curve(radio, traffic, range(1, 501))]
    assert all(a < b for a, b in zip(valores, valores[1:]))
