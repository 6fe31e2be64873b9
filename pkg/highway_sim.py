"""
Módulo de Simulação de Rodovia - Simulador HDVP

Modelo de mundo em passos de tempo: rodovia 1-D, cinemática dos veículos,
cobertura das estações base (perda log-distância), gatilhos da máquina de
estados, gerência de canais e métricas (capacidade alcançada, violações de QoS).

Ordem de cada passo:
  1. avança posições (velocidade·dt)
  2. mede o sinal no líder de cada pelotão e atualiza a cobertura
  3. avalia o gatilho de divisão
  4. executa as divisões pendentes com N_v,out
  5. sensoria/atribui sub-canais ou conduz a manobra de separação
  6. tenta fusões com N_v,in e calcula os comandos de velocidade (líderes em
     cobertura fecham gaps longos quando a fusão caberia)
  7. registra eventos, amostras de métricas e verifica invariantes

O resultado é determinístico para um cenário fixo (incluindo a semente).
"""

import json
import math
from dataclasses import asdict, dataclass, field, replace
from itertools import count
from typing import Any, Dict, List, Optional, Set, Tuple

import numpy as np

from erros import ConfigError, HdvpError, SimulationError
from logging_config import registrar_erro, registrar_info
from parametros import (
    LatencyVariant,
    QosTarget,
    RadioConfig,
    RegulatoryCap,
    RoadGeometry,
    SignalThresholds,
    TrafficModel,
)
from platoon_dynamics import (
    GUARD_MARGIN_M,
    SPEED_DELTA_MPS,
    Platoon,
    PlatoonState,
    TriggerDecision,
    Vehicle,
    approach_velocity,
    evaluate_split_trigger,
    gap_keeping_velocity,
    inter_platoon_gap,
    merge_closed,
    merge_platoons,
    platoon_extent,
    separation_maneuver,
    split_platoon,
)
from qos_analytics import CoverageCaps, coverage_size_caps
from spectrum_manager import (
    ChannelPlan,
    assign_subchannel,
    build_interference_graph,
    conflicts,
    sense_vacant_subchannels,
)

# Sinal sem nenhuma estação base (fora de cobertura em todo lugar)
SINAL_MINIMO_DBM = -math.inf

TOLERANCIA_POSICAO = 1e-6

# Tipos de evento
SPLIT_PREPARED = "SplitPrepared"
SPLIT_ABORTED = "SplitAborted"
SPLIT_EXECUTED = "SplitExecuted"
SEPARATION_STARTED = "SeparationStarted"
SEPARATION_COMPLETED = "SeparationCompleted"
MERGE_EXECUTED = "MergeExecuted"
MERGE_REJECTED = "MergeRejected"

# Motivos de fim da separação
FIM_POR_ALCANCE = "range"
FIM_POR_COBERTURA = "coverage"

TIPOS_VIOLACAO = ("reliability", "latency", "regulatory", "interference", "interference_during_maneuver")


# --- COBERTURA ---

@dataclass(frozen=True)
class CoverageMap:
    """
    Geometria de cobertura das estações base.

    Attributes:
        base_stations: Pares (posição em m, potência de transmissão em dBm)
        pathloss_exponent: Expoente α da perda log-distância (>= 2)
        reference_distance_m: Distância de referência
        reference_loss_db: Perda na distância de referência
        shadowing_sigma_db: Desvio do sombreamento log-normal (0 = determinístico)
    """

    base_stations: Tuple[Tuple[float, float], ...] = ()
    pathloss_exponent: float = 3.0
    reference_distance_m: float = 1.0
    reference_loss_db: float = 40.0
    shadowing_sigma_db: float = 0.0

    def __post_init__(self):
        object.__setattr__(
            self, "base_stations", tuple((float(p), float(t)) for p, t in self.base_stations)
        )
        if self.pathloss_exponent < 2:
            raise ConfigError("pathloss_exponent deve ser >= 2")
        if self.reference_distance_m <= 0:
            raise ConfigError("reference_distance_m deve ser maior que zero")
        if self.shadowing_sigma_db < 0:
            raise ConfigError("shadowing_sigma_db não pode ser negativo")


def signal_strength(position_m: float, coverage: CoverageMap) -> float:
    """
    Sinal de coordenação (dBm) mais forte recebido na posição.

    max sobre estações de P_tx - L_ref - 10·α·log10(max(dist, d_ref)/d_ref);
    SINAL_MINIMO_DBM quando não há estações.
    """
    if not coverage.base_stations:
        return SINAL_MINIMO_DBM
    melhor = SINAL_MINIMO_DBM
    for posicao, potencia in coverage.base_stations:
        distancia = max(abs(position_m - posicao), coverage.reference_distance_m)
        perda = 10.0 * coverage.pathloss_exponent * math.log10(distancia / coverage.reference_distance_m)
        melhor = max(melhor, potencia - coverage.reference_loss_db - perda)
    return melhor


# --- CENÁRIO ---

@dataclass(frozen=True)
class InitialPlatoon:
    """Pelotão inicial: tamanho, posição do líder e sub-canal."""

    size: int
    lead_position_m: float
    subchannel: int = 0

    def __post_init__(self):
        if isinstance(self.size, bool) or not isinstance(self.size, int) or self.size < 1:
            raise ConfigError("initial_platoons: size deve ser inteiro >= 1")


@dataclass(frozen=True)
class Scenario:
    """
    Descrição reprodutível de uma rodada de simulação.
    """

    road_length_m: float
    duration_s: float
    timestep_s: float
    seed: int
    geometry: RoadGeometry
    radio: RadioConfig
    traffic: TrafficModel
    qos: QosTarget
    cap: RegulatoryCap
    thresholds: SignalThresholds
    coverage: CoverageMap
    initial_platoons: Tuple[InitialPlatoon, ...]
    transmission_range_m: float = 1000.0
    latency_variant: LatencyVariant = LatencyVariant.CALIBRATED
    speed_delta_mps: float = SPEED_DELTA_MPS
    guard_margin_m: float = GUARD_MARGIN_M
    per_subchannel_budget: bool = False

    def __post_init__(self):
        object.__setattr__(self, "initial_platoons", tuple(self.initial_platoons))
        if self.timestep_s <= 0:
            raise ConfigError("timestep_s deve ser maior que zero")
        if self.duration_s < self.timestep_s:
            raise ConfigError("duration_s deve ser >= timestep_s")
        if self.road_length_m <= 0:
            raise ConfigError("road_length_m deve ser maior que zero")
        if self.transmission_range_m <= 0:
            raise ConfigError("transmission_range_m deve ser maior que zero")
        if self.speed_delta_mps <= 0 or self.guard_margin_m < 0:
            raise ConfigError("speed_delta_mps deve ser > 0 e guard_margin_m >= 0")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed deve ser um inteiro sem sinal de 64 bits")
        if not self.initial_platoons:
            raise ConfigError("initial_platoons não pode ser vazio")
        for inicial in self.initial_platoons:
            if not 0 <= inicial.lead_position_m <= self.road_length_m:
                raise ConfigError(
                    f"Líder inicial em {inicial.lead_position_m} m fora da rodovia [0, {self.road_length_m}]"
                )

    @property
    def n_ticks(self) -> int:
        return math.ceil(self.duration_s / self.timestep_s - 1e-9)


# --- RELATÓRIO ---

@dataclass(frozen=True)
class Event:
    """Registro estruturado do event log."""

    tick: int
    time_s: float
    event_type: str
    platoon_ids: Tuple[int, ...]
    details: Dict[str, Any]

    def to_json(self) -> str:
        return json.dumps(
            {
                "tick": self.tick,
                "time_s": self.time_s,
                "event_type": self.event_type,
                "platoon_ids": list(self.platoon_ids),
                "details": self.details,
            },
            sort_keys=True,
            allow_nan=False,
        )


@dataclass(frozen=True)
class MetricsSample:
    time_s: float
    capacity_vps: float
    n_platoons: int
    n_in_coverage: int
    active_maneuvers: int


@dataclass
class MetricsReport:
    """
    Resultado de uma rodada.

    Attributes:
        achieved_capacity_vps: Série temporal de amostras por passo
        qos_violations: Contagem de passos com violação, por tipo
        splits: Divisões binárias executadas
        merges: Fusões executadas
        maneuver_time_s: Tempo simulado com ao menos uma separação ativa
        event_log: Eventos em ordem
        max_cap_violation_window_s: Maior janela contínua acima do limite aplicável
        caps: N_v,in e N_v,out da rodada
        final_platoon_sizes: Tamanhos finais, da frente para trás
        ticks: Passos executados
    """

    achieved_capacity_vps: List[MetricsSample] = field(default_factory=list)
    qos_violations: Dict[str, int] = field(default_factory=lambda: {t: 0 for t in TIPOS_VIOLACAO})
    splits: int = 0
    merges: int = 0
    maneuver_time_s: float = 0.0
    event_log: List[Event] = field(default_factory=list)
    max_cap_violation_window_s: float = 0.0
    caps: Optional[CoverageCaps] = None
    final_platoon_sizes: List[int] = field(default_factory=list)
    ticks: int = 0

    def summary(self) -> Dict[str, Any]:
        """Resumo serializável (JSON) da rodada."""
        capacidades = [a.capacity_vps for a in self.achieved_capacity_vps]
        return {
            "splits": self.splits,
            "merges": self.merges,
            "maneuver_time_s": self.maneuver_time_s,
            "qos_violations": dict(self.qos_violations),
            "max_cap_violation_window_s": self.max_cap_violation_window_s,
            "n_v_in": self.caps.in_coverage if self.caps else None,
            "n_v_out": self.caps.out_of_coverage if self.caps else None,
            "final_platoon_sizes": list(self.final_platoon_sizes),
            "final_platoons": len(self.final_platoon_sizes),
            "mean_capacity_vps": math.fsum(capacidades) / len(capacidades) if capacidades else 0.0,
            "final_capacity_vps": capacidades[-1] if capacidades else 0.0,
            "ticks": self.ticks,
            "events": len(self.event_log),
        }


# --- MUNDO ---

@dataclass
class World:
    """Estado mutável da simulação."""

    scenario: Scenario
    vehicles: Dict[int, Vehicle]
    platoons: Dict[int, Platoon]
    plan: ChannelPlan
    caps: CoverageCaps
    rng: np.random.Generator
    report: MetricsReport
    tick: int = 0
    time_s: float = 0.0
    ids: Any = None
    signals: Dict[int, float] = field(default_factory=dict)
    separation_started: Dict[int, float] = field(default_factory=dict)
    violation_started: Dict[int, int] = field(default_factory=dict)
    rejections: Set[Tuple[int, int, str]] = field(default_factory=set)
    all_vehicle_ids: Tuple[int, ...] = ()

    def next_platoon_id(self) -> int:
        return next(self.ids)

    def road_order(self) -> List[Platoon]:
        """Pelotões da frente para trás."""
        return sorted(
            self.platoons.values(),
            key=lambda p: (-self.vehicles[p.leader_vehicle_id].position_m, p.id),
        )

    def snapshot(self) -> str:
        """Estado serializado para relatórios de erro fatal."""
        return json.dumps(
            {
                "tick": self.tick,
                "time_s": self.time_s,
                "vehicles": [asdict(v) for v in sorted(self.vehicles.values(), key=lambda v: v.id)],
                "platoons": [
                    {
                        "id": p.id,
                        "members": p.members,
                        "subchannel_id": p.subchannel_id,
                        "fsm_state": p.fsm_state.value,
                        "in_coverage": p.in_coverage,
                    }
                    for p in sorted(self.platoons.values(), key=lambda p: p.id)
                ],
            },
            sort_keys=True,
            default=str,
        )


def _num(valor: float) -> Optional[float]:
    return valor if math.isfinite(valor) else None


def _emitir(world: World, tipo: str, platoon_ids, **details) -> None:
    world.report.event_log.append(
        Event(
            tick=world.tick,
            time_s=round(world.time_s, 9),
            event_type=tipo,
            platoon_ids=tuple(platoon_ids),
            details=details,
        )
    )


def _set_channel(world: World, platoon: Platoon, canal: Optional[int]) -> None:
    platoon.subchannel_id = canal
    world.plan = world.plan.without(platoon.id) if canal is None else world.plan.with_assignment(platoon.id, canal)


def build_world(scenario: Scenario) -> World:
    """
    Monta o mundo inicial: veículos espaçados de d atrás de cada líder,
    todos em cruzeiro, e o plano de canais dos pelotões iniciais.

    Raises:
        ConfigError: pelotão inicial acima de min(N_v,in, N_c) ou sub-canal fora de [0, N_b)
        OverlapError: pelotões iniciais sobrepostos
    """
    caps = coverage_size_caps(
        scenario.radio,
        scenario.traffic,
        scenario.qos,
        scenario.cap,
        scenario.latency_variant,
        scenario.per_subchannel_budget,
    )
    limite = min(caps.in_coverage, scenario.cap.max_platoon_size)
    geom = scenario.geometry

    vehicles: Dict[int, Vehicle] = {}
    platoons: Dict[int, Platoon] = {}
    plan = ChannelPlan(scenario.radio.subchannel_count)
    ids_veiculo = count()

    for platoon_id, inicial in enumerate(scenario.initial_platoons):
        if inicial.size > limite:
            raise ConfigError(
                f"Pelotão inicial {platoon_id} com {inicial.size} veículos excede min(N_v,in, N_c) = {limite}"
            )
        membros = []
        posicao = inicial.lead_position_m
        for _ in range(inicial.size):
            veiculo = Vehicle(next(ids_veiculo), posicao, geom.speed_mps, geom.vehicle_length_m)
            vehicles[veiculo.id] = veiculo
            membros.append(veiculo.id)
            posicao = veiculo.rear_m - geom.intra_spacing_m
        plan = plan.with_assignment(platoon_id, inicial.subchannel)
        platoons[platoon_id] = Platoon(id=platoon_id, members=membros, subchannel_id=inicial.subchannel)

    # Rejeita sobreposições
    build_interference_graph([platoon_extent(p, vehicles) for p in platoons.values()], scenario.transmission_range_m)

    world = World(
        scenario=scenario,
        vehicles=vehicles,
        platoons=platoons,
        plan=plan,
        caps=caps,
        rng=np.random.Generator(np.random.PCG64(scenario.seed)),
        report=MetricsReport(caps=caps),
        ids=count(len(platoons)),
        all_vehicle_ids=tuple(sorted(vehicles)),
    )
    for p in platoons.values():
        p.in_coverage = signal_strength(vehicles[p.leader_vehicle_id].position_m, scenario.coverage) \
            >= scenario.thresholds.split_dbm
    return world


# --- PASSO ---

def _medir_sinais(world: World) -> None:
    cen = world.scenario
    sigma = cen.coverage.shadowing_sigma_db
    world.signals = {}
    for p in sorted(world.platoons.values(), key=lambda p: p.id):
        sinal = signal_strength(world.vehicles[p.leader_vehicle_id].position_m, cen.coverage)
        if sigma > 0 and math.isfinite(sinal):
            sinal += float(world.rng.normal(0.0, sigma))
        world.signals[p.id] = sinal
        if p.in_coverage and sinal < cen.thresholds.split_dbm:
            p.in_coverage = False
        elif not p.in_coverage and sinal >= cen.thresholds.prepare_dbm:
            p.in_coverage = True


def _grafo(world: World):
    return build_interference_graph(
        [platoon_extent(p, world.vehicles) for p in world.platoons.values()],
        world.scenario.transmission_range_m,
    )


def _avaliar_gatilhos(world: World) -> None:
    cen = world.scenario
    for p in sorted(world.platoons.values(), key=lambda p: p.id):
        if p.fsm_state not in (PlatoonState.STEADY, PlatoonState.PREPARE_SPLIT):
            continue
        decisao: TriggerDecision = evaluate_split_trigger(
            p, world.signals[p.id], cen.thresholds, world.caps.out_of_coverage
        )
        if not decisao.changed:
            continue
        if decisao.to_state is PlatoonState.PREPARE_SPLIT:
            # Começa a sensoriar sub-canais vagos
            p.sensed_vacant = sense_vacant_subchannels(p.id, world.plan, _grafo(world), cen.radio.subchannel_count)
            _emitir(
                world, SPLIT_PREPARED, [p.id],
                signal_dbm=_num(decisao.signal_dbm),
                size=p.size,
                prospective_leader_id=p.prospective_leader_id,
                vacant_subchannels=sorted(p.sensed_vacant),
            )
        elif decisao.to_state is PlatoonState.STEADY:
            _emitir(world, SPLIT_ABORTED, [p.id], signal_dbm=_num(decisao.signal_dbm))


def _executar_divisoes(world: World) -> List[Tuple[Any, Platoon]]:
    novos = []
    for p in sorted(list(world.platoons.values()), key=lambda p: p.id):
        if p.fsm_state is not PlatoonState.SPLITTING:
            continue
        if p.size <= world.caps.out_of_coverage:
            p.transition(PlatoonState.STEADY)
            continue
        partes, planos = split_platoon(p, world.caps.out_of_coverage, world.next_platoon_id)
        por_id = {parte.id: parte for parte in partes}
        for parte in partes:
            world.platoons[parte.id] = parte
        for plano in planos:
            traseiro = por_id[plano.rear_platoon_id]
            _set_channel(world, traseiro, p.subchannel_id)
            novos.append((plano, traseiro))
        world.report.splits += len(planos)
    return novos


def _gerenciar_canais(world: World, novos) -> None:
    cen = world.scenario
    for plano, traseiro in novos:
        vagos = sense_vacant_subchannels(traseiro.id, world.plan, _grafo(world), cen.radio.subchannel_count)
        sucesso, _, world.plan = assign_subchannel(traseiro.id, vagos, world.plan)
        if sucesso:
            traseiro.subchannel_id = world.plan.channel_of(traseiro.id)
            traseiro.transition(PlatoonState.STEADY)
        plano = replace(plano, rear_subchannel=traseiro.subchannel_id if sucesso else None)
        _emitir(
            world, SPLIT_EXECUTED, [plano.front_platoon_id, traseiro.id],
            front_members=list(plano.front_members),
            rear_members=list(plano.rear_members),
            rear_leader_id=plano.rear_leader_id,
            rear_subchannel=plano.rear_subchannel,
        )
        if sucesso:
            continue

        ordem = world.road_order()
        frente = ordem[ordem.index(traseiro) - 1]
        traseiro.separating_from = frente.id
        comando = separation_maneuver(
            frente, traseiro, world.vehicles, cen.transmission_range_m,
            cen.speed_delta_mps, cen.geometry.speed_mps, cen.guard_margin_m,
        )
        if comando.completed:
            traseiro.transition(PlatoonState.STEADY)
            traseiro.separating_from = None
        else:
            world.separation_started[traseiro.id] = world.time_s
            _emitir(world, SEPARATION_STARTED, [frente.id, traseiro.id], gap_m=comando.gap_m)


def _encerrar_separacao(world: World, frente: Platoon, p: Platoon, gap_m: float, motivo: str) -> None:
    p.transition(PlatoonState.STEADY)
    p.separating_from = None
    inicio = world.separation_started.pop(p.id, world.time_s)
    _emitir(world, SEPARATION_COMPLETED, [frente.id, p.id],
            gap_m=gap_m, duration_s=round(world.time_s - inicio, 9), reason=motivo)


def _conduzir_manobras(world: World) -> Dict[int, float]:
    """
    Avança separações e fusões em curso; retorna velocidades de líderes em separação.

    Percorre a rodovia da frente para trás, então cada separação é comandada
    relativa à velocidade já decidida para o pelotão da frente. Uma separação
    termina ao atingir alcance + folga ou quando os dois pelotões voltam à
    cobertura (a estação base coordena o MAC).
    """
    cen = world.scenario
    comandos: Dict[int, float] = {}
    ordem = world.road_order()
    for i, p in enumerate(ordem):
        if p.fsm_state is PlatoonState.SEPARATING:
            if i == 0:
                p.transition(PlatoonState.STEADY)
                p.separating_from = None
                continue
            frente = ordem[i - 1]
            p.separating_from = frente.id
            velocidade_frente = comandos.get(frente.id, world.vehicles[frente.members[-1]].velocity_mps)
            comando = separation_maneuver(
                frente, p, world.vehicles, cen.transmission_range_m,
                cen.speed_delta_mps, cen.geometry.speed_mps, cen.guard_margin_m,
                front_velocity_mps=velocidade_frente,
            )
            if comando.completed:
                _encerrar_separacao(world, frente, p, comando.gap_m, FIM_POR_ALCANCE)
            elif frente.in_coverage and p.in_coverage:
                _encerrar_separacao(world, frente, p, comando.gap_m, FIM_POR_COBERTURA)
            else:
                comandos[p.id] = comando.rear_velocity_mps
        elif p.fsm_state is PlatoonState.MERGING:
            if merge_closed(p, world.vehicles, cen.geometry.intra_spacing_m):
                p.transition(PlatoonState.STEADY)
    return comandos


def _tentar_fusoes(world: World) -> None:
    cen = world.scenario
    limite_gap = 2.0 * cen.geometry.inter_spacing_m
    ordem = world.road_order()
    i = 0
    while i < len(ordem) - 1:
        frente, tras = ordem[i], ordem[i + 1]
        elegiveis = frente.fsm_state is PlatoonState.STEADY and tras.fsm_state is PlatoonState.STEADY
        if not elegiveis or inter_platoon_gap(frente, tras, world.vehicles) > limite_gap:
            i += 1
            continue
        em_cobertura = frente.in_coverage and tras.in_coverage
        sucesso, motivo, fundido = merge_platoons(
            frente, tras, world.caps.in_coverage, cen.cap.max_platoon_size, em_cobertura
        )
        if not sucesso:
            chave = (frente.id, tras.id, motivo)
            if chave not in world.rejections:
                world.rejections.add(chave)
                _emitir(world, MERGE_REJECTED, [frente.id, tras.id], reason=motivo,
                        sizes=[frente.size, tras.size])
            i += 1
            continue
        del world.platoons[tras.id]
        world.plan = world.plan.without(tras.id)
        world.platoons[fundido.id] = fundido
        world.report.merges += 1
        _emitir(world, MERGE_EXECUTED, [frente.id, tras.id], size=fundido.size)
        ordem[i] = fundido
        del ordem[i + 1]
        i += 1


def _pode_aproximar(world: World, frente: Platoon, p: Platoon) -> bool:
    """Líder em Steady, os dois em cobertura e a soma cabe em min(N_v,in, N_c)."""
    limite = min(world.caps.in_coverage, world.scenario.cap.max_platoon_size)
    return (
        p.fsm_state is PlatoonState.STEADY
        and frente.in_coverage
        and p.in_coverage
        and frente.size + p.size <= limite
    )


def _comandar_velocidades(world: World, comandos: Dict[int, float], dt: float) -> None:
    cen = world.scenario
    geom = cen.geometry
    cruzeiro, delta = geom.speed_mps, cen.speed_delta_mps
    anterior: Optional[Vehicle] = None
    frente: Optional[Platoon] = None
    for p in world.road_order():
        for k, vid in enumerate(p.members):
            veiculo = world.vehicles[vid]
            if anterior is None:
                veiculo.velocity_mps = cruzeiro
            else:
                gap = anterior.rear_m - veiculo.position_m
                if k > 0:
                    veiculo.velocity_mps = gap_keeping_velocity(
                        anterior.velocity_mps, gap, geom.intra_spacing_m, dt, cruzeiro, delta
                    )
                elif p.id in comandos:
                    veiculo.velocity_mps = comandos[p.id]
                elif gap <= 2.0 * geom.inter_spacing_m:
                    veiculo.velocity_mps = gap_keeping_velocity(
                        anterior.velocity_mps, gap, geom.inter_spacing_m, dt, cruzeiro, delta
                    )
                elif _pode_aproximar(world, frente, p):
                    veiculo.velocity_mps = approach_velocity(anterior.velocity_mps, delta)
                else:
                    veiculo.velocity_mps = cruzeiro
            anterior = veiculo
        frente = p


def achieved_road_capacity(world: World) -> float:
    """
    Capacidade alcançada (veículos/s) da configuração atual.

    v_médio·(total de veículos) / (Σ (n·s + (n-1)·d) + Σ gaps reais entre
    pelotões + D). Para pelotões idênticos com gap D reduz à fórmula fechada.

    Raises:
        ValueError: sem pelotões
    """
    if not world.platoons:
        raise ValueError("Capacidade indefinida sem pelotões")
    geom = world.scenario.geometry
    ordem = world.road_order()
    total = sum(p.size for p in ordem)
    extensao = math.fsum(geom.platoon_length_m(p.size) for p in ordem)
    extensao += math.fsum(inter_platoon_gap(a, b, world.vehicles) for a, b in zip(ordem, ordem[1:]))
    extensao += geom.inter_spacing_m
    v_medio = math.fsum(world.vehicles[v].velocity_mps for p in ordem for v in p.members) / total
    return v_medio * total / extensao


def _contabilizar(world: World, dt: float) -> None:
    cen = world.scenario
    rep = world.report
    caps = world.caps

    for p in world.platoons.values():
        acima = False
        if not p.in_coverage and p.size > caps.out_of_coverage:
            rep.qos_violations["reliability"] += 1
            acima = True
        if p.in_coverage and p.size > caps.in_coverage:
            rep.qos_violations["latency"] += 1
            acima = True
        if p.size > cen.cap.max_platoon_size:
            rep.qos_violations["regulatory"] += 1
            acima = True
        if acima:
            inicio = world.violation_started.setdefault(p.id, world.tick)
            janela = (world.tick - inicio + 1) * dt
            rep.max_cap_violation_window_s = max(rep.max_cap_violation_window_s, janela)
        else:
            world.violation_started.pop(p.id, None)

    fora = [p for p in world.platoons.values() if not p.in_coverage]
    if len(fora) >= 2:
        for a, b in conflicts(world.plan, _grafo(world)):
            pa, pb = world.platoons[a], world.platoons[b]
            if pa.in_coverage or pb.in_coverage:
                continue
            em_manobra = PlatoonState.SEPARATING in (pa.fsm_state, pb.fsm_state)
            rep.qos_violations["interference_during_maneuver" if em_manobra else "interference"] += 1

    manobras = sum(1 for p in world.platoons.values() if p.fsm_state is PlatoonState.SEPARATING)
    if manobras:
        rep.maneuver_time_s = round(rep.maneuver_time_s + dt, 9)

    rep.achieved_capacity_vps.append(
        MetricsSample(
            time_s=round(world.time_s, 9),
            capacity_vps=achieved_road_capacity(world),
            n_platoons=len(world.platoons),
            n_in_coverage=sum(1 for p in world.platoons.values() if p.in_coverage),
            active_maneuvers=manobras,
        )
    )


def _verificar_invariantes(world: World) -> None:
    geom = world.scenario.geometry
    ids = sorted(v for p in world.platoons.values() for v in p.members)
    if tuple(ids) != world.all_vehicle_ids:
        raise SimulationError("conjunto de veículos mudou", world.tick, world.snapshot())

    anterior: Optional[Vehicle] = None
    for p in world.road_order():
        for k, vid in enumerate(p.members):
            veiculo = world.vehicles[vid]
            if anterior is not None:
                gap = anterior.rear_m - veiculo.position_m
                if gap < -TOLERANCIA_POSICAO:
                    raise SimulationError(
                        f"veículos {anterior.id} e {veiculo.id} sobrepostos", world.tick, world.snapshot()
                    )
                if k > 0 and gap < geom.intra_spacing_m - TOLERANCIA_POSICAO:
                    raise SimulationError(
                        f"gap interno {gap:.6f} m menor que d no pelotão {p.id}", world.tick, world.snapshot()
                    )
            anterior = veiculo


def step(world: World, dt: float) -> World:
    """
    Avança o mundo um passo de dt segundos (dt = timestep do cenário).

    Raises:
        SimulationError: violação de invariante, com o tick registrado
    """
    if abs(dt - world.scenario.timestep_s) > 1e-12:
        raise ConfigError(f"dt ({dt}) difere do timestep do cenário ({world.scenario.timestep_s})")

    world.tick += 1
    world.time_s = world.tick * dt

    for veiculo in world.vehicles.values():
        veiculo.position_m += veiculo.velocity_mps * dt

    _medir_sinais(world)
    _avaliar_gatilhos(world)
    novos = _executar_divisoes(world)
    _gerenciar_canais(world, novos)
    comandos = _conduzir_manobras(world)
    _tentar_fusoes(world)
    _comandar_velocidades(world, comandos, dt)
    _contabilizar(world, dt)
    _verificar_invariantes(world)
    return world


def run(scenario: Scenario) -> MetricsReport:
    """
    Executa ⌈duração/timestep⌉ passos e devolve o relatório.

    Raises:
        ConfigError: cenário inválido
        SimulationError: violação fatal, com tick e snapshot do mundo
    """
    world = build_world(scenario)
    dt = scenario.timestep_s
    try:
        for _ in range(scenario.n_ticks):
            step(world, dt)
    except SimulationError as e:
        registrar_erro(
            mensagem="Violação de invariante na simulação",
            modulo="highway_sim",
            funcao="run",
            detalhes={"tick": e.tick, "erro": str(e)},
            exc_info=True,
        )
        raise
    except HdvpError as e:
        registrar_erro(
            mensagem="Erro inesperado durante a simulação",
            modulo="highway_sim",
            funcao="run",
            detalhes={"tick": world.tick, "erro": str(e)},
            exc_info=True,
        )
        raise SimulationError(str(e), world.tick, world.snapshot()) from e

    world.report.ticks = world.tick
    world.report.final_platoon_sizes = [p.size for p in world.road_order()]

    registrar_info(
        mensagem="Simulação concluída",
        modulo="highway_sim",
        funcao="run",
        detalhes={
            "ticks": world.tick,
            "splits": world.report.splits,
            "merges": world.report.merges,
            "final_platoon_sizes": world.report.final_platoon_sizes,
        },
    )
    return world.report
