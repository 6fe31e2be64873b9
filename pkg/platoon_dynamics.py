"""
Módulo de Dinâmica de Pelotões - Simulador HDVP

Máquina de estados de divisão/fusão dirigida pela cobertura:
histerese do sinal (P1/P2), preparação da divisão, divisão no meio do
pelotão com designação de líder, manobra de separação em canal único e
fusão dentro da cobertura.

Fluxo canônico: sensoriar → sinal < P1 → preparar → sinal < P2 → dividir →
sub-canal vago ou manobra de separação.

As atualizações acontecem numa única thread por passo, em ordem crescente
de id de pelotão.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from erros import ConfigError, InvalidTransitionError, SplitNotNeededError
from logging_config import registrar_erro, registrar_info
from parametros import SignalThresholds

REJECT_OUT_OF_COVERAGE = "out of coverage"
REJECT_SIZE_EXCEEDS_CAP = "size exceeds cap"

# Folga de guarda padrão além do alcance de transmissão (igual a D de referência)
GUARD_MARGIN_M = 50.0
SPEED_DELTA_MPS = 2.0


class PlatoonState(Enum):
    STEADY = "Steady"
    PREPARE_SPLIT = "PrepareSplit"
    SPLITTING = "Splitting"
    SEPARATING = "Separating"
    MERGING = "Merging"


# Transições permitidas. Splitting → Steady é o pelotão da frente, que
# mantém canal e velocidade; Separating → Steady cobre também a atribuição
# imediata de sub-canal vago.
TRANSICOES = {
    PlatoonState.STEADY: {PlatoonState.PREPARE_SPLIT, PlatoonState.MERGING},
    PlatoonState.PREPARE_SPLIT: {PlatoonState.SPLITTING, PlatoonState.STEADY},
    PlatoonState.SPLITTING: {PlatoonState.SEPARATING, PlatoonState.STEADY},
    PlatoonState.SEPARATING: {PlatoonState.STEADY},
    PlatoonState.MERGING: {PlatoonState.STEADY},
}


@dataclass
class Vehicle:
    """
    Veículo na rodovia (coordenada longitudinal do para-choque dianteiro).

    Attributes:
        id: Identificador único
        position_m: Posição da frente do veículo
        velocity_mps: Velocidade (>= 0)
        length_m: Comprimento (s)
    """

    id: int
    position_m: float
    velocity_mps: float
    length_m: float

    def __post_init__(self):
        if self.length_m <= 0:
            raise ConfigError(f"Veículo {self.id}: length_m deve ser maior que zero")
        if self.velocity_mps < 0:
            raise ConfigError(f"Veículo {self.id}: velocity_mps não pode ser negativa")

    @property
    def rear_m(self) -> float:
        return self.position_m - self.length_m


@dataclass
class Platoon:
    """
    Pelotão: lista ordenada de veículos (frente para trás) liderada pelo primeiro.

    Attributes:
        id: Identificador único
        members: Ids dos veículos, da frente para trás
        subchannel_id: Sub-canal em uso
        fsm_state: Estado da máquina de divisão/fusão
        prospective_leader_id: Líder designado para o futuro pelotão traseiro
        in_coverage: Estado de cobertura com histerese
        separating_from: Pelotão à frente do qual este se afasta
        sensed_vacant: Sub-canais vagos vistos na preparação
    """

    id: int
    members: List[int]
    subchannel_id: Optional[int] = None
    fsm_state: PlatoonState = PlatoonState.STEADY
    prospective_leader_id: Optional[int] = None
    in_coverage: bool = True
    separating_from: Optional[int] = None
    sensed_vacant: FrozenSet[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.members:
            raise ConfigError(f"Pelotão {self.id} sem membros")
        if len(set(self.members)) != len(self.members):
            raise ConfigError(f"Pelotão {self.id} com veículos repetidos")

    @property
    def leader_vehicle_id(self) -> int:
        return self.members[0]

    @property
    def size(self) -> int:
        return len(self.members)

    def transition(self, novo: PlatoonState) -> None:
        """Muda de estado, respeitando o fluxo de divisão/fusão."""
        if novo not in TRANSICOES[self.fsm_state]:
            raise InvalidTransitionError(
                f"Pelotão {self.id}: transição {self.fsm_state.value} → {novo.value} não permitida"
            )
        self.fsm_state = novo


@dataclass(frozen=True)
class SplitPlan:
    """
    Uma divisão binária no meio do pelotão.

    front_members + rear_members é a lista original; |front| - |rear| ∈ {0, 1}.
    rear_subchannel é preenchido pela gerência de espectro (None = manobra).
    """

    front_platoon_id: int
    rear_platoon_id: int
    front_members: Tuple[int, ...]
    rear_members: Tuple[int, ...]
    rear_leader_id: int
    rear_subchannel: Optional[int] = None


@dataclass(frozen=True)
class TriggerDecision:
    """Resultado da avaliação do gatilho de divisão."""

    platoon_id: int
    from_state: PlatoonState
    to_state: PlatoonState
    signal_dbm: float

    @property
    def changed(self) -> bool:
        return self.from_state is not self.to_state


@dataclass(frozen=True)
class ManeuverCommand:
    """Comando de velocidade de um passo da manobra de separação."""

    rear_velocity_mps: float
    front_velocity_mps: float
    gap_m: float
    completed: bool


# --- GATILHO ---

def mid_split_index(n: int) -> int:
    """Índice do corte no meio; a frente leva o veículo extra em tamanhos ímpares."""
    return math.ceil(n / 2)


def designate_leader(rear_members: Sequence[int]) -> int:
    """
    Líder do novo pelotão traseiro: o membro mais à frente.

    Raises:
        ConfigError: lista vazia
    """
    if not rear_members:
        raise ConfigError("Pelotão traseiro sem membros")
    return rear_members[0]


def evaluate_split_trigger(
    platoon: Platoon,
    signal_dbm: float,
    thresholds: SignalThresholds,
    max_size_out: Optional[int] = None,
) -> TriggerDecision:
    """
    Avalia a histerese P1/P2 e aplica a transição ao pelotão.

    - Steady e sinal < P1 → PrepareSplit (designa o líder em potencial)
    - PrepareSplit e sinal < P2 → Splitting
    - PrepareSplit e sinal >= P1 → Steady (aborta, limpa a preparação)
    - caso contrário, mantém o estado

    Um pelotão que já cabe em max_size_out não se prepara para dividir.

    Args:
        platoon: Pelotão em Steady ou PrepareSplit
        signal_dbm: Sinal da estação base medido no líder
        thresholds: Limiares P1/P2
        max_size_out: N_v,out (opcional)

    Returns:
        TriggerDecision

    Raises:
        InvalidTransitionError: chamada em Splitting, Separating ou Merging
    """
    anterior = platoon.fsm_state
    if anterior not in (PlatoonState.STEADY, PlatoonState.PREPARE_SPLIT):
        raise InvalidTransitionError(
            f"Gatilho de divisão avaliado no estado {anterior.value} (pelotão {platoon.id})"
        )

    if anterior is PlatoonState.STEADY:
        cabe = max_size_out is not None and platoon.size <= max_size_out
        if signal_dbm < thresholds.prepare_dbm and not cabe and platoon.size > 1:
            platoon.transition(PlatoonState.PREPARE_SPLIT)
            corte = mid_split_index(platoon.size)
            platoon.prospective_leader_id = designate_leader(platoon.members[corte:])
    else:
        if signal_dbm < thresholds.split_dbm:
            platoon.transition(PlatoonState.SPLITTING)
        elif signal_dbm >= thresholds.prepare_dbm:
            platoon.transition(PlatoonState.STEADY)
            platoon.prospective_leader_id = None
            platoon.sensed_vacant = frozenset()

    return TriggerDecision(platoon.id, anterior, platoon.fsm_state, signal_dbm)


# --- DIVISÃO ---

def split_platoon(
    platoon: Platoon,
    max_size_out: int,
    next_platoon_id: Callable[[], int],
) -> Tuple[List[Platoon], List[SplitPlan]]:
    """
    Divide o pelotão no meio, recursivamente, até todas as partes caberem em N_v,out.

    O pelotão original vira a parte da frente (Steady); cada nova parte
    traseira recebe id novo, o primeiro membro como líder, o sub-canal do
    pai e o estado Separating. Quem consegue sub-canal vago passa a Steady
    depois, no passo de gerência de espectro.

    Args:
        platoon: Pelotão em Splitting
        max_size_out: N_v,out
        next_platoon_id: Alocador de ids novos

    Returns:
        (pelotões resultantes da frente para trás, planos na ordem de execução)

    Raises:
        InvalidTransitionError: pelotão fora de Splitting
        SplitNotNeededError: tamanho <= max_size_out
    """
    if platoon.fsm_state is not PlatoonState.SPLITTING:
        raise InvalidTransitionError(f"Pelotão {platoon.id} não está em Splitting")
    if max_size_out < 1:
        raise ConfigError("max_size_out deve ser >= 1")
    if platoon.size <= max_size_out:
        raise SplitNotNeededError(
            f"Pelotão {platoon.id} com {platoon.size} veículo(s) já cabe em {max_size_out}"
        )

    planos: List[SplitPlan] = []

    def dividir(parte: Platoon) -> List[Platoon]:
        if parte.size <= max_size_out:
            return [parte]
        corte = mid_split_index(parte.size)
        frente, tras = parte.members[:corte], parte.members[corte:]
        nova = Platoon(
            id=next_platoon_id(),
            members=list(tras),
            subchannel_id=parte.subchannel_id,
            fsm_state=PlatoonState.SEPARATING,
            in_coverage=parte.in_coverage,
        )
        parte.members = list(frente)
        planos.append(
            SplitPlan(
                front_platoon_id=parte.id,
                rear_platoon_id=nova.id,
                front_members=tuple(frente),
                rear_members=tuple(tras),
                rear_leader_id=designate_leader(tras),
            )
        )
        return dividir(parte) + dividir(nova)

    resultado = dividir(platoon)
    platoon.transition(PlatoonState.STEADY)
    platoon.prospective_leader_id = None
    platoon.sensed_vacant = frozenset()

    registrar_info(
        mensagem=f"Pelotão {platoon.id} dividido em {len(resultado)} partes",
        modulo="platoon_dynamics",
        funcao="split_platoon",
        detalhes={"tamanhos": [p.size for p in resultado], "max_size_out": max_size_out},
    )
    return resultado, planos


# --- CONTROLE LONGITUDINAL ---

def inter_platoon_gap(front: Platoon, rear: Platoon, vehicles: Mapping[int, Vehicle]) -> float:
    """Distância entre a traseira do último da frente e a dianteira do líder de trás."""
    return vehicles[front.members[-1]].rear_m - vehicles[rear.members[0]].position_m


def gap_keeping_velocity(
    predecessor_velocity_mps: float,
    gap_m: float,
    desired_gap_m: float,
    dt: float,
    cruise_mps: float,
    speed_delta_mps: float,
) -> float:
    """
    Velocidade que leva o gap ao desejado em um passo.

    Limitada a delta abaixo do menor e delta acima do maior entre cruzeiro e
    velocidade do predecessor, nunca negativa. Um seguidor sempre consegue
    igualar o predecessor, mesmo em cadeias de manobras.
    """
    v = predecessor_velocity_mps + (gap_m - desired_gap_m) / dt
    piso = max(0.0, min(cruise_mps, predecessor_velocity_mps) - speed_delta_mps)
    teto = max(cruise_mps, predecessor_velocity_mps) + speed_delta_mps
    return min(max(v, piso), teto)


def approach_velocity(predecessor_velocity_mps: float, speed_delta_mps: float = SPEED_DELTA_MPS) -> float:
    """Velocidade de aproximação de um líder que fecha o gap para fundir em cobertura."""
    return predecessor_velocity_mps + speed_delta_mps


def separation_maneuver(
    front: Platoon,
    rear: Platoon,
    vehicles: Mapping[int, Vehicle],
    transmission_range_m: float,
    speed_delta_mps: float = SPEED_DELTA_MPS,
    cruise_mps: float = 20.0,
    guard_margin_m: float = GUARD_MARGIN_M,
    front_velocity_mps: Optional[float] = None,
) -> ManeuverCommand:
    """
    Um passo da manobra de separação em canal único.

    Só o pelotão de trás desacelera, para delta abaixo da velocidade do
    pelotão da frente (cruzeiro quando omitida). Se o da frente também está
    se separando, as duas manobras correm em paralelo. Termina quando o gap
    atinge alcance + folga de guarda.

    Args:
        front: Pelotão da frente
        rear: Pelotão de trás, co-canal e no alcance
        vehicles: Veículos por id
        transmission_range_m: Alcance de transmissão
        speed_delta_mps: Redução de velocidade do pelotão de trás
        cruise_mps: Velocidade de cruzeiro
        guard_margin_m: Folga além do alcance
        front_velocity_mps: Velocidade comandada ao pelotão da frente

    Returns:
        ManeuverCommand do passo
    """
    frente_v = cruise_mps if front_velocity_mps is None else front_velocity_mps
    gap = inter_platoon_gap(front, rear, vehicles)
    if gap >= transmission_range_m + guard_margin_m:
        return ManeuverCommand(cruise_mps, frente_v, gap, True)
    return ManeuverCommand(max(0.0, frente_v - speed_delta_mps), frente_v, gap, False)


# --- FUSÃO ---

def merge_platoons(
    front: Platoon,
    rear: Platoon,
    max_size_in: int,
    cap: int,
    in_coverage: bool,
) -> Tuple[bool, str, Optional[Platoon]]:
    """
    Funde o pelotão de trás no da frente, coordenado pela estação base.

    Args:
        front: Pelotão da frente (Steady)
        rear: Pelotão imediatamente atrás (Steady)
        max_size_in: N_v,in
        cap: N_c
        in_coverage: Se os dois estão em cobertura

    Returns:
        Tupla (sucesso, motivo, pelotão fundido)
        - rejeição: (False, REJECT_OUT_OF_COVERAGE | REJECT_SIZE_EXCEEDS_CAP, None)
        - sucesso: pelotão com id e líder da frente, membros da frente e
          depois os de trás, em Merging até o gap fechar; o id de trás é aposentado
    """
    for p in (front, rear):
        if p.fsm_state is not PlatoonState.STEADY:
            registrar_erro(
                mensagem="Fusão pedida para pelotão fora de Steady",
                modulo="platoon_dynamics",
                funcao="merge_platoons",
                detalhes={"platoon_id": p.id, "estado": p.fsm_state.value},
            )
            raise InvalidTransitionError(f"Pelotão {p.id} em {p.fsm_state.value} não pode fundir")

    if not in_coverage:
        return False, REJECT_OUT_OF_COVERAGE, None

    if front.size + rear.size > min(max_size_in, cap):
        return False, REJECT_SIZE_EXCEEDS_CAP, None

    fundido = Platoon(
        id=front.id,
        members=list(front.members) + list(rear.members),
        subchannel_id=front.subchannel_id,
        fsm_state=PlatoonState.STEADY,
        in_coverage=front.in_coverage,
    )
    fundido.transition(PlatoonState.MERGING)
    return True, "Fusão executada", fundido


def merge_closed(platoon: Platoon, vehicles: Mapping[int, Vehicle], intra_spacing_m: float) -> bool:
    """Verdadeiro quando todos os gaps internos estão em d (tolerância 1e-6)."""
    for frente, tras in zip(platoon.members, platoon.members[1:]):
        if vehicles[frente].rear_m - vehicles[tras].position_m > intra_spacing_m + 1e-6:
            return False
    return True


def platoon_extent(platoon: Platoon, vehicles: Mapping[int, Vehicle]) -> Tuple[int, float, float]:
    """(id, cabeça, cauda) do pelotão."""
    return platoon.id, vehicles[platoon.members[0]].position_m, vehicles[platoon.members[-1]].rear_m
