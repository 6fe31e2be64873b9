"""
Módulo de Gerência de Espectro - Simulador HDVP

Sub-canalização da banda em N_b sub-canais ortogonais, grafo de
interferência por alcance de transmissão, sensoriamento de sub-canais vagos
e atribuição determinística (menor id vago).

O sensoriamento é perfeito: um sub-canal é vago quando nenhum vizinho no
alcance o usa. Mutações do plano acontecem numa única thread, dentro do
passo de simulação, em ordem crescente de id de pelotão.
"""

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from erros import ConfigError, OverlapError
from logging_config import registrar_erro, registrar_info
from parametros import RadioConfig

NO_VACANCY = "sem sub-canal vago"


@dataclass(frozen=True)
class SubChannel:
    """Sub-canal de banda B/N_b."""

    id: int
    bandwidth_hz: float


def subchannels(radio: RadioConfig) -> List[SubChannel]:
    """Enumera os N_b sub-canais da configuração de rádio."""
    return [SubChannel(id=i, bandwidth_hz=radio.subchannel_bandwidth_hz) for i in range(radio.subchannel_count)]


def reuse_efficiency(n_subchannels: int) -> float:
    """Eficiência de reuso de espectro, exatamente 1/N_b."""
    if isinstance(n_subchannels, bool) or not isinstance(n_subchannels, int) or n_subchannels < 1:
        raise ConfigError(f"n_subchannels deve ser inteiro >= 1, recebido {n_subchannels!r}")
    return 1.0 / n_subchannels


@dataclass(frozen=True)
class ChannelPlan:
    """
    Atribuição pelotão → sub-canal.

    Canal único é N_b = 1 com todos os pelotões no sub-canal 0.

    Attributes:
        n_subchannels: N_b
        assignments: Mapa id do pelotão → id do sub-canal
    """

    n_subchannels: int
    assignments: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_subchannels < 1:
            raise ConfigError("n_subchannels deve ser >= 1")
        for platoon_id, canal in self.assignments.items():
            if not 0 <= canal < self.n_subchannels:
                raise ConfigError(
                    f"Sub-canal {canal} do pelotão {platoon_id} fora de [0, {self.n_subchannels})"
                )
        object.__setattr__(self, "assignments", dict(self.assignments))

    def channel_of(self, platoon_id: int) -> Optional[int]:
        return self.assignments.get(platoon_id)

    def with_assignment(self, platoon_id: int, canal: int) -> "ChannelPlan":
        novas = dict(self.assignments)
        novas[platoon_id] = canal
        return ChannelPlan(self.n_subchannels, novas)

    def without(self, platoon_id: int) -> "ChannelPlan":
        novas = {p: c for p, c in self.assignments.items() if p != platoon_id}
        return ChannelPlan(self.n_subchannels, novas)


@dataclass(frozen=True)
class InterferenceGraph:
    """
    Grafo de conflitos co-canal: aresta entre pelotões cuja distância entre
    as pontas mais próximas é <= alcance de transmissão.
    """

    graph: nx.Graph
    transmission_range_m: float

    @property
    def nodes(self) -> List[int]:
        return sorted(self.graph.nodes)

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.graph.edges)

    def neighbors(self, platoon_id: int) -> List[int]:
        return sorted(self.graph.neighbors(platoon_id))

    def has_edge(self, a: int, b: int) -> bool:
        return self.graph.has_edge(a, b)


def extent_gap(a: Tuple[float, float], b: Tuple[float, float]) -> float:
    """Distância entre as pontas mais próximas de duas extensões (cabeça, cauda)."""
    cabeca_a, cauda_a = a
    cabeca_b, cauda_b = b
    return max(cauda_a - cabeca_b, cauda_b - cabeca_a)


def build_interference_graph(
    extents: Sequence[Tuple[int, float, float]],
    transmission_range_m: float,
) -> InterferenceGraph:
    """
    Constrói o grafo de interferência.

    Args:
        extents: Lista de (id, posição da cabeça, posição da cauda) em metros
        transmission_range_m: Alcance de transmissão

    Returns:
        InterferenceGraph simétrico, sem laços

    Raises:
        OverlapError: extensões sobrepostas ou cabeça atrás da cauda
    """
    if transmission_range_m <= 0:
        raise ConfigError("transmission_range_m deve ser maior que zero")

    for platoon_id, cabeca, cauda in extents:
        if cabeca < cauda:
            raise OverlapError(f"Pelotão {platoon_id}: cabeça ({cabeca}) atrás da cauda ({cauda})")

    ordenadas = sorted(extents, key=lambda e: (-e[1], e[0]))
    for frente, tras in zip(ordenadas, ordenadas[1:]):
        if tras[1] > frente[2]:
            registrar_erro(
                mensagem="Extensões de pelotões sobrepostas",
                modulo="spectrum_manager",
                funcao="build_interference_graph",
                detalhes={"frente": frente, "tras": tras},
            )
            raise OverlapError(f"Pelotões {frente[0]} e {tras[0]} se sobrepõem")

    grafo = nx.Graph()
    grafo.add_nodes_from(e[0] for e in extents)
    for i, (id_a, cabeca_a, cauda_a) in enumerate(extents):
        for id_b, cabeca_b, cauda_b in extents[i + 1:]:
            if extent_gap((cabeca_a, cauda_a), (cabeca_b, cauda_b)) <= transmission_range_m:
                grafo.add_edge(id_a, id_b)

    return InterferenceGraph(graph=grafo, transmission_range_m=transmission_range_m)


def sense_vacant_subchannels(
    platoon_id: int,
    plan: ChannelPlan,
    graph: InterferenceGraph,
    n_subchannels: int,
) -> FrozenSet[int]:
    """
    Sub-canais não usados por nenhum vizinho no alcance.

    Args:
        platoon_id: Pelotão que sensoria
        plan: Plano de canais atual
        graph: Grafo de interferência
        n_subchannels: N_b

    Returns:
        Conjunto de ids de sub-canais vagos
    """
    if platoon_id not in graph.graph:
        raise ConfigError(f"Pelotão {platoon_id} não está no grafo de interferência")
    ocupados = {
        plan.channel_of(vizinho)
        for vizinho in graph.neighbors(platoon_id)
        if plan.channel_of(vizinho) is not None
    }
    return frozenset(c for c in range(n_subchannels) if c not in ocupados)


def assign_subchannel(
    platoon_id: int,
    vacant: Iterable[int],
    plan: ChannelPlan,
) -> Tuple[bool, str, ChannelPlan]:
    """
    Atribui o sub-canal vago de menor id.

    Args:
        platoon_id: Pelotão a atribuir
        vacant: Sub-canais vagos sensoriados
        plan: Plano atual

    Returns:
        Tupla (sucesso, mensagem, plano)
        - sem vaga: (False, NO_VACANCY, plano inalterado); o chamador recorre
          à manobra de separação
    """
    vagos = sorted(vacant)
    if not vagos:
        return False, NO_VACANCY, plan

    novo = plan.with_assignment(platoon_id, vagos[0])
    registrar_info(
        mensagem=f"Sub-canal {vagos[0]} atribuído ao pelotão {platoon_id}",
        modulo="spectrum_manager",
        funcao="assign_subchannel",
        detalhes={"vagos": vagos},
    )
    return True, "Sub-canal atribuído", novo


def conflicts(plan: ChannelPlan, graph: InterferenceGraph) -> List[Tuple[int, int]]:
    """Pares vizinhos no grafo que usam o mesmo sub-canal."""
    pares = []
    for a, b in graph.edges:
        canal_a, canal_b = plan.channel_of(a), plan.channel_of(b)
        if canal_a is not None and canal_a == canal_b:
            pares.append((a, b))
    return pares
