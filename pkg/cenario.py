"""
Módulo de Cenários - Simulador HDVP

Leitura e validação do JSON de cenário da simulação de rodovia e
substituição de campos por caminho pontuado (usada pelas varreduras).
"""

import copy
from typing import Any, Dict, List, Mapping

from erros import ConfigError
from highway_sim import CoverageMap, InitialPlatoon, Scenario
from logging_config import registrar_info
from parametros import (
    LatencyVariant,
    RegulatoryCap,
    cap_de_dict,
    geometria_de_dict,
    ler_json,
    limiares_de_dict,
    qos_de_dict,
    radio_de_dict,
    trafego_de_dict,
)
from validacao import validar_chaves

CHAVES_CENARIO = (
    "road_length_m",
    "duration_s",
    "timestep_s",
    "seed",
    "geometry",
    "radio",
    "traffic",
    "qos",
    "cap",
    "thresholds",
    "coverage",
    "transmission_range_m",
    "latency_variant",
    "initial_platoons",
    "speed_delta_mps",
    "guard_margin_m",
    "per_subchannel_budget",
)
OBRIGATORIAS_CENARIO = (
    "road_length_m",
    "duration_s",
    "seed",
    "geometry",
    "radio",
    "traffic",
    "qos",
    "thresholds",
    "initial_platoons",
)
CHAVES_COBERTURA = (
    "base_stations",
    "pathloss_exponent",
    "reference_distance_m",
    "reference_loss_db",
    "shadowing_sigma_db",
)
CHAVES_ESTACAO = ("position_m", "tx_power_dbm")
CHAVES_PELOTAO = ("size", "lead_position_m", "subchannel")


def _checar(secao: str, dados: Any, permitidas, obrigatorias=()) -> Dict[str, Any]:
    if not isinstance(dados, Mapping):
        raise ConfigError(f"Seção {secao} deve ser um objeto JSON")
    valido, mensagem = validar_chaves(secao, dados, permitidas, obrigatorias)
    if not valido:
        raise ConfigError(mensagem)
    return dict(dados)


def cobertura_de_dict(dados: Mapping) -> CoverageMap:
    d = _checar("coverage", dados, CHAVES_COBERTURA)
    estacoes = []
    for i, estacao in enumerate(d.pop("base_stations", [])):
        e = _checar(f"coverage.base_stations[{i}]", estacao, CHAVES_ESTACAO, CHAVES_ESTACAO)
        estacoes.append((e["position_m"], e["tx_power_dbm"]))
    return CoverageMap(base_stations=tuple(estacoes), **d)


def pelotoes_de_lista(dados: Any) -> List[InitialPlatoon]:
    if not isinstance(dados, list):
        raise ConfigError("initial_platoons deve ser uma lista")
    pelotoes = []
    for i, item in enumerate(dados):
        d = _checar(f"initial_platoons[{i}]", item, CHAVES_PELOTAO, ("size", "lead_position_m"))
        pelotoes.append(InitialPlatoon(**d))
    return pelotoes


def cenario_de_dict(dados: Mapping) -> Scenario:
    """
    Constrói um Scenario a partir do JSON decodificado.

    Seções ausentes opcionais: cap (N_c = 1000), coverage (sem estações,
    fora de cobertura em toda a rodovia), timestep_s (0,1 s).

    Raises:
        ConfigError: chave desconhecida, seção obrigatória ausente ou valor inválido
    """
    d = _checar("scenario", dados, CHAVES_CENARIO, OBRIGATORIAS_CENARIO)
    try:
        return Scenario(
            road_length_m=d["road_length_m"],
            duration_s=d["duration_s"],
            timestep_s=d.get("timestep_s", 0.1),
            seed=d["seed"],
            geometry=geometria_de_dict(d["geometry"]),
            radio=radio_de_dict(d["radio"]),
            traffic=trafego_de_dict(d["traffic"]),
            qos=qos_de_dict(d["qos"]),
            cap=cap_de_dict(d["cap"]) if "cap" in d else RegulatoryCap(1000),
            thresholds=limiares_de_dict(d["thresholds"]),
            coverage=cobertura_de_dict(d.get("coverage", {})),
            initial_platoons=tuple(pelotoes_de_lista(d["initial_platoons"])),
            transmission_range_m=d.get("transmission_range_m", 1000.0),
            latency_variant=LatencyVariant.from_str(d.get("latency_variant", "calibrated")),
            speed_delta_mps=d.get("speed_delta_mps", 2.0),
            guard_margin_m=d.get("guard_margin_m", 50.0),
            per_subchannel_budget=bool(d.get("per_subchannel_budget", False)),
        )
    except (TypeError, AttributeError) as e:
        raise ConfigError(f"Cenário inválido: {e}") from e


def carregar_cenario(caminho: str) -> Scenario:
    """
    Carrega o arquivo de cenário.

    Args:
        caminho: Caminho do JSON

    Returns:
        Scenario validado
    """
    cenario = cenario_de_dict(ler_json(caminho))
    registrar_info(
        mensagem="Cenário carregado",
        modulo="cenario",
        funcao="carregar_cenario",
        detalhes={"caminho": str(caminho), "pelotoes": len(cenario.initial_platoons), "seed": cenario.seed},
    )
    return cenario


def substituir_campo(dados: Mapping, caminho: str, valor: Any) -> Dict[str, Any]:
    """
    Cópia do JSON de cenário com o campo do caminho pontuado trocado.

    Exemplo: substituir_campo(d, "radio.subchannel_count", 4).
    Índices de lista são aceitos ("initial_platoons.0.size").

    Raises:
        ConfigError: caminho que não nomeia um campo do cenário
    """
    novo = copy.deepcopy(dict(dados))
    partes = caminho.split(".")
    if not partes[0] or partes[0] not in CHAVES_CENARIO:
        raise ConfigError(f"Campo de cenário desconhecido: {caminho!r}")

    alvo: Any = novo
    for i, parte in enumerate(partes):
        ultimo = i == len(partes) - 1
        if isinstance(alvo, list):
            if not parte.isdigit() or int(parte) >= len(alvo):
                raise ConfigError(f"Índice inválido {parte!r} em {caminho!r}")
            chave: Any = int(parte)
        elif isinstance(alvo, dict):
            chave = parte
            if not ultimo and chave not in alvo:
                raise ConfigError(f"Campo de cenário desconhecido: {caminho!r}")
        else:
            raise ConfigError(f"Campo de cenário desconhecido: {caminho!r}")
        if ultimo:
            alvo[chave] = valor
        else:
            alvo = alvo[chave]
    return novo
