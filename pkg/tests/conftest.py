"""Fixtures compartilhadas: parâmetros de referência e cenários de cobertura."""

import json
from pathlib import Path

import pytest

from parametros import parametros_tabela1

CENARIOS = Path(__file__).parent.parent / "cenarios"


def ler_cenario(nome: str) -> dict:
    with open(CENARIOS / nome, "r", encoding="utf-8") as arquivo:
        return json.load(arquivo)


@pytest.fixture
def tabela1():
    return parametros_tabela1()


@pytest.fixture
def radio(tabela1):
    return tabela1.radio


@pytest.fixture
def traffic(tabela1):
    return tabela1.traffic


@pytest.fixture
def qos(tabela1):
    return tabela1.qos


@pytest.fixture
def geom(tabela1):
    return tabela1.geometry


@pytest.fixture
def caminho_cenarios() -> Path:
    return CENARIOS


@pytest.fixture
def dados_buraco() -> dict:
    """Cenário de buraco de cobertura com 4 sub-canais (JSON decodificado)."""
    return ler_cenario("coverage_hole.json")


@pytest.fixture
def dados_canal_unico() -> dict:
    """Buraco de cobertura longo, canal único, com um pelotão de 7 (uma divisão 4+3)."""
    dados = ler_cenario("coverage_hole_single_channel.json")
    dados["initial_platoons"] = [{"size": 7, "lead_position_m": 500, "subchannel": 0}]
    dados["duration_s"] = 650
    return dados


@pytest.fixture
def dados_canal_unico_completo() -> dict:
    """Buraco longo em canal único com o pelotão de 20 (três divisões e volta à cobertura)."""
    return ler_cenario("coverage_hole_single_channel.json")
