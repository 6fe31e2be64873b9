"""
Módulo de Validação de Parâmetros - Simulador HDVP

Funções de validação para os parâmetros de rádio, tráfego, QoS, geometria
e para os documentos JSON de configuração. Todas retornam (valido, mensagem).
"""

import math
from typing import Iterable, Mapping, Sequence, Tuple


def validar_positivo(nome: str, valor: float) -> Tuple[bool, str]:
    """
    Valida que um valor real é finito e estritamente positivo.

    Args:
        nome: Nome do campo (para a mensagem)
        valor: Valor a validar

    Returns:
        Tupla (valido, mensagem)
    """
    if isinstance(valor, bool) or not isinstance(valor, (int, float)):
        return False, f"{nome} deve ser numérico"
    if not math.isfinite(valor):
        return False, f"{nome} deve ser finito"
    if valor <= 0:
        return False, f"{nome} deve ser maior que zero"
    return True, f"{nome} válido"


def validar_inteiro_positivo(nome: str, valor: int) -> Tuple[bool, str]:
    """
    Valida que um valor é inteiro e >= 1.

    Args:
        nome: Nome do campo
        valor: Valor a validar

    Returns:
        Tupla (valido, mensagem)
    """
    if isinstance(valor, bool) or not isinstance(valor, int):
        return False, f"{nome} deve ser inteiro"
    if valor < 1:
        return False, f"{nome} deve ser no mínimo 1"
    return True, f"{nome} válido"


def validar_probabilidade(nome: str, valor: float) -> Tuple[bool, str]:
    """Valida probabilidade no intervalo aberto (0, 1)."""
    if isinstance(valor, bool) or not isinstance(valor, (int, float)):
        return False, f"{nome} deve ser numérico"
    if not 0 < valor < 1:
        return False, f"{nome} deve estar entre 0 e 1 (exclusivo)"
    return True, f"{nome} válido"


def validar_eficiencia(nome: str, valor: float) -> Tuple[bool, str]:
    """Valida eficiência no intervalo (0, 1]."""
    if isinstance(valor, bool) or not isinstance(valor, (int, float)):
        return False, f"{nome} deve ser numérico"
    if not 0 < valor <= 1:
        return False, f"{nome} deve estar em (0, 1]"
    return True, f"{nome} válido"


def validar_pmf(pares: Sequence[Tuple[int, float]]) -> Tuple[bool, str]:
    """
    Valida uma distribuição de tamanho de pelotão.

    Args:
        pares: Lista de (tamanho, probabilidade)

    Returns:
        Tupla (valido, mensagem)
    """
    if not pares:
        return False, "Distribuição deve ter pelo menos um tamanho"

    tamanhos = [n for n, _ in pares]
    if len(set(tamanhos)) != len(tamanhos):
        return False, "Tamanhos da distribuição devem ser distintos"

    for n, p in pares:
        valido, mensagem = validar_inteiro_positivo("tamanho", n)
        if not valido:
            return False, mensagem
        if not 0 <= p <= 1:
            return False, f"Probabilidade de n={n} fora de [0, 1]: {p}"

    soma = math.fsum(p for _, p in pares)
    if abs(soma - 1.0) > 1e-9:
        return False, f"Probabilidades somam {soma}, esperado 1"

    return True, "Distribuição válida"


def validar_limiares(prepare_dbm: float, split_dbm: float) -> Tuple[bool, str]:
    """
    Valida a histerese P1/P2: o limiar de divisão deve ficar abaixo do de preparo.
    """
    if split_dbm >= prepare_dbm:
        return False, (
            f"split_dbm ({split_dbm}) deve ser menor que prepare_dbm ({prepare_dbm})"
        )
    return True, "Limiares válidos"


def validar_chaves(
    secao: str,
    dados: Mapping,
    permitidas: Iterable[str],
    obrigatorias: Iterable[str] = (),
) -> Tuple[bool, str]:
    """
    Rejeita chaves desconhecidas e exige as obrigatórias de um objeto JSON.

    Args:
        secao: Nome da seção (para a mensagem)
        dados: Objeto JSON já decodificado
        permitidas: Chaves aceitas
        obrigatorias: Chaves que precisam estar presentes

    Returns:
        Tupla (valido, mensagem)
    """
    if not isinstance(dados, Mapping):
        return False, f"Seção '{secao}' deve ser um objeto JSON"

    desconhecidas = sorted(set(dados) - set(permitidas))
    if desconhecidas:
        return False, f"Chave(s) desconhecida(s) em '{secao}': {', '.join(desconhecidas)}"

    faltando = sorted(set(obrigatorias) - set(dados))
    if faltando:
        return False, f"Chave(s) obrigatória(s) ausente(s) em '{secao}': {', '.join(faltando)}"

    return True, f"Seção '{secao}' válida"
