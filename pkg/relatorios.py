"""
Módulo de Relatórios - Simulador HDVP

Exporta os artefatos das rodadas: curvas analíticas em CSV (cabeçalho de
comentário legível pelo gnuplot), event log em NDJSON, série de métricas em
CSV e resumo final em JSON.

Números reais saem com 12 dígitos significativos para que diffs entre
execuções idênticas sejam vazios.
"""

import csv
import json
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence

from highway_sim import Event, MetricsReport, MetricsSample
from logging_config import registrar_erro, registrar_info

ARQUIVO_EVENTOS = "events.ndjson"
ARQUIVO_METRICAS = "metrics.csv"
ARQUIVO_RESUMO = "summary.json"

COLUNAS_METRICAS = ("time_s", "capacity_vps", "n_platoons", "n_in_coverage", "active_maneuvers")


def formatar_valor(valor: Any) -> Any:
    """Formata reais com 12 dígitos significativos; demais tipos passam direto."""
    if isinstance(valor, bool):
        return str(valor).lower()
    if isinstance(valor, float):
        return f"{valor:.12g}"
    if isinstance(valor, (dict, list, tuple)):
        return json.dumps(valor, sort_keys=True)
    return valor


def _criar_diretorio(caminho: str) -> None:
    diretorio = os.path.dirname(caminho)
    if diretorio and not os.path.exists(diretorio):
        os.makedirs(diretorio, exist_ok=True)


def exportar_csv(
    dados: List[Dict],
    caminho: str,
    comentarios: Sequence[str] = (),
    colunas: Optional[Sequence[str]] = None,
) -> bool:
    """
    Exporta dados para arquivo CSV.

    Args:
        dados: Lista de dicionários com dados a exportar
        caminho: Caminho do arquivo CSV a ser criado
        comentarios: Linhas de cabeçalho escritas como "# ..." (gnuplot)
        colunas: Ordem das colunas; padrão são as chaves da primeira linha

    Returns:
        bool indicando se a exportação foi bem-sucedida
    """
    try:
        if not dados and not colunas:
            registrar_erro(
                mensagem="Tentativa de exportar CSV com dados vazios",
                modulo="relatorios",
                funcao="exportar_csv",
                detalhes={"caminho": caminho},
            )
            return False

        _criar_diretorio(caminho)
        headers = list(colunas) if colunas else list(dados[0].keys())

        # UTF-8 sem BOM: o gnuplot não ignora o BOM
        with open(caminho, "w", newline="", encoding="utf-8") as csvfile:
            for linha in comentarios:
                csvfile.write(f"# {linha}\n")
            writer = csv.DictWriter(csvfile, fieldnames=headers, lineterminator="\n")
            writer.writeheader()
            for linha in dados:
                writer.writerow({k: formatar_valor(v) for k, v in linha.items()})

        registrar_info(
            mensagem=f"CSV exportado com sucesso: {len(dados)} registros",
            modulo="relatorios",
            funcao="exportar_csv",
            detalhes={"caminho": caminho, "registros": len(dados)},
        )
        return True

    except Exception as e:
        registrar_erro(
            mensagem="Erro ao exportar CSV",
            modulo="relatorios",
            funcao="exportar_csv",
            detalhes={"caminho": caminho, "erro": str(e)},
            exc_info=True,
        )
        return False


def exportar_eventos(eventos: Iterable[Event], caminho: str) -> bool:
    """
    Grava o event log, um objeto JSON por linha (chaves ordenadas).

    Um log vazio gera um arquivo vazio.
    """
    try:
        _criar_diretorio(caminho)
        total = 0
        with open(caminho, "w", newline="", encoding="utf-8") as arquivo:
            for evento in eventos:
                arquivo.write(evento.to_json() + "\n")
                total += 1
        registrar_info(
            mensagem=f"Event log exportado: {total} eventos",
            modulo="relatorios",
            funcao="exportar_eventos",
            detalhes={"caminho": caminho},
        )
        return True
    except Exception as e:
        registrar_erro(
            mensagem="Erro ao exportar event log",
            modulo="relatorios",
            funcao="exportar_eventos",
            detalhes={"caminho": caminho, "erro": str(e)},
            exc_info=True,
        )
        return False


def linhas_metricas(amostras: Iterable[MetricsSample]) -> List[Dict[str, Any]]:
    return [
        {
            "time_s": a.time_s,
            "capacity_vps": a.capacity_vps,
            "n_platoons": a.n_platoons,
            "n_in_coverage": a.n_in_coverage,
            "active_maneuvers": a.active_maneuvers,
        }
        for a in amostras
    ]


def exportar_resumo(resumo: Dict[str, Any], caminho: str) -> bool:
    """Grava o resumo em JSON com chaves ordenadas e indentação fixa."""
    try:
        _criar_diretorio(caminho)
        with open(caminho, "w", newline="", encoding="utf-8") as arquivo:
            arquivo.write(json.dumps(resumo, sort_keys=True, indent=2) + "\n")
        return True
    except Exception as e:
        registrar_erro(
            mensagem="Erro ao exportar resumo",
            modulo="relatorios",
            funcao="exportar_resumo",
            detalhes={"caminho": caminho, "erro": str(e)},
            exc_info=True,
        )
        return False


def gerar_relatorio_simulacao(report: MetricsReport, diretorio: str) -> bool:
    """
    Grava events.ndjson, metrics.csv e summary.json no diretório.

    Args:
        report: Relatório da rodada
        diretorio: Diretório de saída (criado se necessário)

    Returns:
        bool indicando se os três arquivos foram gravados
    """
    ok_eventos = exportar_eventos(report.event_log, os.path.join(diretorio, ARQUIVO_EVENTOS))
    ok_metricas = exportar_csv(
        linhas_metricas(report.achieved_capacity_vps),
        os.path.join(diretorio, ARQUIVO_METRICAS),
        colunas=COLUNAS_METRICAS,
    )
    ok_resumo = exportar_resumo(report.summary(), os.path.join(diretorio, ARQUIVO_RESUMO))
    return ok_eventos and ok_metricas and ok_resumo
