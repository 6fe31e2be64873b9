"""
Interface de Linha de Comando - Simulador HDVP

Subcomandos:
  analyze   curvas de latência (reserva) e colisão (ALOHA) e os máximos
  capacity  capacidade da via por tamanho de pelotão
  mc        oráculo de Monte Carlo do MAC
  simulate  simulação de um cenário de rodovia
  sweep     varredura de um campo do cenário

Códigos de saída: 0 sucesso, 2 erro de configuração, 3 violação de
invariante na simulação, 4 análise inviável.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from cenario import carregar_cenario, cenario_de_dict, substituir_campo
from erros import ConfigError, InfeasibleError, SimulationError
from highway_sim import Scenario, run
from logging_config import registrar_aviso, registrar_erro, registrar_info
from mac_montecarlo import ArrivalModel, TrialConfig, oracle_agreement, simulate_reservation_latency
from parametros import LatencyVariant, carregar_parametros, ler_json
from qos_analytics import (
    collision_curve,
    coverage_size_caps,
    latency_curve,
    max_vehicles_aloha,
    max_vehicles_reservation,
    road_capacity,
    slot_time_s,
    slots_per_interval,
)
from relatorios import exportar_csv, gerar_relatorio_simulacao

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULACAO = 3
EXIT_INVIAVEL = 4

N_MC_PADRAO = (2, 6, 20, 100)

COLUNAS_VARREDURA = (
    "value",
    "splits",
    "merges",
    "maneuver_time_s",
    "mean_capacity_vps",
    "final_capacity_vps",
    "final_platoons",
)


# --- TIPOS DE ARGUMENTO ---

def intervalo_n(texto: str) -> Tuple[int, int]:
    """Converte 'lo:hi' (inclusivo) em tupla; 1 <= lo <= hi."""
    try:
        lo, hi = (int(p) for p in texto.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"intervalo inválido {texto!r}, use lo:hi")
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"intervalo inválido {texto!r}: exige 1 <= lo <= hi")
    return lo, hi


def semente(texto: str) -> int:
    try:
        valor = int(texto)
    except ValueError:
        raise argparse.ArgumentTypeError(f"semente inválida {texto!r}")
    if not 0 <= valor < 2**64:
        raise argparse.ArgumentTypeError("semente deve ser um inteiro sem sinal de 64 bits")
    return valor


def _valor_json(texto: str) -> Any:
    try:
        return json.loads(texto)
    except json.JSONDecodeError:
        return texto


def varredura(texto: str) -> Tuple[str, List[Any]]:
    """Converte 'campo=v1,v2,...' em (campo, valores); cada valor é lido como JSON se possível."""
    campo, sep, valores = texto.partition("=")
    if not sep or not campo.strip() or not valores.strip():
        raise argparse.ArgumentTypeError(f"varredura inválida {texto!r}, use campo=v1,v2,...")
    return campo.strip(), [_valor_json(v.strip()) for v in valores.split(",")]


def construir_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdvp",
        description="Planejador de QoS e simulador de rodovia para pelotões de alta densidade",
    )
    sub = parser.add_subparsers(dest="comando", required=True)

    p = sub.add_parser("analyze", help="curvas de latência e colisão")
    p.add_argument("--config", required=True, help="arquivo JSON de parâmetros")
    p.add_argument("--out", default="saida", help="diretório de saída")
    p.add_argument("--n-range", type=intervalo_n, default=(1, 500))
    p.add_argument("--variant", type=LatencyVariant.from_str, default=LatencyVariant.CALIBRATED)

    p = sub.add_parser("capacity", help="capacidade da via por tamanho de pelotão")
    p.add_argument("--config", required=True, help="arquivo JSON de parâmetros (com geometry)")
    p.add_argument("--out", default="saida")
    p.add_argument("--n-range", type=intervalo_n, default=(1, 100))
    p.add_argument("--variant", type=LatencyVariant.from_str, default=LatencyVariant.CALIBRATED)

    p = sub.add_parser("mc", help="oráculo de Monte Carlo do MAC")
    p.add_argument("--config", required=True, help="arquivo JSON de parâmetros")
    p.add_argument("--out", default="saida")
    p.add_argument("--n-range", type=intervalo_n, default=None, help="padrão: 2, 6, 20 e 100")
    p.add_argument("--seed", type=semente, default=0)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--latency-trials", type=int, default=10_000)

    p = sub.add_parser("simulate", help="simula um cenário de rodovia")
    p.add_argument("--config", required=True, help="arquivo JSON de cenário")
    p.add_argument("--out", default="saida")
    p.add_argument("--seed", type=semente, default=None, help="sobrepõe a semente do cenário")

    p = sub.add_parser("sweep", help="varre um campo do cenário")
    p.add_argument("--config", required=True, help="arquivo JSON de cenário base")
    p.add_argument("--out", default="saida")
    p.add_argument("--sweep", type=varredura, required=True, help="campo=v1,v2,...")
    p.add_argument("--seed", type=semente, default=None)
    p.add_argument("--jobs", type=int, default=1)

    return parser


# --- COMANDOS ---

def comando_analyze(args) -> int:
    params = carregar_parametros(args.config)
    lo, hi = args.n_range
    n_slots = slots_per_interval(params.radio, params.traffic)

    # A fila por reserva só esvazia no intervalo com n <= N_s; acima disso só há colisão
    latencias = latency_curve(params.radio, params.traffic, range(lo, min(hi, n_slots) + 1), args.variant)
    colisoes = collision_curve(params.radio, params.traffic, range(lo, hi + 1))
    comentarios_latencia = [f"latência do MAC por reserva ({args.variant.value})", "x: n (veículos)", "y: latência (s)"]
    if hi > n_slots:
        comentarios_latencia.append(f"n > N_s={n_slots} omitido (fila não esvazia no intervalo)")
        registrar_aviso(
            mensagem="Curva de latência limitada a N_s",
            modulo="cli",
            funcao="comando_analyze",
            detalhes={"n_range": [lo, hi], "n_slots": n_slots},
        )
    ok = exportar_csv(
        [{"n": n, "reservation_latency_s": t} for n, t in latencias],
        os.path.join(args.out, "latency_curve.csv"),
        comentarios=comentarios_latencia,
        colunas=("n", "reservation_latency_s"),
    )
    ok &= exportar_csv(
        [{"n": n, "aloha_collision_prob": p} for n, p in colisoes],
        os.path.join(args.out, "collision_curve.csv"),
        comentarios=["probabilidade de colisão do slotted ALOHA", "x: n (veículos)", "y: P_c"],
    )
    if not ok:
        return EXIT_CONFIG

    maximos = {v.value: max_vehicles_reservation(params.radio, params.traffic, params.qos, v) for v in LatencyVariant}
    print(
        f"n_slots={n_slots} "
        f"aloha={max_vehicles_aloha(params.radio, params.traffic, params.qos)} "
        f"reservation={maximos[args.variant.value]} variant={args.variant.value} "
        + " ".join(f"reservation[{v}]={n}" for v, n in maximos.items())
    )
    return EXIT_OK


def comando_capacity(args) -> int:
    params = carregar_parametros(args.config)
    if params.geometry is None:
        raise ConfigError("capacity exige a seção geometry no arquivo de parâmetros")
    lo, hi = args.n_range
    caps = coverage_size_caps(params.radio, params.traffic, params.qos, params.cap, args.variant)
    c_in = road_capacity(params.geometry, caps.in_coverage)
    c_out = road_capacity(params.geometry, caps.out_of_coverage)

    ok = exportar_csv(
        [{"n": n, "capacity_vps": road_capacity(params.geometry, n)} for n in range(lo, hi + 1)],
        os.path.join(args.out, "capacity.csv"),
        comentarios=[
            "capacidade da via por tamanho de pelotão",
            "x: n (veículos)",
            "y: capacidade (veículos/s)",
            f"N_v,in={caps.in_coverage} capacity={c_in:.12g}",
            f"N_v,out={caps.out_of_coverage} capacity={c_out:.12g}",
        ],
    )
    if not ok:
        return EXIT_CONFIG
    print(f"n_v_in={caps.in_coverage} capacity_in={c_in:.12g} n_v_out={caps.out_of_coverage} capacity_out={c_out:.12g}")
    return EXIT_OK


def comando_mc(args) -> int:
    params = carregar_parametros(args.config)
    if args.trials < 1 or args.latency_trials < 1:
        raise ConfigError("--trials e --latency-trials devem ser >= 1")
    n_slots = slots_per_interval(params.radio, params.traffic)
    slot = slot_time_s(params.radio, params.traffic)
    ns = range(args.n_range[0], args.n_range[1] + 1) if args.n_range else N_MC_PADRAO

    linhas = oracle_agreement(ns, n_slots, args.trials, args.seed)
    ok = exportar_csv(
        [
            {
                "n_vehicles": l.n_vehicles,
                "estimate": l.estimate.mean,
                "std_error": l.estimate.std_error,
                "closed_form": l.closed_form,
                "deviation_sigmas": l.deviation_sigmas,
                "agrees": l.agrees,
            }
            for l in linhas
        ],
        os.path.join(args.out, "mc_aloha.csv"),
        comentarios=[f"oráculo ALOHA: N_s={n_slots} trials={args.trials} seed={args.seed}"],
    )

    latencias = []
    for n in ns:
        if n > n_slots:
            continue
        for chegada in ArrivalModel:
            cfg = TrialConfig(args.latency_trials, (args.seed + n) % 2**64, n, n_slots, slot)
            stats = simulate_reservation_latency(cfg, chegada)
            latencias.append(
                {
                    "n_vehicles": n,
                    "arrival": chegada.value,
                    "mean_s": stats.mean_s,
                    "p50_s": stats.p50_s,
                    "p99_s": stats.p99_s,
                    "max_s": stats.max_s,
                    "collisions": stats.collisions,
                }
            )
    ok &= exportar_csv(
        latencias,
        os.path.join(args.out, "mc_reservation.csv"),
        comentarios=[f"fila do MAC por reserva: slot={slot:.12g} s trials={args.latency_trials}"],
        colunas=("n_vehicles", "arrival", "mean_s", "p50_s", "p99_s", "max_s", "collisions"),
    )
    if not ok:
        return EXIT_CONFIG

    concordam = sum(1 for l in linhas if l.agrees)
    print(f"oracle_agreement={concordam}/{len(linhas)} n_slots={n_slots} trials={args.trials}")
    return EXIT_OK


def _cenario_com_semente(dados: Dict[str, Any], seed: Optional[int]) -> Dict[str, Any]:
    return dados if seed is None else substituir_campo(dados, "seed", seed)


def _gravar_simulacao(cenario: Scenario, diretorio: str) -> Dict[str, Any]:
    report = run(cenario)
    if not gerar_relatorio_simulacao(report, diretorio):
        raise ConfigError(f"Não foi possível gravar os resultados em {diretorio}")
    return report.summary()


def simular_dados(dados: Dict[str, Any], diretorio: str) -> Dict[str, Any]:
    """Roda um cenário (JSON decodificado), grava os artefatos e devolve o resumo."""
    return _gravar_simulacao(cenario_de_dict(dados), diretorio)


def comando_simulate(args) -> int:
    cenario = carregar_cenario(args.config)
    if args.seed is not None:
        cenario = replace(cenario, seed=args.seed)
    resumo = _gravar_simulacao(cenario, args.out)
    print(json.dumps({"splits": resumo["splits"], "merges": resumo["merges"]}, sort_keys=True))
    return EXIT_OK


def _nome_diretorio(campo: str, valor: Any) -> str:
    texto = json.dumps(valor) if not isinstance(valor, str) else valor
    return f"{campo}={texto}".replace("/", "_").replace(" ", "")


def comando_sweep(args) -> int:
    campo, valores = args.sweep
    if args.jobs < 1:
        raise ConfigError("--jobs deve ser >= 1")
    base = _cenario_com_semente(ler_json(args.config), args.seed)

    # Valida todos os cenários antes de rodar qualquer um
    variantes = [substituir_campo(base, campo, v) for v in valores]
    for dados in variantes:
        cenario_de_dict(dados)
    diretorios = [os.path.join(args.out, _nome_diretorio(campo, v)) for v in valores]

    if args.jobs == 1:
        resumos = [simular_dados(d, p) for d, p in zip(variantes, diretorios)]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            resumos = list(pool.map(simular_dados, variantes, diretorios))

    linhas = [{"value": v, **{c: r[c] for c in COLUNAS_VARREDURA[1:]}} for v, r in zip(valores, resumos)]
    ok = exportar_csv(
        linhas,
        os.path.join(args.out, "sweep.csv"),
        comentarios=[f"varredura de {campo}"],
        colunas=COLUNAS_VARREDURA,
    )
    if not ok:
        return EXIT_CONFIG
    registrar_info(
        mensagem="Varredura concluída",
        modulo="cli",
        funcao="comando_sweep",
        detalhes={"campo": campo, "valores": valores, "jobs": args.jobs},
    )
    print(f"sweep {campo}: {len(valores)} execuções")
    return EXIT_OK


COMANDOS = {
    "analyze": comando_analyze,
    "capacity": comando_capacity,
    "mc": comando_mc,
    "simulate": comando_simulate,
    "sweep": comando_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = construir_parser().parse_args(argv)
    try:
        return COMANDOS[args.comando](args)
    except SimulationError as e:
        print(f"erro de simulação: {e}", file=sys.stderr)
        return EXIT_SIMULACAO
    except InfeasibleError as e:
        print(f"análise inviável: {e}", file=sys.stderr)
        return EXIT_INVIAVEL
    except (ConfigError, ValueError) as e:
        registrar_erro(
            mensagem="Erro de configuração",
            modulo="cli",
            funcao="main",
            detalhes={"comando": args.comando, "erro": str(e)},
        )
        print(f"erro de configuração: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
