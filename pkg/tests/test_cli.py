"""Testes da linha de comando (códigos de saída e arquivos gerados)."""

import csv
import json

import pytest

from cli import EXIT_CONFIG, EXIT_INVIAVEL, EXIT_OK, main


def escrever_json(caminho, dados):
    caminho.write_text(json.dumps(dados), encoding="utf-8")
    return str(caminho)


def ler_csv(caminho):
    with open(caminho, encoding="utf-8") as arquivo:
        return list(csv.DictReader(l for l in arquivo if not l.startswith("#")))


@pytest.fixture
def tabela1_json(caminho_cenarios):
    return str(caminho_cenarios / "table1.json")


def test_analyze_tabela1(tabela1_json, tmp_path, capsys):
    assert main(["analyze", "--config", tabela1_json, "--out", str(tmp_path), "--n-range", "1:500"]) == EXIT_OK
    saida = capsys.readouterr().out
    assert "n_slots=5000" in saida
    assert "aloha=6" in saida
    assert "reservation=394" in saida
    assert "reservation[as-printed]=278" in saida

    latencias = ler_csv(tmp_path / "latency_curve.csv")
    colisoes = ler_csv(tmp_path / "collision_curve.csv")
    assert len(latencias) == len(colisoes) == 500
    assert list(latencias[0]) == ["n", "reservation_latency_s"]
    assert list(colisoes[0]) == ["n", "aloha_collision_prob"]
    assert (tmp_path / "latency_curve.csv").read_text(encoding="utf-8").startswith("# ")


def test_analyze_como_impressa(tabela1_json, tmp_path, capsys):
    args = ["analyze", "--config", tabela1_json, "--out", str(tmp_path), "--n-range", "1:1", "--variant", "as-printed"]
    assert main(args) == EXIT_OK
    assert "reservation=278" in capsys.readouterr().out
    assert ler_csv(tmp_path / "latency_curve.csv") == [{"n": "1", "reservation_latency_s": "0"}]
    assert ler_csv(tmp_path / "collision_curve.csv") == [{"n": "1", "aloha_collision_prob": "0"}]


def test_analyze_config_malformada(tmp_path):
    ruim = escrever_json(tmp_path / "ruim.json", {"radio": {"bandwidth_hz": 1e7}})
    assert main(["analyze", "--config", ruim, "--out", str(tmp_path)]) == EXIT_CONFIG


def test_analyze_inviavel(tmp_path, caminho_cenarios):
    dados = json.loads((caminho_cenarios / "table1.json").read_text(encoding="utf-8"))
    dados["radio"]["bandwidth_hz"] = 100
    config = escrever_json(tmp_path / "estreita.json", dados)
    assert main(["analyze", "--config", config, "--out", str(tmp_path)]) == EXIT_INVIAVEL


def test_analyze_acima_de_n_slots(tabela1_json, tmp_path, capsys):
    args = ["analyze", "--config", tabela1_json, "--out", str(tmp_path), "--n-range", "4998:5003"]
    assert main(args) == EXIT_OK
    assert "n_slots=5000" in capsys.readouterr().out

    latencias = ler_csv(tmp_path / "latency_curve.csv")
    colisoes = ler_csv(tmp_path / "collision_curve.csv")
    assert [l["n"] for l in latencias] == ["4998", "4999", "5000"]
    assert [c["n"] for c in colisoes] == [str(n) for n in range(4998, 5004)]
    assert "N_s=5000" in (tmp_path / "latency_curve.csv").read_text(encoding="utf-8")


def test_analyze_inteiramente_acima_de_n_slots(tabela1_json, tmp_path):
    args = ["analyze", "--config", tabela1_json, "--out", str(tmp_path), "--n-range", "6000:6002"]
    assert main(args) == EXIT_OK
    assert ler_csv(tmp_path / "latency_curve.csv") == []
    assert len(ler_csv(tmp_path / "collision_curve.csv")) == 3


def test_intervalo_invalido(tabela1_json, tmp_path):
    with pytest.raises(SystemExit) as saida:
        main(["analyze", "--config", tabela1_json, "--out", str(tmp_path), "--n-range", "5:2"])
    assert saida.value.code == 2


def test_capacity(tabela1_json, tmp_path, capsys):
    assert main(["capacity", "--config", tabela1_json, "--out", str(tmp_path), "--n-range", "1:10"]) == EXIT_OK
    linhas = ler_csv(tmp_path / "capacity.csv")
    assert len(linhas) == 10
    assert float(linhas[-1]["capacity_vps"]) == pytest.approx(2.7027, rel=1e-4)
    assert "n_v_out=6" in capsys.readouterr().out


def test_mc(tabela1_json, tmp_path, capsys):
    args = ["mc", "--config", tabela1_json, "--out", str(tmp_path), "--n-range", "2:3",
            "--trials", "20000", "--latency-trials", "50", "--seed", "9"]
    assert main(args) == EXIT_OK
    oraculo = ler_csv(tmp_path / "mc_aloha.csv")
    assert [l["n_vehicles"] for l in oraculo] == ["2", "3"]
    reserva = ler_csv(tmp_path / "mc_reservation.csv")
    assert len(reserva) == 4
    assert all(l["collisions"] == "0" for l in reserva)
    assert "oracle_agreement=" in capsys.readouterr().out


def test_simulate_buraco_de_cobertura(caminho_cenarios, tmp_path, capsys):
    config = str(caminho_cenarios / "coverage_hole.json")
    assert main(["simulate", "--config", config, "--out", str(tmp_path / "a")]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == {"merges": 3, "splits": 3}
    resumo = json.loads((tmp_path / "a" / "summary.json").read_text(encoding="utf-8"))
    assert resumo["splits"] == 3
    assert resumo["merges"] == 3
    assert resumo["n_v_out"] == 6

    assert main(["simulate", "--config", config, "--out", str(tmp_path / "b")]) == EXIT_OK
    for nome in ("events.ndjson", "metrics.csv", "summary.json"):
        assert (tmp_path / "a" / nome).read_bytes() == (tmp_path / "b" / nome).read_bytes()


def test_simulate_sem_cobertura_sem_eventos(caminho_cenarios, tmp_path):
    dados = json.loads((caminho_cenarios / "coverage_hole.json").read_text(encoding="utf-8"))
    del dados["coverage"]
    dados["duration_s"] = 5
    dados["initial_platoons"] = [{"size": 6, "lead_position_m": 500}]
    config = escrever_json(tmp_path / "vazio.json", dados)
    assert main(["simulate", "--config", config, "--out", str(tmp_path / "saida")]) == EXIT_OK
    assert (tmp_path / "saida" / "events.ndjson").read_text(encoding="utf-8") == ""


def test_simulate_config_invalida(tmp_path):
    config = escrever_json(tmp_path / "ruim.json", {"road_length_m": 10})
    assert main(["simulate", "--config", config, "--out", str(tmp_path)]) == EXIT_CONFIG


def test_simulate_semente_igual_a_sweep_da_semente(caminho_cenarios, tmp_path):
    dados = json.loads((caminho_cenarios / "coverage_hole.json").read_text(encoding="utf-8"))
    dados["coverage"]["shadowing_sigma_db"] = 4.0
    dados["duration_s"] = 100
    config = escrever_json(tmp_path / "sombra.json", dados)

    assert main(["simulate", "--config", config, "--out", str(tmp_path / "sim"), "--seed", "7"]) == EXIT_OK
    assert main(["sweep", "--config", config, "--out", str(tmp_path / "sw"), "--sweep", "seed=7"]) == EXIT_OK
    assert (tmp_path / "sim" / "events.ndjson").read_bytes() == (tmp_path / "sw" / "seed=7" / "events.ndjson").read_bytes()
    assert (tmp_path / "sim" / "metrics.csv").read_bytes() == (tmp_path / "sw" / "seed=7" / "metrics.csv").read_bytes()


def test_sweep_um_valor_igual_a_simulate(caminho_cenarios, tmp_path):
    config = str(caminho_cenarios / "coverage_hole.json")
    assert main(["simulate", "--config", config, "--out", str(tmp_path / "sim")]) == EXIT_OK
    assert main(["sweep", "--config", config, "--out", str(tmp_path / "sw"),
                 "--sweep", "radio.subchannel_count=4"]) == EXIT_OK
    pasta = tmp_path / "sw" / "radio.subchannel_count=4"
    for nome in ("events.ndjson", "metrics.csv", "summary.json"):
        assert (pasta / nome).read_bytes() == (tmp_path / "sim" / nome).read_bytes()
    linhas = ler_csv(tmp_path / "sw" / "sweep.csv")
    assert linhas[0]["value"] == "4"
    assert linhas[0]["splits"] == "3"


def test_sweep_canais_penaliza_canal_unico(caminho_cenarios, tmp_path):
    config = str(caminho_cenarios / "coverage_hole.json")
    args = ["sweep", "--config", config, "--out", str(tmp_path), "--sweep", "radio.subchannel_count=1,2,4", "--jobs", "2"]
    assert main(args) == EXIT_OK
    linhas = {l["value"]: l for l in ler_csv(tmp_path / "sweep.csv")}
    assert list(linhas) == ["1", "2", "4"]
    assert float(linhas["1"]["maneuver_time_s"]) > 0.0
    assert float(linhas["4"]["maneuver_time_s"]) == 0.0
    assert float(linhas["1"]["mean_capacity_vps"]) < float(linhas["4"]["mean_capacity_vps"])


def test_sweep_parametro_desconhecido(caminho_cenarios, tmp_path):
    config = str(caminho_cenarios / "coverage_hole.json")
    assert main(["sweep", "--config", config, "--out", str(tmp_path), "--sweep", "radio.canais=1,2"]) == EXIT_CONFIG
    assert main(["sweep", "--config", config, "--out", str(tmp_path), "--sweep", "velocidade=1"]) == EXIT_CONFIG
