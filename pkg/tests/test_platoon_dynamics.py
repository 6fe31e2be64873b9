"""Testes da máquina de estados de divisão/fusão e do controle longitudinal."""

from itertools import count

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from erros import InvalidTransitionError, SplitNotNeededError
from parametros import SignalThresholds
from platoon_dynamics import (
    REJECT_OUT_OF_COVERAGE,
    REJECT_SIZE_EXCEEDS_CAP,
    Platoon,
    PlatoonState,
    Vehicle,
    approach_velocity,
    designate_leader,
    evaluate_split_trigger,
    gap_keeping_velocity,
    inter_platoon_gap,
    merge_closed,
    merge_platoons,
    mid_split_index,
    separation_maneuver,
    split_platoon,
)

LIMIARES = SignalThresholds(prepare_dbm=-90.0, split_dbm=-95.0)


def montar(platoon_id, n, cabeca, primeiro_id=0, d=1.0, s=1.5, veiculos=None):
    veiculos = {} if veiculos is None else veiculos
    membros = []
    posicao = cabeca
    for vid in range(primeiro_id, primeiro_id + n):
        veiculos[vid] = Vehicle(vid, posicao, 20.0, s)
        membros.append(vid)
        posicao -= s + d
    return Platoon(id=platoon_id, members=membros, subchannel_id=0), veiculos


# --- GATILHO ---

def test_sinal_forte_mantem_steady():
    p, _ = montar(0, 20, 1000.0)
    decisao = evaluate_split_trigger(p, -80.0, LIMIARES, 6)
    assert not decisao.changed
    assert p.fsm_state is PlatoonState.STEADY


def test_abaixo_de_p1_prepara_e_designa_lider():
    p, _ = montar(0, 20, 1000.0)
    decisao = evaluate_split_trigger(p, -92.0, LIMIARES, 6)
    assert decisao.to_state is PlatoonState.PREPARE_SPLIT
    assert p.prospective_leader_id == 10


def test_entre_p2_e_p1_mantem_preparacao():
    p, _ = montar(0, 20, 1000.0)
    evaluate_split_trigger(p, -92.0, LIMIARES, 6)
    evaluate_split_trigger(p, -94.9, LIMIARES, 6)
    assert p.fsm_state is PlatoonState.PREPARE_SPLIT


def test_abaixo_de_p2_divide():
    p, _ = montar(0, 20, 1000.0)
    evaluate_split_trigger(p, -92.0, LIMIARES, 6)
    evaluate_split_trigger(p, -96.0, LIMIARES, 6)
    assert p.fsm_state is PlatoonState.SPLITTING


def test_retorno_acima_de_p1_aborta():
    p, _ = montar(0, 20, 1000.0)
    evaluate_split_trigger(p, -92.0, LIMIARES, 6)
    decisao = evaluate_split_trigger(p, -90.0, LIMIARES, 6)
    assert decisao.to_state is PlatoonState.STEADY
    assert p.prospective_leader_id is None


def test_sinal_despencando_nao_pula_a_preparacao():
    p, _ = montar(0, 20, 1000.0)
    evaluate_split_trigger(p, -200.0, LIMIARES, 6)
    assert p.fsm_state is PlatoonState.PREPARE_SPLIT


def test_pelotao_que_ja_cabe_nao_prepara():
    p, _ = montar(0, 6, 1000.0)
    evaluate_split_trigger(p, -200.0, LIMIARES, 6)
    assert p.fsm_state is PlatoonState.STEADY


def test_pelotao_unitario_nao_prepara():
    p, _ = montar(0, 1, 1000.0)
    evaluate_split_trigger(p, -200.0, LIMIARES)
    assert p.fsm_state is PlatoonState.STEADY


def test_gatilho_em_estado_invalido():
    p, _ = montar(0, 4, 1000.0)
    p.fsm_state = PlatoonState.SEPARATING
    with pytest.raises(InvalidTransitionError):
        evaluate_split_trigger(p, -80.0, LIMIARES)


@given(sinais=st.lists(st.floats(-120.0, -70.0), min_size=1, max_size=60))
@settings(max_examples=100, deadline=None)
def test_histerese_so_divide_depois_de_preparar(sinais):
    p, _ = montar(0, 20, 1000.0)
    for sinal in sinais:
        anterior = p.fsm_state
        evaluate_split_trigger(p, sinal, LIMIARES, 6)
        if p.fsm_state is PlatoonState.SPLITTING:
            assert anterior is PlatoonState.PREPARE_SPLIT
            assert sinal < LIMIARES.split_dbm
            break
        if anterior is PlatoonState.STEADY and p.fsm_state is PlatoonState.PREPARE_SPLIT:
            assert sinal < LIMIARES.prepare_dbm
        if anterior is PlatoonState.PREPARE_SPLIT and p.fsm_state is PlatoonState.STEADY:
            assert sinal >= LIMIARES.prepare_dbm


def test_transicao_nao_permitida():
    p, _ = montar(0, 4, 1000.0)
    with pytest.raises(InvalidTransitionError):
        p.transition(PlatoonState.SPLITTING)


# --- DIVISÃO ---

def test_indice_do_meio_e_lider():
    assert mid_split_index(20) == 10
    assert mid_split_index(7) == 4
    assert designate_leader([7, 8, 9]) == 7


def _em_splitting(n):
    p, veiculos = montar(0, n, 1000.0)
    p.fsm_state = PlatoonState.SPLITTING
    return p, veiculos


def test_divisao_20_em_quatro_de_5():
    p, _ = _em_splitting(20)
    partes, planos = split_platoon(p, 6, count(1).__next__)
    assert [q.size for q in partes] == [5, 5, 5, 5]
    assert [q.id for q in partes] == [0, 2, 1, 3]
    assert len(planos) == 3
    assert planos[0].rear_leader_id == 10
    assert planos[0].front_members == tuple(range(10))
    assert p.fsm_state is PlatoonState.STEADY
    for traseiro in partes[1:]:
        assert traseiro.fsm_state is PlatoonState.SEPARATING
        assert traseiro.subchannel_id == 0
        assert traseiro.leader_vehicle_id == traseiro.members[0]


def test_divisao_impar_frente_maior():
    p, _ = _em_splitting(7)
    partes, planos = split_platoon(p, 6, count(1).__next__)
    assert [q.size for q in partes] == [4, 3]
    assert planos[0].rear_members == (4, 5, 6)


def test_divisao_desnecessaria():
    p, _ = _em_splitting(5)
    with pytest.raises(SplitNotNeededError):
        split_platoon(p, 6, count(1).__next__)


def test_divisao_fora_de_splitting():
    p, _ = montar(0, 20, 1000.0)
    with pytest.raises(InvalidTransitionError):
        split_platoon(p, 6, count(1).__next__)


@given(n=st.integers(2, 300), limite=st.integers(1, 299))
@settings(max_examples=100, deadline=None)
def test_divisao_conserva_veiculos(n, limite):
    if limite >= n:
        return
    p, _ = _em_splitting(n)
    partes, planos = split_platoon(p, limite, count(1).__next__)
    membros = [v for q in partes for v in q.members]
    assert membros == list(range(n))
    tamanhos = [q.size for q in partes]
    assert max(tamanhos) <= limite
    assert max(tamanhos) - min(tamanhos) <= 1
    assert len(planos) == len(partes) - 1


# --- CONTROLE E SEPARAÇÃO ---

def test_velocidade_mantem_gap():
    assert gap_keeping_velocity(20.0, 1.0, 1.0, 0.1, 20.0, 2.0) == pytest.approx(20.0)


def test_velocidade_limitada():
    assert gap_keeping_velocity(20.0, 50.0, 1.0, 0.1, 20.0, 2.0) == 22.0
    assert gap_keeping_velocity(20.0, 1.0, 50.0, 0.1, 20.0, 2.0) == 18.0
    assert gap_keeping_velocity(1.0, 0.0, 50.0, 0.1, 1.0, 2.0) == 0.0


def test_seguidor_acompanha_lider_lento():
    # líder em separação encadeada a 14 m/s: o seguidor com gap d iguala
    assert gap_keeping_velocity(14.0, 1.0, 1.0, 0.1, 20.0, 2.0) == pytest.approx(14.0)
    assert gap_keeping_velocity(14.0, 0.5, 1.0, 0.1, 20.0, 2.0) == 12.0


def test_seguidor_acompanha_lider_em_aproximacao():
    assert gap_keeping_velocity(24.0, 1.0, 1.0, 0.1, 20.0, 2.0) == pytest.approx(24.0)
    assert gap_keeping_velocity(24.0, 50.0, 1.0, 0.1, 20.0, 2.0) == 26.0


@given(
    pred=st.floats(0.0, 30.0),
    gap=st.floats(0.0, 2000.0),
    desejado=st.floats(1.0, 100.0),
)
def test_velocidade_dentro_da_faixa_relativa(pred, gap, desejado):
    v = gap_keeping_velocity(pred, gap, desejado, 0.1, 20.0, 2.0)
    assert v >= 0.0
    assert max(0.0, min(20.0, pred) - 2.0) <= v <= max(20.0, pred) + 2.0


def test_aproximacao_acima_do_predecessor():
    assert approach_velocity(20.0, 2.0) == 22.0
    assert approach_velocity(22.0) == 24.0


def test_separacao_em_andamento_e_concluida():
    frente, veiculos = montar(0, 4, 2000.0)
    tras, veiculos = montar(1, 3, veiculos[3].rear_m - 1.0, primeiro_id=4, veiculos=veiculos)
    comando = separation_maneuver(frente, tras, veiculos, 1000.0)
    assert not comando.completed
    assert comando.rear_velocity_mps == 18.0
    assert comando.front_velocity_mps == 20.0
    assert comando.gap_m == pytest.approx(1.0)

    for vid in tras.members:
        veiculos[vid].position_m -= 1049.0
    assert inter_platoon_gap(frente, tras, veiculos) == pytest.approx(1050.0)
    assert separation_maneuver(frente, tras, veiculos, 1000.0).completed


def test_separacao_relativa_ao_pelotao_da_frente():
    frente, veiculos = montar(0, 4, 2000.0)
    tras, veiculos = montar(1, 3, veiculos[3].rear_m - 1.0, primeiro_id=4, veiculos=veiculos)
    comando = separation_maneuver(frente, tras, veiculos, 1000.0, front_velocity_mps=18.0)
    assert comando.rear_velocity_mps == 16.0
    assert comando.front_velocity_mps == 18.0
    assert separation_maneuver(frente, tras, veiculos, 1000.0, front_velocity_mps=1.0).rear_velocity_mps == 0.0


# --- FUSÃO ---

def _par(n_frente, n_tras, gap=50.0):
    frente, veiculos = montar(0, n_frente, 2000.0)
    tras, veiculos = montar(
        1, n_tras, veiculos[frente.members[-1]].rear_m - gap, primeiro_id=n_frente, veiculos=veiculos
    )
    return frente, tras, veiculos


def test_fusao_em_cobertura():
    frente, tras, veiculos = _par(5, 5)
    sucesso, _, fundido = merge_platoons(frente, tras, 394, 20, True)
    assert sucesso
    assert fundido.id == 0
    assert fundido.members == list(range(10))
    assert fundido.fsm_state is PlatoonState.MERGING
    assert not merge_closed(fundido, veiculos, 1.0)


def test_fusao_fora_de_cobertura_rejeitada():
    frente, tras, _ = _par(5, 5)
    assert merge_platoons(frente, tras, 394, 20, False) == (False, REJECT_OUT_OF_COVERAGE, None)


def test_fusao_acima_do_limite_rejeitada():
    frente, tras, _ = _par(15, 10)
    assert merge_platoons(frente, tras, 394, 20, True) == (False, REJECT_SIZE_EXCEEDS_CAP, None)
    assert merge_platoons(frente, tras, 24, 1000, True)[1] == REJECT_SIZE_EXCEEDS_CAP


def test_fusao_exige_steady():
    frente, tras, _ = _par(5, 5)
    tras.fsm_state = PlatoonState.SEPARATING
    with pytest.raises(InvalidTransitionError):
        merge_platoons(frente, tras, 394, 20, True)


def test_fusao_fechada_com_gap_d():
    frente, tras, veiculos = _par(5, 5, gap=1.0)
    _, _, fundido = merge_platoons(frente, tras, 394, 20, True)
    assert merge_closed(fundido, veiculos, 1.0)
