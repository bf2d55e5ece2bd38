from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rlncart.encoding import StateMode, encode_angle
from rlncart.experiment import load_optimal_weights
from rlncart.network import (
    Action,
    Network,
    Rln,
    Segment,
    StructureError,
    dendrite_infer,
    effective_weight,
    segment_response,
    select_action,
)


def bits(text: str) -> tuple[int, ...]:
    return tuple(int(c) for c in text)


@pytest.mark.parametrize("w,expected", [
    (Fraction("4.503"), 5), (0, 0), (Fraction(8), 8), (Fraction(9, 2), 5), (Fraction(1, 1024), 1),
])
def test_effective_weight(w, expected):
    assert effective_weight(w) == expected


def test_segment_response_single_line():
    seg = Segment([8, 0, 0, 0, 0, 0])
    assert segment_response(seg, bits("100000")) == 8
    assert segment_response(seg, bits("010000")) == 0


def test_segment_response_2sv():
    seg = Segment([8, 0, 0, 0, 0, 0, 0, 8, 0])
    assert segment_response(seg, bits("100000010")) == 16


def test_segment_response_uses_ceiling():
    seg = Segment([Fraction(9, 2), Fraction(1, 3), 0])
    assert segment_response(seg, (1, 1, 0)) == 6


def test_segment_response_length_mismatch():
    with pytest.raises(StructureError):
        segment_response(Segment([1, 2, 3]), (1, 0))


def _rln(rows):
    return Rln(Action.MINUS, [Segment(r) for r in rows])


@pytest.mark.parametrize("rows,expected", [
    ([[8], [0], [0]], (0, 8)),
    ([[5], [5], [3]], (0, 5)),
    ([[1], [2], [2]], (1, 2)),
])
def test_dendrite_infer(rows, expected):
    rln = _rln(rows)
    assert dendrite_infer(rln, (1,)) == expected
    assert rln.last_winning_segment == expected[0]


def test_dendrite_infer_optimal():
    net = load_optimal_weights(StateMode.ONE_SV)
    assert dendrite_infer(net.neurons[0], bits("001000")) == (2, 8)


@pytest.mark.parametrize("a_minus,a_plus,action", [
    (14, 9, Action.MINUS), (3, 11, Action.PLUS), (8, 8, Action.MINUS),
])
def test_select_action(a_minus, a_plus, action):
    assert select_action(a_minus, a_plus) is action


def test_optimal_1sv_policy_exhaustive():
    net = load_optimal_weights(StateMode.ONE_SV)
    for k, theta in enumerate((-9, -3, -0.5, 0.5, 3, 9)):
        expected = Action.MINUS if theta < 0 else Action.PLUS
        assert net.infer(encode_angle(theta)).action is expected, k


def test_optimal_1sv_columns_mirror():
    net = load_optimal_weights(StateMode.ONE_SV)
    minus, plus = net.weight_table()
    assert plus == [row[::-1] for row in minus]


def test_weights_saturate():
    net = Network(3, 1, w_max=8)
    net.set_weight(0, 0, 0, 9)
    net.set_weight(0, 0, 1, -1)
    assert net.weight(0, 0, 0) == 8 and net.weight(0, 0, 1) == 0
    net.adjust_weight(0, 0, 2, Fraction(1, 1000))
    assert net.weight(0, 0, 2) == Fraction(1, 1000)


def test_from_weights_shape_check():
    with pytest.raises(StructureError):
        Network.from_weights([[[1, 2]], [[1, 2, 3]]])
    with pytest.raises(StructureError):
        Network.from_weights([[[1]]])


def test_infer_cache_invalidated_by_weight_change():
    net = Network.from_weights([[[1, 0]], [[0, 1]]])
    assert net.infer((1, 0)).action is Action.MINUS
    net.set_weight(1, 0, 0, 2)
    assert net.infer((1, 0)).action is Action.PLUS


def test_infer_is_read_only():
    net = Network.from_weights([[[Fraction(1, 3), 2], [3, 4]], [[5, 0], [0, 5]]])
    before = net.weight_table()
    tags = [(list(s.neg_tags), list(s.pos_tags), list(s.e_flags))
            for r in net.neurons for s in r.segments]
    inf = net.infer((1, 0))
    assert inf.action is Action.PLUS and inf.winner == (1, 0)
    assert inf.segments == (1, 0) and inf.responses == (3, 5)
    assert net.weight_table() == before
    assert tags == [(list(s.neg_tags), list(s.pos_tags), list(s.e_flags))
                    for r in net.neurons for s in r.segments]


weights = st.lists(st.fractions(0, 8, max_denominator=1024), min_size=4, max_size=4)


@given(weights, st.integers(0, 3), st.fractions(0, 8, max_denominator=64))
def test_response_monotone_in_active_weight(ws, line, bump):
    d = tuple(int(i in (line, (line + 1) % 4)) for i in range(4))
    seg = Segment(ws)
    before = segment_response(seg, d)
    raised = list(ws)
    raised[line] = min(Fraction(8), raised[line] + bump)
    assert segment_response(Segment(raised), d) >= before


@given(st.lists(weights, min_size=3, max_size=3), st.permutations([1, 2, 3]))
def test_winner_invariant_to_inactive_permutation(rows, perm):
    d = (1, 0, 0, 0)
    rln = _rln(rows)
    shuffled = _rln([[r[0]] + [r[p] for p in perm] for r in rows])
    assert dendrite_infer(rln, d) == dendrite_infer(shuffled, d)
