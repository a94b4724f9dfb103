import pytest
from hypothesis import given, strategies as st

from nearheight.instance import h_min
from nearheight.states import (
    StageSets,
    WidthError,
    capacity_profile,
    enumerate_reachable,
    feasible_decisions,
    initial_state,
    is_feasible,
    is_terminal_valid,
    precdec,
    stage_counts,
    state_to_bits,
    transition,
)


def bits(*levels):
    s = 0
    for i in levels:
        s |= 1 << i
    return s


def test_initial_state():
    assert initial_state(3) == 0
    assert initial_state(1) == 0
    with pytest.raises(WidthError):
        initial_state(63)
    with pytest.raises(WidthError):
        initial_state(0)


def test_is_feasible_all_zero():
    for a in range(3):
        assert is_feasible(0, a)


def test_is_feasible_101():
    s = bits(0, 2)  # (1,0,1)
    assert is_feasible(s, 1)
    assert not is_feasible(s, 0)  # unoccupied level 1 below occupied level 2
    assert not is_feasible(s, 2)  # level occupied


def test_feasible_decisions_examples():
    assert feasible_decisions(0, 3) == [0, 1, 2]
    assert feasible_decisions(bits(0, 2), 3) == [1]
    assert feasible_decisions(bits(0, 1, 2), 3) == []


def test_transition_chain():
    # (000) -a=1-> (010) -a=0-> (100) -a=2-> (101) -a=1-> (110)
    s = 0
    s = transition(s, 1)
    assert s == bits(1)
    s = transition(s, 0)
    assert s == bits(0)
    s = transition(s, 2)
    assert s == bits(0, 2)
    s = transition(s, 1)
    assert s == bits(0, 1)


def test_transition_rejects_infeasible():
    with pytest.raises(ValueError):
        transition(bits(0), 0)


def test_precdec():
    assert precdec(0) == 0
    assert precdec(bits(0, 2)) == 2
    assert precdec(bits(0, 1)) == 1


def test_is_terminal_valid():
    assert not is_terminal_valid(bits(0, 2))  # level 1 unoccupied below level 2
    assert is_terminal_valid(bits(0, 1))
    assert not is_terminal_valid(bits(1))
    assert not is_terminal_valid(0)


def test_state_to_bits():
    assert state_to_bits(bits(0, 2), 3) == "101"
    assert state_to_bits(0, 3) == "000"


def test_enumerate_reachable_first_sets():
    sets = enumerate_reachable(4, 3)
    assert sets[0] == [0]
    assert sets[1] == sorted([bits(0), bits(1), bits(2)])
    assert all(len(s) <= 10 for s in sets)  # 2^(0+1) * (4+1)


def test_enumerate_reachable_preconditions():
    with pytest.raises(ValueError):
        enumerate_reachable(4, 2)  # below h_min(4) = 3
    with pytest.raises(ValueError):
        enumerate_reachable(0, 1)


states_and_widths = st.integers(min_value=1, max_value=12).flatmap(
    lambda w: st.tuples(st.just(w), st.integers(min_value=0, max_value=(1 << w) - 1))
)


@given(states_and_widths)
def test_precdec_of_transition(sw):
    h_max, s = sw
    for a in feasible_decisions(s, h_max):
        assert precdec(transition(s, a)) == a


@given(states_and_widths)
def test_transition_bit_structure(sw):
    h_max, s = sw
    for a in feasible_decisions(s, h_max):
        t = transition(s, a)
        assert t & ((1 << a) - 1) == s & ((1 << a) - 1)  # below a preserved
        assert (t >> a) & 1 == 1
        assert t >> (a + 1) == 0  # above a cleared


@given(states_and_widths)
def test_feasible_matches_literal_conditions(sw):
    h_max, s = sw
    literal = [
        a
        for a in range(h_max)
        if not (s >> a) & 1
        and not any(
            not (s >> i) & 1 and (s >> j) & 1
            for i in range(a + 1, h_max)
            for j in range(i + 1, h_max)
        )
    ]
    assert feasible_decisions(s, h_max) == literal


@given(states_and_widths)
def test_deepest_bit_forces_single_decision(sw):
    h_max, s = sw
    if (s >> (h_max - 1)) & 1:
        assert len(feasible_decisions(s, h_max)) <= 1


@pytest.mark.parametrize("n,delta", [(1, 0), (4, 0), (7, 1), (10, 2), (20, 1), (33, 0)])
def test_theorem_bounds_on_reachable_sets(n, delta):
    h_max = h_min(n) + delta
    sets = enumerate_reachable(n, h_max)
    for s_nu in sets:
        assert len(s_nu) <= (1 << (delta + 1)) * (n + 1)
        assert sum(len(feasible_decisions(s, h_max)) for s in s_nu) <= (
            1 << (delta + 2)
        ) * (n + 1)


@pytest.mark.parametrize("n,h_max", [(1, 1), (4, 3), (4, 4), (9, 4), (16, 6), (25, 5), (31, 5)])
def test_capacity_profile_matches_iteration(n, h_max):
    """The closed-form membership (popcount <= placed keys <= left-filled
    capacity) reproduces the iterated reachable sets exactly."""
    min_keys, max_keys, _ = capacity_profile(h_max)
    sets = StageSets(n, h_max)
    for nu in range(1, n + 2):
        m = nu - 1
        formula = [
            s for s in range(1 << h_max) if min_keys[s] <= m <= max_keys[s]
        ]
        assert sets.states(nu) == formula


@pytest.mark.parametrize("n,h_max", [(1, 1), (5, 3), (12, 4), (40, 8), (64, 7)])
def test_stage_counts_match_sets(n, h_max):
    sizes, sums = stage_counts(n, h_max)
    sets = StageSets(n, h_max)
    assert sizes == [len(sets.states(nu)) for nu in range(1, n + 2)]
    assert sums == [
        sum(len(feasible_decisions(s, h_max)) for s in sets.states(nu))
        for nu in range(1, n + 1)
    ]


def test_degree_counts_decisions():
    _, _, degree = capacity_profile(4)
    for s in range(1 << 4):
        assert degree[s] == len(feasible_decisions(s, 4))
