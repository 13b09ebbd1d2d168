from fractions import Fraction

import pytest

from stpnc.scheduler import (
    InvalidUserCount,
    SymbolId,
    cyclic_user,
    schedule_case1,
    schedule_case2,
    schedule_twic,
    schedule_twxc,
)

ALL_BUILDERS = [
    schedule_twic,
    schedule_twxc,
    lambda: schedule_case1(3),
    lambda: schedule_case1(5),
    lambda: schedule_case2(4),
    lambda: schedule_case2(6),
]


def test_twic_shape():
    s = schedule_twic()
    assert s.n_slots == 3
    assert s.slot(1).sources == {1, 2}
    assert s.slot(1).destinations == {3, 4}
    assert s.slot(2).sources == {3, 4}
    assert len(s.symbols) == 4
    assert set(s.symbols) == {SymbolId(3, 1), SymbolId(4, 2), SymbolId(1, 3), SymbolId(2, 4)}
    assert s.slot(3).sources == frozenset() and not s.slot(3).relay_listen


def test_twxc_shape():
    s = schedule_twxc()
    assert s.n_slots == 5
    assert s.slot(3).sends == {3: SymbolId(1, 3), 4: SymbolId(1, 4)}
    assert len(s.symbols) == 8
    assert set(s.symbols) == {
        SymbolId(3, 1), SymbolId(3, 2), SymbolId(4, 1), SymbolId(4, 2),
        SymbolId(1, 3), SymbolId(1, 4), SymbolId(2, 3), SymbolId(2, 4),
    }


def test_case1_shape():
    s = schedule_case1(3)
    assert s.n_slots == 4
    assert len(s.symbols) == 6
    s = schedule_case1(4)
    assert s.slot(2).sources == {1, 3, 4}
    assert s.slot(2).destinations == {2}
    # the symbol/slot budget targets k1/2
    for k1 in range(3, 9):
        s = schedule_case1(k1)
        assert Fraction(len(s.symbols), s.n_slots) == Fraction(k1, 2)


def test_cyclic_user_examples():
    assert cyclic_user(1, 1, 4) == 2
    assert cyclic_user(4, 1, 4) == 1
    assert cyclic_user(3, 2, 5) == 5


def test_case2_shape():
    s = schedule_case2(4)
    assert s.n_slots == 5
    assert len(s.symbols) == 8
    s = schedule_case2(5)
    assert s.slot(1).destinations == {1, 2}
    assert s.slot(1).sources == {3, 4, 5}
    assert schedule_case2(6).phase2_len == 3
    for k2 in range(4, 9):
        s = schedule_case2(k2)
        assert len(s.symbols) == k2 * (k2 - 2)
        assert s.n_slots == 2 * k2 - 3


def test_user_count_validation():
    with pytest.raises(InvalidUserCount):
        schedule_case1(2)
    with pytest.raises(InvalidUserCount):
        schedule_case2(3)


@pytest.mark.parametrize("build", ALL_BUILDERS)
def test_half_duplex(build):
    s = build()
    for t in range(1, s.n_slots + 1):
        plan = s.slot(t)
        assert not (plan.sources & plan.destinations)
        if t <= s.phase1_len:
            assert plan.sources and plan.relay_listen
        else:
            assert not plan.sources and not plan.relay_listen


@pytest.mark.parametrize("build", ALL_BUILDERS)
def test_every_symbol_sent_exactly_once_by_its_source(build):
    s = build()
    seen = []
    for t in s.phase1_slots:
        for tx, sym in s.slot(t).sends.items():
            assert tx == sym.src
            assert tx in s.slot(t).sources
            seen.append(sym)
    assert len(seen) == len(set(seen)) == len(s.symbols)
    for sym in s.symbols:
        assert sym.dest != sym.src


def test_case1_role_symmetry():
    for k1 in range(3, 8):
        s = schedule_case1(k1)
        for u in s.users:
            dest_count = sum(u in s.slot(t).destinations for t in s.phase1_slots)
            src_count = sum(u in s.slot(t).sources for t in s.phase1_slots)
            assert dest_count == 1
            assert src_count == k1 - 1


def test_case2_each_user_listens_twice():
    for k2 in range(4, 9):
        s = schedule_case2(k2)
        for u in s.users:
            dest_count = sum(u in s.slot(t).destinations for t in s.phase1_slots)
            assert dest_count == 2
