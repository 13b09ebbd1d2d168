"""Per-slot transmission schedules for the supported exchange scenarios.

Every schedule has two phases. In phase 1 subsets of users transmit while
the remaining users and all relays listen and store linear equations
(side-information learning). In phase 2 only the relays transmit.
Slots and users are 1-indexed; a symbol id (dest, src) names the unit-power
data symbol user `src` sends for user `dest`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple


class InvalidUserCount(ValueError):
    """Scenario cannot be built for the requested number of users."""


class SymbolId(NamedTuple):
    dest: int
    src: int


@dataclass(frozen=True)
class SlotPlan:
    """One slot: transmitting users, listening users, relay role, payloads."""

    sources: frozenset
    destinations: frozenset
    relay_listen: bool
    sends: dict = field(default_factory=dict)  # transmitter -> SymbolId (phase 1)


@dataclass(frozen=True)
class Schedule:
    name: str
    users: tuple
    slots: tuple  # SlotPlan, position i is time slot i+1
    phase1_len: int
    phase2_len: int

    @property
    def n_slots(self) -> int:
        return self.phase1_len + self.phase2_len

    @property
    def phase1_slots(self) -> range:
        return range(1, self.phase1_len + 1)

    @property
    def phase2_slots(self) -> range:
        return range(self.phase1_len + 1, self.n_slots + 1)

    def slot(self, t: int) -> SlotPlan:
        return self.slots[t - 1]

    @property
    def symbol_plan(self) -> dict:
        """Map (phase-1 slot, transmitter) -> SymbolId."""
        return {
            (t, i): sym
            for t in self.phase1_slots
            for i, sym in self.slot(t).sends.items()
        }

    @property
    def symbols(self) -> tuple:
        return tuple(sorted(sym for (_, _), sym in self.symbol_plan.items()))

    def slot_of(self, sym: SymbolId) -> int:
        for t in self.phase1_slots:
            if sym in self.slot(t).sends.values():
                return t
        raise KeyError(sym)

    def desired_symbols(self, k: int) -> tuple:
        return tuple(s for s in self.symbols if s.dest == k)

    def own_symbols(self, k: int) -> tuple:
        return tuple(s for s in self.symbols if s.src == k)

    def listened_phase1(self, k: int) -> tuple:
        return tuple(t for t in self.phase1_slots if k in self.slot(t).destinations)


def _relay_slot(users) -> SlotPlan:
    return SlotPlan(frozenset(), frozenset(users), relay_listen=False)


def schedule_twic() -> Schedule:
    """Two user pairs (1<->3, 2<->4) exchanging one symbol each via the relay.

    Two learning slots, one relay slot: four symbols over three channel uses.
    """
    s31, s42 = SymbolId(3, 1), SymbolId(4, 2)
    s13, s24 = SymbolId(1, 3), SymbolId(2, 4)
    slots = (
        SlotPlan(frozenset({1, 2}), frozenset({3, 4}), True, {1: s31, 2: s42}),
        SlotPlan(frozenset({3, 4}), frozenset({1, 2}), True, {3: s13, 4: s24}),
        _relay_slot((1, 2, 3, 4)),
    )
    return Schedule("twic", (1, 2, 3, 4), slots, phase1_len=2, phase2_len=1)


def schedule_twxc() -> Schedule:
    """Users 1,2 exchange two symbols with each of users 3,4 (crossed flows).

    Four learning slots, one relay slot: eight symbols over five channel uses.
    """
    slots = (
        SlotPlan(frozenset({1, 2}), frozenset({3, 4}), True,
                 {1: SymbolId(3, 1), 2: SymbolId(3, 2)}),
        SlotPlan(frozenset({1, 2}), frozenset({3, 4}), True,
                 {1: SymbolId(4, 1), 2: SymbolId(4, 2)}),
        SlotPlan(frozenset({3, 4}), frozenset({1, 2}), True,
                 {3: SymbolId(1, 3), 4: SymbolId(1, 4)}),
        SlotPlan(frozenset({3, 4}), frozenset({1, 2}), True,
                 {3: SymbolId(2, 3), 4: SymbolId(2, 4)}),
        _relay_slot((1, 2, 3, 4)),
    )
    return Schedule("twxc", (1, 2, 3, 4), slots, phase1_len=4, phase2_len=1)


def schedule_case1(k1: int) -> Schedule:
    """Neutralization-only exchange: slot k delivers to user k from all others.

    k1 learning slots plus k1-2 relay slots carry k1*(k1-1) symbols, one per
    ordered user pair, targeting a rate of k1/2 symbols per channel use.
    """
    if k1 < 3:
        raise InvalidUserCount("this construction needs at least 3 users")
    users = tuple(range(1, k1 + 1))
    slots = []
    for k in users:
        srcs = frozenset(u for u in users if u != k)
        slots.append(SlotPlan(srcs, frozenset({k}), True,
                              {i: SymbolId(k, i) for i in sorted(srcs)}))
    slots.extend(_relay_slot(users) for _ in range(k1 - 2))
    return Schedule("case1", users, tuple(slots), phase1_len=k1, phase2_len=k1 - 2)


def cyclic_user(k: int, j: int, n_users: int) -> int:
    """User index k advanced by j positions around the cyclic user ordering."""
    return ((k - 1 + j) % n_users) + 1


def schedule_case2(k2: int) -> Schedule:
    """Alignment-and-neutralization exchange over a cyclic two-listener plan.

    In slot k users {k, next(k)} listen while the other k2-2 users each send
    one symbol for user k; next(k) stores the overheard equation for reuse.
    k2 learning slots plus k2-3 relay slots carry k2*(k2-2) symbols.
    """
    if k2 < 4:
        raise InvalidUserCount("this construction needs at least 4 users")
    users = tuple(range(1, k2 + 1))
    slots = []
    for k in users:
        dests = frozenset({k, cyclic_user(k, 1, k2)})
        srcs = tuple(cyclic_user(k, j, k2) for j in range(2, k2))
        slots.append(SlotPlan(frozenset(srcs), dests, True,
                              {i: SymbolId(k, i) for i in srcs}))
    slots.extend(_relay_slot(users) for _ in range(k2 - 3))
    return Schedule("case2", users, tuple(slots), phase1_len=k2, phase2_len=k2 - 3)
