"""Relay precoder synthesis for the two-phase schedules.

The relays shape phase-2 transmissions so that every user only receives
signal components it can resolve: symbols it wants, symbols it previously
sent (cancelable self-interference), and interference in exactly the shape
it overheard in phase 1 (cancelable by subtracting the stored equation).
Everything else is neutralized, i.e. forced to a zero end-to-end
coefficient.

Two precoder layouts exist. The four-user examples use one beamforming
vector per forwarded symbol (``per_symbol``). The general constructions use
one M_l x M_l matrix per (relay, phase-2 slot, phase-1 slot) triple
(``per_block``); each stacked matrix is found by solving a linear system in
its vectorized form, where the end-to-end coefficient of symbol s via relay
l is the Kronecker row (uplink^T x downlink) applied to vec(V).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet
from .linalg import (
    DEFAULT_TOL,
    InconsistentSystem,
    Tolerance,
    null_space,
    solve_least_norm,
    unvec,
)
from .scheduler import (
    Schedule,
    SymbolId,
    cyclic_user,
    schedule_case1,
    schedule_case2,
    schedule_twic,
    schedule_twxc,
)


class SynthesisFailed(Exception):
    """A precoder constraint system was singular (probability-zero event)."""


class AntennaDeficit(Exception):
    """The relays do not have enough antennas to satisfy the constraints."""


@dataclass
class PrecoderSet:
    """Synthesized relay precoders plus the recomputed worst constraint violation.

    per_symbol maps (phase-2 slot, SymbolId) -> beam vector; per_block maps
    (relay, phase-2 slot, phase-1 slot) -> matrix. Null-space precoders are
    unit norm; matching-constrained ones keep the scale the constraints pin.
    """

    scenario: str
    mode: str  # "per_symbol" | "per_block"
    per_symbol: dict = field(default_factory=dict)
    per_block: dict = field(default_factory=dict)
    residual: float = 0.0


def _twic_roles(sched: Schedule, sym: SymbolId) -> tuple[int, int, int]:
    """Phase-1 slot, victim user (neutralize), partner user (overheard)."""
    t1 = sched.slot_of(sym)
    plan = sched.slot(t1)
    (victim,) = plan.sources - {sym.src}
    (partner,) = plan.destinations - {sym.dest}
    return t1, victim, partner


def _require_two_antenna_relay(ch: ChannelSet, scenario: str) -> None:
    if ch.config.relay_antennas != (2,):
        raise AntennaDeficit(f"{scenario} needs a single relay with 2 antennas")


def design_twic(ch: ChannelSet, tol: Tolerance = DEFAULT_TOL) -> PrecoderSet:
    """Per-symbol beams for the pairwise exchange: null the one victim user.

    Each symbol is unmanageable interference to exactly one user (the one
    that neither sent nor overheard it), so its unit-norm beam is drawn from
    the null space of that user's downlink row in the relay slot.
    """
    _require_two_antenna_relay(ch, "twic")
    sched = schedule_twic()
    t2 = sched.phase1_len + 1
    p = PrecoderSet("twic", "per_symbol")
    for sym in sched.symbols:
        _, victim, _ = _twic_roles(sched, sym)
        basis = null_space(ch.h_dn(victim, 1, t2)[None, :], tol)
        if basis.shape[1] == 0:
            raise SynthesisFailed(f"no null direction for symbol {sym}")
        p.per_symbol[(t2, sym)] = basis[:, 0]
    p.residual = verify_constraints(p, ch, sched)
    return p


def design_twxc(ch: ChannelSet, tol: Tolerance = DEFAULT_TOL) -> PrecoderSet:
    """Per-symbol beams for the crossed exchange: null one user, match one.

    Each beam solves a 2x2 system: zero coefficient at the victim user and,
    at the partner that overheard the symbol in phase 1, a coefficient equal
    to the phase-1 channel so the relayed interference replays the stored
    equation exactly.
    """
    _require_two_antenna_relay(ch, "twxc")
    sched = schedule_twxc()
    t2 = sched.phase1_len + 1
    p = PrecoderSet("twxc", "per_symbol")
    for sym in sched.symbols:
        t1, victim, partner = _twic_roles(sched, sym)
        a = np.vstack([ch.h_dn(victim, 1, t2), ch.h_dn(partner, 1, t2)])
        b = np.array([0.0, ch.h(partner, sym.src, t1)], dtype=complex)
        try:
            p.per_symbol[(t2, sym)] = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise SynthesisFailed(f"singular constraint pair for {sym}") from exc
    p.residual = verify_constraints(p, ch, sched)
    return p


def _kron_row(ch: ChannelSet, j: int, i: int, t: int, k: int) -> np.ndarray:
    """Stacked effective-channel row for (receiver j, transmitter i) across relays.

    Segment l equals uplink(l,i,k)^T kron downlink(j,l,t); applied to the
    stacked vec'd precoders it evaluates the end-to-end coefficient
    sum_l downlink @ V_l @ uplink.
    """
    return np.concatenate(
        [np.kron(ch.h_up(ell, i, k), ch.h_dn(j, ell, t))
         for ell in range(1, ch.config.n_relays + 1)]
    )


def build_stacked_constraints_case1(ch: ChannelSet, k1: int, t: int, k: int) -> np.ndarray:
    """Neutralization constraint matrix for forwarding slot-k signals in slot t.

    One row per (transmitter i in slot k, protected receiver j) with j
    neither the slot's destination nor the transmitter itself; rows are
    ordered lexicographically in (i, j). Degenerates to zero rows for k1=2,
    where every receiver is either the destination or the transmitter.
    """
    users = range(1, k1 + 1)
    rows = [
        _kron_row(ch, j, i, t, k)
        for i in users if i != k
        for j in users
        if j != k and j != i
    ]
    width = sum(m * m for m in ch.config.relay_antennas)
    if not rows:
        return np.zeros((0, width), dtype=complex)
    return np.vstack(rows)


def _unstack_blocks(p: PrecoderSet, f: np.ndarray, antennas, t: int, k: int) -> None:
    pos = 0
    for ell, m in enumerate(antennas, start=1):
        p.per_block[(ell, t, k)] = unvec(f[pos:pos + m * m], m, m)
        pos += m * m


def design_case1(ch: ChannelSet, k1: int, tol: Tolerance = DEFAULT_TOL) -> PrecoderSet:
    """Block precoders that neutralize all unmanageable interference.

    For every (phase-2 slot t, phase-1 slot k) the stacked vec'd precoder is
    a unit-norm vector from the null space of the constraint matrix; this
    exists almost surely iff sum of squared antenna counts exceeds the
    (k1-1)(k1-2) constraint count.
    """
    needed = (k1 - 1) * (k1 - 2) + 1
    if ch.config.sum_antenna_sq < needed:
        raise AntennaDeficit(
            f"need sum of squared antennas >= {needed}, have {ch.config.sum_antenna_sq}"
        )
    sched = schedule_case1(k1)
    p = PrecoderSet("case1", "per_block")
    for t in sched.phase2_slots:
        for k in sched.phase1_slots:
            basis = null_space(build_stacked_constraints_case1(ch, k1, t, k), tol)
            if basis.shape[1] == 0:
                raise AntennaDeficit(f"constraints for slot pair ({t},{k}) leave no null space")
            _unstack_blocks(p, basis[:, 0], ch.config.relay_antennas, t, k)
    p.residual = verify_constraints(p, ch, sched)
    return p


def design_case2(ch: ChannelSet, k2: int, tol: Tolerance = DEFAULT_TOL) -> PrecoderSet:
    """Block precoders that jointly neutralize and align interference.

    For each forwarded symbol s(k, k_i) the system zeroes its coefficient at
    every user outside {k, next(k), k_i} and pins its coefficient at next(k)
    to the phase-1 channel next(k) overheard, so the relayed interference
    matches the stored equation. The minimum-norm solution keeps the
    precoders deterministic and bounded.
    """
    needed = (k2 - 2) ** 2
    if ch.config.sum_antenna_sq < needed:
        raise AntennaDeficit(
            f"need sum of squared antennas >= {needed}, have {ch.config.sum_antenna_sq}"
        )
    sched = schedule_case2(k2)
    p = PrecoderSet("case2", "per_block")
    for t in sched.phase2_slots:
        for k in sched.phase1_slots:
            nxt = cyclic_user(k, 1, k2)
            rows, rhs = [], []
            for j_off in range(2, k2):
                k_i = cyclic_user(k, j_off, k2)
                rows.append(_kron_row(ch, nxt, k_i, t, k))
                rhs.append(ch.h(nxt, k_i, k))
                for j in sched.users:
                    if j not in (k, nxt, k_i):
                        rows.append(_kron_row(ch, j, k_i, t, k))
                        rhs.append(0.0)
            try:
                f = solve_least_norm(np.vstack(rows), np.array(rhs, dtype=complex), tol)
            except InconsistentSystem as exc:
                raise AntennaDeficit(
                    f"alignment constraints for slot pair ({t},{k}) are infeasible"
                ) from exc
            _unstack_blocks(p, f, ch.config.relay_antennas, t, k)
    p.residual = verify_constraints(p, ch, sched)
    return p


def _block_coefficient(ch: ChannelSet, p: PrecoderSet, j: int, i: int, t: int, k: int) -> complex:
    """End-to-end coefficient of slot-k transmitter i at user j, via all relays."""
    return complex(sum(
        ch.h_dn(j, ell, t) @ p.per_block[(ell, t, k)] @ ch.h_up(ell, i, k)
        for ell in range(1, ch.config.n_relays + 1)
    ))


def verify_constraints(p: PrecoderSet, ch: ChannelSet, sched: Schedule) -> float:
    """Max absolute violation over all design constraints, recomputed from raw channels.

    Deliberately re-derives every coefficient with direct matrix products
    instead of the vectorized rows used during synthesis.
    """
    worst = 0.0
    if p.mode == "per_symbol":
        t2 = sched.phase1_len + 1
        for sym in sched.symbols:
            t1, victim, partner = _twic_roles(sched, sym)
            v = p.per_symbol[(t2, sym)]
            worst = max(worst, abs(complex(ch.h_dn(victim, 1, t2) @ v)))
            if p.scenario == "twxc":
                got = complex(ch.h_dn(partner, 1, t2) @ v)
                worst = max(worst, abs(got - ch.h(partner, sym.src, t1)))
        return worst
    k_users = len(sched.users)
    for t in sched.phase2_slots:
        for k in sched.phase1_slots:
            for i in sorted(sched.slot(k).sources):
                if p.scenario == "case1":
                    protected = [j for j in sched.users if j != k and j != i]
                    targets = {}
                else:
                    nxt = cyclic_user(k, 1, k_users)
                    protected = [j for j in sched.users if j not in (k, nxt, i)]
                    targets = {nxt: ch.h(nxt, i, k)}
                for j in protected:
                    worst = max(worst, abs(_block_coefficient(ch, p, j, i, t, k)))
                for j, want in targets.items():
                    worst = max(worst, abs(_block_coefficient(ch, p, j, i, t, k) - want))
    return worst
