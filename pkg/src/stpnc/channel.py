"""Seeded generation of the network's channel coefficients.

All links fade independently per time slot with CN(0,1) coefficients
(real and imaginary parts each of variance 1/2). Users and relays are
1-indexed throughout, matching the slot conventions of the schedules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def derive_trial_seed(seed: int, trial: int) -> int:
    """Mix a root seed with a trial index into a fresh 64-bit seed.

    SplitMix64 finalizer over seed + (trial+1)*gamma. Every step is a
    bijection mod 2**64, so distinct trials under the same root always get
    distinct seeds; Monte Carlo trials can run in parallel deterministically.
    """
    z = (seed + (trial + 1) * _SPLITMIX_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class NetworkConfig:
    """Static network description: K single-antenna users, one or more relays.

    relay_antennas holds the antenna count of each relay; power_P is the
    per-node transmit power budget and noise_var the receiver noise variance
    (0 selects the noiseless mode used for DoF verification).
    """

    K: int
    relay_antennas: tuple[int, ...]
    power_P: float = 1.0
    noise_var: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "relay_antennas", tuple(int(m) for m in self.relay_antennas))
        if self.K < 2:
            raise ValueError("need at least two users")
        if not self.relay_antennas or any(m < 1 for m in self.relay_antennas):
            raise ValueError("every relay needs at least one antenna")
        if self.power_P <= 0:
            raise ValueError("power_P must be positive")
        if self.noise_var < 0:
            raise ValueError("noise_var must be nonnegative")

    @property
    def n_relays(self) -> int:
        return len(self.relay_antennas)

    @property
    def sum_antenna_sq(self) -> int:
        return sum(m * m for m in self.relay_antennas)


@dataclass(frozen=True)
class ChannelSet:
    """All channel coefficients of one realization, indexed per link and slot.

    user_user[(k, i, t)]   scalar from user i to user k in slot t
    user_relay[(l, i, t)]  length-M_l uplink vector from user i to relay l
    relay_user[(k, l, t)]  length-M_l downlink row from relay l to user k
    """

    config: NetworkConfig
    slots: int
    user_user: dict = field(repr=False)
    user_relay: dict = field(repr=False)
    relay_user: dict = field(repr=False)

    def h(self, k: int, i: int, t: int) -> complex:
        return self.user_user[(k, i, t)]

    def h_up(self, ell: int, i: int, t: int) -> np.ndarray:
        return self.user_relay[(ell, i, t)]

    def h_dn(self, k: int, ell: int, t: int) -> np.ndarray:
        return self.relay_user[(k, ell, t)]


def _complex_pool(rng: np.random.Generator, n: int) -> np.ndarray:
    z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    # exact zeros are a probability-zero event but would break the model
    while True:
        bad = z == 0
        if not bad.any():
            return z
        z[bad] = (rng.standard_normal(bad.sum()) + 1j * rng.standard_normal(bad.sum())) / np.sqrt(2.0)


def draw_channels(cfg: NetworkConfig, slots: int, seed: int) -> ChannelSet:
    """Draw every coefficient for the given number of slots, deterministically.

    Coefficients are IID CN(0,1) across links and slots. The draw order is
    fixed (per slot: user-user pairs, then uplink vectors, then downlink
    rows), so identical (cfg, slots, seed) give bitwise-identical results.
    """
    if slots < 1:
        raise ValueError("need at least one slot")
    rng = np.random.default_rng(seed)
    K, antennas = cfg.K, cfg.relay_antennas
    n_uu = K * (K - 1)
    n_vec = sum(antennas) * K
    user_user: dict = {}
    user_relay: dict = {}
    relay_user: dict = {}
    for t in range(1, slots + 1):
        pool = _complex_pool(rng, n_uu + 2 * n_vec)
        pos = 0
        for k in range(1, K + 1):
            for i in range(1, K + 1):
                if i == k:
                    continue
                user_user[(k, i, t)] = complex(pool[pos])
                pos += 1
        for ell, m in enumerate(antennas, start=1):
            for i in range(1, K + 1):
                user_relay[(ell, i, t)] = pool[pos:pos + m].copy()
                pos += m
        for k in range(1, K + 1):
            for ell, m in enumerate(antennas, start=1):
                relay_user[(k, ell, t)] = pool[pos:pos + m].copy()
                pos += m
    return ChannelSet(cfg, slots, user_user, user_relay, relay_user)
