"""Seeded Rayleigh-fading gain generation.

Gains are ``a_i = g_i * 10**(snr_db / 10)`` with ``g_i ~ Exp(1)`` (squared
magnitude of a unit-power Rayleigh coefficient). Each realization draws
from a Philox counter-based stream keyed by the seed, with the realization
index in the counter, so realization ``k`` is produced directly without
generating the ones before it.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["FadingConfig", "draw_gains", "unit_exponentials", "db_to_linear"]

_SEED_MASK = (1 << 64) - 1


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class FadingConfig:
    n_channels: int = 8
    mean_snr_db: float = 10.0
    seed: int = 0
    n_realizations: int = 1000

    def __post_init__(self):
        if int(self.n_channels) < 1:
            raise DomainError("n_channels", f"must be >= 1 (got {self.n_channels})")
        if int(self.n_realizations) < 1:
            raise DomainError("n_realizations", f"must be >= 1 (got {self.n_realizations})")
        if not np.isfinite(self.mean_snr_db):
            raise DomainError("mean_snr_db", "must be finite")
        if int(self.seed) < 0 or int(self.seed) > _SEED_MASK:
            raise DomainError("seed", "must fit in an unsigned 64-bit integer")


def unit_exponentials(seed, index, n):
    """``n`` Exp(1) draws for stream ``index`` under key ``seed``."""
    # word 0 of the counter advances inside a stream; word 1 selects it
    bitgen = np.random.Philox(key=int(seed) & _SEED_MASK, counter=[0, int(index), 0, 0])
    u = np.random.Generator(bitgen).random(n)
    return -np.log1p(-u)


def draw_gains(config, realization_index):
    k = int(realization_index)
    if not 0 <= k < config.n_realizations:
        raise DomainError(
            "realization_index",
            f"must be in [0, {config.n_realizations}) (got {realization_index})",
        )
    g = unit_exponentials(config.seed, k, config.n_channels)
    return g * float(db_to_linear(config.mean_snr_db))
