"""Small shared helpers: confidence intervals and seed derivation."""

from __future__ import annotations

import hashlib
import math

# two-sided 99% normal quantile
Z_99 = 2.5758293035489004


def wilson_interval(successes: int, trials: int, z: float = Z_99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes outside [0, trials]")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
    return (max(0.0, center - half), min(1.0, center + half))


def derive_seed(master_seed: int, *parts) -> int:
    """Stable 64-bit seed from a master seed and a label path.

    Uses a keyed hash rather than Python's hash() so the stream is
    identical across processes, platforms, and worker counts.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master_seed)).encode())
    for part in parts:
        h.update(b"/")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "big")
