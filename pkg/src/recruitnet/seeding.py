"""Stable derivation of child RNG seeds from a parent seed.

Every stochastic stage (graph generation, GA runs, cascade repetitions,
worker registration, recruitment draws) gets its own derived seed so that
adding repetitions or grid points never perturbs the randomness of the
cells that were already there.
"""

from __future__ import annotations

import hashlib

_SEP = b"\x1f"


def derive_seed(*parts: int | float | str) -> int:
    """Hash a tuple of labels/indices into a stable 64-bit seed.

    The mapping depends only on the values passed, not on interpreter
    hash randomization, so results are reproducible across processes.
    """
    digest = hashlib.sha256()
    for part in parts:
        digest.update(type(part).__name__.encode())
        digest.update(_SEP)
        digest.update(repr(part).encode())
        digest.update(_SEP)
    return int.from_bytes(digest.digest()[:8], "big")
