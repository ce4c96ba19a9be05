"""Deterministic seed derivation for nested experiments.

Every random draw in a benchmark is made from a seed derived from the master
seed plus a structured key, so paired arms can consume identical targets and
identical cold-start fallbacks, and reruns are byte-identical. Hashing goes
through sha256 rather than hash() so results do not depend on PYTHONHASHSEED.
"""

import hashlib


def derive_seed(master_seed: int, *keys) -> int:
    """Map (master_seed, *keys) to a stable 64-bit seed.

    Keys may be ints or strings; the same tuple always yields the same seed.
    """
    payload = repr((int(master_seed),) + tuple(keys)).encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "little")
