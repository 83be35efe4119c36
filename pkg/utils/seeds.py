"""Deterministic seed derivation."""

import hashlib


def derive_seed(*parts) -> int:
    """
    Derive a 64-bit seed from an ordered sequence of values.

    Used for per-slot and per-domain sub-seeds so results do not depend on
    the order in which parallel workers run.
    """
    payload = "\x1f".join(repr(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")
