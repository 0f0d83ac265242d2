"""Canonical byte encoding shared by hashing, persistence and replay.

One encoding, used everywhere a digest or bit-exact comparison is
involved: JSON with sorted keys, compact separators, ASCII-only.
"""

from __future__ import annotations

import json


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode(
        "utf-8"
    )
