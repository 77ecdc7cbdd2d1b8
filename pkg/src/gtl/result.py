from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Verdict:
    """A boolean answer with an optional witness and diagnostic message."""

    ok: bool
    witness: tuple = ()
    message: str = ""

    def __bool__(self):
        return self.ok
