"""Runtime guards. Exceeding one is a distinct outcome, never a theorem failure."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .exact import as_natural


@dataclass(frozen=True)
class Limits:
    search_cap: int = 100_000
    max_window: int = 5_000_000
    max_iterations: int = 1_000_000
    max_bits: int = 1_000_000

    @classmethod
    def from_dict(cls, d: dict | None) -> "Limits":
        if not d:
            return cls()
        return cls(**{k: as_natural(v) for k, v in d.items() if k in cls.__dataclass_fields__})

    def to_dict(self) -> dict:
        return {k: str(v) for k, v in asdict(self).items()}


DEFAULT_LIMITS = Limits()
