"""Tolerance configuration shared by every module.

All tolerances are relative with a +1 absolute floor: a comparison against a
reference value ``r`` uses the absolute slack ``tol * (1 + |r|)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    # numerical clamps inside the decompositions
    hermitian: float = 1e-10
    psd: float = 1e-10
    polar_rank: float = 1e-12
    # comparison slacks for verification checks
    single: float = 1e-9
    chain: float = 1e-8
    equality: float = 1e-8
    positivity: float = 1e-9

    def slack(self, kind: str, reference: float) -> float:
        return getattr(self, kind) * (1.0 + abs(reference))

    def with_check_tol(self, value: float) -> "Tolerances":
        """Override every comparison slack at once (the CLI ``--tol`` flag)."""
        return replace(self, single=value, chain=value, equality=value, positivity=value)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


DEFAULT = Tolerances()
