"""Per-level instrumentation of the peeling recursions.

Each recursion level records the density, the case taken, the peeled layer
sizes, the layer/core crossing weight and the telescoping coefficients
alpha/beta/gamma, so every structural inequality of the analysis can be
replayed from a finished run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class LevelRecord:
    level: int
    n: int
    rho: float
    case: str  # 'a', 'b' or 'c'
    a_ids: tuple  # original point ids of the peeled layer
    b_ids: tuple
    c_ids: tuple
    w_a: float  # intra-layer weight W_A
    w_ac: float  # layer/core crossing weight W_{A,C}
    alpha: Optional[float]
    beta: Optional[float]
    gamma: Optional[float]
    alg_value: float  # solver value on the subinstance rooted at this level

    @property
    def n_a(self) -> int:
        return len(self.a_ids)

    @property
    def n_b(self) -> int:
        return len(self.b_ids)

    @property
    def n_c(self) -> int:
        return len(self.c_ids)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "n": self.n,
            "rho": self.rho,
            "case": self.case,
            "n_a": self.n_a,
            "n_b": self.n_b,
            "n_c": self.n_c,
            "w_a": self.w_a,
            "w_ac": self.w_ac,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "alg_value": self.alg_value,
            "a_ids": list(self.a_ids),
            "b_ids": list(self.b_ids),
            "c_ids": list(self.c_ids),
        }


@dataclass
class RecursionTrace:
    levels: list = field(default_factory=list)
    value: float = 0.0

    @property
    def depth(self) -> int:
        return len(self.levels)

    def validate(self) -> None:
        assert self.levels, "trace must record at least one level"
        assert self.levels[-1].case in ("a", "b")
        assert all(rec.case == "c" for rec in self.levels[:-1])

    def to_json_lines(self) -> str:
        return "\n".join(json.dumps(rec.to_dict()) for rec in self.levels) + "\n"

    def case_sequence(self) -> str:
        return "".join(rec.case for rec in self.levels)
