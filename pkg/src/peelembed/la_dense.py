"""Dense-case linear arrangement solver.

Partitions the points into k = round(1/eps) parts and embeds the parts
consecutively on the line (ascending part id, ascending point id inside each
part).  Two modes: ``faithful`` enumerates a grid of pairwise crossing-weight
targets and asks the bounded-partition search for each cell; ``reduced`` runs
a direct local search over part assignments.  Faithful always also considers
the reduced candidate, so it never scores below it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import FaithfulGridTooLarge, InvalidSpec
from .metric import Metric, subset_stats
from .objectives import LinearArrangement, evaluate_la
from .partition_search import PartitionSpec, SearchBudget, search_partition

_INF = math.inf


@dataclass(frozen=True)
class DenseLaConfig:
    eps: float
    grid_mode: str = "reduced"  # 'reduced' or 'faithful'
    budget: SearchBudget = field(default_factory=SearchBudget)
    max_grid_cells: int = 2_000_000
    swap_sweeps: int = 40

    def __post_init__(self):
        if not 0.0 < self.eps <= 1.0:
            raise InvalidSpec(f"eps must be in (0, 1], got {self.eps}")
        if self.grid_mode not in ("reduced", "faithful"):
            raise InvalidSpec(f"unknown grid mode {self.grid_mode!r}")

    @property
    def k(self) -> int:
        return max(2, round(1.0 / self.eps))


def _embed_assignment(assignment) -> LinearArrangement:
    """Parts laid out consecutively: ascending part id, ascending point id."""
    n = len(assignment)
    order = sorted(range(n), key=lambda v: (assignment[v], v))
    return LinearArrangement.from_order(order)


def _swap_hill_climb(m: Metric, arr: LinearArrangement, sweeps: int) -> LinearArrangement:
    """Steepest-descent slot swaps until a local maximum (deterministic)."""
    pos = np.array(arr.position, dtype=float)
    value = evaluate_la(m, arr)
    for _ in range(sweeps):
        best = None  # (gain, i, j)
        for i in range(m.n):
            for j in range(i + 1, m.n):
                # Swapping slots of i and j only changes pairs touching them.
                delta = 0.0
                gi = np.abs(pos - pos[j]) - np.abs(pos - pos[i])
                gj = np.abs(pos - pos[i]) - np.abs(pos - pos[j])
                delta += float(m.dist[i] @ gi) + float(m.dist[j] @ gj)
                delta -= 2.0 * m.dist[i, j] * (gi[j])  # i-j pair counted twice
                if best is None or delta > best[0] + 1e-12:
                    best = (delta, i, j)
        if best is None or best[0] <= 1e-12:
            break
        _, i, j = best
        pos[i], pos[j] = pos[j], pos[i]
        value += best[0]
    return LinearArrangement.from_positions(int(p) for p in pos)


def _better(value, arr, best):
    """Deterministic argmax: larger value, ties to lexicographically smaller."""
    if best is None:
        return True
    bv, barr = best
    if value > bv + 1e-12:
        return True
    return abs(value - bv) <= 1e-12 and arr.position < barr.position


def _solve_reduced(m: Metric, cfg: DenseLaConfig, seed: int):
    n, k = m.n, cfg.k
    best = None
    for cand in (
        LinearArrangement.from_order(range(n)),
        _swap_hill_climb(m, LinearArrangement.from_order(range(n)), cfg.swap_sweeps),
    ):
        value = evaluate_la(m, cand)
        if _better(value, cand, best):
            best = (value, cand)

    seeds = np.random.SeedSequence(seed).spawn(cfg.budget.restarts)
    for ss in seeds:
        rng = np.random.default_rng(ss)
        assign = rng.integers(0, k, size=n)
        arr = _embed_assignment(assign)
        value = evaluate_la(m, arr)
        for _ in range(cfg.budget.moves(n)):
            move = None  # (gain, point, target)
            for p in range(n):
                a = int(assign[p])
                for b in range(k):
                    if b == a:
                        continue
                    assign[p] = b
                    cand_val = evaluate_la(m, _embed_assignment(assign))
                    assign[p] = a
                    gain = cand_val - value
                    if move is None or gain > move[0] + 1e-12:
                        move = (gain, p, b)
            if move is None or move[0] <= 1e-12:
                break
            _, p, b = move
            assign[p] = b
            value += move[0]
        arr = _swap_hill_climb(m, _embed_assignment(assign), cfg.swap_sweeps)
        value = evaluate_la(m, arr)
        if _better(value, arr, best):
            best = (value, arr)
    return best


def _faithful_size_counts(n: int, eps: float, k: int) -> Optional[list]:
    """Exact part sizes: floor(eps * n) each, remainder folded into the last."""
    base = int(math.floor(eps * n))
    counts = [base] * (k - 1)
    last = n - base * (k - 1)
    if base < 0 or last < 0:
        return None
    counts.append(last)
    return counts


def _solve_faithful(m: Metric, cfg: DenseLaConfig, seed: int, best):
    n, k = m.n, cfg.k
    eps = cfg.eps
    eps_err = eps**9
    diam = m.diameter()
    if diam <= 0.0:
        return best
    rho = subset_stats(m, range(n)).density

    counts = _faithful_size_counts(n, eps, k)
    if counts is None:
        return best
    size_bounds = [(c / n, c / n) for c in counts]

    pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
    levels = int(math.floor(1.0 / eps**7 + 1e-9)) + 1  # grid values 0..1/eps^7
    if levels ** len(pairs) > cfg.max_grid_cells:
        raise FaithfulGridTooLarge(
            f"{levels}^{len(pairs)} grid cells exceed the cap {cfg.max_grid_cells}"
        )

    seen = {}
    for cell in itertools.product(range(levels), repeat=len(pairs)):
        mu = [i * eps**9 for i in cell]
        # Crossing weights cannot sum past the total weight fraction rho.
        if sum(mu) - len(pairs) * eps_err > rho + 1e-12:
            continue
        wb = [[(0.0, _INF)] * k for _ in range(k)]
        for (a, b), target in zip(pairs, mu):
            wb[a][b] = wb[b][a] = (target, target)
        spec = PartitionSpec.build(k, size_bounds=size_bounds, weight_bounds=wb)
        part = search_partition(m, spec, eps_err=eps_err, budget=cfg.budget, seed=seed)
        if part is None or part.assignment in seen:
            continue
        seen[part.assignment] = True
        arr = _embed_assignment(part.assignment)
        value = evaluate_la(m, arr)
        if _better(value, arr, best):
            best = (value, arr)
    return best


def solve_la_dense(m: Metric, cfg: DenseLaConfig, seed: int = 0) -> LinearArrangement:
    """Best arrangement found for a dense instance (identity when n < k)."""
    n = m.n
    if n == 1:
        return LinearArrangement.from_order([0])
    if n < cfg.k or m.diameter() <= 0.0:
        return LinearArrangement.from_order(range(n))
    best = _solve_reduced(m, cfg, seed)
    if cfg.grid_mode == "faithful":
        best = _solve_faithful(m, cfg, seed, best)
    return best[1]
