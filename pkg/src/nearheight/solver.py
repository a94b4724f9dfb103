"""Backward-induction solver for height-bounded optimal binary search trees.

Stage nu places key k_nu on a level; states are rightmost-path bit masks.
Two engines produce bit-identical results: a dict-based reference pass and
a numpy-vectorized pass for large n. Both use exact arithmetic and break
value ties toward the smallest level.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import inf
from typing import List, Tuple, Union

import numpy as np

from .instance import (
    DecisionSequence,
    External,
    Node,
    ProblemInstance,
    build_tree_from_decisions,
    format_weight,
    h_min,
    tree_to_obj,
    weighted_path_length,
)
from . import states as st

CostValue = Union[Fraction, float]  # Fraction, or math.inf for dead states

INFINITY = inf

_FAST_ENGINE_MIN_N = 80
_FAST_MAX_WIDTH = 20  # full-domain tables need 2^h_max slots
_INT_SENTINEL = 1 << 62


class InfeasibleHeightError(ValueError):
    """No tree with the requested height bound exists."""


def gap_level(prev_key_level: int, cur_key_level: int) -> int:
    """Level of the gap between two adjacent keys: one below the deeper."""
    if prev_key_level < 0 or cur_key_level < 0:
        raise ValueError("levels must be nonnegative")
    if prev_key_level == cur_key_level:
        raise ValueError("adjacent keys cannot share a level")
    return 1 + max(prev_key_level, cur_key_level)


def stage_cost(inst: ProblemInstance, nu: int, s: int, a: int) -> Fraction:
    """(1 + max(precdec(s), a)) * alpha_{nu-1} + (a+1) * beta_nu."""
    if not st.is_feasible(s, a):
        raise ValueError(f"decision {a} infeasible in state {bin(s)}")
    return (1 + max(st.precdec(s), a)) * inst.alpha[nu - 1] + (a + 1) * inst.beta[nu - 1]


def terminal_cost(inst: ProblemInstance, s: int) -> CostValue:
    """(1 + precdec(s)) * alpha_n for a valid final rightmost path, inf else."""
    if st.is_terminal_valid(s):
        return (1 + st.precdec(s)) * inst.alpha[inst.n]
    return INFINITY


@dataclass
class StageTables:
    """Value and policy maps over the reachable states of every stage."""

    h_max: int
    sets: st.StageSets
    values: List[dict]  # index nu-1, nu = 1..n+1: state -> CostValue
    policies: List[dict]  # index nu-1, nu = 1..n: state -> level (finite V only)
    relaxations: int = 0


@dataclass
class Solution:
    cost: Fraction
    decisions: DecisionSequence
    tree: Node
    h_max: int

    def to_obj(self) -> dict:
        n = len(self.decisions)
        return {
            "wpl": format_weight(self.cost),
            "height": _tree_height_or_zero(self.tree),
            "h_min": h_min(n),
            "h_max": self.h_max,
            "decisions": list(self.decisions.levels),
            "tree": tree_to_obj(self.tree),
        }


def solution_from_obj(obj: dict) -> "Solution":
    """Rebuild a Solution from its JSON object form."""
    from .instance import parse_weight, tree_from_obj

    return Solution(
        cost=parse_weight(obj["wpl"]),
        decisions=DecisionSequence(
            levels=tuple(obj["decisions"]), h_max=max(obj["h_max"], 1)
        ),
        tree=tree_from_obj(obj["tree"]),
        h_max=obj["h_max"],
    )


def _tree_height_or_zero(tree: Node) -> int:
    from .instance import tree_height

    return tree_height(tree)


def backward_pass(inst: ProblemInstance, h_max: int) -> StageTables:
    """Solve the Bellman equation over all reachable states, stage n down
    to 1. Dead states keep V = inf and no policy entry."""
    inst.require_valid()
    n = inst.n
    if n < 1:
        raise ValueError("backward_pass needs n >= 1")
    if h_max < h_min(n):
        raise ValueError(f"h_max {h_max} below h_min({n}) = {h_min(n)}")
    sets = st.StageSets(n, h_max)

    # exact integer arithmetic over the common denominator; None marks inf
    denom = inst.common_denominator()
    alpha_i = [int(a * denom) for a in inst.alpha]
    beta_i = [int(b * denom) for b in inst.beta]

    values: List[dict] = [None] * (n + 1)
    policies: List[dict] = [None] * n
    v_next = {
        s: (1 + st.precdec(s)) * alpha_i[n] if st.is_terminal_valid(s) else None
        for s in sets.states(n + 1)
    }
    values[n] = v_next
    relaxations = 0
    for nu in range(n, 0, -1):
        alpha = alpha_i[nu - 1]
        beta = beta_i[nu - 1]
        v_cur: dict = {}
        pi_cur: dict = {}
        for s in sets.states(nu):
            best = None
            best_a = None
            pd = st.precdec(s)
            for a in st.feasible_decisions(s, h_max):
                relaxations += 1
                cont = v_next[st.transition(s, a)]
                if cont is None:
                    continue
                cand = (1 + max(pd, a)) * alpha + (a + 1) * beta + cont
                if best is None or cand < best:
                    best = cand
                    best_a = a
            v_cur[s] = best
            if best_a is not None:
                pi_cur[s] = best_a
        values[nu - 1] = v_cur
        policies[nu - 1] = pi_cur
        v_next = v_cur
    for table in values:
        for s, v in table.items():
            table[s] = INFINITY if v is None else Fraction(v, denom)
    return StageTables(
        h_max=h_max, sets=sets, values=values, policies=policies, relaxations=relaxations
    )


def forward_pass(tables: StageTables) -> Tuple[CostValue, DecisionSequence]:
    """Walk the stored policy from the all-zero state, collecting decisions."""
    n = len(tables.policies)
    s = st.initial_state(tables.h_max)
    cost = tables.values[0][s]
    if cost == INFINITY:
        raise InfeasibleHeightError("no feasible tree within the height bound")
    levels = []
    for nu in range(1, n + 1):
        a = tables.policies[nu - 1][s]
        levels.append(a)
        s = st.transition(s, a)
    return cost, DecisionSequence(levels=tuple(levels), h_max=tables.h_max)


# ---------------------------------------------------------------------------
# Vectorized engine


class _PairTable:
    """All feasible (state, decision) pairs over the full 2^h_max domain,
    grouped by state in ascending decision order."""

    _cache = {}

    def __init__(self, h_max: int):
        size = 1 << h_max
        src, lev, dst, gap_coef = [], [], [], []
        for s in range(size):
            pd = s.bit_length() - 1 if s else 0
            for a in range(h_max):
                if st.is_feasible(s, a):
                    src.append(s)
                    lev.append(a)
                    dst.append((s & ((1 << a) - 1)) | (1 << a))
                    gap_coef.append(1 + max(pd, a))
        self.src = np.asarray(src, dtype=np.int64)
        self.lev = np.asarray(lev, dtype=np.int64)
        self.dst = np.asarray(dst, dtype=np.int64)
        self.gap_coef = np.asarray(gap_coef, dtype=np.int64)
        self.key_coef = self.lev + 1
        counts = np.zeros(size, dtype=np.int64)
        np.add.at(counts, self.src, 1)
        self.counts = counts
        self.offsets = np.concatenate(([0], np.cumsum(counts)))

    @classmethod
    def get(cls, h_max: int) -> "_PairTable":
        tab = cls._cache.get(h_max)
        if tab is None:
            tab = cls._cache[h_max] = _PairTable(h_max)
        return tab


def _fast_backward_forward(
    inst: ProblemInstance, h_max: int
) -> Tuple[Fraction, DecisionSequence, int]:
    """Vectorized Algorithm-1 equivalent on integer-scaled weights.

    Infinity is tracked with a guarded sentinel strictly above every
    attainable finite cost; values are clamped to it each stage so the
    sentinel never overflows int64.
    """
    n = inst.n
    if h_max > _FAST_MAX_WIDTH:
        raise OverflowError("state domain too wide for the vectorized engine")
    denom = inst.common_denominator()
    alpha_i = [int(a * denom) for a in inst.alpha]
    beta_i = [int(b * denom) for b in inst.beta]
    if (h_max + 1) * (sum(alpha_i) + sum(beta_i)) >= _INT_SENTINEL // 2:
        raise OverflowError("weights too large for the vectorized engine")

    size = 1 << h_max
    min_keys, max_keys, _deg = st.capacity_profile(h_max)
    mk = np.asarray(min_keys, dtype=np.int64)
    xk = np.asarray(max_keys, dtype=np.int64)
    pairs = _PairTable.get(h_max)
    pair_src = pairs.src
    all_states = np.arange(size, dtype=np.int64)

    # terminal values over S_{n+1}
    reach = (mk <= n) & (n <= xk)
    tv = (all_states != 0) & ((all_states & (all_states + 1)) == 0)
    pd = np.maximum(
        np.asarray([s.bit_length() - 1 for s in range(size)], dtype=np.int64), 0
    )
    v = np.where(reach & tv, (pd + 1) * alpha_i[n], _INT_SENTINEL)

    policies = np.full((n, size), -1, dtype=np.int8)
    relaxations = 0
    pos_big = np.int64(1) << 40
    for nu in range(n, 0, -1):
        m = nu - 1
        reach = (mk <= m) & (m <= xk)
        srcs = np.flatnonzero(reach)
        sizes = pairs.counts[srcs]
        nz = sizes > 0
        srcs_nz = srcs[nz]
        sizes_nz = sizes[nz]
        sel = np.repeat(pairs.offsets[srcs_nz], sizes_nz) + _ranges(sizes_nz)
        relaxations += len(sel)
        cand = (
            pairs.gap_coef[sel] * alpha_i[nu - 1]
            + pairs.key_coef[sel] * beta_i[nu - 1]
            + v[pairs.dst[sel]]
        )
        starts = np.concatenate(([0], np.cumsum(sizes_nz)))[:-1]
        group_min = np.minimum.reduceat(cand, starts) if len(cand) else cand
        finite = group_min < _INT_SENTINEL
        # smallest level attaining the minimum: first matching pair per group
        posm = np.where(
            cand == np.repeat(group_min, sizes_nz), _ranges_pos(len(cand)), pos_big
        )
        first = np.minimum.reduceat(posm, starts) if len(cand) else posm
        v = np.full(size, _INT_SENTINEL, dtype=np.int64)
        v[srcs_nz] = np.minimum(group_min, _INT_SENTINEL)
        pol = policies[nu - 1]
        fin_states = srcs_nz[finite]
        pol[fin_states] = pairs.lev[sel][first[finite]].astype(np.int8)

    f_int = int(v[0])
    if f_int >= _INT_SENTINEL:
        raise InfeasibleHeightError("no feasible tree within the height bound")
    levels = []
    s = 0
    for nu in range(1, n + 1):
        a = int(policies[nu - 1][s])
        if a < 0:
            raise InfeasibleHeightError("policy undefined along the optimal path")
        levels.append(a)
        s = st.transition(s, a)
    return (
        Fraction(f_int, denom),
        DecisionSequence(levels=tuple(levels), h_max=h_max),
        relaxations,
    )


def _ranges(sizes: np.ndarray) -> np.ndarray:
    """Concatenated arange(k) for each k in sizes."""
    total = int(sizes.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    out = np.ones(total, dtype=np.int64)
    ends = np.cumsum(sizes)[:-1]
    out[0] = 0
    out[ends] = 1 - sizes[:-1]
    return np.cumsum(out)


def _ranges_pos(length: int) -> np.ndarray:
    return np.arange(length, dtype=np.int64)


# ---------------------------------------------------------------------------
# Entry points


def solve(inst: ProblemInstance, delta: int = 0, engine: str = "auto") -> Solution:
    """Optimal tree with height at most h_min(n) + delta."""
    inst.require_valid()
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    n = inst.n
    h_max = h_min(n) + delta
    if n == 0:
        tree = External(gap=0, level=0)
        return Solution(
            cost=Fraction(0),
            decisions=DecisionSequence(levels=(), h_max=max(h_max, 1)),
            tree=tree,
            h_max=h_max,
        )

    if engine == "auto":
        engine = "numpy" if n > _FAST_ENGINE_MIN_N and h_max <= _FAST_MAX_WIDTH else "python"
    if engine == "numpy":
        try:
            cost, ds, _relax = _fast_backward_forward(inst, h_max)
        except OverflowError:
            engine = "python"
    if engine == "python":
        tables = backward_pass(inst, h_max)
        cost, ds = forward_pass(tables)
    elif engine != "numpy":
        raise ValueError(f"unknown engine {engine!r}")

    tree = build_tree_from_decisions(ds, n)
    assert weighted_path_length(tree, inst) == cost
    return Solution(cost=cost, decisions=ds, tree=tree, h_max=h_max)


def solve_with_max_height(
    inst: ProblemInstance, max_height: int, engine: str = "auto"
) -> Solution:
    """Like solve, but with an absolute height cap instead of slack."""
    inst.require_valid()
    hm = h_min(inst.n)
    if max_height < hm:
        raise InfeasibleHeightError(
            f"no tree of height <= {max_height} exists for n = {inst.n} "
            f"(h_min = {hm})"
        )
    return solve(inst, delta=max_height - hm, engine=engine)
