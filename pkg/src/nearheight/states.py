"""Rightmost-path occupancy states encoded as fixed-width bit masks.

Bit i of a state records whether level i of the rightmost path currently
holds a key (level 0 = least significant bit).
"""

from __future__ import annotations

from typing import List

from .instance import h_min

MAX_WIDTH = 62


class WidthError(ValueError):
    """State width outside 1..MAX_WIDTH."""


def _check_width(h_max: int):
    if not 1 <= h_max <= MAX_WIDTH:
        raise WidthError(f"h_max must be in 1..{MAX_WIDTH}, got {h_max}")


def initial_state(h_max: int) -> int:
    """The all-zero state: no levels occupied yet."""
    _check_width(h_max)
    return 0


def is_feasible(s: int, a: int) -> bool:
    """A key may go on level a iff the level is free and every occupied
    level above a forms a contiguous run starting at a+1."""
    if (s >> a) & 1:
        return False
    high = s >> (a + 1)
    return (high & (high + 1)) == 0


def feasible_decisions(s: int, h_max: int) -> List[int]:
    """All feasible levels for state s, ascending."""
    _check_width(h_max)
    return [a for a in range(h_max) if is_feasible(s, a)]


def transition(s: int, a: int) -> int:
    """Occupy level a; levels above a become unoccupied."""
    if not is_feasible(s, a):
        raise ValueError(f"decision {a} infeasible in state {bin(s)}")
    return (s & ((1 << a) - 1)) | (1 << a)


def precdec(s: int) -> int:
    """Level of the previously placed key: highest set bit (0 for the
    all-zero state)."""
    return s.bit_length() - 1 if s else 0


def is_terminal_valid(s: int) -> bool:
    """True iff the set bits form a contiguous prefix from level 0."""
    return s != 0 and (s & (s + 1)) == 0


def state_to_bits(s: int, h_max: int) -> str:
    """Render as a bit string from level 0 upward, e.g. '101'."""
    _check_width(h_max)
    return "".join("1" if (s >> i) & 1 else "0" for i in range(h_max))


def successors(states, h_max: int):
    """Sorted list of states reachable in one step from any state in
    `states`."""
    out = set()
    for s in states:
        for a in range(h_max):
            if is_feasible(s, a):
                out.add((s & ((1 << a) - 1)) | (1 << a))
    return sorted(out)


def enumerate_reachable(n: int, h_max: int) -> List[List[int]]:
    """State sets S_1..S_{n+1} reachable from the all-zero state.

    S_{nu+1} is the image of S_nu under all feasible transitions. Returned
    fully materialized; use StageSets for large n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if h_max < h_min(n):
        raise ValueError(f"h_max {h_max} below h_min({n}) = {h_min(n)}")
    _check_width(h_max)
    sets = StageSets(n, h_max)
    return [list(sets.states(nu)) for nu in range(1, n + 2)]


_PROFILE_CACHE = {}


def capacity_profile(h_max: int):
    """Per-state key-count interval and decision degree, for all 2^h_max states.

    A state s is reachable with m keys placed iff
    popcount(s) <= m <= sum over set bits i of 2^(h_max-1-i):
    the lower end places one key per occupied rightmost-path level, the
    upper end additionally fills every left subtree hanging off that path.
    Returns (min_keys, max_keys, degree) as lists indexed by state.
    """
    _check_width(h_max)
    cached = _PROFILE_CACHE.get(h_max)
    if cached is not None:
        return cached
    size = 1 << h_max
    min_keys = [0] * size
    max_keys = [0] * size
    degree = [0] * size
    for s in range(size):
        min_keys[s] = bin(s).count("1")
        max_keys[s] = sum(1 << (h_max - 1 - i) for i in range(h_max) if (s >> i) & 1)
        degree[s] = sum(1 for a in range(h_max) if is_feasible(s, a))
    _PROFILE_CACHE[h_max] = (min_keys, max_keys, degree)
    return min_keys, max_keys, degree


def stage_counts(n: int, h_max: int):
    """(|S_nu| for nu=1..n+1, sum |D(s)| over S_nu for nu=1..n) in
    O(2^h_max + n) via the capacity characterization."""
    if n < 1:
        raise ValueError("n must be >= 1")
    min_keys, max_keys, degree = capacity_profile(h_max)
    size_diff = [0] * (n + 2)
    deg_diff = [0] * (n + 2)
    for s in range(1 << h_max):
        lo = min_keys[s]
        hi = min(max_keys[s], n)
        if lo > hi:
            continue
        size_diff[lo] += 1
        size_diff[hi + 1] -= 1
        deg_diff[lo] += degree[s]
        deg_diff[hi + 1] -= degree[s]
    sizes = []
    sums = []
    acc_sz = 0
    acc_dg = 0
    for m in range(n + 1):
        acc_sz += size_diff[m]
        acc_dg += deg_diff[m]
        sizes.append(acc_sz)
        if m < n:
            sums.append(acc_dg)
    return sizes, sums


class StageSets:
    """Per-stage reachable state sets with cycle compression.

    The set map S -> successors(S) is deterministic on a finite domain, so
    the stage sequence is eventually periodic; only distinct sets are stored.
    """

    def __init__(self, n: int, h_max: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        _check_width(h_max)
        self.n = n
        self.h_max = h_max
        self._sets: List[list] = []
        self._cycle_start = None  # 0-based index into _sets
        seen = {}
        cur = [0]
        for stage0 in range(n + 1):  # stages 1..n+1, 0-based
            key = tuple(cur)
            if key in seen:
                self._cycle_start = seen[key]
                break
            seen[key] = stage0
            self._sets.append(cur)
            if stage0 == n:
                break
            cur = successors(cur, h_max)

    def _index(self, nu: int) -> int:
        if not 1 <= nu <= self.n + 1:
            raise ValueError(f"stage {nu} outside 1..{self.n + 1}")
        i = nu - 1
        if i < len(self._sets):
            return i
        cs = self._cycle_start
        period = len(self._sets) - cs
        return cs + (i - cs) % period

    def states(self, nu: int) -> list:
        """Sorted state list of S_nu."""
        return self._sets[self._index(nu)]

    def distinct_indices(self):
        """Map stage nu -> index into the distinct-set store."""
        return {nu: self._index(nu) for nu in range(1, self.n + 2)}

    def state_counts(self) -> List[int]:
        """|S_nu| for nu = 1..n+1."""
        sizes = [len(s) for s in self._sets]
        return [sizes[self._index(nu)] for nu in range(1, self.n + 2)]

    def decision_sums(self) -> List[int]:
        """Sum of |D(s)| over s in S_nu, for nu = 1..n (the per-stage
        relaxation counts)."""
        sums = [
            sum(len(feasible_decisions(s, self.h_max)) for s in st)
            for st in self._sets
        ]
        return [sums[self._index(nu)] for nu in range(1, self.n + 1)]
