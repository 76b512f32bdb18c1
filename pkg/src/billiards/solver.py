"""Longest admissible trajectory: validation, exact search and heuristics.

The search space is the transition graph on ordered point pairs: a state is
``(visited, prev, cur)`` and the next vertex ``k`` is allowed iff the turn
``prev -> cur -> k`` is admissible. Only the last two vertices matter, which
is what makes the bitmask DFS exact.
"""

from __future__ import annotations

import enum
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import lcm
from typing import Optional, Sequence

from .configuration import Configuration, config_ref
from .geometry import RIGHT_ANGLE, AnglePolicy, turn_admissible

ORACLE_LIMIT = 10
BITSET_LIMIT = 64


class SolverError(ValueError):
    pass


class Status(str, enum.Enum):
    PROVED_OPTIMAL = "PROVED_OPTIMAL"
    BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Trajectory:
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if not idx:
            raise SolverError("a trajectory has at least one vertex")
        if len(set(idx)) != len(idx):
            raise SolverError("trajectory vertices must be distinct")

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def length(self) -> int:
        return len(self.indices)

    def reversed(self) -> "Trajectory":
        return Trajectory(self.indices[::-1])


@dataclass(frozen=True)
class Violation:
    position: int  # 1-based vertex position along the trajectory
    reason: str  # "duplicate" | "bad angle"


@dataclass(frozen=True)
class Validation:
    ok: bool
    violation: Optional[Violation] = None

    def __bool__(self) -> bool:
        return self.ok


def validate_trajectory(config: Configuration, indices: Sequence[int],
                        policy: AnglePolicy = RIGHT_ANGLE) -> Validation:
    """Check distinctness and every interior turn; report the first violation.

    Positions are 1-based, so a bad turn at the middle of a 3-vertex path is
    reported at position 2.
    """
    n = len(config)
    for i in indices:
        if not 0 <= i < n:
            raise IndexError(f"point index {i} out of range for {n} points")
    seen = set()
    for pos, i in enumerate(indices, start=1):
        if i in seen:
            return Validation(False, Violation(pos, "duplicate"))
        seen.add(i)
    pts = config.points
    for pos in range(1, len(indices) - 1):
        a, b, c = indices[pos - 1], indices[pos], indices[pos + 1]
        if not turn_admissible(pts[a], pts[b], pts[c], policy):
            return Validation(False, Violation(pos + 1, "bad angle"))
    return Validation(True)


@dataclass
class Budget:
    nodes: Optional[int] = None
    time_ms: Optional[int] = None

    def __post_init__(self):
        for name in ("nodes", "time_ms"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise SolverError(f"budget {name} must be positive, got {value}")

    def to_dict(self) -> dict:
        return {"nodes": self.nodes, "time_ms": self.time_ms}


@dataclass
class SolveReport:
    trajectory: Trajectory
    status: Status
    nodes_expanded: int
    wall_ms: float
    policy: AnglePolicy
    mode: str
    budget: Budget = field(default_factory=Budget)

    @property
    def best_length(self) -> int:
        return self.trajectory.length

    @property
    def best_indices(self) -> tuple[int, ...]:
        return self.trajectory.indices

    @property
    def optimal(self) -> bool:
        return self.status is Status.PROVED_OPTIMAL

    def to_document(self, config: Configuration) -> dict:
        return {
            "config_ref": config_ref(config),
            "mode": self.mode,
            "policy_alpha_degrees": self.policy.label,
            "status": self.status.value,
            "best_length": self.best_length,
            "best_indices": list(self.best_indices),
            "nodes_expanded": self.nodes_expanded,
            "wall_ms": round(self.wall_ms, 3),
            "budget": self.budget.to_dict(),
        }


# --- transition graph -----------------------------------------------------

@dataclass
class TransitionGraph:
    """Successor sets of every ordered pair ``(i, j)``, stored at ``i * n + j``.

    ``masks`` holds bitsets and ``succ`` the same sets as ascending lists.
    """

    n: int
    masks: list[int]
    succ: list[list[int]]

    def successors(self, i: int, j: int) -> list[int]:
        return self.succ[i * self.n + j]

    def mask(self, i: int, j: int) -> int:
        return self.masks[i * self.n + j]


def build_transition_graph(config: Configuration, policy: AnglePolicy = RIGHT_ANGLE) -> TransitionGraph:
    pts = config.points
    n = len(pts)
    masks = [0] * (n * n)
    succ: list[list[int]] = [[] for _ in range(n * n)]
    if policy.exact:
        # scale to a common integer grid; same sign test as turn_admissible
        denom = lcm(*(p.x.denominator for p in pts), *(p.y.denominator for p in pts))
        ip = [(int(p.x * denom), int(p.y * denom)) for p in pts]
        for j in range(n):
            xj, yj = ip[j]
            vec = [(x - xj, y - yj) for x, y in ip]
            for i in range(n):
                if i == j:
                    continue
                ux, uy = vec[i]
                row = [k for k in range(n)
                       if k != j and k != i and ux * vec[k][0] + uy * vec[k][1] < 0]
                succ[i * n + j] = row
    else:
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                succ[i * n + j] = [k for k in range(n) if k != i and k != j
                                   and turn_admissible(pts[i], pts[j], pts[k], policy)]
    for s, row in enumerate(succ):
        m = 0
        for k in row:
            m |= 1 << k
        masks[s] = m
    return TransitionGraph(n, masks, succ)


# --- brute-force oracle ---------------------------------------------------

def brute_force_longest(config: Configuration, policy: AnglePolicy = RIGHT_ANGLE) -> SolveReport:
    """Exhaustive enumeration of all admissible simple sequences (n <= 10).

    Uses ``turn_admissible`` directly, never the transition graph, so it can
    serve as an independent oracle for :func:`exact_longest`.
    """
    n = len(config)
    if n > ORACLE_LIMIT:
        raise SolverError(f"oracle limit: brute force supports n <= {ORACLE_LIMIT}, got {n}")
    start = time.perf_counter()
    pts = config.points
    best: list[int] = [0]
    path: list[int] = []
    used = [False] * n
    nodes = 0

    def extend():
        nonlocal best, nodes
        nodes += 1
        if len(path) > len(best):
            best = list(path)
        for k in range(n):
            if used[k]:
                continue
            if len(path) >= 2 and not turn_admissible(pts[path[-2]], pts[path[-1]], pts[k], policy):
                continue
            used[k] = True
            path.append(k)
            extend()
            path.pop()
            used[k] = False

    extend()
    return SolveReport(Trajectory(best), Status.PROVED_OPTIMAL, nodes,
                       (time.perf_counter() - start) * 1000, policy, "oracle")


# --- branch and bound -----------------------------------------------------

class _OutOfBudget(Exception):
    pass


class _Search:
    """Bitmask DFS over ``(visited, prev, cur)`` states with a count bound."""

    CHECK_EVERY = 2048

    def __init__(self, graph: TransitionGraph, node_limit: Optional[int], deadline: Optional[float],
                 reachability: bool = False):
        self.graph = graph
        self.n = graph.n
        self.node_limit = node_limit
        self.deadline = deadline
        self.reachability = reachability
        self.nodes = 0
        n = self.n
        # expansion order: successors with more onward options first, ties by index
        counts = [len(row) for row in graph.succ]
        self.ordered = [sorted(row, key=lambda k, j=s % n: (-counts[j * n + k], k))
                        for s, row in enumerate(graph.succ)]

    def _tick(self):
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise _OutOfBudget
        if self.deadline is not None and self.nodes % self.CHECK_EVERY == 0:
            if time.perf_counter() > self.deadline:
                raise _OutOfBudget

    def _reach_bound(self, visited: int, prev: int, cur: int) -> int:
        # vertices reachable through admissible pairs, ignoring the simple-path constraint
        n, masks = self.n, self.graph.masks
        seen_pairs = {(prev, cur)}
        stack = [(prev, cur)]
        reached = 0
        while stack:
            i, j = stack.pop()
            nxt = masks[i * n + j] & ~visited
            reached |= nxt
            while nxt:
                low = nxt & -nxt
                k = low.bit_length() - 1
                nxt ^= low
                if (j, k) not in seen_pairs:
                    seen_pairs.add((j, k))
                    stack.append((j, k))
        return bin(reached).count("1")

    def maximise(self, roots: Sequence[tuple[int, int]], best_len: int, best_path: list[int]):
        """Phase 1: longest length reachable from ``roots``; prunes at ``<= best``."""
        n, ordered = self.n, self.ordered
        path: list[int] = []
        state = {"len": best_len, "path": list(best_path)}

        def dfs(visited: int, prev: int, cur: int, depth: int):
            self._tick()
            if depth > state["len"]:
                state["len"] = depth
                state["path"] = list(path)
            remaining = n - depth
            if depth + remaining <= state["len"]:
                return
            if self.reachability and depth + self._reach_bound(visited, prev, cur) <= state["len"]:
                return
            for k in ordered[prev * n + cur]:
                if visited >> k & 1:
                    continue
                path.append(k)
                dfs(visited | (1 << k), cur, k, depth + 1)
                path.pop()

        try:
            for i, j in roots:
                if state["len"] == n:
                    break
                path[:] = [i, j]
                dfs((1 << i) | (1 << j), i, j, 2)
        except _OutOfBudget:
            return state["len"], state["path"], False
        return state["len"], state["path"], True

    def first_of_length(self, target: int) -> Optional[list[int]]:
        """Phase 2: lexicographically smallest trajectory with ``target`` vertices."""
        n, succ = self.n, self.graph.succ
        path: list[int] = []

        def dfs(visited: int, prev: int, cur: int, depth: int) -> bool:
            self.nodes += 1
            if depth == target:
                return True
            if depth + (n - depth) < target:
                return False
            for k in succ[prev * n + cur]:
                if visited >> k & 1:
                    continue
                path.append(k)
                if dfs(visited | (1 << k), cur, k, depth + 1):
                    return True
                path.pop()
            return False

        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                path[:] = [i, j]
                if dfs((1 << i) | (1 << j), i, j, 2):
                    return path
        return None


def _root_order(graph: TransitionGraph) -> list[tuple[int, int]]:
    n = graph.n
    roots = [(i, j) for i in range(n) for j in range(n) if i != j]
    roots.sort(key=lambda r: (-len(graph.succ[r[0] * n + r[1]]), r))
    return roots


def _worker(args):
    graph, roots, node_limit, deadline, reachability = args
    search = _Search(graph, node_limit, deadline, reachability)
    length, path, complete = search.maximise(roots, 2, [roots[0][0], roots[0][1]])
    return length, path, complete, search.nodes


def exact_longest(config: Configuration, policy: AnglePolicy = RIGHT_ANGLE,
                  budget: Optional[Budget] = None, jobs: int = 1,
                  reachability: bool = False) -> SolveReport:
    """Branch-and-bound maximum over all admissible trajectories (n <= 64).

    On completion the status is PROVED_OPTIMAL and the trajectory is the
    lexicographically smallest index sequence of optimal length, so the
    answer does not depend on ``jobs``. When the budget runs out, the best
    trajectory found so far is returned as a lower bound.
    """
    budget = budget or Budget()
    n = len(config)
    if n > BITSET_LIMIT:
        raise SolverError(f"exact search supports n <= {BITSET_LIMIT}, got {n}; use beam search")
    if jobs < 1:
        raise SolverError("jobs must be >= 1")
    start = time.perf_counter()
    deadline = start + budget.time_ms / 1000 if budget.time_ms is not None else None

    def report(indices, status, nodes):
        return SolveReport(Trajectory(indices), status, nodes,
                           (time.perf_counter() - start) * 1000, policy, "exact", budget)

    if n == 1:
        return report([0], Status.PROVED_OPTIMAL, 1)
    graph = build_transition_graph(config, policy)
    roots = _root_order(graph)

    if jobs == 1:
        search = _Search(graph, budget.nodes, deadline, reachability)
        length, path, complete = search.maximise(roots, 2, [0, 1])
        nodes = 0
    else:
        chunks = [roots[w::jobs] for w in range(jobs) if roots[w::jobs]]
        per_worker = None if budget.nodes is None else max(1, budget.nodes // len(chunks))
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(_worker, [(graph, c, per_worker, deadline, reachability)
                                              for c in chunks]))
        length = max(r[0] for r in results)
        path = min((r[1] for r in results if r[0] == length))
        complete = all(r[2] for r in results)
        nodes = sum(r[3] for r in results)
        search = _Search(graph, None, None)

    if not complete:
        return report(path, Status.BUDGET_EXHAUSTED, nodes + search.nodes)
    canonical = search.first_of_length(length)
    assert canonical is not None
    return report(canonical, Status.PROVED_OPTIMAL, nodes + search.nodes)


# --- beam search ----------------------------------------------------------

def beam_longest(config: Configuration, policy: AnglePolicy = RIGHT_ANGLE, beam_width: int = 64,
                 restarts: int = 1, seed: int = 0) -> SolveReport:
    """Seeded beam search; never claims optimality.

    Partial trajectories are ranked by length, then by the number of
    unvisited admissible successors; remaining ties are broken by a seeded
    random key that differs per restart.
    """
    if beam_width < 1:
        raise SolverError("beam_width must be >= 1")
    if restarts < 1:
        raise SolverError("restarts must be >= 1")
    start = time.perf_counter()
    n = len(config)
    if n == 1:
        return SolveReport(Trajectory([0]), Status.BUDGET_EXHAUSTED, 1,
                           (time.perf_counter() - start) * 1000, policy, "beam")
    graph = build_transition_graph(config, policy)
    masks = graph.masks
    rng = random.Random(seed)
    best: tuple[int, ...] = (0, 1)
    nodes = 0

    def better(cand: tuple[int, ...]) -> bool:
        return len(cand) > len(best) or (len(cand) == len(best) and cand < best)

    for _ in range(restarts):
        beam = []
        for i in range(n):
            for j in range(n):
                if i != j:
                    visited = (1 << i) | (1 << j)
                    avail = bin(masks[i * n + j] & ~visited).count("1")
                    beam.append(((i, j), visited, avail, rng.random()))
        while beam:
            beam.sort(key=lambda s: (-len(s[0]), -s[2], s[3]))
            beam = beam[:beam_width]
            children = []
            for path, visited, _, _ in beam:
                nodes += 1
                if better(path):
                    best = path
                i, j = path[-2], path[-1]
                nxt = masks[i * n + j] & ~visited
                while nxt:
                    low = nxt & -nxt
                    k = low.bit_length() - 1
                    nxt ^= low
                    v = visited | low
                    avail = bin(masks[j * n + k] & ~v).count("1")
                    children.append((path + (k,), v, avail, rng.random()))
            beam = children
    return SolveReport(Trajectory(best), Status.BUDGET_EXHAUSTED, nodes,
                       (time.perf_counter() - start) * 1000, policy, "beam")


def solve(config: Configuration, mode: str = "exact", policy: AnglePolicy = RIGHT_ANGLE,
          budget: Optional[Budget] = None, jobs: int = 1, beam_width: int = 64,
          restarts: int = 1, seed: int = 0) -> SolveReport:
    if mode == "exact":
        if len(config) > BITSET_LIMIT:
            return beam_longest(config, policy, beam_width, restarts, seed)
        return exact_longest(config, policy, budget, jobs)
    if mode == "beam":
        return beam_longest(config, policy, beam_width, restarts, seed)
    if mode == "oracle":
        return brute_force_longest(config, policy)
    raise SolverError(f"unknown solver mode {mode!r}")
