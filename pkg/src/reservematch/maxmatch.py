"""Stage 1: maximum-size eligibility-compliant matching.

Each category is expanded into ``reserve`` identical slots and Hopcroft-Karp
runs on the patient/slot bipartite graph. Because every slot of a category
has the same neighbourhood, the slots are kept grouped: a category with an
unfilled slot is a free right vertex, and a full category is entered through
any of its current holders. Layering, shortest-path augmentation and the
phase structure are those of the textbook algorithm.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterator
from dataclasses import dataclass

from .model import Instance, Matching

__all__ = ["SlotGraph", "build_slot_graph", "maximum_matching", "max_resource_size"]

_INF = float("inf")


@dataclass(frozen=True)
class SlotGraph:
    """Patient/slot bipartite graph with slots grouped by category.

    ``adjacency[k]`` lists the category indices patient ``k`` may take a slot
    from, in declaration order. Slot ``(c, j)`` is the ``j``-th unit of
    category ``c`` (``j`` from 1).
    """

    patients: tuple[str, ...]
    categories: tuple[str, ...]
    reserves: tuple[int, ...]
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def slots(self) -> tuple[tuple[str, int], ...]:
        return tuple((c, j) for c, r in zip(self.categories, self.reserves) for j in range(1, r + 1))

    @property
    def n_slots(self) -> int:
        return sum(self.reserves)

    @property
    def n_edges(self) -> int:
        return sum(self.reserves[c] for adj in self.adjacency for c in adj)

    def edges(self) -> Iterator[tuple[str, tuple[str, int]]]:
        for p, adj in zip(self.patients, self.adjacency):
            for c in adj:
                for j in range(1, self.reserves[c] + 1):
                    yield p, (self.categories[c], j)


def build_slot_graph(instance: Instance, relation: str = "eligible") -> SlotGraph:
    """Slot graph whose edges join patients to the slots of categories they qualify for.

    ``relation="beneficiary"`` restricts edges to beneficiary pairs (used by
    the Hall-condition check).
    """
    if relation == "eligible":
        table = instance.eligibility_matrix
    elif relation == "beneficiary":
        table = instance.beneficiary_matrix
    else:
        raise ValueError(f"unknown relation {relation!r}")
    adjacency = tuple(tuple(int(c) for c in row.nonzero()[0]) for row in table)
    return SlotGraph(
        patients=instance.patients,
        categories=instance.category_ids,
        reserves=tuple(c.reserve for c in instance.categories),
        adjacency=adjacency,
    )


def maximum_matching(graph: SlotGraph) -> Matching:
    n = len(graph.patients)
    adj = graph.adjacency
    free = list(graph.reserves)
    owner = [-1] * n
    holders: list[dict[int, None]] = [{} for _ in graph.categories]

    # greedy warm start in declaration order
    for u in range(n):
        for c in adj[u]:
            if free[c] > 0:
                free[c] -= 1
                owner[u] = c
                holders[c][u] = None
                break

    dist: list[float] = [_INF] * n

    def bfs() -> float:
        queue: deque[int] = deque()
        for u in range(n):
            if owner[u] == -1 and adj[u]:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        seen = [False] * len(free)
        limit = _INF
        while queue:
            u = queue.popleft()
            if dist[u] >= limit:
                continue
            for c in adj[u]:
                if c == owner[u]:
                    continue
                if free[c] > 0:
                    limit = min(limit, dist[u])
                elif not seen[c]:
                    seen[c] = True
                    for j in holders[c]:
                        if dist[j] == _INF:
                            dist[j] = dist[u] + 1
                            queue.append(j)
        return limit

    def augment(root: int, limit: float) -> bool:
        # frames: [patient, adjacency cursor, holder cursor, holder snapshot]
        stack: list[list] = [[root, 0, 0, None]]
        while stack:
            frame = stack[-1]
            u, ai = frame[0], frame[1]
            if ai >= len(adj[u]):
                dist[u] = _INF
                stack.pop()
                continue
            c = adj[u][ai]
            if c == owner[u]:
                frame[1] += 1
                continue
            if free[c] > 0:
                if dist[u] == limit:
                    _apply(stack)
                    return True
                frame[1] += 1
                continue
            if frame[3] is None:
                frame[3] = list(holders[c])
            snap = frame[3]
            while frame[2] < len(snap):
                j = snap[frame[2]]
                frame[2] += 1
                if dist[j] == dist[u] + 1 and dist[j] <= limit:
                    stack.append([j, 0, 0, None])
                    break
            else:
                frame[1] += 1
                frame[2] = 0
                frame[3] = None
        return False

    def _apply(stack: list[list]) -> None:
        for frame in reversed(stack):
            u = frame[0]
            c = adj[u][frame[1]]
            if owner[u] != -1:
                del holders[owner[u]][u]
            if frame is stack[-1]:
                free[c] -= 1
            owner[u] = c
            holders[c][u] = None
            dist[u] = _INF

    while True:
        limit = bfs()
        if limit == _INF:
            break
        for u in range(n):
            if owner[u] == -1 and dist[u] == 0:
                augment(u, limit)

    cats = graph.categories
    return Matching({graph.patients[u]: cats[owner[u]] for u in range(n) if owner[u] != -1})


def max_resource_size(instance: Instance) -> int:
    return len(maximum_matching(build_slot_graph(instance)))
