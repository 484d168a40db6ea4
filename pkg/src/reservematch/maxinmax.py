"""Stage 2: raise the beneficiary count among maximum-size matchings.

Starting from a maximum matching, repeatedly find a size-preserving
alternating chain whose augmentation gains beneficiaries, and apply it.
Chains come in three orientations:

* PATIENT_ANCHORED ``(i0, c1, i1, ..., cm, im)``: ``i0`` is unmatched and
  takes ``c1``; each ``i_k`` moves from ``c_k`` onward; ``im`` ends unmatched.
* SLOT_ANCHORED ``(c1, i1, c2, i2, ..., cm, im)``: ``c1`` has a free unit;
  each ``i_k`` moves from its category (``c_{k+1}`` for ``k < m``) into
  ``c_k``, leaving a free unit in ``im``'s former category.
* CYCLE ``(i0, c1, i1, ..., cm, i0)``: every patient shifts one step round.

Two chain searches are provided. :func:`search_chain_graph` runs
Bellman-Ford on the two-copy digraph of :func:`build_chain_graph`, one
vertex per patient and category per copy. :func:`find_positive_chain`, used
by :func:`max_in_max`, works on the same digraph with patient vertices
contracted away: a vertex per category plus an "unmatched" vertex and a
"free unit" vertex, with an edge ``a -> b`` whenever some holder of ``b``
can take over a unit of ``a``, weighted by the best such holder. Every
positive chain is then a negative cycle, so the search is a single
negative-cycle detection over at most ``|C| + 2`` vertices.
"""

from __future__ import annotations

import enum
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .maxmatch import max_resource_size
from .model import Instance, Matching, check_eligibility

__all__ = [
    "ChainKind",
    "AlternatingChain",
    "InvalidChainError",
    "ChainGraph",
    "chain_moves",
    "chain_from_moves",
    "chain_potential",
    "augment_chain",
    "bellman_ford",
    "build_chain_graph",
    "search_chain_graph",
    "find_positive_chain",
    "max_in_max",
]

Move = tuple[str, "str | None", "str | None"]  # (patient, from category, to category)


class ChainKind(str, enum.Enum):
    PATIENT_ANCHORED = "PATIENT_ANCHORED"
    SLOT_ANCHORED = "SLOT_ANCHORED"
    CYCLE = "CYCLE"


@dataclass(frozen=True)
class AlternatingChain:
    kind: ChainKind
    sequence: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ChainKind(self.kind))
        object.__setattr__(self, "sequence", tuple(self.sequence))

    def __len__(self) -> int:
        return len(self.sequence)


class InvalidChainError(ValueError):
    code = "INVALID_CHAIN"


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidChainError(f"INVALID_CHAIN: {msg}")


def chain_moves(instance: Instance, matching: Mapping[str, str], chain: AlternatingChain) -> list[Move]:
    """Validate ``chain`` against ``matching`` and list the reassignments it makes."""
    seq = chain.sequence
    pidx, cidx = instance.patient_index, instance.category_index
    get = matching.get
    kind = chain.kind

    if kind is ChainKind.SLOT_ANCHORED:
        _require(len(seq) >= 2 and len(seq) % 2 == 0, "slot-anchored chain needs (c, i) pairs")
        cats, pats = list(seq[0::2]), list(seq[1::2])
    else:
        _require(len(seq) >= 3 and len(seq) % 2 == 1, "chain must alternate patient, category, patient")
        pats, cats = list(seq[0::2]), list(seq[1::2])
    _require(all(p in pidx for p in pats), "unknown patient in chain")
    _require(all(c in cidx for c in cats), "unknown category in chain")
    _require(len(set(cats)) == len(cats), "category repeated")
    m = len(cats)

    if kind is ChainKind.PATIENT_ANCHORED:
        _require(len(set(pats)) == len(pats), "patient repeated")
        _require(get(pats[0]) is None, "first patient must be unmatched")
        for k in range(1, m + 1):
            _require(get(pats[k]) == cats[k - 1], f"{pats[k]} is not held by {cats[k - 1]}")
            _require(instance.is_eligible(pats[k - 1], cats[k - 1]), f"{pats[k - 1]} not eligible for {cats[k - 1]}")
        moves = [(pats[k - 1], get(pats[k - 1]), cats[k - 1]) for k in range(1, m + 1)]
        moves.append((pats[m], cats[m - 1], None))
        return moves

    if kind is ChainKind.CYCLE:
        _require(pats[0] == pats[-1], "cycle must close on its first patient")
        ring = pats[:-1]
        _require(m >= 2, "cycle needs at least two categories")
        _require(len(set(ring)) == len(ring), "patient repeated")
        for k in range(1, m + 1):
            _require(get(pats[k]) == cats[k - 1], f"{pats[k]} is not held by {cats[k - 1]}")
            _require(instance.is_eligible(pats[k - 1], cats[k - 1]), f"{pats[k - 1]} not eligible for {cats[k - 1]}")
        return [(pats[k - 1], get(pats[k - 1]), cats[k - 1]) for k in range(1, m + 1)]

    # slot-anchored
    _require(len(set(pats)) == len(pats), "patient repeated")
    counts = matching.counts() if isinstance(matching, Matching) else Matching(matching).counts()
    _require(counts.get(cats[0], 0) < instance.reserve(cats[0]), f"{cats[0]} has no free unit")
    for k in range(m):
        _require(instance.is_eligible(pats[k], cats[k]), f"{pats[k]} not eligible for {cats[k]}")
        if k + 1 < m:
            _require(get(pats[k]) == cats[k + 1], f"{pats[k]} is not held by {cats[k + 1]}")
    last = get(pats[-1])
    _require(last is not None, "last patient must be matched")
    _require(last not in cats, "last patient's category reappears in the chain")
    return [(pats[k], get(pats[k]), cats[k]) for k in range(m)]


def chain_from_moves(moves: Sequence[Move]) -> AlternatingChain:
    """Assemble the chain whose reassignments are ``moves`` (any order)."""
    entering = {to: p for p, _, to in moves if to is not None}
    frm = {p: f for p, f, _ in moves}
    to_of = {p: t for p, _, t in moves}
    starters = [p for p, f, _ in moves if f is None]
    if starters:
        p = starters[0]
        seq: list[str] = [p]
        while to_of[p] is not None:
            c = to_of[p]
            p = next(q for q, f in frm.items() if f == c)
            seq += [c, p]
        return AlternatingChain(ChainKind.PATIENT_ANCHORED, tuple(seq))
    sources = set(frm.values())
    anchors = [c for c in entering if c not in sources]
    if anchors:
        c = anchors[0]
        seq = []
        while c in entering:
            p = entering[c]
            seq += [c, p]
            c = frm[p]
        return AlternatingChain(ChainKind.SLOT_ANCHORED, tuple(seq))
    p0 = moves[0][0]
    seq = [p0]
    p = p0
    while True:
        c = to_of[p]
        p = next(q for q, f in frm.items() if f == c)
        seq += [c, p]
        if p == p0:
            return AlternatingChain(ChainKind.CYCLE, tuple(seq))


def _moves_potential(instance: Instance, moves: Sequence[Move]) -> int:
    gain = sum(1 for p, _, t in moves if t is not None and instance.is_beneficiary(p, t))
    loss = sum(1 for p, f, _ in moves if f is not None and instance.is_beneficiary(p, f))
    return gain - loss


def chain_potential(instance: Instance, matching: Mapping[str, str], chain: AlternatingChain) -> int:
    """Beneficiary gain of augmenting ``chain``: entries into B_c minus exits from B_c."""
    return _moves_potential(instance, chain_moves(instance, matching, chain))


def augment_chain(instance: Instance, matching: Mapping[str, str], chain: AlternatingChain) -> Matching:
    moves = chain_moves(instance, matching, chain)
    base = matching if isinstance(matching, Matching) else Matching(matching)
    return base.replace({p: t for p, _, t in moves})


# ---------------------------------------------------------------------------
# Bellman-Ford


@dataclass(frozen=True)
class ShortestPaths:
    dist: np.ndarray
    pred: np.ndarray
    cycle: list[int] | None


def bellman_ford(weights: np.ndarray, source: int | None = None) -> ShortestPaths:
    """Bellman-Ford over a dense weight matrix (``inf`` marks a missing edge).

    With ``source=None`` every vertex starts at distance 0, which is the
    same as adding a virtual source joined to all vertices by zero edges:
    any negative cycle in the graph is then found. Otherwise only cycles
    reachable from ``source`` are. Ties go to the lowest vertex index.
    """
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    if source is None:
        dist = np.zeros(n)
    else:
        dist = np.full(n, np.inf)
        dist[source] = 0.0
    pred = np.full(n, -1, dtype=np.int64)
    cols = np.arange(n)
    improved = np.zeros(n, dtype=bool)
    for _ in range(n + 1):
        cand = dist[:, None] + w
        best = np.argmin(cand, axis=0)
        new = cand[best, cols]
        improved = new < dist
        if not improved.any():
            return ShortestPaths(dist, pred, None)
        dist = np.where(improved, new, dist)
        pred = np.where(improved, best, pred)
        # a negative cycle usually shows up in the predecessor graph long before round n
        early = _pred_cycle(w, pred, np.flatnonzero(improved)[:1])
        if early is not None:
            return ShortestPaths(dist, pred, early)
    cycle = _pred_cycle(w, pred, np.flatnonzero(improved))
    if cycle is None:
        cycle = _sequential_negative_cycle(w, source)
    return ShortestPaths(dist, pred, cycle)


def _pred_cycle(w: np.ndarray, pred: np.ndarray, starts: np.ndarray) -> list[int] | None:
    n = len(pred)
    for x in starts:
        x = int(x)
        for _ in range(n):
            if pred[x] < 0:
                break
            x = int(pred[x])
        else:
            cyc = [x]
            y = int(pred[x])
            while y != x:
                cyc.append(y)
                y = int(pred[y])
            cyc.reverse()
            if sum(w[cyc[k], cyc[(k + 1) % len(cyc)]] for k in range(len(cyc))) < 0:
                return cyc
    return None


def _sequential_negative_cycle(w: np.ndarray, source: int | None) -> list[int] | None:
    # edge-at-a-time relaxation: every predecessor cycle it leaves is negative
    n = w.shape[0]
    dist = [0.0] * n if source is None else [np.inf] * n
    if source is not None:
        dist[source] = 0.0
    pred = [-1] * n
    edges = [(int(u), int(v), float(w[u, v])) for u, v in zip(*np.nonzero(np.isfinite(w)))]
    last = None
    for _ in range(n + 1):
        last = None
        for u, v, c in edges:
            if dist[u] + c < dist[v]:
                dist[v] = dist[u] + c
                pred[v] = u
                last = v
        if last is None:
            return None
    return _pred_cycle(w, np.asarray(pred), np.asarray([last]))


# ---------------------------------------------------------------------------
# The two-copy chain digraph


@dataclass(frozen=True)
class ChainGraph:
    """Weighted digraph whose negative paths and cycles are positive chains.

    Vertex 0 is the source ``s``. Labels are ``("s",)``, ``("v", "c", id)``,
    ``("w", "c", id)``, ``("v", "i", id)`` and ``("w", "i", id)``. Edge
    weights are -1 for a beneficiary entering a category, +1 for a
    beneficiary leaving one, 0 otherwise.
    """

    labels: tuple[tuple[str, ...], ...]
    edges: tuple[tuple[int, int, int], ...]

    source = 0

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    def index(self, label: tuple[str, ...]) -> int:
        return self.labels.index(label)

    def weight_matrix(self) -> np.ndarray:
        n = len(self.labels)
        w = np.full((n, n), np.inf)
        for u, v, c in self.edges:
            w[u, v] = c
        return w

    def walk_weight(self, walk: Sequence[int], closed: bool = False) -> int:
        table = {(u, v): c for u, v, c in self.edges}
        pairs = list(zip(walk, walk[1:]))
        if closed:
            pairs.append((walk[-1], walk[0]))
        return sum(table[p] for p in pairs)

    def walk_moves(self, matching: Mapping[str, str], walk: Sequence[int], closed: bool = False) -> list[Move]:
        """Reassignments encoded by a path from ``s`` or by a closed cycle."""
        labels = self.labels
        pairs = list(zip(walk, walk[1:]))
        if closed:
            pairs.append((walk[-1], walk[0]))
        moves: list[Move] = []
        entered: set[str] = set()
        for u, v in pairs:
            lu, lv = labels[u], labels[v]
            if lu[0] == "s":
                continue
            if lu[1] == "c" and lv[1] == "i" and lu[0] == "v":
                moves.append((lv[2], matching.get(lv[2]), lu[2]))
                entered.add(lv[2])
            elif lu[1] == "i" and lv[1] == "c" and lu[0] == "w":
                moves.append((lu[2], matching.get(lu[2]), lv[2]))
                entered.add(lu[2])
        if not closed and walk:
            end = labels[walk[-1]]
            if end[0] == "w" and end[1] == "i" and end[2] not in entered:
                moves.append((end[2], matching.get(end[2]), None))
        return moves


def build_chain_graph(instance: Instance, matching: Mapping[str, str]) -> ChainGraph:
    cats = instance.category_ids
    pats = instance.patients
    labels: list[tuple[str, ...]] = [("s",)]
    labels += [("v", "c", c) for c in cats]
    labels += [("w", "c", c) for c in cats]
    labels += [("v", "i", p) for p in pats]
    labels += [("w", "i", p) for p in pats]
    nc, npat = len(cats), len(pats)
    vc = {c: 1 + k for k, c in enumerate(cats)}
    wc = {c: 1 + nc + k for k, c in enumerate(cats)}
    vi = {p: 1 + 2 * nc + k for k, p in enumerate(pats)}
    wi = {p: 1 + 2 * nc + npat + k for k, p in enumerate(pats)}
    counts = matching.counts() if isinstance(matching, Matching) else Matching(matching).counts()

    edges: list[tuple[int, int, int]] = []
    for c in instance.categories:
        if counts.get(c.id, 0) < c.reserve:
            edges.append((0, vc[c.id], 0))
    for p in pats:
        if matching.get(p) is None:
            edges.append((0, wi[p], 0))
    for c in instance.categories:
        for p in c.priority.eligible:
            if matching.get(p) == c.id:
                continue
            wgt = -1 if c.priority.is_beneficiary(p) else 0
            edges.append((vc[c.id], vi[p], wgt))
            edges.append((wi[p], wc[c.id], wgt))
    for p in pats:
        held = matching.get(p)
        if held is not None:
            wgt = 1 if instance.is_beneficiary(p, held) else 0
            edges.append((vi[p], vc[held], wgt))
            edges.append((wc[held], wi[p], wgt))
    return ChainGraph(labels=tuple(labels), edges=tuple(edges))


def search_chain_graph(instance: Instance, matching: Mapping[str, str]) -> AlternatingChain | None:
    """Find a positive chain by Bellman-Ford on :func:`build_chain_graph`.

    Negative cycles are searched over the whole graph; failing that, the
    most negative path from ``s`` that ends at a valid endpoint is used
    (a category vertex of the v-copy or a patient vertex of the w-copy,
    reached through a matching edge). Sized for desk-scale instances.
    """
    g = build_chain_graph(instance, matching)
    w = g.weight_matrix()
    found = bellman_ford(w)
    if found.cycle is not None:
        return chain_from_moves(g.walk_moves(matching, found.cycle, closed=True))
    sp = bellman_ford(w, source=g.source)
    best, best_d = -1, 0.0
    for k, lab in enumerate(g.labels):
        if lab[0] == "s":
            continue
        endpoint = (lab[0] == "v" and lab[1] == "c") or (lab[0] == "w" and lab[1] == "i")
        if endpoint and sp.dist[k] < best_d and g.labels[sp.pred[k]][0] != "s":
            best, best_d = k, sp.dist[k]
    if best < 0:
        return None
    path = [best]
    while path[-1] != g.source:
        path.append(int(sp.pred[path[-1]]))
    path.reverse()
    return chain_from_moves(g.walk_moves(matching, path))


# ---------------------------------------------------------------------------
# Contracted search used by the Max-in-Max loop


class _TransferState:
    """Array view of a matching over the contracted digraph.

    Vertices ``0..C-1`` are categories, ``C`` is the unmatched pool and
    ``C+1`` the free-unit pool. Edge ``a -> b`` means a unit of ``a`` is
    taken over by a patient currently in ``b``.
    """

    _NO_EDGE = 9

    def __init__(self, instance: Instance, matching: Mapping[str, str]):
        self.instance = instance
        elig = instance.eligibility_matrix
        ben = instance.beneficiary_matrix.astype(np.int8)
        n, C = elig.shape
        self.C = C
        self.ben = ben
        self.reserves = np.array([c.reserve for c in instance.categories], dtype=np.int64)
        # cost of a patient taking a unit of column a, by whether they leave a beneficiary unit
        self._cost = (
            np.where(elig, -ben, self._NO_EDGE).astype(np.int8),
            np.where(elig, 1 - ben, self._NO_EDGE).astype(np.int8),
        )
        cidx = instance.category_index
        self.group = np.full(n, C, dtype=np.int64)
        for p, c in matching.items():
            self.group[instance.patient_index[p]] = cidx[c]

    def weights(self) -> np.ndarray:
        C, g = self.C, self.group
        n = len(g)
        U, F = C, C + 1
        rows = np.arange(n)
        matched = g < C
        leave = np.zeros(n, dtype=np.int8)
        leave[matched] = self.ben[rows[matched], g[matched]]
        cost = np.where(leave[:, None] == 1, self._cost[1], self._cost[0])
        cost[rows[matched], g[matched]] = self._NO_EDGE
        self._cost_now, self._leave = cost, leave

        W = np.full((C + 2, C + 2), np.inf)
        if n:
            order = np.argsort(g, kind="stable")
            present, starts = np.unique(g[order], return_index=True)
            best = np.minimum.reduceat(cost[order], starts, axis=0)  # (groups, C): [b, a]
            block = np.where(best == self._NO_EDGE, np.inf, best.astype(float))
            W[:C, present] = block.T
        sizes = np.bincount(g[matched], minlength=C)
        nonben = np.bincount(g[matched], weights=1 - leave[matched], minlength=C)
        W[U, :C] = np.where(nonben > 0, 0, np.where(sizes > 0, 1, np.inf))
        W[F, :C] = np.where(sizes < self.reserves, 0, np.inf)
        W[:C, F] = 0
        return W

    def cycle_moves(self, cycle: list[int], W: np.ndarray) -> list[tuple[int, int, int]]:
        """Pick the lowest-index patient realising each edge of ``cycle``."""
        C, g = self.C, self.group
        U, F = C, C + 1
        if U in cycle and F in cycle:
            raise ValueError("matching is not of maximum size: an augmenting path exists")
        moves = []
        for k, a in enumerate(cycle):
            b = cycle[(k + 1) % len(cycle)]
            if a == F or b == F:
                continue
            if a == U:
                i = int(np.flatnonzero((g == b) & (self._leave == W[a, b]))[0])
                moves.append((i, b, -1))
            else:
                i = int(np.flatnonzero((g == b) & (self._cost_now[:, a] == W[a, b]))[0])
                moves.append((i, -1 if b == U else b, a))
        return moves

    def apply(self, moves: list[tuple[int, int, int]]) -> None:
        for i, _, to in moves:
            self.group[i] = self.C if to == -1 else to

    def named(self, moves: list[tuple[int, int, int]]) -> list[Move]:
        pats, cats = self.instance.patients, self.instance.category_ids
        return [(pats[i], None if f == -1 else cats[f], None if t == -1 else cats[t]) for i, f, t in moves]

    def matching(self) -> Matching:
        pats, cats = self.instance.patients, self.instance.category_ids
        return Matching({pats[i]: cats[c] for i, c in enumerate(self.group) if c < self.C})

    def step(self) -> list[tuple[int, int, int]] | None:
        W = self.weights()
        found = bellman_ford(W)
        if found.cycle is None:
            return None
        return self.cycle_moves(found.cycle, W)


def _require_maximum(instance: Instance, matching: Mapping[str, str]) -> None:
    if check_eligibility(instance, matching):
        raise ValueError("matching assigns a patient to a category they are not eligible for")
    if len(matching) != max_resource_size(instance):
        raise ValueError("matching is not of maximum size")


def find_positive_chain(instance: Instance, matching: Mapping[str, str]) -> AlternatingChain | None:
    """Return a size-preserving chain with positive potential, or ``None``.

    ``matching`` must be eligibility-compliant and of maximum size.
    """
    _require_maximum(instance, matching)
    if not instance.categories:
        return None
    state = _TransferState(instance, matching)
    moves = state.step()
    if moves is None:
        return None
    return chain_from_moves(state.named(moves))


def max_in_max(instance: Instance, mu1: Mapping[str, str]) -> Matching:
    """Augment positive chains until none is left."""
    _require_maximum(instance, mu1)
    if not instance.categories:
        return Matching(mu1)
    state = _TransferState(instance, mu1)
    for _ in range(instance.q + 1):
        moves = state.step()
        if moves is None:
            return state.matching()
        state.apply(moves)
    raise AssertionError("beneficiary count cannot rise more than q times")
