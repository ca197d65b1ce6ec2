"""Critical bond percolation on rectangles and tori: left-right crossings,
dual crossings, exact crossing probabilities by enumeration, the torus
embedding of the crossing function, and the two-orbit clue bound for its
translation average.

Rectangle convention: ``w`` columns and ``h`` rows of vertices, horizontal
edge (x,y)-(x+1,y) for x < w-1, vertical edge (x,y)-(x,y+1) for y < h-1.
A crossing joins any leftmost vertex to any rightmost vertex (both boundary
columns fully wired).  The shape is self-dual exactly when w = h + 1, which
forces crossing probability 1/2 at p = 1/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import FunctionTable, uniform_space
from .errors import GuardError

EXACT_EDGE_GUARD = 22
TORUS_TABLE_GUARD = 20


# ---------------------------------------------------------------------------
# rectangles
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class RectangleSpec:
    w: int
    h: int

    def __post_init__(self):
        if self.w < 2 or self.h < 1:
            raise ValueError("need at least 2 columns and 1 row of vertices")

    @property
    def n_horizontal(self) -> int:
        return (self.w - 1) * self.h

    @property
    def n_vertical(self) -> int:
        return self.w * (self.h - 1)

    @property
    def edge_count(self) -> int:
        return self.n_horizontal + self.n_vertical

    @property
    def self_dual(self) -> bool:
        return self.w == self.h + 1

    def horizontal_edge(self, x: int, y: int) -> int:
        if not (0 <= x < self.w - 1 and 0 <= y < self.h):
            raise ValueError("horizontal edge out of range")
        return y * (self.w - 1) + x

    def vertical_edge(self, x: int, y: int) -> int:
        if not (0 <= x < self.w and 0 <= y < self.h - 1):
            raise ValueError("vertical edge out of range")
        return self.n_horizontal + y * self.w + x

    def vertex(self, x: int, y: int) -> int:
        return y * self.w + x

    def edge_endpoints(self) -> list[tuple[int, int]]:
        ends = []
        for y in range(self.h):
            for x in range(self.w - 1):
                ends.append((self.vertex(x, y), self.vertex(x + 1, y)))
        for y in range(self.h - 1):
            for x in range(self.w):
                ends.append((self.vertex(x, y), self.vertex(x, y + 1)))
        # order must match edge indices
        ordered = [None] * self.edge_count
        for y in range(self.h):
            for x in range(self.w - 1):
                ordered[self.horizontal_edge(x, y)] = (self.vertex(x, y), self.vertex(x + 1, y))
        for y in range(self.h - 1):
            for x in range(self.w):
                ordered[self.vertical_edge(x, y)] = (self.vertex(x, y), self.vertex(x, y + 1))
        return ordered


def _connected_batch(n_nodes: int, edges, open_matrix: np.ndarray, src: int, dst: int) -> np.ndarray:
    """Vectorized connectivity for many configurations at once.

    ``edges`` is a list of (a, b, col) where col indexes open_matrix columns,
    or (a, b, None) for always-open wiring.  Runs min-label propagation to a
    fixpoint; returns a bool vector, one entry per row of open_matrix.
    """
    rows = len(open_matrix)
    labels = np.broadcast_to(np.arange(n_nodes), (rows, n_nodes)).copy()
    while True:
        changed = False
        for a, b, col in edges:
            la = labels[:, a]
            lb = labels[:, b]
            m = np.minimum(la, lb)
            if col is None:
                if np.any(m < la) or np.any(m < lb):
                    changed = True
                labels[:, a] = m
                labels[:, b] = m
            else:
                sel = open_matrix[:, col]
                new_a = np.where(sel, m, la)
                new_b = np.where(sel, m, lb)
                if np.any(new_a < la) or np.any(new_b < lb):
                    changed = True
                labels[:, a] = new_a
                labels[:, b] = new_b
        if not changed:
            return labels[:, src] == labels[:, dst]


def _rect_crossing_edges(rect: RectangleSpec):
    n_vertices = rect.w * rect.h
    left, right = n_vertices, n_vertices + 1
    edges = [(left, rect.vertex(0, y), None) for y in range(rect.h)]
    edges += [(right, rect.vertex(rect.w - 1, y), None) for y in range(rect.h)]
    for idx, (a, b) in enumerate(rect.edge_endpoints()):
        edges.append((a, b, idx))
    return n_vertices + 2, edges, left, right


def crossing_batch(rect: RectangleSpec, open_matrix: np.ndarray) -> np.ndarray:
    """Left-right crossing indicator for each row of a (N, edge_count) bool
    matrix of open edges."""
    n_nodes, edges, left, right = _rect_crossing_edges(rect)
    return _connected_batch(n_nodes, edges, open_matrix, left, right)


def lr_crossing(config: int, rect: RectangleSpec) -> bool:
    """Does the open-edge bitmask contain a left-right crossing?"""
    open_row = _mask_to_bools(config, rect.edge_count)
    return bool(crossing_batch(rect, open_row[None, :])[0])


def _dual_crossing_edges(rect: RectangleSpec):
    """Top-bottom dual connectivity: dual vertices are the inner faces plus
    virtual top/bottom nodes; the dual edge of a primal edge is open when the
    primal edge is closed.  Vertical primal edges in the boundary columns
    border the outer side face and carry no dual edge."""
    faces_w, faces_h = rect.w - 1, rect.h - 1

    def face(x: int, y: int) -> int:
        return y * faces_w + x

    n_faces = faces_w * faces_h
    bottom, top = n_faces, n_faces + 1
    edges = []
    for y in range(rect.h):
        for x in range(rect.w - 1):
            below = bottom if y == 0 else face(x, y - 1)
            above = top if y == rect.h - 1 else face(x, y)
            edges.append((below, above, rect.horizontal_edge(x, y)))
    for y in range(rect.h - 1):
        for x in range(1, rect.w - 1):
            edges.append((face(x - 1, y), face(x, y), rect.vertical_edge(x, y)))
    return n_faces + 2, edges, bottom, top


def dual_crossing_batch(rect: RectangleSpec, open_matrix: np.ndarray) -> np.ndarray:
    """Top-bottom crossing of the dual by closed edges, per row."""
    n_nodes, edges, bottom, top = _dual_crossing_edges(rect)
    return _connected_batch(n_nodes, edges, ~open_matrix, bottom, top)


def dual_crossing(config: int, rect: RectangleSpec) -> bool:
    open_row = _mask_to_bools(config, rect.edge_count)
    return bool(dual_crossing_batch(rect, open_row[None, :])[0])


def _mask_to_bools(config: int, n_edges: int) -> np.ndarray:
    return np.array([(config >> e) & 1 for e in range(n_edges)], dtype=bool)


def _all_configs(n_edges: int) -> np.ndarray:
    idx = np.arange(1 << n_edges, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n_edges)[None, :]) & 1).astype(bool)


def crossing_probability_exact(rect: RectangleSpec) -> Fraction:
    """Exact crossing probability at p = 1/2 by full enumeration."""
    if rect.edge_count > EXACT_EDGE_GUARD:
        raise GuardError(f"exact enumeration gated at {EXACT_EDGE_GUARD} edges")
    hits = int(crossing_batch(rect, _all_configs(rect.edge_count)).sum())
    return Fraction(hits, 1 << rect.edge_count)


def crossing_probability_mc(rect: RectangleSpec, samples: int, seed: int) -> tuple[float, float]:
    """(estimate, stderr) of the crossing probability from iid configurations."""
    from .montecarlo import generator_for

    rng = generator_for(seed, 0)
    hits = 0
    chunk = 1 << 14
    done = 0
    total = 0
    while done < samples:
        take = min(chunk, samples - done)
        open_matrix = rng.random((take, rect.edge_count)) < 0.5
        hits += int(crossing_batch(rect, open_matrix).sum())
        done += take
        total += take
    p_hat = hits / total
    return p_hat, math.sqrt(max(p_hat * (1 - p_hat), 1e-12) / total)


# ---------------------------------------------------------------------------
# torus embedding
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class TorusSpec:
    """Side-n torus with 2 n^2 edges: h(x,y) joins (x,y)-(x+1 mod n, y) at
    index y*n + x; v(x,y) joins (x,y)-(x,y+1 mod n) at index n^2 + y*n + x.

    The embedded rectangle has w = n+1 columns and h = n rows of vertices
    (self-dual); its rightmost column wraps onto column 0 of the torus, and
    the boundary-column vertical edges, which never matter for a crossing
    between wired boundaries, fold onto the v(0, y) edges.
    """

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("torus side must be at least 2")

    @property
    def edge_count(self) -> int:
        return 2 * self.n * self.n

    def h_edge(self, x: int, y: int) -> int:
        return (y % self.n) * self.n + (x % self.n)

    def v_edge(self, x: int, y: int) -> int:
        return self.n * self.n + (y % self.n) * self.n + (x % self.n)

    def rectangle(self) -> RectangleSpec:
        return RectangleSpec(self.n + 1, self.n)

    def rect_edge_sources(self) -> np.ndarray:
        """For each rectangle edge, the torus edge whose state it reads."""
        rect = self.rectangle()
        src = np.empty(rect.edge_count, dtype=np.int64)
        for y in range(rect.h):
            for x in range(rect.w - 1):
                src[rect.horizontal_edge(x, y)] = self.h_edge(x, y)
        for y in range(rect.h - 1):
            for x in range(rect.w):
                src[rect.vertical_edge(x, y)] = self.v_edge(x, y)
        return src

    def support_edges(self) -> list[int]:
        """Torus edges the crossing function actually depends on: every
        horizontal edge plus the interior-column verticals."""
        edges = [self.h_edge(x, y) for y in range(self.n) for x in range(self.n)]
        edges += [
            self.v_edge(x, y) for y in range(self.n - 1) for x in range(1, self.n)
        ]
        return sorted(edges)

    def translation_permutation(self, dx: int, dy: int) -> tuple[int, ...]:
        """Edge permutation of the translation by (dx, dy)."""
        perm = [0] * self.edge_count
        for y in range(self.n):
            for x in range(self.n):
                perm[self.h_edge(x, y)] = self.h_edge(x + dx, y + dy)
                perm[self.v_edge(x, y)] = self.v_edge(x + dx, y + dy)
        return tuple(perm)

    def translation_group(self):
        from .symmetry import from_generators

        gens = [self.translation_permutation(1, 0), self.translation_permutation(0, 1)]
        return from_generators(gens, self.edge_count)


def torus_lr_values(torus: TorusSpec, open_matrix: np.ndarray) -> np.ndarray:
    """+-1 crossing values for (N, 2n^2) bool matrices of torus edge states."""
    rect = torus.rectangle()
    rect_open = open_matrix[:, torus.rect_edge_sources()]
    return np.where(crossing_batch(rect, rect_open), 1.0, -1.0)


def torus_lr_evaluator(torus: TorusSpec):
    """Batch evaluator over torus edge digit matrices (digit 1 = open)."""

    def evaluate(digits):
        return torus_lr_values(torus, digits.astype(bool))

    return evaluate


def torus_lr_table(torus: TorusSpec) -> FunctionTable:
    """Dense +-1 table over all torus-edge configurations (2n^2 <= 20).

    Built by enumerating only the support edges and broadcasting: flipping a
    non-support edge never changes the value.
    """
    m = torus.edge_count
    if m > TORUS_TABLE_GUARD:
        raise GuardError("dense torus table gated at 2 n^2 <= 20")
    support = torus.support_edges()
    k = len(support)
    support_digits = ((np.arange(1 << k, dtype=np.int64)[:, None] >> np.arange(k)) & 1).astype(bool)
    open_support = np.zeros((1 << k, m), dtype=bool)
    open_support[:, support] = support_digits
    core_values = torus_lr_values(torus, open_support)
    idx = np.arange(1 << m, dtype=np.int64)
    support_index = np.zeros(1 << m, dtype=np.int64)
    for bit, edge in enumerate(support):
        support_index |= ((idx >> edge) & 1) << bit
    return FunctionTable(uniform_space(m), core_values[support_index])


def averaged_lr_table(torus: TorusSpec) -> FunctionTable:
    """Mean of the crossing function over all n^2 torus translations."""
    from .symmetry import average

    table = torus_lr_table(torus)
    perms = [
        torus.translation_permutation(dx, dy)
        for dx in range(torus.n)
        for dy in range(torus.n)
    ]
    return average(table, perms)


@dataclass(frozen=True)
class AveragedClueReport:
    clue: float
    bound: float
    stderr: float | None
    holds: bool


def averaged_crossing_clue_bound(
    torus: TorusSpec,
    mask: int,
    tol: float = 1e-9,
    mc_outer: int = 4000,
    mc_inner: int = 32,
    seed: int | None = None,
) -> AveragedClueReport:
    """clue of the translation-averaged crossing function against the
    two-orbit bound 2|U| / n^2 (exact for 2n^2 <= 20, nested Monte Carlo with
    a 3-sigma allowance beyond that)."""
    bound = 2.0 * mask.bit_count() / torus.n**2
    if torus.edge_count <= TORUS_TABLE_GUARD:
        from .clue import clue

        if mask == 0:
            return AveragedClueReport(0.0, bound, None, True)
        value = clue(averaged_lr_table(torus), mask)
        return AveragedClueReport(value, bound, None, value <= bound + tol)
    if seed is None:
        raise ValueError("Monte Carlo regime needs a seed")
    from .montecarlo import mc_clue

    perms = [
        torus.translation_permutation(dx, dy)
        for dx in range(torus.n)
        for dy in range(torus.n)
    ]
    base = torus_lr_evaluator(torus)
    perm_arrays = [np.asarray(p) for p in perms]

    def averaged(digits):
        acc = np.zeros(len(digits))
        for perm in perm_arrays:
            acc += base(digits[:, perm])
        return acc / len(perms)

    est = mc_clue(averaged, uniform_space(torus.edge_count), mask, mc_outer, mc_inner, seed)
    return AveragedClueReport(
        est.estimate, bound, est.stderr, est.estimate <= bound + 3.0 * est.stderr
    )


# ---------------------------------------------------------------------------
# translation disagreement
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DisagreementEstimate:
    estimate: float
    ci_low: float
    ci_high: float
    samples: int


def translate_disagreement(
    n: int, displacement: tuple[int, int], samples: int, seed: int, z: float = 1.96
) -> DisagreementEstimate:
    """Monte Carlo estimate of P[crossing differs from its translate], with a
    Wilson score interval.  Reported, never asserted: the true size of this
    probability is an asymptotic statement."""
    from .montecarlo import generator_for

    torus = TorusSpec(n)
    perm = np.asarray(torus.translation_permutation(*displacement))
    inv = np.argsort(perm)
    rng = generator_for(seed, 0)
    disagreements = 0
    done = 0
    chunk = 1 << 13
    while done < samples:
        take = min(chunk, samples - done)
        open_matrix = rng.random((take, torus.edge_count)) < 0.5
        base_vals = torus_lr_values(torus, open_matrix)
        moved_vals = torus_lr_values(torus, open_matrix[:, inv])
        disagreements += int(np.sum(base_vals != moved_vals))
        done += take
    p_hat = disagreements / samples
    denom = 1.0 + z**2 / samples
    center = (p_hat + z**2 / (2 * samples)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / samples + z**2 / (4 * samples**2)) / denom
    return DisagreementEstimate(p_hat, max(center - half, 0.0), min(center + half, 1.0), samples)
