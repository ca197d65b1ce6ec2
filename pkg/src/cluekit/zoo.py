"""Named function families, each bundled with its natural symmetry group and
a batch evaluator usable far beyond the dense-table guard.

Sign conventions: dictator / parity / majority / asymmetric majority take
values in {-1,+1}; the coordinate sum is integer valued; tribes is {0,1}.
Thresholded families use strict inequality, so a sum landing exactly on the
threshold maps to -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import FunctionTable, table_from_digits, uniform_space
from .errors import ParseError
from .symmetry import (
    GroupAction,
    stabilizer_of,
    symmetric_group_action,
    tribes_group,
)


@dataclass(frozen=True)
class ZooEntry:
    name: str
    n: int
    table: FunctionTable
    action: GroupAction | None


def _spins(digits: np.ndarray) -> np.ndarray:
    return digits.astype(np.int64) * 2 - 1


# ---------------------------------------------------------------------------
# evaluators (work on any (N, n) digit matrix)
# ---------------------------------------------------------------------------
def dictator_evaluator(n: int, coord: int):
    def evaluate(digits):
        return _spins(digits[:, coord]).astype(float)

    return evaluate


def parity_evaluator(n: int):
    def evaluate(digits):
        return np.prod(_spins(digits), axis=1).astype(float)

    return evaluate


def sum_evaluator(n: int):
    def evaluate(digits):
        return _spins(digits).sum(axis=1).astype(float)

    return evaluate


def majority_evaluator(n: int):
    if n % 2 == 0:
        raise ValueError("majority needs an odd number of coordinates")

    def evaluate(digits):
        return np.sign(_spins(digits).sum(axis=1)).astype(float)

    return evaluate


def asym_majority_evaluator(n: int, shift: float):
    threshold = shift * math.sqrt(n)

    def evaluate(digits):
        s = _spins(digits).sum(axis=1)
        return np.where(s > threshold, 1.0, -1.0)

    return evaluate


def tribes_evaluator(tribe_size: int, tribe_count: int):
    def evaluate(digits):
        grouped = digits.reshape(len(digits), tribe_count, tribe_size)
        return np.any(np.all(grouped == 1, axis=2), axis=1).astype(float)

    return evaluate


def composite_evaluator(m: int, t: int, shift: float, tribe_size: int | None = None):
    """Asymmetric majority on the first m coordinates, with the sign of the
    shift steered by a tribes function on the remaining t coordinates."""
    l = tribe_size if tribe_size is not None else balanced_tribe_size(t)
    if t % l:
        raise ValueError(f"tribe size {l} does not divide t={t}")
    tribes_part = tribes_evaluator(l, t // l)
    up = shift * math.sqrt(m)

    def evaluate(digits):
        s = _spins(digits[:, :m]).sum(axis=1)
        steer = tribes_part(digits[:, m:])
        threshold = np.where(steer == 1.0, up, -up)
        return np.where(s > threshold, 1.0, -1.0)

    return evaluate


# ---------------------------------------------------------------------------
# dense-table constructors with tagged symmetry groups
# ---------------------------------------------------------------------------
def dictator(n: int, coord: int = 0) -> ZooEntry:
    table = table_from_digits(uniform_space(n), dictator_evaluator(n, coord))
    return ZooEntry(f"dictator:{n},{coord}", n, table, stabilizer_of(coord, n))


def parity(n: int) -> ZooEntry:
    table = table_from_digits(uniform_space(n), parity_evaluator(n))
    return ZooEntry(f"parity:{n}", n, table, symmetric_group_action(n))


def sum_function(n: int) -> ZooEntry:
    table = table_from_digits(uniform_space(n), sum_evaluator(n))
    return ZooEntry(f"sum:{n}", n, table, symmetric_group_action(n))


def majority(n: int) -> ZooEntry:
    table = table_from_digits(uniform_space(n), majority_evaluator(n))
    return ZooEntry(f"maj:{n}", n, table, symmetric_group_action(n))


def asym_majority(n: int, shift: float) -> ZooEntry:
    table = table_from_digits(uniform_space(n), asym_majority_evaluator(n, shift))
    return ZooEntry(f"amaj:{n},{shift}", n, table, symmetric_group_action(n))


def tribes(tribe_size: int, tribe_count: int) -> ZooEntry:
    n = tribe_size * tribe_count
    table = table_from_digits(uniform_space(n), tribes_evaluator(tribe_size, tribe_count))
    return ZooEntry(f"tribes:{tribe_size},{tribe_count}", n, table, tribes_group(tribe_size, tribe_count))


def composite(m: int, t: int, shift: float, tribe_size: int | None = None) -> ZooEntry:
    n = m + t
    table = table_from_digits(
        uniform_space(n), composite_evaluator(m, t, shift, tribe_size)
    )
    return ZooEntry(f"composite:{m},{t},{shift}", n, table, None)


# ---------------------------------------------------------------------------
# calibration helpers
# ---------------------------------------------------------------------------
def balanced_tribe_size(t: int) -> int:
    """Divisor of t whose tribes function is closest to balanced.

    The asymptotically balanced size is log2(t) - log2(log2(t)); at desk
    scale a direct scan over divisors does better.
    """
    best_l, best_gap = 1, float("inf")
    for l in range(1, t + 1):
        if t % l:
            continue
        mean = 1.0 - (1.0 - 0.5**l) ** (t // l)
        gap = abs(mean - 0.5)
        if gap < best_gap:
            best_l, best_gap = l, gap
    return best_l


def coupled_majority_size(t: int) -> int:
    """Majority-block size paired with a tribes block of size t so the two
    blocks' per-coordinate influences match: m = (t / ln t)^(3/2)."""
    if t < 2:
        raise ValueError("need t >= 2")
    return max(1, round((t / math.log(t)) ** 1.5))


def asym_majority_influence(n: int, shift: float) -> float:
    """Exact per-coordinate influence of the shifted majority.

    A flip matters exactly when the other n-1 spins sum into the unit window
    around the threshold, which pins a single attainable sum value.
    """
    threshold = shift * math.sqrt(n)
    lo = math.floor(threshold - 1.0) + 1  # integers s with threshold-1 < s <= threshold+1
    candidates = [s for s in (lo, lo + 1) if s <= threshold + 1.0]
    total = 0.0
    for s in candidates:
        if abs(s) > n - 1 or (s - (n - 1)) % 2:
            continue
        total += math.comb(n - 1, (n - 1 + s) // 2) / 2 ** (n - 1)
    return total


def find_a(n: int, target_influence: float) -> float:
    """Shift making the asymmetric majority's coordinate influence as close
    as possible to the target, by bisection over the (stepwise decreasing)
    influence curve."""
    lo, hi = 0.0, math.sqrt(n) + 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if asym_majority_influence(n, mid) > target_influence:
            lo = mid
        else:
            hi = mid
    if abs(asym_majority_influence(n, lo) - target_influence) <= abs(
        asym_majority_influence(n, hi) - target_influence
    ):
        return lo
    return hi


# ---------------------------------------------------------------------------
# spec-string front end
# ---------------------------------------------------------------------------
SPEC_FORMS = {
    "dictator": "dictator:n[,j]",
    "parity": "parity:n",
    "sum": "sum:n",
    "maj": "maj:n",
    "amaj": "amaj:n,a",
    "tribes": "tribes:l,k",
    "composite": "composite:m,t,a",
}


def _split_spec(spec: str) -> tuple[str, list[str]]:
    head, _, tail = spec.partition(":")
    head = head.strip().lower()
    if head not in SPEC_FORMS:
        raise ParseError(f"unknown zoo family '{head}' (known: {', '.join(SPEC_FORMS)})")
    args = [a for a in tail.split(",") if a] if tail else []
    return head, args


def evaluator_from_spec(spec: str):
    """(n, batch evaluator) for a zoo spec, without building the dense table."""
    head, args = _split_spec(spec)
    try:
        if head == "dictator":
            n = int(args[0])
            coord = int(args[1]) if len(args) > 1 else 0
            return n, dictator_evaluator(n, coord)
        if head == "parity":
            return int(args[0]), parity_evaluator(int(args[0]))
        if head == "sum":
            return int(args[0]), sum_evaluator(int(args[0]))
        if head == "maj":
            return int(args[0]), majority_evaluator(int(args[0]))
        if head == "amaj":
            n = int(args[0])
            return n, asym_majority_evaluator(n, float(args[1]))
        if head == "tribes":
            l, k = int(args[0]), int(args[1])
            return l * k, tribes_evaluator(l, k)
        if head == "composite":
            m, t, a = int(args[0]), int(args[1]), float(args[2])
            return m + t, composite_evaluator(m, t, a)
    except (IndexError, ValueError) as exc:
        raise ParseError(f"bad arguments for '{spec}': expected {SPEC_FORMS[head]}") from exc
    raise ParseError(f"unknown zoo spec '{spec}'")


def from_spec(spec: str) -> ZooEntry:
    head, args = _split_spec(spec)
    try:
        if head == "dictator":
            return dictator(int(args[0]), int(args[1]) if len(args) > 1 else 0)
        if head == "parity":
            return parity(int(args[0]))
        if head == "sum":
            return sum_function(int(args[0]))
        if head == "maj":
            return majority(int(args[0]))
        if head == "amaj":
            return asym_majority(int(args[0]), float(args[1]))
        if head == "tribes":
            return tribes(int(args[0]), int(args[1]))
        if head == "composite":
            return composite(int(args[0]), int(args[1]), float(args[2]))
    except (IndexError, ValueError) as exc:
        raise ParseError(f"bad arguments for '{spec}': expected {SPEC_FORMS[head]}") from exc
    raise ParseError(f"unknown zoo spec '{spec}'")
