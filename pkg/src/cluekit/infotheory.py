"""Entropy-based measures: exact mutual information between a function's
value and a coordinate marginal, the I-clue and KL-clue ratios, and
Shearer-type covering inequalities.

All entropies are in nats.  Function values are grouped into a discrete
variable with absolute tolerance 1e-12, and every quantity is computed from
the exact joint table (no estimation).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    FunctionTable,
    complement_mask,
    conditional_marginal,
    expectation,
    validate_mask,
)
from .errors import DegenerateError

VALUE_GROUP_TOL = 1e-12


def entropy(probs: np.ndarray) -> float:
    """-sum p ln p with 0 ln 0 = 0, in nats."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))


def group_values(values: np.ndarray, tol: float = VALUE_GROUP_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Group near-equal reals (ties within ``tol`` merge).

    Returns (codes, representatives): codes[i] indexes the group of values[i].
    """
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    new_group = np.empty(len(values), dtype=bool)
    new_group[0] = True
    new_group[1:] = np.diff(sorted_vals) > tol
    group_of_sorted = np.cumsum(new_group) - 1
    codes = np.empty(len(values), dtype=np.int64)
    codes[order] = group_of_sorted
    reps = sorted_vals[new_group]
    return codes, reps


@dataclass(frozen=True, eq=False)
class DiscreteJoint:
    """Exact joint law of (function value group, coordinate marginal)."""

    table: np.ndarray = field(repr=False)  # shape (n_values, n_marginal_configs)
    value_reps: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if np.any(t < 0.0):
            raise ValueError("joint probabilities must be nonnegative")
        if abs(t.sum() - 1.0) > 1e-12:
            raise ValueError("joint probabilities must sum to 1")


def joint_with_subset(f: FunctionTable, mask: int) -> DiscreteJoint:
    space = f.space
    space.check_exact_guard()
    validate_mask(mask, space.n)
    codes, reps = group_values(f.values)
    kept = [v for v in range(space.n) if (mask >> v) & 1]
    u_codes = np.zeros(space.size, dtype=np.int64)
    digits = space.digits()
    scale = 1
    for v in kept:
        u_codes += digits[:, v].astype(np.int64) * scale
        scale *= space.q
    n_u = space.q ** len(kept)
    n_z = len(reps)
    flat = np.bincount(
        codes * n_u + u_codes, weights=space.config_weights(), minlength=n_z * n_u
    )
    return DiscreteJoint(flat.reshape(n_z, n_u), reps)


def mutual_information(f: FunctionTable, mask: int) -> float:
    """I(Z : X_mask) where Z groups the values of f; never below -1e-12."""
    joint = joint_with_subset(f, mask).table
    h_z = entropy(joint.sum(axis=1))
    h_u = entropy(joint.sum(axis=0))
    h_joint = entropy(joint.reshape(-1))
    return max(h_z + h_u - h_joint, 0.0)


def value_entropy(f: FunctionTable) -> float:
    """Entropy of the grouped value distribution of f."""
    codes, reps = group_values(f.values)
    probs = np.bincount(codes, weights=f.space.config_weights(), minlength=len(reps))
    return entropy(probs)


def i_clue(f: FunctionTable, mask: int) -> float:
    """I(Z : X_mask) / H(Z), in [0, 1]."""
    h_z = value_entropy(f)
    if h_z <= 0.0:
        raise DegenerateError("constant function: I-clue undefined")
    return min(mutual_information(f, mask) / h_z, 1.0)


def sig_i(f: FunctionTable, mask: int) -> float:
    """Entropy dual: 1 - I(Z : X_{mask^c}) / H(Z)."""
    return 1.0 - i_clue(f, complement_mask(mask, f.n))


# ---------------------------------------------------------------------------
# the multiplicative entropy functional and the KL-clue
# ---------------------------------------------------------------------------
def ent_functional(f: FunctionTable) -> float:
    """E[f ln f] - E[f] ln E[f] for f >= 0, with 0 ln 0 = 0.

    Nonnegative by convexity; equals the relative entropy of the f-biased
    measure against the base measure, scaled by E[f].
    """
    vals = f.values
    if np.any(vals < 0.0):
        raise ValueError("ent_functional needs f >= 0")
    mean = expectation(f)
    if mean <= 0.0:
        raise DegenerateError("ent_functional needs E[f] > 0")
    w = f.space.config_weights()
    xlogx = np.where(vals > 0.0, vals * np.log(np.maximum(vals, 1e-300)), 0.0)
    return float(w @ xlogx) - mean * np.log(mean)


def _ent_of_marginal(f: FunctionTable, mask: int) -> float:
    vals, w = conditional_marginal(f, mask)
    mean = float(w @ vals)
    xlogx = np.where(vals > 0.0, vals * np.log(np.maximum(vals, 1e-300)), 0.0)
    return float(w @ xlogx) - mean * np.log(mean)


def kl_clue(f: FunctionTable, mask: int) -> float:
    """Ent(E[f | mask]) / Ent(f), in [0, 1], for f >= 0."""
    validate_mask(mask, f.n)
    if np.any(f.values < 0.0):
        raise ValueError("kl_clue needs f >= 0")
    denom = ent_functional(f)
    if denom <= 0.0:
        raise DegenerateError("constant function: KL clue undefined")
    return min(max(_ent_of_marginal(f, mask), 0.0) / denom, 1.0)


# ---------------------------------------------------------------------------
# covering inequalities
# ---------------------------------------------------------------------------
def _check_cover(n: int, cover: list[int], k: int):
    for mask in cover:
        validate_mask(mask, n)
    for j in range(n):
        mult = sum(1 for mask in cover if (mask >> j) & 1)
        if mult > k:
            raise ValueError(
                f"coordinate {j} appears in {mult} cover sets, more than k={k}"
            )


def shearer_deficit(f: FunctionTable, cover: list[int], k: int) -> float:
    """k H(Z) - sum_j I(Z : X_{S_j}) for a cover where every coordinate lies
    in at most k sets; nonnegative on product measures."""
    _check_cover(f.n, cover, k)
    h_z = value_entropy(f)
    return k * h_z - float(sum(mutual_information(f, mask) for mask in cover))


def kl_cover_deficit(f: FunctionTable, cover: list[int], k: int) -> float:
    """k Ent(f) - sum_j Ent(E[f | S_j]) for f >= 0; the marginal relative
    entropies of the f-biased measure cannot exceed k times the total."""
    if np.any(f.values < 0.0):
        raise ValueError("kl_cover_deficit needs f >= 0")
    _check_cover(f.n, cover, k)
    total = ent_functional(f)
    return k * total - float(sum(_ent_of_marginal(f, mask) for mask in cover))
