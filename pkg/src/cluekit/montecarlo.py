"""Seed-deterministic Monte Carlo estimators for clue, noise stability, and
expected clue of Bernoulli coordinate sets.

Estimation scheme for clue: sample outer marginals on the conditioning set,
complete each one several times independently, and split the sample variance
into between-fiber and within-fiber parts.  The naive between-fiber variance
overshoots the projected variance by (within variance) / m_inner; the
corrected estimator subtracts that term.

Determinism: work is cut into fixed-size chunks addressed by (master seed,
chunk index) through a SplitMix64 mix feeding a Philox generator, and
per-chunk results are reduced in fixed chunk order.  Thread count (capped by
the CLUEKIT_THREADS environment variable) only maps chunks onto workers, so
results are bitwise identical at any parallelism.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .core import ProductSpace, mask_indices
from .errors import DegenerateError

GENERATOR_ID = "philox4x64/splitmix64"
CHUNK = 256
BATCHES = 16
MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 mixer (public-domain constants)."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def generator_for(seed: int, stream: int) -> np.random.Generator:
    """Independent generator for (seed, stream), reproducible by contract."""
    key = splitmix64((seed & MASK64) ^ splitmix64(stream & MASK64))
    return np.random.Generator(np.random.Philox(key=key))


def thread_count(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("CLUEKIT_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    n_outer: int
    m_inner: int
    seed: int
    generator: str = GENERATOR_ID
    clamped: bool = False
    uncorrected: float | None = None


def _sample_digits(space: ProductSpace, coords: list[int], rows: int, rng) -> np.ndarray:
    """(rows, len(coords)) digit matrix drawn from the product marginals."""
    out = np.empty((rows, len(coords)), dtype=np.uint8)
    u = rng.random((rows, len(coords)))
    for j, v in enumerate(coords):
        cdf = np.cumsum(space.pi[v])
        out[:, j] = np.searchsorted(cdf, u[:, j], side="right").clip(0, space.q - 1)
    return out


def _pairwise_sum(chunks: list[np.ndarray]) -> np.ndarray:
    """Reduce in a fixed pairwise tree so float results are order-stable."""
    items = list(chunks)
    while len(items) > 1:
        items = [
            items[i] + items[i + 1] if i + 1 < len(items) else items[i]
            for i in range(0, len(items), 2)
        ]
    return items[0]


def _run_chunks(worker, n_chunks: int, threads: int) -> list:
    if threads <= 1:
        return [worker(c) for c in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(n_chunks)))


def mc_clue(
    evaluator,
    space: ProductSpace,
    mask: int,
    n_outer: int,
    m_inner: int,
    seed: int,
    threads: int | None = None,
) -> McEstimate:
    """Nested estimate of Var(E[f | mask]) / Var(f).

    Per outer draw: one marginal on the conditioning coordinates, ``m_inner``
    fresh completions of the rest.  Between-fiber variance minus
    (within variance / m_inner) estimates the numerator without nesting bias;
    adding back the within variance estimates the denominator.  stderr comes
    from batch means over fixed chunk groups.  A corrected numerator that
    lands at or below 0 is clamped and flagged.
    """
    if n_outer < 2 or m_inner < 2:
        raise ValueError("need n_outer >= 2 and m_inner >= 2")
    inside = mask_indices(mask)
    outside = [v for v in range(space.n) if v not in inside]
    n_chunks = (n_outer + CHUNK - 1) // CHUNK

    def worker(chunk_idx: int) -> np.ndarray:
        rows = min(CHUNK, n_outer - chunk_idx * CHUNK)
        rng = generator_for(seed, chunk_idx)
        u_part = _sample_digits(space, inside, rows, rng)
        digits = np.empty((rows * m_inner, space.n), dtype=np.uint8)
        if inside:
            digits[:, inside] = np.repeat(u_part, m_inner, axis=0)
        if outside:
            digits[:, outside] = _sample_digits(space, outside, rows * m_inner, rng)
        values = np.asarray(evaluator(digits), dtype=float).reshape(rows, m_inner)
        fiber_means = values.mean(axis=1)
        within_ss = float(np.sum((values - fiber_means[:, None]) ** 2))
        batch = chunk_idx % BATCHES
        out = np.zeros((BATCHES, 4))
        out[batch] = [rows, fiber_means.sum(), float(fiber_means @ fiber_means), within_ss]
        return out

    stats = _pairwise_sum(_run_chunks(worker, n_chunks, thread_count(threads)))

    def ratio(rows_sums: np.ndarray) -> tuple[float, float, bool]:
        count, s1, s2, within_ss = rows_sums
        if count < 2:
            return np.nan, np.nan, False
        mean = s1 / count
        between = (s2 - count * mean**2) / (count - 1)
        within = within_ss / (count * (m_inner - 1))
        numerator = between - within / m_inner
        total = numerator + within
        clamped = False
        if numerator <= 0.0:
            numerator = 0.0
            clamped = True
        if total <= 0.0:
            raise DegenerateError("total variance estimate vanished")
        return numerator / total, between / total, clamped

    overall, uncorrected, clamped = ratio(stats.sum(axis=0))
    batch_estimates = [
        ratio(stats[b])[0] for b in range(BATCHES) if stats[b, 0] >= 2
    ]
    if len(batch_estimates) >= 2:
        arr = np.array(batch_estimates)
        stderr = float(arr.std(ddof=1) / sqrt(len(arr)))
    else:
        stderr = 0.0
    return McEstimate(
        estimate=float(overall),
        stderr=stderr,
        n_outer=n_outer,
        m_inner=m_inner,
        seed=seed,
        clamped=clamped,
        uncorrected=float(uncorrected),
    )


def mc_stability(
    evaluator,
    n: int,
    p: float,
    samples: int,
    seed: int,
    threads: int | None = None,
) -> McEstimate:
    """Normalized noise stability Cov(f(w), f(w')) / Var(f), where w' keeps
    each fair bit with probability p and refreshes it otherwise."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if not 0.0 <= p <= 1.0:
        raise ValueError("noise level p must lie in [0, 1]")
    n_chunks = (samples + CHUNK - 1) // CHUNK

    def worker(chunk_idx: int) -> np.ndarray:
        rows = min(CHUNK, samples - chunk_idx * CHUNK)
        rng = generator_for(seed, chunk_idx)
        base = (rng.random((rows, n)) < 0.5).astype(np.uint8)
        keep = rng.random((rows, n)) < p
        fresh = (rng.random((rows, n)) < 0.5).astype(np.uint8)
        noisy = np.where(keep, base, fresh)
        x = np.asarray(evaluator(base), dtype=float)
        y = np.asarray(evaluator(noisy), dtype=float)
        batch = chunk_idx % BATCHES
        out = np.zeros((BATCHES, 6))
        out[batch] = [rows, x.sum(), y.sum(), float(x @ y), float(x @ x), float(y @ y)]
        return out

    stats = _pairwise_sum(_run_chunks(worker, n_chunks, thread_count(threads)))

    def ratio(row: np.ndarray) -> float:
        count, sx, sy, sxy, sxx, _ = row
        if count < 2:
            return np.nan
        cov = (sxy - sx * sy / count) / (count - 1)
        var = (sxx - sx**2 / count) / (count - 1)
        if var <= 0.0:
            raise DegenerateError("variance estimate vanished")
        return cov / var

    overall = ratio(stats.sum(axis=0))
    batch_estimates = [ratio(stats[b]) for b in range(BATCHES) if stats[b, 0] >= 2]
    stderr = 0.0
    if len(batch_estimates) >= 2:
        arr = np.array(batch_estimates)
        stderr = float(arr.std(ddof=1) / sqrt(len(arr)))
    return McEstimate(
        estimate=float(overall),
        stderr=stderr,
        n_outer=samples,
        m_inner=1,
        seed=seed,
    )


def mc_expected_clue_bernoulli(
    evaluator,
    space: ProductSpace,
    p: float,
    n_sets: int,
    n_outer: int,
    m_inner: int,
    seed: int,
    threads: int | None = None,
) -> McEstimate:
    """Average of mc_clue over coordinate sets drawn Bernoulli(p) per
    coordinate; estimates the expected clue of a random density-p subset."""
    mask_rng = generator_for(seed, 1 << 32)
    estimates = []
    clamped = False
    for k in range(n_sets):
        bits = mask_rng.random(space.n) < p
        mask = int(sum(1 << v for v in range(space.n) if bits[v]))
        est = mc_clue(evaluator, space, mask, n_outer, m_inner, seed + 7919 * (k + 1), threads)
        estimates.append(est.estimate)
        clamped = clamped or est.clamped
    arr = np.array(estimates)
    stderr = float(arr.std(ddof=1) / sqrt(n_sets)) if n_sets >= 2 else 0.0
    return McEstimate(
        estimate=float(arr.mean()),
        stderr=stderr,
        n_outer=n_outer,
        m_inner=m_inner,
        seed=seed,
        clamped=clamped,
    )
