"""Candidate plane normals: Fibonacci lattices and the coarse-to-fine search."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geometry import angle_error, canonical_normals

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
VIEW_AXIS = np.array([0.0, 0.0, -1.0])

DEFAULT_DELTAS = (20.7, 6.44, 1.99, 0.61)


@dataclass(frozen=True)
class LatticeConfig:
    samples_per_round: int = 32
    rounds: int = 4
    deltas: tuple = DEFAULT_DELTAS
    beam_width: int = 3

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        if self.samples_per_round < 2:
            raise ValueError("samples_per_round must be >= 2")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if len(self.deltas) != self.rounds:
            raise ValueError(
                f"need one delta per round ({self.rounds}), got {len(self.deltas)}"
            )
        if any(d <= 0 or d > 90 for d in self.deltas):
            raise ValueError("deltas must lie in (0, 90] degrees")
        if any(b >= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ValueError("deltas must be strictly decreasing")


@dataclass(frozen=True)
class SphericalCap:
    center: np.ndarray
    half_angle: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(3)
        n = np.linalg.norm(c)
        if n == 0:
            raise ValueError("cap center must be non-zero")
        if not 0 < self.half_angle <= 90:
            raise ValueError("cap half-angle must lie in (0, 90]")
        object.__setattr__(self, "center", c / n)


def _frame(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # deterministic orthonormal complement of axis
    helper = np.array([1.0, 0.0, 0.0])
    if abs(axis[0]) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    return e1, e2


def fibonacci_cap(k: int, cap: SphericalCap) -> np.ndarray:
    """``k`` golden-spiral directions inside ``cap``, the first one being its center.

    Polar angles are spaced uniformly in ``cos`` (equal-area rings), so the
    lattice is the spherical-cap restriction of the usual Fibonacci sphere.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    i = np.arange(k, dtype=float)
    cos_a = math.cos(math.radians(cap.half_angle))
    cos_p = 1.0 - (1.0 - cos_a) * i / k
    sin_p = np.sqrt(np.clip(1.0 - cos_p**2, 0.0, 1.0))
    theta = GOLDEN_ANGLE * i
    e1, e2 = _frame(cap.center)
    v = (
        cos_p[:, None] * cap.center
        + (sin_p * np.cos(theta))[:, None] * e1
        + (sin_p * np.sin(theta))[:, None] * e2
    )
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def fibonacci_hemisphere(k: int) -> np.ndarray:
    """``k`` directions on the viewer-facing hemisphere (``z <= 0``)."""
    return fibonacci_cap(k, SphericalCap(VIEW_AXIS, 90.0))


def confidence_label(w_hat, w_gt, delta: float) -> int:
    return int(angle_error(w_hat, w_gt) < delta)


@dataclass
class RoundResult:
    round: int
    candidates: np.ndarray
    scores: np.ndarray
    best_index: int

    @property
    def best(self) -> np.ndarray:
        return self.candidates[self.best_index]

    @property
    def best_score(self) -> float:
        return float(self.scores[self.best_index])


@dataclass
class SearchResult:
    normal: np.ndarray
    score: float
    trace: list = field(default_factory=list)


def top_indices(scores: np.ndarray, k: int) -> list[int]:
    """Indices of the ``k`` highest scores; equal scores keep sample order."""
    order = np.argsort(-np.asarray(scores, dtype=float), kind="stable")
    return [int(i) for i in order[:k]]


def coarse_to_fine(
    score_fn: Callable[[np.ndarray], float],
    config: LatticeConfig = LatticeConfig(),
    map_fn: Callable | None = None,
) -> SearchResult:
    """Maximise ``score_fn`` over plane normals.

    Round 0 scans the hemisphere.  Round ``i`` scans caps of half-angle
    ``deltas[i - 1]`` around the ``beam_width`` best candidates of the
    previous round, best first; with a beam width of 1 that is the single
    previous winner.  Ties go to the lowest sample index.  Each distinct
    candidate is scored once.  ``map_fn`` (e.g. ``executor.map``) may score
    the candidates of one round concurrently.
    """
    mapper = map_fn or map
    trace: list[RoundResult] = []
    seeds: list[np.ndarray] = []
    memo: dict[bytes, float] = {}
    for r in range(config.rounds):
        if r == 0:
            cand = fibonacci_hemisphere(config.samples_per_round)
        else:
            cand = np.concatenate(
                [
                    fibonacci_cap(config.samples_per_round, SphericalCap(c, config.deltas[r - 1]))
                    for c in seeds
                ]
            )
        cand = canonical_normals(cand)
        keys = [c.tobytes() for c in cand]
        todo = list(dict.fromkeys(k for k in keys if k not in memo))
        if todo:
            vecs = {k: cand[keys.index(k)] for k in todo}
            for k, v in zip(todo, mapper(score_fn, [vecs[k] for k in todo])):
                v = float(v)
                memo[k] = -np.inf if np.isnan(v) else v
        scores = np.array([memo[k] for k in keys], dtype=float)
        top = top_indices(scores, config.beam_width)
        trace.append(RoundResult(r, cand, scores, top[0]))
        seeds = [cand[i] for i in top]
    last = trace[-1]
    return SearchResult(last.best.copy(), last.best_score, trace)


def nearest_neighbor_gaps(v: Sequence) -> np.ndarray:
    """Per-sample angle (degrees) to its nearest other sample, sign-invariant."""
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v, axis=1, keepdims=True)
    c = np.abs(v @ v.T)
    np.fill_diagonal(c, -np.inf)
    return np.degrees(np.arccos(np.clip(c.max(axis=1), -1.0, 1.0)))
