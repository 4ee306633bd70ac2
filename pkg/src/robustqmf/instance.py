"""Value lists for noisy minimum finding: ranks, fudge zones, density parameter.

An instance is an ordered list of distinct real values.  The comparison noise
model is resolution-limited: a comparator may answer arbitrarily whenever two
values lie within distance 1 of each other (the "fudge zone").  The density
parameter ``delta`` is the smallest integer such that every fudge zone holds
at most ``2 * delta`` elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FudgeReport:
    """Per-index fudge-zone sizes together with the minimal density bound."""

    sizes: tuple[int, ...]
    delta: int


class Instance:
    """Immutable list of distinct values on the real line, unit resolution.

    Values are normalized so that the comparator's blind spot has radius 1:
    passing ``alpha != 1`` rescales all values by ``1/alpha`` at construction.
    Ties are rejected.
    """

    __slots__ = ("values", "_order", "_pos", "_sorted", "_lo", "_hi")

    def __init__(self, values, alpha: float = 1.0):
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        vals = tuple(float(v) / alpha for v in values)
        if len(vals) < 2:
            raise ValueError("instance needs at least 2 values")
        if len(set(vals)) != len(vals):
            raise ValueError("instance values must be pairwise distinct")
        self.values = vals
        arr = np.asarray(vals)
        order = np.argsort(arr, kind="stable")
        svals = arr[order]
        pos = np.empty(len(vals), dtype=np.int64)
        pos[order] = np.arange(len(vals))
        self._order = order.tolist()
        self._pos = pos.tolist()
        self._sorted = svals.tolist()
        lo, hi = self._fudge_windows(svals)
        self._lo = lo
        self._hi = hi

    @staticmethod
    def _fudge_windows(svals: np.ndarray) -> tuple[list[int], list[int]]:
        """Per sorted position, the sorted range within distance 1 (inclusive).

        searchsorted gives a fast first guess; boundaries whose rounding
        disagrees with the float predicate ``svals[k] - svals[j] <= 1.0``
        (the one the comparator applies) are nudged individually.
        """
        n = len(svals)
        ks = np.arange(n)
        lo = np.searchsorted(svals, svals - 1.0, side="left")
        hi = np.searchsorted(svals, svals + 1.0, side="right") - 1
        lo_bad = (svals - svals[lo] > 1.0) | ((lo > 0) & (svals - svals[np.maximum(lo - 1, 0)] <= 1.0))
        hi_bad = (svals[hi] - svals > 1.0) | ((hi < n - 1) & (svals[np.minimum(hi + 1, n - 1)] - svals <= 1.0))
        lo = lo.tolist()
        hi = hi.tolist()
        sv = svals.tolist()
        for k in ks[lo_bad].tolist():
            b = lo[k]
            while b > 0 and sv[k] - sv[b - 1] <= 1.0:
                b -= 1
            while b < k and sv[k] - sv[b] > 1.0:
                b += 1
            lo[k] = b
        for k in ks[hi_bad].tolist():
            t = hi[k]
            while t + 1 < n and sv[t + 1] - sv[k] <= 1.0:
                t += 1
            while t > k and sv[t] - sv[k] > 1.0:
                t -= 1
            hi[k] = t
        return lo, hi

    @property
    def n(self) -> int:
        return len(self.values)

    def _check_index(self, j: int) -> None:
        if not 0 <= j < len(self.values):
            raise IndexError(f"index {j} out of range for instance of size {len(self.values)}")

    def rank(self, j: int) -> int:
        """1 + number of elements strictly smaller; the minimum has rank 1."""
        self._check_index(j)
        return self._pos[j] + 1

    def index_of_rank(self, r: int) -> int:
        """Inverse of :meth:`rank`."""
        if not 1 <= r <= len(self.values):
            raise IndexError(f"rank {r} out of range")
        return self._order[r - 1]

    def minimum(self) -> int:
        return self._order[0]

    def fudge_zone(self, j: int) -> set[int]:
        """Indices i != j with |values[i] - values[j]| <= 1 (non-strict)."""
        self._check_index(j)
        k = self._pos[j]
        order = self._order
        return {order[p] for p in range(self._lo[k], self._hi[k] + 1) if p != k}

    def fudge_size(self, j: int) -> int:
        self._check_index(j)
        k = self._pos[j]
        return self._hi[k] - self._lo[k]

    def fudge_split(self, j: int) -> tuple[list[int], list[int]]:
        """Fudge members below and above j, as index lists."""
        self._check_index(j)
        k = self._pos[j]
        order = self._order
        below = [order[p] for p in range(self._lo[k], k)]
        above = [order[p] for p in range(k + 1, self._hi[k] + 1)]
        return below, above

    def delta(self) -> FudgeReport:
        """Minimal Delta such that every fudge zone has at most 2*Delta members."""
        sizes = tuple(self._hi[k] - self._lo[k] for k in range(self.n))
        per_index = tuple(sizes[self._pos[j]] for j in range(self.n))
        return FudgeReport(sizes=per_index, delta=math.ceil(max(per_index) / 2))

    def sorted_order(self) -> list[int]:
        return self._order

    def __repr__(self) -> str:
        return f"Instance(n={self.n}, delta={self.delta().delta})"


GENERATOR_KINDS = ("uniform-spread", "clustered", "grid")


def generate(kind: str, n: int, target_delta: int, seed: int) -> Instance:
    """Build a benchmark instance, deterministic in all arguments.

    ``uniform-spread`` keeps all pairwise gaps above 1 (delta 0).
    ``clustered`` plants disjoint clusters of ``2*target_delta + 1`` values
    inside sub-unit intervals, separated by wide gaps.
    ``grid`` spaces values by ``2 / (2*target_delta + 1)`` so interior
    elements see exactly ``2*target_delta`` fudge neighbors.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if target_delta < 0:
        raise ValueError(f"target_delta must be >= 0, got {target_delta}")
    rng = np.random.default_rng(seed)
    if kind == "uniform-spread":
        if target_delta != 0:
            raise ValueError("uniform-spread can only realize target_delta=0")
        vals = np.cumsum(1.05 + 0.95 * rng.random(n))
    elif kind == "clustered":
        size = 2 * target_delta + 1
        n_clusters, rem = divmod(n, size)
        if n_clusters < 1:
            raise ValueError(f"cluster size {size} exceeds n={n}")
        centers = np.cumsum(3.0 + rng.random(n_clusters + rem))
        if size == 1:
            vals = centers
        else:
            step = 0.8 / (size - 1)
            offsets = -0.4 + step * np.arange(size)
            jitter = 0.2 * step * (rng.random((n_clusters, size)) - 0.5)
            clustered = (centers[:n_clusters, None] + offsets[None, :] + jitter).ravel()
            vals = np.concatenate([clustered, centers[n_clusters:]])
    elif kind == "grid":
        if n < 2 * target_delta + 1:
            raise ValueError(f"grid with target_delta={target_delta} needs n >= {2 * target_delta + 1}")
        spacing = 2.0 / (2 * target_delta + 1)
        vals = spacing * np.arange(n)
    else:
        raise ValueError(f"unknown generator kind {kind!r}; expected one of {GENERATOR_KINDS}")
    vals = np.asarray(vals, dtype=float)
    rng.shuffle(vals)
    return Instance(vals.tolist())


def save_instance(inst: Instance, path: str) -> None:
    """Plain-text format: header line, then one decimal value per line."""
    with open(path, "w") as fh:
        fh.write(f"# n={inst.n} alpha=1\n")
        for v in inst.values:
            fh.write(f"{v!r}\n")


def load_instance(path: str) -> Instance:
    values = []
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise ValueError(f"{path}: missing header line")
        for line in fh:
            line = line.strip()
            if line:
                values.append(float(line))
    return Instance(values)
