"""Pairwise must-link / cannot-link constraints and their generators."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError


def _normalize_pairs(pairs, n: int, kind: str) -> tuple[tuple[int, int], ...]:
    out = set()
    for pair in pairs:
        i, j = (int(v) for v in pair)
        if i == j:
            raise DataError(f"{kind} pair ({i}, {j}) links a point to itself")
        if not (0 <= i < n and 0 <= j < n):
            raise DataError(f"{kind} pair ({i}, {j}) out of range for n={n}")
        out.add((min(i, j), max(i, j)))
    return tuple(sorted(out))


@dataclass(frozen=True)
class ConstraintSet:
    """Unordered, deduplicated must-link and cannot-link pairs over ``n`` points."""

    n: int
    must_links: tuple[tuple[int, int], ...] = field(default=())
    cannot_links: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise DataError(f"point count must be positive, got {self.n}")
        ml = _normalize_pairs(self.must_links, self.n, "must-link")
        cl = _normalize_pairs(self.cannot_links, self.n, "cannot-link")
        both = set(ml) & set(cl)
        if both:
            raise DataError(f"pairs appear as both must-link and cannot-link: {sorted(both)[:5]}")
        object.__setattr__(self, "must_links", ml)
        object.__setattr__(self, "cannot_links", cl)

    def consistent_with(self, truth) -> bool:
        truth = np.asarray(truth)
        return all(truth[i] == truth[j] for i, j in self.must_links) and all(
            truth[i] != truth[j] for i, j in self.cannot_links
        )


def encode_constraints(cs: ConstraintSet) -> tuple[np.ndarray, np.ndarray]:
    """Dense symmetric matrices ``(M, C)``.

    ``M`` has a 1 at both (i, j) and (j, i) for every must-link; ``C`` holds
    ``1/n_c`` at both positions for each of the ``n_c`` cannot-links.
    """
    n_c = len(cs.cannot_links)
    if n_c == 0:
        raise DataError("cannot-link set empty: trace-ratio denominator undefined")
    M = np.zeros((cs.n, cs.n))
    C = np.zeros((cs.n, cs.n))
    if cs.must_links:
        idx = np.array(cs.must_links)
        M[idx[:, 0], idx[:, 1]] = 1.0
        M[idx[:, 1], idx[:, 0]] = 1.0
    idx = np.array(cs.cannot_links)
    C[idx[:, 0], idx[:, 1]] = 1.0 / n_c
    C[idx[:, 1], idx[:, 0]] = 1.0 / n_c
    return M, C


def _class_members(truth: np.ndarray) -> dict[int, np.ndarray]:
    return {int(c): np.flatnonzero(truth == c) for c in np.unique(truth)}


def _from_selected(n: int, groups: list[np.ndarray]) -> ConstraintSet:
    ml = [p for g in groups for p in itertools.combinations(g.tolist(), 2)]
    cl = [
        (i, j)
        for ga, gb in itertools.combinations(groups, 2)
        for i in ga.tolist()
        for j in gb.tolist()
    ]
    return ConstraintSet(n, tuple(ml), tuple(cl))


def _setting1(truth: np.ndarray, f: int, classes, rng: np.random.Generator) -> ConstraintSet:
    members = _class_members(truth)
    groups = []
    for c in classes:
        pool = members[c]
        if len(pool) < f:
            raise DataError(f"class {c} has {len(pool)} members, fewer than f={f}")
        groups.append(np.sort(rng.choice(pool, size=f, replace=False)))
    cs = _from_selected(len(truth), groups)
    if not cs.cannot_links:
        raise DataError("protocol produced no cannot-links (need at least two classes and f >= 1)")
    return cs


def gen_constraints_setting1(truth, f: int, seed: int) -> ConstraintSet:
    """Pick ``f`` points per class; link all chosen pairs by class agreement."""
    truth = np.asarray(truth, dtype=np.int64)
    if f < 1:
        raise DataError(f"f must be >= 1, got {f}")
    classes = sorted(_class_members(truth))
    return _setting1(truth, f, classes, np.random.default_rng(seed))


def gen_constraints_incomplete(truth, f: int, class_fraction: float, seed: int) -> ConstraintSet:
    """Setting-1 constraints restricted to a random subset of the classes.

    The number of labeled classes is ``round(class_fraction * n_classes)``
    (halves round up). Point selection uses the same random stream as
    :func:`gen_constraints_setting1`, so ``class_fraction=1`` reproduces it.
    """
    truth = np.asarray(truth, dtype=np.int64)
    if not 0.0 < class_fraction <= 1.0:
        raise DataError(f"class_fraction must lie in (0, 1], got {class_fraction}")
    classes = sorted(_class_members(truth))
    k0 = int(math.floor(class_fraction * len(classes) + 0.5))
    if k0 < 2:
        raise DataError(f"class_fraction={class_fraction} selects {k0} classes; need at least 2")
    if k0 < len(classes):
        picker = np.random.default_rng([seed, 1])
        classes = sorted(int(c) for c in picker.choice(classes, size=k0, replace=False))
    return _setting1(truth, f, classes, np.random.default_rng(seed))


def gen_constraints_setting2(truth, n_ml: int, cl_ratio: float, seed: int) -> ConstraintSet:
    """Sample ``n_ml`` same-class and ``round(cl_ratio * n_ml)`` cross-class pairs.

    Pairs are drawn uniformly without replacement.
    """
    truth = np.asarray(truth, dtype=np.int64)
    n = len(truth)
    n_cl = int(round(cl_ratio * n_ml))
    if n_ml < 1 or n_cl < 1:
        raise DataError(
            f"setting 2 needs at least one must-link and one cannot-link (n_ml={n_ml}, n_cl={n_cl})"
        )
    sizes = np.array([len(v) for v in _class_members(truth).values()])
    avail_ml = int((sizes * (sizes - 1) // 2).sum())
    avail_cl = n * (n - 1) // 2 - avail_ml
    if n_ml > avail_ml:
        raise DataError(f"requested {n_ml} must-links but only {avail_ml} same-class pairs exist")
    if n_cl > avail_cl:
        raise DataError(f"requested {n_cl} cannot-links but only {avail_cl} cross-class pairs exist")

    rng = np.random.default_rng(seed)
    ml: list[tuple[int, int]] = []
    cl: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    if 2 * max(n_ml, n_cl) > min(avail_ml, avail_cl):
        # dense request: enumerate and shuffle
        pairs = np.array(list(itertools.combinations(range(n), 2)))
        same = truth[pairs[:, 0]] == truth[pairs[:, 1]]
        ml_pool, cl_pool = pairs[same], pairs[~same]
        ml = [tuple(p) for p in ml_pool[rng.choice(len(ml_pool), n_ml, replace=False)].tolist()]
        cl = [tuple(p) for p in cl_pool[rng.choice(len(cl_pool), n_cl, replace=False)].tolist()]
    else:
        while len(ml) < n_ml or len(cl) < n_cl:
            i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
            pair = (min(i, j), max(i, j))
            if pair in seen:
                continue
            if truth[i] == truth[j]:
                if len(ml) < n_ml:
                    ml.append(pair)
                    seen.add(pair)
            elif len(cl) < n_cl:
                cl.append(pair)
                seen.add(pair)
    return ConstraintSet(n, tuple(ml), tuple(cl))


def read_constraints(path, n: int) -> ConstraintSet:
    """Parse a constraints file of ``ml i j`` / ``cl i j`` lines (``#`` comments allowed)."""
    ml, cl = [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("ml", "cl"):
            raise DataError(f"{path}:{lineno}: expected 'ml i j' or 'cl i j', got {raw!r}")
        try:
            pair = (int(parts[1]), int(parts[2]))
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-integer index in {raw!r}") from None
        (ml if parts[0] == "ml" else cl).append(pair)
    return ConstraintSet(n, tuple(ml), tuple(cl))


def write_constraints(cs: ConstraintSet, path) -> None:
    lines = [f"ml {i} {j}" for i, j in cs.must_links]
    lines += [f"cl {i} {j}" for i, j in cs.cannot_links]
    Path(path).write_text("\n".join(lines) + "\n")
