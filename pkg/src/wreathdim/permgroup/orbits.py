"""Orbits, invariance tests and brute-force closure."""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import CapacityError, ValidationError
from .perm import Permutation, format_cycles

DEFAULT_ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class Orbit:
    points: tuple[int, ...]

    @property
    def min_point(self) -> int:
        return self.points[0]

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class OrbitPartition:
    """Orbits sorted by least point; ``orbit_of[x]`` is the index of x's orbit."""

    degree: int
    orbit_of: np.ndarray
    orbits: tuple[Orbit, ...]

    def __len__(self) -> int:
        return len(self.orbits)

    def sizes(self) -> list[int]:
        return [len(o) for o in self.orbits]

    def min_points(self) -> list[int]:
        return [o.min_point for o in self.orbits]

    def union(self, indices: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for i in indices:
            out.update(self.orbits[i].points)
        return out

    def to_text(self) -> str:
        lines = [f"degree {self.degree}", f"orbits {len(self.orbits)}"]
        for i, o in enumerate(self.orbits):
            lines.append(f"{i}: size={len(o)} min={o.min_point} points=" + " ".join(map(str, o.points)))
        return "\n".join(lines) + "\n"


def _check_degree(generators: Sequence[Permutation], degree: int) -> None:
    for g in generators:
        if g.degree != degree:
            raise ValidationError(f"generator of degree {g.degree}, expected {degree}")


def orbits(generators: Sequence[Permutation], degree: int) -> OrbitPartition:
    """Orbit partition of the group generated by ``generators``.

    The orbits are the connected components of the graph with an edge
    ``x -> x^g`` per point and generator (found by graph search).
    """
    _check_degree(generators, degree)
    if degree == 0:
        return OrbitPartition(0, np.zeros(0, dtype=np.int64), ())
    src = np.arange(degree, dtype=np.int64)
    if generators:
        rows = np.concatenate([src] * len(generators))
        cols = np.concatenate([g.images.astype(np.int64) for g in generators])
    else:
        rows = cols = src
    graph = coo_matrix((np.ones(rows.shape[0], dtype=np.int8), (rows, cols)), shape=(degree, degree))
    _, labels = connected_components(graph, directed=True, connection="weak")
    # relabel components by least point; points come out in ascending order
    order = np.argsort(labels, kind="stable")
    sorted_labels = labels[order]
    starts = np.flatnonzero(np.r_[True, sorted_labels[1:] != sorted_labels[:-1]])
    groups = np.split(order, starts[1:])
    groups.sort(key=lambda pts: int(pts[0]))
    orbit_of = np.empty(degree, dtype=np.int64)
    result = []
    for i, pts in enumerate(groups):
        orbit_of[pts] = i
        result.append(Orbit(tuple(pts.tolist())))
    orbit_of.flags.writeable = False
    return OrbitPartition(degree, orbit_of, tuple(result))


def orbit_of_point(point: int, generators: Sequence[Permutation], degree: int) -> list[int]:
    """Breadth-first orbit of a single point, in discovery order."""
    _check_degree(generators, degree)
    if not 0 <= point < degree:
        raise ValidationError(f"point {point} outside 0..{degree - 1}")
    images = [g.images.tolist() for g in generators]
    seen = {point}
    out = [point]
    queue = deque([point])
    while queue:
        x = queue.popleft()
        for img in images:
            y = img[x]
            if y not in seen:
                seen.add(y)
                out.append(y)
                queue.append(y)
    return out


def _mask(points: Iterable[int], degree: int) -> np.ndarray:
    mask = np.zeros(degree, dtype=bool)
    idx = np.fromiter(points, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= degree):
        raise ValidationError(f"point outside 0..{degree - 1}")
    mask[idx] = True
    return mask


def is_invariant(points: Iterable[int], generators: Sequence[Permutation], degree: int | None = None) -> bool:
    """Whether every generator maps ``points`` into itself."""
    if not generators:
        return True
    degree = generators[0].degree if degree is None else degree
    _check_degree(generators, degree)
    mask = _mask(points, degree)
    return all(bool(mask[g.images[mask]].all()) for g in generators)


def complement_invariance_agrees(points: Iterable[int], generators: Sequence[Permutation],
                                 degree: int | None = None) -> bool:
    """A set is invariant exactly when its complement is."""
    points = set(points)
    if degree is None:
        if not generators:
            return True
        degree = generators[0].degree
    complement = set(range(degree)) - points
    return is_invariant(points, generators, degree) == is_invariant(complement, generators, degree)


def enumerate_group(generators: Sequence[Permutation], degree: int,
                    cap: int = DEFAULT_ENUMERATION_CAP) -> set[Permutation]:
    """All elements of the generated group, by breadth-first closure.

    Raises :class:`CapacityError` as soon as more than ``cap`` elements appear.
    """
    _check_degree(generators, degree)
    identity = Permutation.identity(degree)
    gens = [g.images for g in generators]
    seen = {identity.key(): identity}
    frontier = [identity.images]
    while frontier:
        nxt = []
        for arr in frontier:
            for g in gens:
                prod = g[arr]  # arr then g
                key = prod.tobytes()
                if key not in seen:
                    if len(seen) >= cap:
                        raise CapacityError(f"group has more than {cap} elements")
                    perm = Permutation._wrap(prod)
                    seen[key] = perm
                    nxt.append(perm.images)
        frontier = nxt
    return set(seen.values())


def describe_generators(generators: Sequence[Permutation]) -> list[str]:
    return [format_cycles(g) for g in generators]
