"""Product action of a wreath product on tuples.

A point of ``Omega^d`` with ``|Omega| = m`` is the tuple ``(x_0, ..., x_{d-1})``
ranked lexicographically with coordinate 0 most significant:
``rank = sum x_i * m**(d-1-i)``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..errors import CapacityError, ValidationError
from .perm import Permutation, PermGroup

DEFAULT_MAX_POINTS = 1 << 20


def product_size(m: int, d: int) -> int:
    return m**d


@dataclass(frozen=True)
class ProductDomain:
    m: int
    d: int
    max_points: int = DEFAULT_MAX_POINTS
    _digits: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise ValidationError(f"bad product domain m={self.m}, d={self.d}")
        if self.d * (self.m.bit_length() - 1) > self.max_points.bit_length() or self.m**self.d > self.max_points:
            raise CapacityError(f"product domain {self.m}^{self.d} exceeds {self.max_points} points")

    @property
    def size(self) -> int:
        return self.m**self.d

    @property
    def weights(self) -> np.ndarray:
        return self.m ** np.arange(self.d - 1, -1, -1, dtype=np.int64)

    def rank(self, coords: Sequence[int]) -> int:
        r = 0
        for x in coords:
            r = r * self.m + x
        return r

    def unrank(self, point: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.d):
            point, r = divmod(point, self.m)
            out.append(r)
        return tuple(reversed(out))

    def digits(self) -> np.ndarray:
        """``(size, d)`` array of coordinates of every point."""
        if not self._digits:
            pts = np.arange(self.size, dtype=np.int64)
            self._digits.append((pts[:, None] // self.weights[None, :]) % self.m)
        return self._digits[0]


def coordinate_subgroup_generators(group: PermGroup, position: int, domain: ProductDomain) -> list[Permutation]:
    """Generators of the copy of ``group`` acting on coordinate ``position`` only."""
    if group.degree != domain.m:
        raise ValidationError(f"group degree {group.degree} != alphabet size {domain.m}")
    if not 0 <= position < domain.d:
        raise ValidationError(f"coordinate {position} outside 0..{domain.d - 1}")
    if not group.generators:
        return []
    digits = domain.digits()[:, position]
    base = np.arange(domain.size, dtype=np.int64)
    w = int(domain.weights[position])
    out = []
    for s in group.generators:
        moved = s.images.astype(np.int64)[digits]
        out.append(Permutation._wrap(base + (moved - digits) * w))
    return out


def top_action_generators(top: PermGroup, domain: ProductDomain) -> list[Permutation]:
    """Generators of ``top`` permuting coordinates.

    Right action: the image of ``x`` is the tuple ``y`` with ``y[i^h] = x[i]``.
    """
    if top.degree != domain.d:
        raise ValidationError(f"top group degree {top.degree} != coordinate count {domain.d}")
    if not top.generators:
        return []
    digits = domain.digits()
    w = domain.weights
    return [Permutation._wrap(digits @ w[h.images.astype(np.int64)]) for h in top.generators]


def collapse_top_action(perm: Permutation, domain: ProductDomain) -> Permutation | None:
    """Recover the coordinate permutation ``h`` from a pure top-action element.

    Returns ``None`` if ``perm`` is not of that form.
    """
    if domain.m < 2:
        return None
    coords = []
    for i in range(domain.d):
        unit = int(domain.weights[i])
        image = domain.unrank(perm[unit])
        ones = [j for j, v in enumerate(image) if v]
        if len(ones) != 1 or image[ones[0]] != 1:
            return None
        coords.append(ones[0])
    try:
        h = Permutation(coords)
    except ValidationError:
        return None
    candidate = top_action_generators(PermGroup(domain.d, [h]), domain) if not h.is_identity() else [Permutation.identity(domain.size)]
    return h if candidate[0] == perm else None


def moved_coordinates(perm: Permutation, domain: ProductDomain) -> set[int]:
    """Coordinates changed by ``perm`` at some point."""
    digits = domain.digits()
    diff = digits[perm.images.astype(np.int64)] != digits
    return set(np.flatnonzero(diff.any(axis=0)).tolist())


def base_generators(group: PermGroup, positions: Iterable[int], domain: ProductDomain) -> list[Permutation]:
    out: list[Permutation] = []
    for i in positions:
        out.extend(coordinate_subgroup_generators(group, i, domain))
    return out
