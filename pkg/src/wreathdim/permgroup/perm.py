"""Permutations acting on the right, and generator-presented groups.

Points are 0-based internally and 1-based in cycle notation.  ``x ^ g`` is
``g[x]``; the product ``g * h`` means "first ``g``, then ``h``", so
``x ^ (g*h) == (x ^ g) ^ h``.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from math import gcd

import numpy as np

from ..errors import ValidationError

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def _dtype(degree: int):
    if degree <= 1 << 8:
        return np.uint8
    if degree <= 1 << 16:
        return np.uint16
    return np.uint32


class Permutation:
    """A bijection of ``{0, ..., degree-1}`` stored as its image array."""

    __slots__ = ("_images", "_hash")

    def __init__(self, images: Sequence[int] | np.ndarray, *, check: bool = True):
        arr = np.asarray(images)
        n = arr.shape[0] if arr.ndim == 1 else -1
        if n < 0:
            raise ValidationError("images must be one-dimensional")
        arr = arr.astype(_dtype(n), copy=True)
        if check and n and not np.array_equal(np.sort(arr), np.arange(n)):
            raise ValidationError(f"images {arr.tolist()[:20]} do not form a permutation")
        arr.flags.writeable = False
        self._images = arr
        self._hash = None

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> Permutation:
        obj = object.__new__(cls)
        arr = arr.astype(_dtype(arr.shape[0]), copy=False)
        arr.flags.writeable = False
        obj._images = arr
        obj._hash = None
        return obj

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        return cls._wrap(np.arange(degree))

    @classmethod
    def from_cycles(cls, text: str, degree: int) -> Permutation:
        return cls._wrap(np.asarray(parse_cycles(text, degree)))

    @property
    def degree(self) -> int:
        return self._images.shape[0]

    @property
    def images(self) -> np.ndarray:
        return self._images

    def __getitem__(self, x: int) -> int:
        return int(self._images[x])

    def __call__(self, x: int) -> int:
        return int(self._images[x])

    def __len__(self) -> int:
        return self.degree

    def __mul__(self, other: Permutation) -> Permutation:
        if other.degree != self.degree:
            raise ValidationError("degree mismatch")
        return Permutation._wrap(other._images[self._images])

    def __pow__(self, k: int) -> Permutation:
        result = Permutation.identity(self.degree)
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> Permutation:
        inv = np.empty_like(self._images)
        inv[self._images] = np.arange(self.degree, dtype=inv.dtype)
        return Permutation._wrap(inv)

    def conjugate(self, h: Permutation) -> Permutation:
        """``h^-1 * self * h``."""
        return h.inverse() * self * h

    def is_identity(self) -> bool:
        return bool(np.array_equal(self._images, np.arange(self.degree)))

    def support(self) -> list[int]:
        return np.flatnonzero(self._images != np.arange(self.degree)).tolist()

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, each starting at its least point, sorted."""
        seen = np.zeros(self.degree, dtype=bool)
        img = self._images.tolist()
        out = []
        for start in range(self.degree):
            if seen[start] or img[start] == start:
                continue
            cyc = [start]
            seen[start] = True
            x = img[start]
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = img[x]
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        result = 1
        for cyc in self.cycles():
            result = result * len(cyc) // gcd(result, len(cyc))
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.degree == other.degree and bool(np.array_equal(self._images, other._images))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._images.tobytes())
        return self._hash

    def key(self) -> bytes:
        return self._images.tobytes()

    def __str__(self) -> str:
        return format_cycles(self)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)!r}, degree={self.degree})"


def parse_cycles(text: str, degree: int) -> list[int]:
    """Images (0-based) of the permutation written as ``(1 2 3)(4 5)``.

    Points are 1-based, separated by whitespace or commas.  A point may not
    appear twice, neither within a cycle nor across cycles.
    """
    stripped = text.strip()
    images = list(range(degree))
    if stripped in ("", "()"):
        return images
    leftovers = _CYCLE_RE.sub(" ", stripped)
    if leftovers.strip():
        raise ValidationError(f"malformed cycle notation {text!r}")
    seen: set[int] = set()
    for body in _CYCLE_RE.findall(stripped):
        tokens = [t for t in re.split(r"[\s,]+", body.strip()) if t]
        points = []
        for tok in tokens:
            if not tok.isdigit():
                raise ValidationError(f"bad point {tok!r} in {text!r}")
            p = int(tok)
            if not 1 <= p <= degree:
                raise ValidationError(f"point {p} outside 1..{degree} in {text!r}")
            if p in seen:
                raise ValidationError(f"point {p} repeated in {text!r}")
            seen.add(p)
            points.append(p - 1)
        for a, b in zip(points, points[1:] + points[:1]):
            images[a] = b
    return images


def format_cycles(perm: Permutation) -> str:
    cycles = perm.cycles()
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(p + 1) for p in cyc) + ")" for cyc in cycles)


class PermGroup:
    """A permutation group given by degree and generators.

    Identity generators and duplicates are dropped.
    """

    __slots__ = ("degree", "generators")

    def __init__(self, degree: int, generators: Iterable[Permutation] = ()):
        gens: list[Permutation] = []
        seen: set[Permutation] = set()
        for g in generators:
            if g.degree != degree:
                raise ValidationError(f"generator of degree {g.degree} in a group of degree {degree}")
            if g.is_identity() or g in seen:
                continue
            seen.add(g)
            gens.append(g)
        self.degree = degree
        self.generators = tuple(gens)

    @classmethod
    def from_cycles(cls, degree: int, cycle_strings: Iterable[str]) -> PermGroup:
        return cls(degree, [Permutation.from_cycles(s, degree) for s in cycle_strings])

    def is_transitive(self) -> bool:
        from .orbits import orbit_of_point

        return len(orbit_of_point(0, self.generators, self.degree)) == self.degree

    def order(self, cap: int = 10**6) -> int:
        from .orbits import enumerate_group

        return len(enumerate_group(self.generators, self.degree, cap))

    def __repr__(self) -> str:
        gens = ", ".join(format_cycles(g) for g in self.generators)
        return f"PermGroup(degree={self.degree}, generators=[{gens}])"
