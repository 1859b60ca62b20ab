"""Permutations, parity, cycle structure, Levi-Civita components and index pairings.

Everything here is 0-based.  Rendering helpers elsewhere shift to 1-based
labels for display.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Iterator, Sequence

from .errors import DomainError, ResourceLimitError, UndefinedSymbolError

MAX_PERMUTATION_SIZE = 11
MAX_PAIRING_ORDER = 12


class Permutation:
    """A bijection of ``{0, ..., n-1}`` given by its images, ``i -> images[i]``."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(int(i) for i in images)
        n = len(images)
        if n == 0:
            raise DomainError("a permutation needs at least one element")
        if sorted(images) != list(range(n)):
            raise DomainError(f"{images} is not a permutation of 0..{n - 1}")
        self.images = images

    @classmethod
    def _trusted(cls, images: tuple) -> "Permutation":
        obj = object.__new__(cls)
        obj.images = images
        return obj

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def from_cycles(cls, cycles, n: int) -> "Permutation":
        """Build the permutation sending each cycle entry to its successor."""
        images = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                images[a] = b
        return cls(images)

    def __len__(self):
        return len(self.images)

    def __getitem__(self, i):
        return self.images[i]

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({list(self.images)})"

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition ``(self * other)(i) = self(other(i))``."""
        if len(self) != len(other):
            raise DomainError("cannot compose permutations of different sizes")
        return Permutation._trusted(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation._trusted(tuple(inv))

    def cycles(self) -> list[list[int]]:
        return cycle_decomposition(self)

    @property
    def sign(self) -> int:
        return -1 if (len(self) - _cycle_count(self.images)) % 2 else 1


def _cycle_count(images: tuple) -> int:
    seen = [False] * len(images)
    count = 0
    for start in range(len(images)):
        if not seen[start]:
            count += 1
            j = start
            while not seen[j]:
                seen[j] = True
                j = images[j]
    return count


def cycle_decomposition(p: Permutation) -> list[list[int]]:
    """Cycles of ``p``, each starting at its minimum, sorted by first element.

    Fixed points are kept as length-1 cycles.
    """
    images = p.images
    seen = [False] * len(images)
    out = []
    for start in range(len(images)):
        if seen[start]:
            continue
        cyc = []
        j = start
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = images[j]
        out.append(cyc)
    return out


def _check_size(n: int, cap: int | None) -> int:
    cap = MAX_PERMUTATION_SIZE if cap is None else cap
    if n < 1:
        raise DomainError(f"permutation size must be positive, got {n}")
    if n > cap:
        raise ResourceLimitError("n", n, cap)
    return cap


def unrank_permutation(rank: int, n: int) -> tuple:
    """Lexicographic unranking via the factorial number system."""
    pool = list(range(n))
    out = []
    for k in range(n - 1, -1, -1):
        f = factorial(k)
        d, rank = divmod(rank, f)
        out.append(pool.pop(d))
    return tuple(out)


def permutations_with_sign(
    n: int, start: int = 0, stop: int | None = None, cap: int | None = None
) -> Iterator[tuple[Permutation, int]]:
    """Yield ``(permutation, sign)`` for S_n in lexicographic order of images.

    ``start``/``stop`` select a half-open range of lexicographic ranks so the
    enumeration can be split between workers; the default covers all ``n!``.
    """
    _check_size(n, cap)
    total = factorial(n)
    stop = total if stop is None else min(stop, total)
    if not 0 <= start <= stop:
        raise DomainError(f"invalid rank range [{start}, {stop})")
    if start == stop:
        return
    a = list(unrank_permutation(start, n))
    sign = -1 if (n - _cycle_count(tuple(a))) % 2 else 1
    for _ in range(stop - start):
        yield Permutation._trusted(tuple(a)), sign
        # next permutation in lexicographic order; track parity of the swaps
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        # reversing a block of length L is floor(L/2) transpositions
        length = n - 1 - i
        a[i + 1:] = reversed(a[i + 1:])
        if (1 + length // 2) % 2:
            sign = -sign


def levi_civita(indices: Sequence[int], m: int) -> int:
    """Component of the Levi-Civita symbol in ``m`` dimensions.

    More than ``m`` indices are accepted and always give 0, since at least one
    value must repeat.  Fewer than ``m`` distinct indices is rejected: the
    symbol carries exactly ``m`` slots.
    """
    idx = [int(i) for i in indices]
    for i in idx:
        if not 0 <= i < m:
            raise DomainError(f"index {i} out of range [0, {m})")
    if len(set(idx)) < len(idx):
        return 0
    if len(idx) != m:
        raise UndefinedSymbolError(
            f"Levi-Civita symbol in {m} dimensions needs {m} indices, got {len(idx)} distinct"
        )
    return -1 if (m - _cycle_count(tuple(idx))) % 2 else 1


@dataclass(frozen=True)
class Pairing:
    """A perfect matching of ``{0, ..., 2p-1}``; pairs stored as sorted ``(a, b)`` with ``a < b``."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple(sorted(tuple(sorted(pr)) for pr in self.pairs))
        flat = [i for pr in pairs for i in pr]
        if any(len(pr) != 2 for pr in pairs) or sorted(flat) != list(range(len(flat))):
            raise DomainError(f"{self.pairs} does not partition 0..{len(flat) - 1} into pairs")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    def __str__(self):
        return " ".join(f"d({a + 1},{b + 1})" for a, b in self.pairs)


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def enumerate_pairings(index_count: int, cap: int | None = None) -> list[Pairing]:
    """All ``(2p-1)!!`` pairings of ``index_count = 2p`` slots.

    Order is lexicographic: the lowest free slot is paired with each later slot
    in increasing order before recursing.
    """
    cap = MAX_PAIRING_ORDER if cap is None else cap
    if index_count < 2 or index_count % 2:
        raise DomainError(f"pairings need an even positive index count, got {index_count}")
    if index_count > cap:
        raise ResourceLimitError("index_count", index_count, cap)

    def rec(free):
        if not free:
            yield ()
            return
        first, rest = free[0], free[1:]
        for k, partner in enumerate(rest):
            for tail in rec(rest[:k] + rest[k + 1:]):
                yield ((first, partner),) + tail

    return [Pairing(pairs) for pairs in rec(tuple(range(index_count)))]
