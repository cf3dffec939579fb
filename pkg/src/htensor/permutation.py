"""Permutations of ``[m]`` with cached parity, in 1-based notation."""

from __future__ import annotations

import itertools
import re
from functools import cached_property
from typing import Iterator, Sequence


class Permutation:
    """Bijection ``k -> image[k-1]`` on ``{1, ..., m}``.

    >>> Permutation([2, 3, 4, 1])(4)
    1
    >>> Permutation.from_cycles(3, [3, 2, 1]).image
    (3, 1, 2)
    """

    def __init__(self, image: Sequence[int]):
        image = tuple(int(x) for x in image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise ValueError(f"{image} is not a permutation of 1..{len(image)}")
        self.image = image

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(range(1, m + 1))

    @classmethod
    def from_cycles(cls, m: int, *cycles: Sequence[int]) -> "Permutation":
        image = list(range(1, m + 1))
        seen = set()
        for cycle in cycles:
            cycle = [int(c) for c in cycle]
            if seen.intersection(cycle) or len(set(cycle)) != len(cycle):
                raise ValueError(f"cycles overlap: {cycles}")
            seen.update(cycle)
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                if not 1 <= a <= m:
                    raise ValueError(f"cycle entry {a} outside 1..{m}")
                image[a - 1] = b
        return cls(image)

    @classmethod
    def transposition(cls, m: int, a: int, b: int) -> "Permutation":
        return cls.from_cycles(m, [a, b])

    @classmethod
    def parse(cls, text: str, m: int | None = None) -> "Permutation":
        """Parse ``"2,3,4,1"`` (one-line images) or ``"(3 2 1)(4 5)"`` (cycles).

        A cycle without separators such as ``"(2341)"`` is read digit by
        digit. Cycle notation needs ``m`` unless the cycles mention every point.
        """
        text = text.strip()
        if text.startswith("("):
            cycles = []
            for body in re.findall(r"\(([^)]*)\)", text):
                body = body.strip()
                tokens = list(body) if body.isdigit() else re.split(r"[\s,]+", body)
                cycles.append([int(x) for x in tokens if x])
            if re.sub(r"\([^)]*\)", "", text).strip():
                raise ValueError(f"cannot parse cycle notation {text!r}")
            if m is None:
                m = max((max(c) for c in cycles if c), default=0)
            return cls.from_cycles(m, *[c for c in cycles if c])
        perm = cls(int(x) for x in re.split(r"[\s,]+", text) if x)
        if m is not None and perm.m != m:
            raise ValueError(f"permutation {text!r} acts on {perm.m} points, expected {m}")
        return perm

    @property
    def m(self) -> int:
        return len(self.image)

    @cached_property
    def inversions(self) -> int:
        im = self.image
        return sum(1 for a in range(len(im)) for b in range(a + 1, len(im)) if im[a] > im[b])

    @cached_property
    def parity(self) -> int:
        """``(-1)**inversions``."""
        return -1 if self.inversions % 2 else 1

    def __call__(self, k: int) -> int:
        return self.image[k - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """``self o other``: apply ``other`` first."""
        if other.m != self.m:
            raise ValueError("cannot compose permutations of different sizes")
        return Permutation(self.image[o - 1] for o in other.image)

    __matmul__ = compose

    def inverse(self) -> "Permutation":
        inv = [0] * self.m
        for k, s in enumerate(self.image, start=1):
            inv[s - 1] = k
        return Permutation(inv)

    def zero_based(self) -> tuple[int, ...]:
        return tuple(s - 1 for s in self.image)

    def is_identity(self) -> bool:
        return self.image == tuple(range(1, self.m + 1))

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.image == other.image

    def __hash__(self):
        return hash(self.image)

    def __repr__(self):
        return f"Permutation({list(self.image)})"

    def __str__(self):
        return "(" + ",".join(map(str, self.image)) + ")"


def all_permutations(m: int) -> Iterator[Permutation]:
    """Every element of ``P_m`` in lexicographic image order."""
    for image in itertools.permutations(range(1, m + 1)):
        yield Permutation(image)


def adjacent_transpositions(m: int) -> list[Permutation]:
    return [Permutation.transposition(m, k, k + 1) for k in range(1, m)]
