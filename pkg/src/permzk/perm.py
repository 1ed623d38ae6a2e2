"""Exact permutation arithmetic on the points {1, ..., m}.

Composition convention, fixed once for the whole package: the left factor
acts first, so (a * b)(i) = b(a(i)).  With that convention the conjugate
``y.conjugated_by(v)`` equals v^-1 * y * v and sends v(i) to v(y(i)).
"""

from __future__ import annotations

from typing import Optional, Sequence


class Permutation:
    """An immutable bijection of {1, ..., m} stored in one-line image form."""

    __slots__ = ("_img",)

    def __init__(self, images: Sequence[int]):
        img = tuple(int(i) - 1 for i in images)
        n = len(img)
        if n < 1:
            raise ValueError("a permutation needs degree at least 1")
        if sorted(img) != list(range(n)):
            raise ValueError(f"not a bijection of 1..{n}: {list(images)!r}")
        self._img = img

    @classmethod
    def _raw(cls, img: tuple) -> "Permutation":
        p = object.__new__(cls)
        p._img = img
        return p

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        if degree < 1:
            raise ValueError("degree must be at least 1")
        return cls._raw(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, degree: int, *cycles: Sequence[int]) -> "Permutation":
        """Build from disjoint 1-based cycles; points left out are fixed."""
        img = list(range(degree))
        seen = set()
        for cyc in cycles:
            pts = [int(c) for c in cyc]
            for p in pts:
                if not 1 <= p <= degree:
                    raise ValueError(f"cycle point {p} outside 1..{degree}")
                if p in seen:
                    raise ValueError(f"point {p} appears in two cycles")
                seen.add(p)
            for a, b in zip(pts, pts[1:] + pts[:1]):
                img[a - 1] = b - 1
        return cls._raw(tuple(img))

    @property
    def degree(self) -> int:
        return len(self._img)

    @property
    def images(self) -> tuple:
        """One-line images, 1-based: images[i-1] is where point i goes."""
        return tuple(i + 1 for i in self._img)

    def __call__(self, point: int) -> int:
        return self._img[point - 1] + 1

    def __mul__(self, other: "Permutation") -> "Permutation":
        if not isinstance(other, Permutation):
            return NotImplemented
        if len(self._img) != len(other._img):
            raise ValueError(f"degree mismatch: {len(self._img)} vs {len(other._img)}")
        o = other._img
        return Permutation._raw(tuple(o[j] for j in self._img))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self._img)
        for i, j in enumerate(self._img):
            inv[j] = i
        return Permutation._raw(tuple(inv))

    def __pow__(self, n: int) -> "Permutation":
        if n < 0:
            return self.inverse() ** (-n)
        acc = Permutation.identity(len(self._img))
        step = self
        while n:
            if n & 1:
                acc = acc * step
            step = step * step
            n >>= 1
        return acc

    def conjugated_by(self, v: "Permutation") -> "Permutation":
        """v^-1 * self * v, the permutation sending v(i) to v(self(i))."""
        if len(self._img) != len(v._img):
            raise ValueError(f"degree mismatch: {len(self._img)} vs {len(v._img)}")
        vi = v._img
        out = [0] * len(vi)
        for i, yi in enumerate(self._img):
            out[vi[i]] = vi[yi]
        return Permutation._raw(tuple(out))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self._img))

    def cycles(self, include_fixed: bool = False) -> tuple:
        """Disjoint cycles, 1-based, each starting at its smallest point,
        ordered by smallest point."""
        seen = [False] * len(self._img)
        out = []
        for start in range(len(self._img)):
            if seen[start]:
                continue
            cyc = []
            p = start
            while not seen[p]:
                seen[p] = True
                cyc.append(p + 1)
                p = self._img[p]
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return tuple(out)

    def cycle_type(self) -> tuple:
        """Sorted multiset of cycle lengths, fixed points included."""
        return tuple(sorted(len(c) for c in self.cycles(include_fixed=True)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._img == other._img

    def __lt__(self, other: "Permutation") -> bool:
        return self._img < other._img

    def __hash__(self) -> int:
        return hash(self._img)

    def __str__(self) -> str:
        return format_perm(self)

    def __repr__(self) -> str:
        return f"Permutation({list(self.images)!r})"


def parse_perm(text: str) -> Permutation:
    """Parse one-line notation: m space-separated integers, e.g. "2 3 1"."""
    tokens = text.split()
    if not tokens:
        raise ValueError("empty permutation text")
    try:
        images = [int(t) for t in tokens]
    except ValueError:
        raise ValueError(f"non-integer token in permutation text: {text!r}") from None
    return Permutation(images)


def format_perm(p: Permutation) -> str:
    """One-line notation with single spaces, inverse of parse_perm."""
    return " ".join(str(i) for i in p.images)


def conjugator_in_sym(a0: Permutation, a1: Permutation) -> Optional[Permutation]:
    """Some s in the full symmetric group with a0.conjugated_by(s) == a1,
    or None when the cycle types differ.

    Deterministic choice: cycles of both sides are sorted by (length,
    smallest point) and mapped pointwise.
    """
    if a0.degree != a1.degree:
        raise ValueError(f"degree mismatch: {a0.degree} vs {a1.degree}")
    if a0.cycle_type() != a1.cycle_type():
        return None
    key = lambda c: (len(c), c[0])
    c0 = sorted(a0.cycles(include_fixed=True), key=key)
    c1 = sorted(a1.cycles(include_fixed=True), key=key)
    img = [0] * a0.degree
    for cyc0, cyc1 in zip(c0, c1):
        for p, q in zip(cyc0, cyc1):
            img[p - 1] = q - 1
    return Permutation._raw(tuple(img))
