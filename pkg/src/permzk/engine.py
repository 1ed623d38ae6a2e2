"""Permutation-group engine: stabilizer chains, membership, order,
exact-uniform sampling, and random generating tuples.

Chains are built deterministically: generators are sifted in order, each new
base point is the smallest point moved by the offending residue, and orbits
are grown breadth-first.  The construction is complete once every Schreier
generator of every level sifts to the identity, which makes membership,
order, and the transversal factorization exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .perm import Permutation, format_perm, parse_perm

DEFAULT_ENUM_CAP = 10_000
DEFAULT_TUPLE_ATTEMPTS = 64


class BudgetExceeded(RuntimeError):
    """An enumeration, search, or sampling cap was hit before finishing."""


@dataclass(frozen=True)
class GeneratingSet:
    """A degree plus a finite list of generators.  Duplicates and identities
    are permitted; canonical() removes them.  The empty list generates the
    trivial group."""

    degree: int
    gens: tuple = ()

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be at least 1")
        object.__setattr__(self, "gens", tuple(self.gens))
        for g in self.gens:
            if not isinstance(g, Permutation):
                raise ValueError(f"generator is not a permutation: {g!r}")
            if g.degree != self.degree:
                raise ValueError(f"degree mismatch: {g.degree} vs {self.degree}")

    def canonical(self) -> "GeneratingSet":
        seen = set()
        out = []
        for g in self.gens:
            if g.is_identity() or g in seen:
                continue
            seen.add(g)
            out.append(g)
        return GeneratingSet(self.degree, tuple(out))

    def conjugated_by(self, v: Permutation) -> "GeneratingSet":
        return GeneratingSet(self.degree, tuple(g.conjugated_by(v) for g in self.gens))


def conjugate_set(a: GeneratingSet, v: Permutation) -> GeneratingSet:
    """Elementwise conjugation; generates the conjugate group."""
    return a.conjugated_by(v)


def format_generating_set(a: GeneratingSet) -> str:
    return ";".join(format_perm(g) for g in a.gens)


def parse_generating_set(text: str, degree: int) -> GeneratingSet:
    gens = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        p = parse_perm(part)
        if p.degree != degree:
            raise ValueError(f"generator degree {p.degree} does not match degree {degree}: {part!r}")
        gens.append(p)
    return GeneratingSet(degree, tuple(gens))


class _Level:
    __slots__ = ("base", "placed", "transversal", "points", "inv")

    def __init__(self, base: int):
        self.base = base          # 0-based point
        self.placed = []          # generators first placed at this level
        self.transversal = {}     # orbit point -> rep mapping base to it
        self.points = ()
        self.inv = {}


class StabilizerChain:
    """Base, strong generators, and transversals for one generating set.
    Construct with build_chain()."""

    def __init__(self, degree: int, source: GeneratingSet):
        self.degree = degree
        self.source = source
        self._levels: list = []
        self._order: Optional[int] = None

    # -- queries ----------------------------------------------------------

    def order(self) -> int:
        if self._order is None:
            self._order = math.prod(len(l.transversal) for l in self._levels) if self._levels else 1
        return self._order

    def base_points(self) -> tuple:
        """Base points, 1-based, in chain order."""
        return tuple(l.base + 1 for l in self._levels)

    def strong_generators(self) -> tuple:
        return tuple(g for l in self._levels for g in l.placed)

    def strip(self, y: Permutation) -> Permutation:
        """Sift y through the transversals; the residue is the identity
        exactly when y belongs to the group."""
        if y.degree != self.degree:
            raise ValueError(f"degree mismatch: {y.degree} vs {self.degree}")
        return self._strip(y)[0]

    def contains(self, y: Permutation) -> bool:
        if y.degree != self.degree:
            raise ValueError(f"degree mismatch: {y.degree} vs {self.degree}")
        return self._strip(y)[0].is_identity()

    def random_element(self, rng) -> Permutation:
        """Exactly uniform over the group: one uniform transversal
        representative per level, composed deepest first."""
        acc = Permutation.identity(self.degree)
        for lvl in self._levels:
            pts = lvl.points
            rep = lvl.transversal[pts[rng.randrange(len(pts))]]
            acc = rep * acc
        return acc

    # -- construction -----------------------------------------------------

    def _strip(self, y: Permutation):
        for idx, lvl in enumerate(self._levels):
            j = y._img[lvl.base]
            if j == lvl.base:
                continue
            if j not in lvl.transversal:
                return y, idx
            y = y * lvl.inv[j]
        return y, len(self._levels)

    def _gens_from(self, idx: int) -> list:
        out = []
        for lvl in self._levels[idx:]:
            out.extend(lvl.placed)
        return out

    def _rebuild_orbit(self, idx: int):
        lvl = self._levels[idx]
        gens = self._gens_from(idx)
        trans = {lvl.base: Permutation.identity(self.degree)}
        frontier = [lvl.base]
        while frontier:
            nxt = []
            for p in frontier:
                tp = trans[p]
                for g in gens:
                    q = g._img[p]
                    if q not in trans:
                        trans[q] = tp * g
                        nxt.append(q)
            frontier = nxt
        lvl.transversal = trans
        lvl.points = tuple(trans)
        lvl.inv = {p: t.inverse() for p, t in trans.items()}

    def _ingest(self, g: Permutation) -> bool:
        residue, idx = self._strip(g)
        if residue.is_identity():
            return False
        if idx == len(self._levels):
            base = min(i for i in range(self.degree) if residue._img[i] != i)
            self._levels.append(_Level(base))
        self._levels[idx].placed.append(residue)
        for i in range(idx + 1):
            self._rebuild_orbit(i)
        return True

    def _close(self):
        # Repeat full passes until no Schreier generator leaves a residue;
        # each placement strictly grows the transversal product, so this ends.
        changed = True
        while changed:
            changed = False
            idx = 0
            while idx < len(self._levels):
                lvl = self._levels[idx]
                gens = self._gens_from(idx)
                for p in lvl.points:
                    tp = lvl.transversal[p]
                    for g in gens:
                        s = tp * g * lvl.inv[g._img[p]]
                        if not s.is_identity() and self._ingest(s):
                            changed = True
                idx += 1
        self._order = None


def build_chain(a: GeneratingSet) -> StabilizerChain:
    """Deterministic stabilizer chain for the group generated by a."""
    canon = a.canonical()
    chain = StabilizerChain(a.degree, canon)
    for g in canon.gens:
        chain._ingest(g)
    chain._close()
    return chain


def group_equal(x: GeneratingSet, y: GeneratingSet, *, chain_x: Optional[StabilizerChain] = None, chain_y: Optional[StabilizerChain] = None) -> bool:
    """Whether the two sets generate the same subgroup."""
    if x.degree != y.degree:
        raise ValueError(f"degree mismatch: {x.degree} vs {y.degree}")
    cx = chain_x if chain_x is not None else build_chain(x)
    cy = chain_y if chain_y is not None else build_chain(y)
    return all(cx.contains(g) for g in y.canonical().gens) and all(
        cy.contains(g) for g in x.canonical().gens
    )


@dataclass(frozen=True)
class GeneratingTuple:
    """A k-tuple of group elements that generates the whole target group."""

    perms: tuple
    target: GeneratingSet
    attempts: int = 1

    @property
    def k(self) -> int:
        return len(self.perms)


def random_generating_tuple(
    a: GeneratingSet,
    k: int,
    rng,
    max_attempts: int = DEFAULT_TUPLE_ATTEMPTS,
    chain: Optional[StabilizerChain] = None,
) -> GeneratingTuple:
    """Rejection-sample a uniform element of the set of k-tuples over <a>
    that generate <a>.  For the trivial group the all-identity tuple is the
    unique such tuple."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if chain is None:
        chain = build_chain(a)
    target_order = chain.order()
    if target_order == 1:
        ident = Permutation.identity(a.degree)
        return GeneratingTuple((ident,) * k, a, 1)
    for attempt in range(1, max_attempts + 1):
        perms = tuple(chain.random_element(rng) for _ in range(k))
        if build_chain(GeneratingSet(a.degree, perms)).order() == target_order:
            return GeneratingTuple(perms, a, attempt)
    raise BudgetExceeded(
        f"no generating {k}-tuple found in {max_attempts} attempts; k may be too small for this group"
    )


def enumerate_elements(chain: StabilizerChain, cap: int = DEFAULT_ENUM_CAP) -> tuple:
    """All group elements by breadth-first closure of the source generators,
    identity first, deterministic order.  Independent of the chain's
    transversal structure, so it doubles as an oracle for contains/order."""
    if chain.order() > cap:
        raise BudgetExceeded(f"group order {chain.order()} exceeds cap {cap}")
    gens = chain.source.gens
    ident = Permutation.identity(chain.degree)
    seen = {ident}
    out = [ident]
    frontier = [ident]
    while frontier:
        layer = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    layer.append(y)
        layer.sort()
        if len(seen) > cap:
            raise BudgetExceeded(f"closure exceeded cap {cap}")
        out.extend(layer)
        frontier = layer
    return tuple(out)


def generating_tuples(
    a: GeneratingSet,
    k: int,
    cap: int = 4096,
    chain: Optional[StabilizerChain] = None,
) -> tuple:
    """Every k-tuple over <a> that generates <a>, deterministic order.
    Exhaustive, so only usable when order**k stays within cap."""
    if chain is None:
        chain = build_chain(a)
    elems = enumerate_elements(chain, cap)
    if len(elems) ** k > cap:
        raise BudgetExceeded(f"{len(elems)}^{k} candidate tuples exceed cap {cap}")
    target_order = chain.order()
    out = []
    for tup in itertools.product(elems, repeat=k):
        if build_chain(GeneratingSet(a.degree, tup)).order() == target_order:
            out.append(tup)
    return tuple(out)


def group_profile(chain: StabilizerChain, cap: int = DEFAULT_ENUM_CAP) -> Optional[tuple]:
    """Conjugation-invariant fingerprint: the sorted multiset of element
    cycle types.  None when the group is too large to enumerate, meaning
    no information."""
    if chain.order() > cap:
        return None
    return tuple(sorted(x.cycle_type() for x in enumerate_elements(chain, cap)))


def centralizer_in_sym(x: Permutation) -> GeneratingSet:
    """Generators of the centralizer of x in the full symmetric group:
    each cycle of x, plus a pointwise swap of each pair of consecutive
    equal-length cycles."""
    m = x.degree
    key = lambda c: (len(c), c[0])
    cycles = sorted(x.cycles(include_fixed=True), key=key)
    gens = []
    for cyc in cycles:
        if len(cyc) > 1:
            gens.append(Permutation.from_cycles(m, cyc))
    for c1, c2 in zip(cycles, cycles[1:]):
        if len(c1) != len(c2):
            continue
        img = list(range(m))
        for p, q in zip(c1, c2):
            img[p - 1] = q - 1
            img[q - 1] = p - 1
        gens.append(Permutation._raw(tuple(img)))
    return GeneratingSet(m, tuple(gens)).canonical()


def centralizer_order_in_sym(x: Permutation) -> int:
    """Closed form: the product over cycle lengths d of count_d! * d**count_d."""
    counts = {}
    for d in x.cycle_type():
        counts[d] = counts.get(d, 0) + 1
    return math.prod(math.factorial(c) * d**c for d, c in counts.items())


def symmetric_group(m: int) -> GeneratingSet:
    """A transposition and an m-cycle generating the full symmetric group."""
    if m < 1:
        raise ValueError("degree must be at least 1")
    if m == 1:
        return GeneratingSet(1, ())
    if m == 2:
        return GeneratingSet(2, (Permutation.from_cycles(2, (1, 2)),))
    return GeneratingSet(
        m,
        (Permutation.from_cycles(m, (1, 2)), Permutation.from_cycles(m, tuple(range(1, m + 1)))),
    )
