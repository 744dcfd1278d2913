"""Finite-carrier cover combinatorics.

Models the open-cover arguments behind sectional-category upper bounds on
a finite discrete carrier, where every subset is open.  The three
ingredients: the multiplicity characterization of (m+1)-covers, cover
extension by parent-tagged disjoint pieces, and the combination of two
covers that preserves a downward-closed property from each.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable

from .errors import InternalInvariantError, InvalidInputError

ENUMERATION_CAP = 20  # is_n_cover enumerates subcollections; beyond this, refuse


@dataclass(frozen=True)
class Piece:
    """One open piece of a cover member, tagged with its parent sets."""

    elements: frozenset[int]
    parents_a: tuple[int, ...] = ()
    parents_b: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.elements:
            raise InvalidInputError("pieces must be nonempty")


@dataclass(frozen=True)
class PieceSet:
    """A cover member presented as a disjoint union of tagged pieces."""

    pieces: tuple[Piece, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for p in self.pieces:
            if seen & p.elements:
                raise InvalidInputError("pieces of one set must be pairwise disjoint")
            seen |= p.elements

    @property
    def elements(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for p in self.pieces:
            out |= p.elements
        return out

    @staticmethod
    def whole(elements: Iterable[int], parent_a: int | None = None,
              parent_b: int | None = None) -> "PieceSet":
        return PieceSet((Piece(
            frozenset(elements),
            parents_a=(parent_a,) if parent_a is not None else (),
            parents_b=(parent_b,) if parent_b is not None else (),
        ),))


@dataclass(frozen=True)
class Cover:
    """Ordered list of piece sets covering a finite ground set."""

    sets: tuple[PieceSet, ...]
    ground: frozenset[int]

    def __post_init__(self):
        if not self.ground:
            raise InvalidInputError("ground set must be nonempty")
        union: frozenset[int] = frozenset()
        for s in self.sets:
            if not s.elements <= self.ground:
                raise InvalidInputError("cover member leaves the ground set")
            union |= s.elements
        if union != self.ground:
            raise InvalidInputError("sets do not cover the ground set")

    @staticmethod
    def from_subsets(subsets: Iterable[Iterable[int]], ground: Iterable[int]) -> "Cover":
        g = frozenset(ground)
        return Cover(tuple(PieceSet.whole(s, parent_a=i) for i, s in enumerate(subsets)), g)


@dataclass(frozen=True)
class PropertyOracle:
    """Named predicate on subsets of the ground, declared downward-closed."""

    name: str
    predicate: Callable[[frozenset[int]], bool]

    def __call__(self, subset: Iterable[int]) -> bool:
        return bool(self.predicate(frozenset(subset)))

    def spot_check_downward_closed(self, rng: random.Random, ground: frozenset[int],
                                   samples: int = 32) -> None:
        """Sampled check that the predicate survives passing to subsets."""
        points = sorted(ground)
        for _ in range(samples):
            t = frozenset(rng.sample(points, rng.randint(1, len(points))))
            if not self(t):
                continue
            if len(t) > 1:
                s = frozenset(rng.sample(sorted(t), rng.randint(1, len(t))))
                if not self(s):
                    raise InvalidInputError(
                        f"oracle {self.name!r} is not downward closed: holds on {sorted(t)} "
                        f"but not on {sorted(s)}"
                    )


ALWAYS = PropertyOracle("always", lambda s: True)


def multiplicity(cover: Cover) -> int:
    """Minimum over ground points of the number of member sets containing it."""
    member_elements = [s.elements for s in cover.sets]
    return min(sum(1 for e in member_elements if x in e) for x in sorted(cover.ground))


def is_n_cover(cover: Cover, n: int) -> bool:
    """True iff every subcollection of n member sets still covers the ground."""
    k = len(cover.sets)
    if not 1 <= n <= k:
        raise InvalidInputError(f"n must be between 1 and {k}, got {n}")
    if k > ENUMERATION_CAP:
        raise InvalidInputError(f"refusing to enumerate subcollections of more than {ENUMERATION_CAP} sets")
    member_elements = [s.elements for s in cover.sets]
    for picks in combinations(range(k), n):
        union: frozenset[int] = frozenset()
        for i in picks:
            union |= member_elements[i]
            if union == cover.ground:
                break
        if union != cover.ground:
            return False
    return True


def check_multiplicity_lemma(cover: Cover, m: int) -> bool:
    """Self-test: an (m+1)-cover of k+m+1 sets iff every point is in >= k+1 sets.

    Both directions are checked by brute force; the return value should
    always be True.
    """
    k = len(cover.sets) - m - 1
    if m < 0 or k < 0:
        raise InvalidInputError("need sets = k + m + 1 with k, m >= 0")
    return is_n_cover(cover, m + 1) == (multiplicity(cover) >= k + 1)


def extend_cover(cover: Cover, m: int) -> Cover:
    """Extend a (k+1)-set cover to m+1 sets without losing inherited properties.

    The first k+1 sets are unchanged.  Every new set is the same partition
    of the ground into pieces, where the piece for index j holds the points
    whose least covering index is j; each piece is a subset of its tagged
    parent, so any property inherited by open subsets and disjoint unions
    survives.  The result has multiplicity >= m-k+1 and hence is a
    (k+1)-cover.
    """
    k = len(cover.sets) - 1
    if m < k:
        raise InvalidInputError(f"m must be at least k = {k}")
    if m == k:
        return cover
    member_elements = [s.elements for s in cover.sets]
    by_least: dict[int, set[int]] = {}
    for x in sorted(cover.ground):
        least = next(i for i, e in enumerate(member_elements) if x in e)
        by_least.setdefault(least, set()).add(x)
    partition = PieceSet(tuple(
        Piece(frozenset(by_least[j]), parents_a=(j,)) for j in sorted(by_least)
    ))
    new_sets = cover.sets + (partition,) * (m - k)
    out = Cover(new_sets, cover.ground)
    if multiplicity(out) < m - k + 1:
        raise InternalInvariantError("extended cover lost the multiplicity guarantee")
    return out


def combine_covers(cover_a: Cover, cover_b: Cover,
                   oracle_a: PropertyOracle = ALWAYS,
                   oracle_b: PropertyOracle = ALWAYS) -> Cover:
    """Combine a (k+1)-set cover with properties A and an (m+1)-set cover
    with properties B into a k+m+1 set cover whose pieces satisfy both.

    Extends both covers to k+m+1 sets, then intersects them index by
    index.  Every output piece carries one A-parent tag and one B-parent
    tag and is a subset of both parents, so both downward-closed
    properties hold piecewise.
    """
    if cover_a.ground != cover_b.ground:
        raise InvalidInputError("covers must share the ground set")
    for i, s in enumerate(cover_a.sets):
        if not oracle_a(s.elements):
            raise InvalidInputError(f"oracle {oracle_a.name!r} fails on set {i} of the first cover")
    for i, s in enumerate(cover_b.sets):
        if not oracle_b(s.elements):
            raise InvalidInputError(f"oracle {oracle_b.name!r} fails on set {i} of the second cover")
    k = len(cover_a.sets) - 1
    m = len(cover_b.sets) - 1
    total = k + m
    ext_a = extend_cover(cover_a, total)
    ext_b = extend_cover(cover_b, total)
    out_sets = []
    for i, (sa, sb) in enumerate(zip(ext_a.sets, ext_b.sets)):
        pieces = []
        for pa in sa.pieces:
            for pb in sb.pieces:
                inter = pa.elements & pb.elements
                if not inter:
                    continue
                # a piece of an original (unextended) set may lack a tag;
                # the set is then its own parent
                a_tags = pa.parents_a or ((i,) if i < len(cover_a.sets) else ())
                b_tags = pb.parents_a or ((i,) if i < len(cover_b.sets) else ())
                piece = Piece(inter, parents_a=a_tags, parents_b=b_tags)
                for oracle, tag in ((oracle_a, "A"), (oracle_b, "B")):
                    if not oracle(inter):
                        raise InternalInvariantError(
                            f"piece violates downward-closed property {tag}"
                        )
                pieces.append(piece)
        out_sets.append(PieceSet(tuple(pieces)))
    return Cover(tuple(out_sets), cover_a.ground)


def verify_combination(result: Cover, cover_a: Cover, cover_b: Cover) -> None:
    """Check size, covering, and the parent-tag contracts of a combination."""
    expected = len(cover_a.sets) + len(cover_b.sets) - 1
    if len(result.sets) != expected:
        raise InternalInvariantError(f"expected {expected} sets, got {len(result.sets)}")
    for s in result.sets:
        for p in s.pieces:
            if len(p.parents_a) != 1 or len(p.parents_b) != 1:
                raise InternalInvariantError("piece must carry exactly one tag per side")
            if not p.elements <= cover_a.sets[p.parents_a[0]].elements:
                raise InternalInvariantError("piece leaves its tagged A-parent")
            if not p.elements <= cover_b.sets[p.parents_b[0]].elements:
                raise InternalInvariantError("piece leaves its tagged B-parent")


# ---------------------------------------------------------------------------
# fuzz harnesses (deterministic per seed)


def random_cover(rng: random.Random, max_points: int = 20, max_sets: int = 8) -> Cover:
    n = rng.randint(1, max_points)
    ground = list(range(1, n + 1))
    count = rng.randint(1, max_sets)
    subsets = []
    for _ in range(count):
        size = rng.randint(1, n)
        subsets.append(set(rng.sample(ground, size)))
    covered = set().union(*subsets)
    for x in ground:
        if x not in covered:
            subsets[rng.randrange(count)].add(x)
    return Cover.from_subsets(subsets, ground)


def random_downward_closed_oracle(rng: random.Random, ground: frozenset[int],
                                  must_hold_on: list[frozenset[int]],
                                  name: str) -> PropertyOracle:
    """A union-of-downsets predicate that holds on the given sets."""
    tops = [frozenset(s) for s in must_hold_on]
    extra = rng.randint(0, 3)
    points = sorted(ground)
    for _ in range(extra):
        tops.append(frozenset(rng.sample(points, rng.randint(1, len(points)))))
    tops_tuple = tuple(tops)
    return PropertyOracle(name, lambda s: any(s <= t for t in tops_tuple))


def fuzz_multiplicity_lemma(trials: int, seed: int, max_points: int = 20,
                            max_sets: int = 8) -> dict:
    """Run the lemma self-test on random covers for all admissible m."""
    rng = random.Random(seed)
    checks = 0
    for _ in range(trials):
        cover = random_cover(rng, max_points, max_sets)
        for m in range(len(cover.sets)):
            if not check_multiplicity_lemma(cover, m):
                raise InternalInvariantError(
                    f"multiplicity lemma failed on {cover} with m={m}"
                )
            checks += 1
    return {"trials": trials, "checks": checks, "passed": True}


def fuzz_combine(trials: int, seed: int, max_points: int = 12,
                 max_sets: int = 4) -> dict:
    rng = random.Random(seed)
    for _ in range(trials):
        ground = frozenset(range(1, rng.randint(2, max_points) + 1))
        a = random_cover_on(rng, ground, max_sets)
        b = random_cover_on(rng, ground, max_sets)
        oracle_a = random_downward_closed_oracle(
            rng, ground, [s.elements for s in a.sets], "A")
        oracle_b = random_downward_closed_oracle(
            rng, ground, [s.elements for s in b.sets], "B")
        oracle_a.spot_check_downward_closed(rng, ground)
        oracle_b.spot_check_downward_closed(rng, ground)
        combined = combine_covers(a, b, oracle_a, oracle_b)
        verify_combination(combined, a, b)
    return {"trials": trials, "passed": True}


def random_cover_on(rng: random.Random, ground: frozenset[int], max_sets: int) -> Cover:
    points = sorted(ground)
    count = rng.randint(1, max_sets)
    subsets = []
    for _ in range(count):
        subsets.append(set(rng.sample(points, rng.randint(1, len(points)))))
    covered = set().union(*subsets)
    for x in points:
        if x not in covered:
            subsets[rng.randrange(count)].add(x)
    return Cover.from_subsets(subsets, points)


# ---------------------------------------------------------------------------
# JSON round trip


def cover_to_json(cover: Cover) -> dict:
    return {
        "ground": sorted(cover.ground),
        "sets": [
            {
                "pieces": [
                    {
                        "elements": sorted(p.elements),
                        "parents_a": list(p.parents_a),
                        "parents_b": list(p.parents_b),
                    }
                    for p in s.pieces
                ]
            }
            for s in cover.sets
        ],
    }


def cover_from_json(doc: dict) -> Cover:
    if not isinstance(doc, dict) or "ground" not in doc or "sets" not in doc:
        raise InvalidInputError('cover JSON needs "ground" and "sets" keys')
    ground = frozenset(doc["ground"])
    sets = []
    for i, s in enumerate(doc["sets"]):
        if "pieces" in s:
            pieces = tuple(
                Piece(frozenset(p["elements"]),
                      parents_a=tuple(p.get("parents_a", ())),
                      parents_b=tuple(p.get("parents_b", ())))
                for p in s["pieces"]
            )
            sets.append(PieceSet(pieces))
        elif "elements" in s:
            sets.append(PieceSet.whole(s["elements"], parent_a=i))
        else:
            raise InvalidInputError('cover set needs "pieces" or "elements"')
    return Cover(tuple(sets), ground)
