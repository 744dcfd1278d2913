"""Finite abstract simplicial complexes.

Simplices are tuples of strictly increasing vertex ids.  A complex is a
face-closed set of such tuples; no geometric realization is ever built.
Includes skeleta, barycentric subdivision, staircase products and the two
complement constructions (open-star nerve and order-complex of the
off-subcomplex face poset), which model the complement of a subcomplex up
to homotopy.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import InvalidInputError

Simplex = tuple[int, ...]


def as_simplex(vertices: Iterable[int]) -> Simplex:
    """Normalize an iterable of vertex ids into a simplex tuple."""
    vs = tuple(sorted(vertices))
    if not vs:
        raise InvalidInputError("a simplex needs at least one vertex")
    if len(set(vs)) != len(vs):
        raise InvalidInputError(f"duplicate vertex in simplex {vs}")
    if vs[0] < 0:
        raise InvalidInputError(f"negative vertex id in simplex {vs}")
    return vs


def faces(simplex: Simplex) -> list[Simplex]:
    """All nonempty proper and improper faces of a simplex."""
    out = []
    for k in range(1, len(simplex) + 1):
        out.extend(combinations(simplex, k))
    return out


@dataclass(frozen=True)
class SimplicialComplex:
    """Face-closed set of simplices.

    ``vertex_names`` records the original labels of compacted vertices
    (index = internal id); it is carried for reporting only and ignored
    by equality.
    """

    simplices: frozenset[Simplex]
    vertex_names: tuple = field(default=None, compare=False, repr=False)
    name: str = field(default="", compare=False)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for s in self.simplices for v in s}))

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def dim(self) -> int:
        """Maximum simplex dimension; -1 for the empty complex."""
        if not self.simplices:
            return -1
        return max(len(s) for s in self.simplices) - 1

    def faces_of_dim(self, d: int) -> list[Simplex]:
        """Simplices of dimension d in canonical (sorted) order."""
        return sorted(s for s in self.simplices if len(s) == d + 1)

    @property
    def f_vector(self) -> tuple[int, ...]:
        counts = [0] * (self.dim + 1)
        for s in self.simplices:
            counts[len(s) - 1] += 1
        return tuple(counts)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** i * c for i, c in enumerate(self.f_vector))

    def __contains__(self, simplex) -> bool:
        return tuple(simplex) in self.simplices

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self.simplices <= other.simplices

    def check_face_closure(self) -> None:
        """Re-verify face closure; raises on violation."""
        for s in self.simplices:
            if len(s) == 1:
                continue
            for k in range(1, len(s)):
                for f in combinations(s, k):
                    if f not in self.simplices:
                        raise InvalidInputError(f"face {f} of {s} missing: not face-closed")

    def maximal_simplices(self) -> list[Simplex]:
        maximal = []
        by_size = sorted(self.simplices, key=len, reverse=True)
        for s in by_size:
            sset = set(s)
            if not any(sset < set(m) for m in maximal):
                maximal.append(s)
        return sorted(maximal)


EMPTY_COMPLEX = SimplicialComplex(frozenset())


def _closure(face_list: Iterable[Simplex]) -> frozenset[Simplex]:
    closed: set[Simplex] = set()
    for s in face_list:
        for k in range(1, len(s) + 1):
            closed.update(combinations(s, k))
    return frozenset(closed)


def from_maximal_simplices(face_lists: Sequence[Iterable[int]], name: str = "") -> SimplicialComplex:
    """Face closure of the given faces, with vertex ids compacted to 0..n-1.

    The original id of internal vertex ``i`` is ``result.vertex_names[i]``.
    """
    if not face_lists:
        raise InvalidInputError("need at least one face")
    raw = [as_simplex(f) for f in face_lists]
    original_ids = sorted({v for s in raw for v in s})
    relabel = {orig: i for i, orig in enumerate(original_ids)}
    compacted = [tuple(sorted(relabel[v] for v in s)) for s in raw]
    return SimplicialComplex(_closure(compacted), vertex_names=tuple(original_ids), name=name)


def subcomplex_from_faces(K: SimplicialComplex, face_lists: Sequence[Iterable[int]]) -> SimplicialComplex:
    """Face closure of faces given in K's internal vertex ids, kept in K's id space."""
    raw = [as_simplex(f) for f in face_lists]
    closed = _closure(raw)
    if not closed <= K.simplices:
        bad = sorted(closed - K.simplices)[0]
        raise InvalidInputError(f"simplex {bad} is not in the ambient complex")
    return SimplicialComplex(closed, vertex_names=K.vertex_names)


def skeleton(K: SimplicialComplex, r: int) -> SimplicialComplex:
    """All simplices of K of dimension <= r."""
    if r < 0:
        raise InvalidInputError("skeleton dimension must be non-negative")
    if not K.simplices:
        raise InvalidInputError("skeleton of the empty complex")
    if r >= K.dim:
        return K
    return SimplicialComplex(
        frozenset(s for s in K.simplices if len(s) <= r + 1),
        vertex_names=K.vertex_names,
        name=f"{K.name}^({r})" if K.name else "",
    )


@dataclass(frozen=True)
class LabeledComplex:
    """A complex whose vertices are labelled by simplices of a parent complex."""

    complex: SimplicialComplex
    labels: tuple[Simplex, ...]
    parent: SimplicialComplex = field(compare=False, repr=False, default=None)

    def validate(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            raise InvalidInputError("vertex labels must be pairwise distinct")
        if self.parent is not None:
            for lab in self.labels:
                if lab not in self.parent.simplices:
                    raise InvalidInputError(f"label {lab} is not a simplex of the parent")


def _chain_complex_of_poset(elements: list[Simplex]) -> tuple[frozenset[Simplex], tuple[Simplex, ...]]:
    """Order complex of a set of simplices under strict face inclusion.

    Returns (simplices over indices 0..len-1, vertex labels).  Chains are
    enumerated by DFS from each element over its strict successors; face
    closure is automatic since subchains are chains.
    """
    elements = sorted(elements, key=lambda s: (len(s), s))
    index = {s: i for i, s in enumerate(elements)}
    # successor lists: strict inclusions
    succ: list[list[int]] = [[] for _ in elements]
    for i, small in enumerate(elements):
        small_set = set(small)
        for j, big in enumerate(elements):
            if len(big) > len(small) and small_set < set(big):
                succ[i].append(j)

    chains: set[tuple[int, ...]] = set()

    def grow(chain: tuple[int, ...]) -> None:
        chains.add(chain)
        for nxt in succ[chain[-1]]:
            grow(chain + (nxt,))

    for i in range(len(elements)):
        grow((i,))
    return frozenset(chains), tuple(elements)


def barycentric_subdivision(K: SimplicialComplex) -> LabeledComplex:
    """First barycentric subdivision; vertices are labelled by the simplices of K."""
    if not K.simplices:
        raise InvalidInputError("cannot subdivide the empty complex")
    simplices, labels = _chain_complex_of_poset(sorted(K.simplices))
    return LabeledComplex(SimplicialComplex(simplices, name=f"{K.name}'" if K.name else ""), labels, parent=K)


def restrict_subdivision(bary: LabeledComplex, L: SimplicialComplex) -> SimplicialComplex:
    """The subdivision of a subcomplex L, as a subcomplex of bary (same vertex ids)."""
    if not L.simplices <= bary.parent.simplices:
        raise InvalidInputError("L is not a subcomplex of the subdivided complex")
    keep = {i for i, lab in enumerate(bary.labels) if lab in L.simplices}
    return SimplicialComplex(
        frozenset(s for s in bary.complex.simplices if set(s) <= keep)
    )


def _require_subcomplex(K: SimplicialComplex, L: SimplicialComplex) -> None:
    if not L.simplices <= K.simplices:
        raise InvalidInputError("L is not a subcomplex of K")


def is_full_subcomplex(K: SimplicialComplex, L: SimplicialComplex) -> bool:
    """True iff every simplex of K with all vertices in L lies in L."""
    _require_subcomplex(K, L)
    lverts = set(L.vertices)
    for s in K.simplices:
        if set(s) <= lverts and s not in L.simplices:
            return False
    return True


def complement_nerve(K: SimplicialComplex, L: SimplicialComplex) -> SimplicialComplex:
    """Nerve of the open stars of the vertices outside a full subcomplex.

    Homotopy equivalent to the complement of L in K.  Vertex ids are
    compacted; original ids are recorded in vertex_names.
    """
    if L.simplices == K.simplices:
        raise InvalidInputError("complement of the whole complex is empty")
    if not is_full_subcomplex(K, L):
        raise InvalidInputError("L must be a full subcomplex of K")
    outside = [v for v in K.vertices if v not in set(L.vertices)]
    relabel = {v: i for i, v in enumerate(outside)}
    keep = set(outside)
    simplices = frozenset(
        tuple(relabel[v] for v in s) for s in K.simplices if set(s) <= keep
    )
    return SimplicialComplex(simplices, vertex_names=tuple(outside))


def complement_complex(K: SimplicialComplex, L: SimplicialComplex = EMPTY_COMPLEX) -> SimplicialComplex:
    """Order complex of the simplices of K outside L, under face inclusion.

    Homotopy equivalent to the complement of L in K; no fullness needed.
    With L empty this is exactly the barycentric subdivision of K.
    Vertex i corresponds to the simplex vertex_names[i] of K.
    """
    _require_subcomplex(K, L)
    outside = sorted(K.simplices - L.simplices)
    if not outside:
        raise InvalidInputError("complement of the whole complex is empty")
    simplices, labels = _chain_complex_of_poset(outside)
    return SimplicialComplex(simplices, vertex_names=labels)


def skeleton_complement_dimension(K: SimplicialComplex, r: int) -> int:
    """dim(complement_complex(K, skeleton(K, r))).

    Computed as (longest strict inclusion chain of simplices of dimension
    > r) - 1, which is the dimension of the order complex without
    enumerating all of its simplices.  Always <= dim K - r - 1.
    """
    if r < 0:
        raise InvalidInputError("r must be non-negative")
    if r >= K.dim:
        raise InvalidInputError("r must be smaller than dim K")
    outside = sorted((s for s in K.simplices if len(s) > r + 1), key=lambda s: (len(s), s))
    # longest chain ending at each simplex, in increasing size order
    best: dict[Simplex, int] = {}
    for s in outside:
        s_set = set(s)
        longest = 1
        for t in outside:
            if len(t) >= len(s):
                break
            if t in best and set(t) < s_set:
                longest = max(longest, best[t] + 1)
        best[s] = longest
    return max(best.values()) - 1


def product(K: SimplicialComplex, L: SimplicialComplex) -> SimplicialComplex:
    """Staircase triangulation of |K| x |L|.

    Vertices are pairs; a set of pairs spans a simplex iff it is a chain
    in the componentwise order whose two projections are simplices of K
    and L.  Vertex order is fixed by ids, so the construction is
    deterministic.
    """
    if not K.simplices or not L.simplices:
        raise InvalidInputError("product factors must be nonempty")
    kv, lv = K.vertices, L.vertices
    pairs = [(a, b) for a in kv for b in lv]
    pair_id = {p: i for i, p in enumerate(pairs)}

    ksimp, lsimp = K.simplices, L.simplices

    def projections_ok(chain: tuple[tuple[int, int], ...]) -> bool:
        proj_k = tuple(sorted({p[0] for p in chain}))
        proj_l = tuple(sorted({p[1] for p in chain}))
        return proj_k in ksimp and proj_l in lsimp

    simplices: set[Simplex] = set()

    def grow(chain: tuple[tuple[int, int], ...]) -> None:
        simplices.add(tuple(pair_id[p] for p in chain))
        last = chain[-1]
        for p in pairs:
            if p > last and last[0] <= p[0] and last[1] <= p[1]:
                nxt = chain + (p,)
                if projections_ok(nxt):
                    grow(nxt)

    for p in pairs:
        if projections_ok((p,)):
            grow((p,))
    return SimplicialComplex(frozenset(simplices), vertex_names=tuple(pairs))


def boundary_sphere(n: int) -> SimplicialComplex:
    """Boundary of the (n+1)-simplex: the standard triangulated n-sphere."""
    if n < 0:
        raise InvalidInputError("sphere dimension must be non-negative")
    verts = range(n + 2)
    return from_maximal_simplices(list(combinations(verts, n + 1)), name=f"sphere_{n}")


def full_simplex(n: int) -> SimplicialComplex:
    """The full n-simplex (a contractible complex on n+1 vertices)."""
    if n < 0:
        raise InvalidInputError("simplex dimension must be non-negative")
    return from_maximal_simplices([list(range(n + 1))], name=f"simplex_{n}")


def random_complex(rng: random.Random, max_vertices: int = 8, max_dim: int = 4,
                   max_facets: int = 8) -> SimplicialComplex:
    """Pseudo-random complex for fuzz harnesses (deterministic per rng state)."""
    n = rng.randint(3, max_vertices)
    facets = []
    for _ in range(rng.randint(1, max_facets)):
        size = rng.randint(1, min(max_dim + 1, n))
        facets.append(rng.sample(range(n), size))
    return from_maximal_simplices(facets)


def complex_to_json(K: SimplicialComplex) -> dict:
    out: dict = {}
    if K.name:
        out["name"] = K.name
    out["maximal_simplices"] = [list(s) for s in K.maximal_simplices()]
    names = K.vertex_names
    if names is not None and names != tuple(range(len(names))):
        out["labels"] = [list(v) if isinstance(v, tuple) else v for v in names]
    return out


def complex_from_json(doc: dict, name: str = "") -> SimplicialComplex:
    if not isinstance(doc, dict) or "maximal_simplices" not in doc:
        raise InvalidInputError('complex JSON needs a "maximal_simplices" key')
    faces_in = doc["maximal_simplices"]
    if not isinstance(faces_in, list) or not all(isinstance(f, list) for f in faces_in):
        raise InvalidInputError('"maximal_simplices" must be a list of vertex-id lists')
    return from_maximal_simplices(faces_in, name=doc.get("name", name))
