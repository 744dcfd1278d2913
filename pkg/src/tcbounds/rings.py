"""Graded-commutative cohomology rings with exact structure constants.

Rings are finite tables: a basis per degree and the product of every pair
of basis elements as an exact linear combination.  Rings come either from
a simplicial complex (front-face/back-face cup product on cocycle
representatives) or from closed-form models (spheres, exterior algebras,
truncated polynomial algebras) combined with tensor products.

Cup-length and zero-divisor cup-length are exhaustive searches over
products of basis elements; a span filter discards products that are
linear combinations of products already found, which prunes the search
without changing the answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidInputError, InternalInvariantError
from .homology import Echelon, FieldOps, Q, Z2, check_field
from .simplicial import SimplicialComplex

Vector = tuple  # coefficients over the basis of one degree


@dataclass(frozen=True)
class GradedRing:
    """Finite-dimensional graded-commutative ring over Z/2 or Q."""

    coeff: str
    basis: dict  # degree -> tuple of basis element names
    products: dict  # (deg_a, idx_a, deg_b, idx_b) -> Vector over basis[deg_a+deg_b]
    unit: Vector  # over basis[0]
    name: str = field(default="", compare=False)

    @property
    def ops(self) -> FieldOps:
        return FieldOps(self.coeff)

    @property
    def top_degree(self) -> int:
        return max(d for d, names in self.basis.items() if names)

    def dim(self, d: int) -> int:
        return len(self.basis.get(d, ()))

    def betti_numbers(self) -> tuple[int, ...]:
        return tuple(self.dim(d) for d in range(self.top_degree + 1))

    def degrees(self) -> list[int]:
        return sorted(d for d in self.basis if self.basis[d])

    def positive_basis(self) -> list[tuple[int, int]]:
        return [(d, i) for d in self.degrees() if d > 0 for i in range(self.dim(d))]

    def element_name(self, d: int, i: int) -> str:
        return self.basis[d][i]

    def zero_vector(self, d: int) -> Vector:
        return (self.ops.zero,) * self.dim(d)

    def product_vector(self, da: int, ia: int, db: int, ib: int) -> Vector:
        return self.products.get((da, ia, db, ib), self.zero_vector(da + db))

    def multiply(self, a: tuple[int, Vector], b: tuple[int, Vector]) -> tuple[int, Vector]:
        """Product of homogeneous elements given as (degree, coefficients)."""
        da, va = a
        db, vb = b
        d = da + db
        ops = self.ops
        out = list(self.zero_vector(d))
        for i, ca in enumerate(va):
            if ca == ops.zero:
                continue
            for j, cb in enumerate(vb):
                if cb == ops.zero:
                    continue
                c = ops.mul(ca, cb)
                for k, pk in enumerate(self.product_vector(da, i, db, j)):
                    if pk != ops.zero:
                        out[k] = ops.add(out[k], ops.mul(c, pk))
        return d, tuple(out)

    def basis_element(self, d: int, i: int) -> tuple[int, Vector]:
        ops = self.ops
        return d, tuple(ops.one if j == i else ops.zero for j in range(self.dim(d)))

    def unit_element(self) -> tuple[int, Vector]:
        return 0, self.unit

    def is_zero(self, elt: tuple[int, Vector]) -> bool:
        ops = self.ops
        return all(c == ops.zero for c in elt[1])

    def validate(self) -> None:
        """Exhaustive check of unit law, graded commutativity, associativity."""
        ops = self.ops
        top = self.top_degree
        one = self.unit_element()
        elements = [self.basis_element(d, i) for d, i in
                    ((d, i) for d in self.degrees() for i in range(self.dim(d)))]
        for e in elements:
            if self.multiply(one, e) != e or self.multiply(e, one) != e:
                raise InternalInvariantError(f"unit law fails on {e}")
        for a in elements:
            for b in elements:
                if a[0] + b[0] > top:
                    continue
                ab = self.multiply(a, b)
                ba = self.multiply(b, a)
                sign = ops.sign(a[0] * b[0])
                flipped = (ba[0], tuple(ops.mul(sign, c) for c in ba[1]))
                if ab != flipped:
                    raise InternalInvariantError("graded commutativity fails")
        for a in elements:
            for b in elements:
                if a[0] + b[0] > top:
                    continue
                ab = self.multiply(a, b)
                for c in elements:
                    if a[0] + b[0] + c[0] > top:
                        continue
                    bc = self.multiply(b, c)
                    if self.multiply(ab, c) != self.multiply(a, bc):
                        raise InternalInvariantError("associativity fails")


# ---------------------------------------------------------------------------
# ring of a simplicial complex


def _rref(rows: list[list], ops: FieldOps) -> tuple[list[list], list[int]]:
    mat = [list(r) for r in rows]
    if not mat:
        return mat, []
    width = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(width):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] != ops.zero), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = mat[r][c]
        mat[r] = [ops.div(x, inv) for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != ops.zero:
                f = mat[i][c]
                mat[i] = [ops.sub(x, ops.mul(f, y)) for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def _nullspace(rows: list[list], ops: FieldOps, width: int) -> list[list]:
    """Basis of the solution space of rows * v = 0 (v of length width)."""
    if not rows:
        return [[ops.one if j == f else ops.zero for j in range(width)] for f in range(width)]
    mat, pivots = _rref(rows, ops)
    free = [c for c in range(width) if c not in pivots]
    out = []
    for f in free:
        v = [ops.zero] * width
        v[f] = ops.one
        for r, c in enumerate(pivots):
            v[c] = ops.neg(mat[r][f])
        out.append(v)
    return out


def cohomology_ring(K: SimplicialComplex, coeff: str = Q) -> GradedRing:
    """Cohomology ring of a complex over a field.

    Representatives are cocycles reduced against coboundaries and earlier
    representatives, so the basis is canonical given the vertex order.
    Products use the front-face/back-face cochain cup product and are
    reduced back to the chosen basis.
    """
    check_field(coeff)
    if not K.simplices:
        raise InvalidInputError("empty complex")
    ops = FieldOps(coeff)
    top = K.dim
    simplices = {d: K.faces_of_dim(d) for d in range(top + 1)}
    index = {d: {s: i for i, s in enumerate(simplices[d])} for d in range(top + 1)}

    def coboundary(d: int, vec: list) -> list:
        """Apply the degree-d coboundary to a d-cochain."""
        out = [ops.zero] * len(simplices.get(d + 1, ()))
        for t, tau in enumerate(simplices.get(d + 1, ())):
            acc = ops.zero
            for i in range(len(tau)):
                face = tau[:i] + tau[i + 1:]
                c = vec[index[d][face]]
                if c != ops.zero:
                    acc = ops.add(acc, ops.mul(ops.sign(i), c))
            out[t] = acc
        return out

    basis: dict[int, tuple[str, ...]] = {}
    reps: dict[int, list[list]] = {}
    echelons: dict[int, Echelon] = {}
    for d in range(top + 1):
        width = len(simplices[d])
        ech = Echelon(ops, width)
        if d > 0:
            prev_width = len(simplices[d - 1])
            for j in range(prev_width):
                e = [ops.one if i == j else ops.zero for i in range(prev_width)]
                ech.insert(coboundary(d - 1, e))
        # cocycles: kernel of the outgoing coboundary
        cob_matrix = []
        for j in range(width):
            e = [ops.one if i == j else ops.zero for i in range(width)]
            col = coboundary(d, e)
            cob_matrix.append(col)
        # rows of the equation system: one per (d+1)-simplex
        eqs = [[cob_matrix[j][t] for j in range(width)]
               for t in range(len(simplices.get(d + 1, ())))]
        names = []
        chosen = []
        for v in _nullspace(eqs, ops, width):
            tag = f"h{d}_{len(names)}"
            if ech.insert(v, tag=tag):
                names.append(tag)
                chosen.append(ech.rows[-1])
        basis[d] = tuple(names)
        reps[d] = chosen
        echelons[d] = ech

    def reduce_to_classes(d: int, vec: list) -> Vector:
        if d > top:
            return ()
        rem, tagged = echelons[d].reduce(vec)
        if any(c != ops.zero for c in rem):
            raise InternalInvariantError("cocycle did not reduce to the chosen basis")
        coeffs = {t: c for t, c in tagged}
        return tuple(coeffs.get(name, ops.zero) for name in basis[d])

    products: dict[tuple[int, int, int, int], Vector] = {}
    for p in range(top + 1):
        for q in range(top + 1):
            target = p + q
            if target > top:
                for ia in range(len(basis[p])):
                    for ib in range(len(basis[q])):
                        products[(p, ia, q, ib)] = ()
                continue
            for ia, a in enumerate(reps[p]):
                for ib, b in enumerate(reps[q]):
                    w = [ops.zero] * len(simplices[target])
                    for t, sigma in enumerate(simplices[target]):
                        front = sigma[:p + 1]
                        back = sigma[p:]
                        ca = a[index[p][front]]
                        cb = b[index[q][back]]
                        if ca != ops.zero and cb != ops.zero:
                            w[t] = ops.mul(ca, cb)
                    products[(p, ia, q, ib)] = reduce_to_classes(target, w)

    unit_vec = [ops.one] * len(simplices[0])
    unit = reduce_to_classes(0, unit_vec)
    return GradedRing(coeff, basis, products, unit, name=K.name or "ring")


# ---------------------------------------------------------------------------
# closed-form model rings and tensor products


def point_ring(coeff: str) -> GradedRing:
    ops = FieldOps(coeff)
    return GradedRing(coeff, {0: ("1",)}, {(0, 0, 0, 0): (ops.one,)}, (ops.one,), name="point")


def sphere_ring(n: int, coeff: str) -> GradedRing:
    """Cohomology of the n-sphere: one generator in degree n, square zero."""
    if n < 1:
        raise InvalidInputError("sphere dimension must be >= 1")
    ops = FieldOps(coeff)
    basis = {0: ("1",), n: ("x",)}
    products = {
        (0, 0, 0, 0): (ops.one,),
        (0, 0, n, 0): (ops.one,),
        (n, 0, 0, 0): (ops.one,),
        (n, 0, n, 0): (),
    }
    return GradedRing(coeff, basis, products, (ops.one,), name=f"sphere_{n}")


def truncated_polynomial_ring(top: int, coeff: str = Z2) -> GradedRing:
    """Z/2[a]/(a^(top+1)) with |a| = 1: the mod-2 ring of real projective space."""
    if coeff != Z2:
        raise InvalidInputError("truncated polynomial model is a Z/2 ring")
    if top < 1:
        raise InvalidInputError("top degree must be >= 1")
    ops = FieldOps(coeff)
    basis = {0: ("1",)}
    for d in range(1, top + 1):
        basis[d] = ("a" if d == 1 else f"a^{d}",)
    products = {}
    for p in range(top + 1):
        for q in range(top + 1):
            products[(p, 0, q, 0)] = (ops.one,) if p + q <= top else ()
    return GradedRing(coeff, basis, products, (ops.one,), name=f"trunc_poly_{top}")


def tensor_ring(R: GradedRing, S: GradedRing) -> GradedRing:
    """Tensor product ring with the graded sign rule (a@b)(c@d) = (-1)^{|b||c|} ac@bd."""
    if R.coeff != S.coeff:
        raise InvalidInputError("tensor factors must share the coefficient field")
    ops = R.ops
    pairs: dict[int, list[tuple[int, int, int, int]]] = {}
    for p in R.degrees():
        for q in S.degrees():
            pairs.setdefault(p + q, [])
            for i in range(R.dim(p)):
                for j in range(S.dim(q)):
                    pairs[p + q].append((p, i, q, j))
    for d in pairs:
        pairs[d].sort()
    position = {d: {key: k for k, key in enumerate(pairs[d])} for d in pairs}
    basis = {
        d: tuple(f"{R.element_name(p, i)}⊗{S.element_name(q, j)}" for (p, i, q, j) in pairs[d])
        for d in pairs
    }

    products: dict[tuple[int, int, int, int], Vector] = {}
    for d1 in sorted(pairs):
        for k1, (p1, i1, q1, j1) in enumerate(pairs[d1]):
            for d2 in sorted(pairs):
                target = d1 + d2
                for k2, (p2, i2, q2, j2) in enumerate(pairs[d2]):
                    if target not in pairs:
                        products[(d1, k1, d2, k2)] = ()
                        continue
                    out = [ops.zero] * len(pairs[target])
                    sign = ops.sign(q1 * p2)
                    rv = R.product_vector(p1, i1, p2, i2)
                    sv = S.product_vector(q1, j1, q2, j2)
                    for ri, rc in enumerate(rv):
                        if rc == ops.zero:
                            continue
                        for si, sc in enumerate(sv):
                            if sc == ops.zero:
                                continue
                            key = (p1 + p2, ri, q1 + q2, si)
                            pos = position[target].get(key)
                            if pos is not None:
                                out[pos] = ops.add(out[pos], ops.mul(sign, ops.mul(rc, sc)))
                    products[(d1, k1, d2, k2)] = tuple(out)

    unit = [ops.zero] * len(pairs[0])
    for i, ur in enumerate(R.unit):
        for j, us in enumerate(S.unit):
            pos = position[0][(0, i, 0, j)]
            unit[pos] = ops.mul(ur, us)
    return GradedRing(R.coeff, basis, products, tuple(unit),
                      name=f"{R.name}(x){S.name}")


def exterior_ring(n: int, coeff: str) -> GradedRing:
    """Exterior algebra on n degree-1 generators: the ring of the n-torus."""
    if n < 1:
        raise InvalidInputError("need at least one generator")
    ring = sphere_ring(1, coeff)
    for _ in range(n - 1):
        ring = tensor_ring(ring, sphere_ring(1, coeff))
    return GradedRing(ring.coeff, ring.basis, ring.products, ring.unit, name=f"exterior_{n}")


# ---------------------------------------------------------------------------
# cup-length searches


def _flat(R: GradedRing):
    offsets = {}
    width = 0
    for d in range(R.top_degree + 1):
        offsets[d] = width
        width += R.dim(d)
    return offsets, width


def _flatten(R: GradedRing, elt: tuple[int, Vector], offsets, width) -> list:
    ops = R.ops
    out = [ops.zero] * width
    d, vec = elt
    if d in offsets:
        for i, c in enumerate(vec):
            out[offsets[d] + i] = c
    return out


def cup_length(R: GradedRing) -> int:
    """Longest nonzero product of positive-degree basis elements (0 if none)."""
    generators = [R.basis_element(d, i) for d, i in R.positive_basis()]
    if not generators:
        return 0
    offsets, width = _flat(R)
    level = []
    ech = Echelon(R.ops, width)
    for g in generators:
        if ech.insert(_flatten(R, g, offsets, width)):
            level.append(g)
    length = 1
    while True:
        nxt = []
        ech = Echelon(R.ops, width)
        for v in level:
            if v[0] + 1 > R.top_degree:
                continue
            for g in generators:
                w = R.multiply(v, g)
                if R.is_zero(w):
                    continue
                if ech.insert(_flatten(R, w, offsets, width)):
                    nxt.append(w)
        if not nxt:
            return length
        level = nxt
        length += 1


def zero_divisor_cup_length(R: GradedRing, with_witness: bool = False):
    """Zero-divisor cup-length of R, searched in the tensor square.

    The factors are the diagonal zero-divisors x@1 - 1@x for x running
    over the positive-degree basis of R.  Products are enumerated in
    canonical order with degree pruning; products lying in the span of
    earlier ones are dropped, which cannot change the maximal nonzero
    length.  Returns the length, or (length, witness) with the witness
    listing the chosen basis element names.
    """
    T = tensor_ring(R, R)
    ops = T.ops
    zees: list[tuple[str, tuple[int, Vector]]] = []
    for d, i in R.positive_basis():
        vec = list(T.zero_vector(d))
        pairs = sorted(
            (p, a, q, b)
            for p in R.degrees() for q in R.degrees() if p + q == d
            for a in range(R.dim(p)) for b in range(R.dim(q))
        )
        pos = {key: k for k, key in enumerate(pairs)}
        for j, u in enumerate(R.unit):
            if u == ops.zero:
                continue
            vec[pos[(d, i, 0, j)]] = ops.add(vec[pos[(d, i, 0, j)]], u)
            key = (0, j, d, i)
            vec[pos[key]] = ops.sub(vec[pos[key]], u)
        zees.append((R.element_name(d, i), (d, tuple(vec))))

    if not zees:
        return (0, []) if with_witness else 0

    offsets, width = _flat(T)
    level: list[tuple[list[str], tuple[int, Vector]]] = []
    ech = Echelon(ops, width)
    for name, z in zees:
        if not T.is_zero(z) and ech.insert(_flatten(T, z, offsets, width)):
            level.append(([name], z))
    if not level:
        return (0, []) if with_witness else 0
    length = 1
    witness = level[0][0]
    while True:
        nxt = []
        ech = Echelon(ops, width)
        for names, v in level:
            for name, z in zees:
                if v[0] + z[0] > T.top_degree:
                    continue
                w = T.multiply(v, z)
                if T.is_zero(w):
                    continue
                if ech.insert(_flatten(T, w, offsets, width)):
                    nxt.append((names + [name], w))
        if not nxt:
            if with_witness:
                return length, sorted(witness)
            return length
        level = nxt
        length += 1
        witness = level[0][0]
