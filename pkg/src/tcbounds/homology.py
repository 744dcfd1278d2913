"""Exact simplicial (co)homology over Z/2, Q and Z.

All arithmetic is exact: Z/2 rows are packed int bitsets, rational ranks
use fraction-free integer elimination, and integral homology goes through
Smith normal form on arbitrary-precision integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInputError, InternalInvariantError
from .simplicial import SimplicialComplex

Z2 = "z2"
Q = "q"
Z = "z"

FIELDS = (Z2, Q)
COEFFICIENTS = (Z2, Q, Z)

CONTRACTIBLE = "contractible"


def check_field(coeff: str) -> str:
    if coeff not in FIELDS:
        raise InvalidInputError(f"coefficients must be a field ({Z2!r} or {Q!r}), got {coeff!r}")
    return coeff


# ---------------------------------------------------------------------------
# boundary matrices


def boundary_matrix(K: SimplicialComplex, d: int) -> list[list[int]]:
    """Integer matrix of the boundary map from d-chains to (d-1)-chains.

    Rows are indexed by (d-1)-simplices, columns by d-simplices, both in
    canonical sorted order.
    """
    if d <= 0 or d > K.dim:
        return []
    rows = K.faces_of_dim(d - 1)
    cols = K.faces_of_dim(d)
    row_index = {s: i for i, s in enumerate(rows)}
    mat = [[0] * len(cols) for _ in rows]
    for j, s in enumerate(cols):
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            mat[row_index[face]][j] = (-1) ** i
    return mat


@dataclass(frozen=True)
class ChainComplexData:
    """Boundary matrices of a complex, one per positive degree."""

    dims: tuple[int, ...]          # number of d-simplices per degree
    boundaries: tuple[tuple[tuple[int, ...], ...], ...]  # boundaries[d] maps C_d -> C_{d-1}

    def check_square_zero(self) -> None:
        """Verify that consecutive boundary maps compose to zero."""
        for d in range(2, len(self.dims)):
            a = self.boundaries[d - 1]
            b = self.boundaries[d]
            if not a or not b:
                continue
            for j in range(len(b[0])):
                col = [sum(a[i][k] * b[k][j] for k in range(len(b))) for i in range(len(a))]
                if any(col):
                    raise InternalInvariantError("boundary composed with boundary is nonzero")


def chain_complex(K: SimplicialComplex) -> ChainComplexData:
    if not K.simplices:
        raise InvalidInputError("empty complex has no chain complex")
    dims = tuple(len(K.faces_of_dim(d)) for d in range(K.dim + 1))
    boundaries = tuple(
        tuple(tuple(row) for row in boundary_matrix(K, d)) for d in range(K.dim + 1)
    )
    return ChainComplexData(dims, boundaries)


# ---------------------------------------------------------------------------
# exact rank computations


def rank_z2(rows: list[int]) -> int:
    """Rank over GF(2) of rows packed as int bitsets."""
    rank = 0
    pivots: list[int] = []
    for row in rows:
        for p in pivots:
            row = min(row, row ^ p)
        if row:
            pivots.append(row)
            pivots.sort(reverse=True)
            rank += 1
    return rank


def _z2_rows(mat) -> list[int]:
    out = []
    for row in mat:
        bits = 0
        for j, a in enumerate(row):
            if a % 2:
                bits |= 1 << j
        out.append(bits)
    return out


def rank_int(mat) -> int:
    """Rank over Q of an integer matrix, by fraction-free elimination."""
    if not mat or not mat[0]:
        return 0
    a = [list(row) for row in mat]
    nrows, ncols = len(a), len(a[0])
    rank = 0
    prev_pivot = 1
    row = 0
    for col in range(ncols):
        pivot_row = None
        for r in range(row, nrows):
            if a[r][col]:
                pivot_row = r
                break
        if pivot_row is None:
            continue
        a[row], a[pivot_row] = a[pivot_row], a[row]
        pivot = a[row][col]
        for r in range(row + 1, nrows):
            # Bareiss update on every remaining row keeps the division exact
            for c in range(col + 1, ncols):
                a[r][c] = (a[r][c] * pivot - a[r][col] * a[row][c]) // prev_pivot
            a[r][col] = 0
        prev_pivot = pivot
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def matrix_rank(mat, coeff: str) -> int:
    if not mat:
        return 0
    if coeff == Z2:
        return rank_z2(_z2_rows(mat))
    return rank_int(mat)


# ---------------------------------------------------------------------------
# Betti numbers, Smith normal form, integral homology


def betti(K: SimplicialComplex, coeff: str = Q) -> tuple[int, ...]:
    """Betti numbers b_0..b_dim over the chosen field."""
    if coeff == Z:
        raise InvalidInputError("use integral_homology for integer coefficients")
    check_field(coeff)
    if not K.simplices:
        raise InvalidInputError("empty complex")
    data = chain_complex(K)
    ranks = [matrix_rank(data.boundaries[d], coeff) for d in range(K.dim + 1)]
    ranks.append(0)  # boundary out of degree dim+1
    return tuple(data.dims[d] - ranks[d] - ranks[d + 1] for d in range(K.dim + 1))


def smith_normal_form(mat) -> list[int]:
    """Diagonal of the Smith normal form of an integer matrix.

    Returns the nonzero diagonal entries, positive and in divisibility
    order.  Only the invariant factors are computed, not the transforms.
    """
    a = [list(row) for row in mat]
    if not a or not a[0]:
        return []
    nrows, ncols = len(a), len(a[0])
    diag: list[int] = []
    top = 0
    while top < min(nrows, ncols):
        # find a nonzero entry of minimal absolute value in the working block
        best = None
        for i in range(top, nrows):
            for j in range(top, ncols):
                v = abs(a[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        _, bi, bj = best
        a[top], a[bi] = a[bi], a[top]
        for row in a:
            row[top], row[bj] = row[bj], row[top]
        pivot = a[top][top]
        dirty = False
        for i in range(top + 1, nrows):
            if a[i][top] % pivot:
                dirty = True
                break
        if not dirty:
            for j in range(top + 1, ncols):
                if a[top][j] % pivot:
                    dirty = True
                    break
        if dirty:
            # a remainder exists; reduce once and retry with a smaller pivot
            for i in range(top + 1, nrows):
                q = a[i][top] // pivot
                if q:
                    for j in range(top, ncols):
                        a[i][j] -= q * a[top][j]
            for j in range(top + 1, ncols):
                q = a[top][j] // pivot
                if q:
                    for i in range(top, nrows):
                        a[i][j] -= q * a[i][top]
            continue
        # clear row and column exactly
        for i in range(top + 1, nrows):
            q = a[i][top] // pivot
            if q:
                for j in range(top, ncols):
                    a[i][j] -= q * a[top][j]
        for j in range(top + 1, ncols):
            q = a[top][j] // pivot
            if q:
                for i in range(top, nrows):
                    a[i][j] -= q * a[i][top]
        diag.append(abs(pivot))
        top += 1
    # normalize to divisibility order: d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        for i in range(len(diag) - 1):
            if diag[i + 1] % diag[i]:
                g = math.gcd(diag[i], diag[i + 1])
                diag[i + 1] = diag[i] * diag[i + 1] // g
                diag[i] = g
                changed = True
    return diag


@dataclass(frozen=True)
class IntegralHomologySummary:
    """Free rank and torsion coefficients per degree, torsion in divisibility order."""

    free_ranks: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]

    def reduced_is_trivial(self) -> bool:
        if self.free_ranks[0] != 1 or self.torsion[0]:
            return False
        return all(r == 0 and not t for r, t in zip(self.free_ranks[1:], self.torsion[1:]))

    def first_nonzero_reduced_degree(self):
        """Least degree >= 1 with nonzero reduced homology, or None."""
        if self.free_ranks[0] > 1:
            raise InvalidInputError("complex is disconnected")
        for d in range(1, len(self.free_ranks)):
            if self.free_ranks[d] or self.torsion[d]:
                return d
        return None


def integral_homology(K: SimplicialComplex) -> IntegralHomologySummary:
    """Homology over Z via Smith normal form of the boundary matrices."""
    if not K.simplices:
        raise InvalidInputError("empty complex")
    data = chain_complex(K)
    snf: list[list[int]] = []
    for d in range(K.dim + 1):
        snf.append(smith_normal_form([list(r) for r in data.boundaries[d]]))
    snf.append([])
    free, tors = [], []
    for d in range(K.dim + 1):
        rank_d = len(snf[d])
        rank_d1 = len(snf[d + 1])
        free.append(data.dims[d] - rank_d - rank_d1)
        tors.append(tuple(x for x in snf[d + 1] if x > 1))
    return IntegralHomologySummary(tuple(free), tuple(tors))


def connectivity(K: SimplicialComplex, simply_connected_asserted: bool = False):
    """Connectivity k of the (asserted simply connected) complex.

    Uses the least degree with nonzero reduced integral homology: a simply
    connected complex whose first nonzero reduced homology sits in degree d
    is (d-1)-connected.  Returns CONTRACTIBLE when all reduced homology
    vanishes.  Refuses to run without the assertion: the fundamental group
    is an input here, never computed.
    """
    if not simply_connected_asserted:
        raise InvalidInputError(
            "connectivity requires simple connectivity to be asserted by the caller"
        )
    summary = integral_homology(K)
    if summary.free_ranks[0] != 1:
        raise InvalidInputError("asserted simply connected, but the complex is disconnected")
    if summary.free_ranks[1:2] and (summary.free_ranks[1] or summary.torsion[1]):
        raise InvalidInputError(
            "asserted simply connected, but homology in degree 1 is nonzero"
        )
    d = summary.first_nonzero_reduced_degree()
    if d is None:
        return CONTRACTIBLE
    return d - 1


def euler_characteristic_from_betti(b: tuple[int, ...]) -> int:
    return sum((-1) ** i * x for i, x in enumerate(b))


# ---------------------------------------------------------------------------
# dense exact elimination over a field (used by the ring module)


class FieldOps:
    """Arithmetic for one of the two supported fields."""

    def __init__(self, coeff: str):
        check_field(coeff)
        self.coeff = coeff
        if coeff == Z2:
            self.zero, self.one = 0, 1
        else:
            self.zero, self.one = Fraction(0), Fraction(1)

    def of_int(self, n: int):
        return n % 2 if self.coeff == Z2 else Fraction(n)

    def add(self, a, b):
        return (a + b) % 2 if self.coeff == Z2 else a + b

    def sub(self, a, b):
        return (a - b) % 2 if self.coeff == Z2 else a - b

    def mul(self, a, b):
        return (a * b) % 2 if self.coeff == Z2 else a * b

    def div(self, a, b):
        if self.coeff == Z2:
            if b % 2 == 0:
                raise ZeroDivisionError
            return a % 2
        return a / b

    def neg(self, a):
        return a % 2 if self.coeff == Z2 else -a

    def sign(self, parity: int):
        """(-1)^parity as a field element (always 1 over Z/2)."""
        if self.coeff == Z2:
            return 1
        return Fraction(-1) if parity % 2 else Fraction(1)


class Echelon:
    """Incremental row echelon over a field, with expression tracking.

    Rows can be inserted with a tag; reduce() expresses a vector over the
    inserted rows and reports the coefficients used on tagged rows.
    """

    def __init__(self, ops: FieldOps, width: int):
        self.ops = ops
        self.width = width
        self.rows: list[list] = []
        self.by_pivot: dict[int, int] = {}
        self.tags: list = []

    def _reduce(self, vec: list):
        # Stored rows are zero before their pivot, so eliminating the
        # leading entry of vec strictly advances it; the loop terminates
        # with either zero or a row whose leading column is a fresh pivot.
        ops = self.ops
        vec = list(vec)
        used: list[tuple[int, object]] = []
        j = 0
        while j < self.width:
            if vec[j] == ops.zero:
                j += 1
                continue
            idx = self.by_pivot.get(j)
            if idx is None:
                break
            row = self.rows[idx]
            factor = ops.div(vec[j], row[j])
            for c in range(j, self.width):
                vec[c] = ops.sub(vec[c], ops.mul(factor, row[c]))
            used.append((idx, factor))
        return vec, used

    def insert(self, vec: list, tag=None) -> bool:
        """Insert if independent; returns True when the span grew."""
        red, _ = self._reduce(vec)
        p = next((j for j, v in enumerate(red) if v != self.ops.zero), None)
        if p is None:
            return False
        self.by_pivot[p] = len(self.rows)
        self.rows.append(red)
        self.tags.append(tag)
        return True

    def reduce(self, vec: list):
        """Return (remainder, [(tag, coefficient)] for tagged rows used)."""
        red, used = self._reduce(vec)
        tagged = [(self.tags[i], c) for i, c in used if self.tags[i] is not None]
        return red, tagged
