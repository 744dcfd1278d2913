"""Acceptance suite.

One test per criterion; each prints a PASS line (visible with pytest -s)
and enforces the stated exactness and runtime budget.  All expected
values are exact integers; no tolerances anywhere.
"""

import math
import random
import subprocess
import sys
import time
from fractions import Fraction

from tcbounds.covers import fuzz_combine, fuzz_multiplicity_lemma
from tcbounds.descriptors import ProductSpace, RealProjective, SkeletonSpace, Sphere, Torus
from tcbounds.engine import (
    analyze,
    compute_bindings,
    replay,
    report,
    secat_tilde_bound,
    states_agree,
    tc_ceiling_bound,
)
from tcbounds.homology import Q, Z2, betti, integral_homology
from tcbounds.intervals import Interval
from tcbounds.rings import (
    cohomology_ring,
    cup_length,
    exterior_ring,
    sphere_ring,
    tensor_ring,
    zero_divisor_cup_length,
)
from tcbounds.simplicial import (
    boundary_sphere,
    complement_complex,
    complement_nerve,
    from_maximal_simplices,
    is_full_subcomplex,
    product,
    random_complex,
    skeleton_complement_dimension,
    subcomplex_from_faces,
)

SEED = 20250811


def report_pass(number: int, message: str) -> None:
    print(f"ACCEPTANCE {number}: PASS - {message}")


def test_criterion_1_product_of_torus_and_sphere():
    t0 = time.monotonic()
    state = analyze(ProductSpace((Torus(2), Sphere(2))))
    root = state.root
    assert root.interval("tc") == Interval.exactly(4)
    assert root.interval("tcd") == Interval.exactly(2)
    assert root.interval("tctilde") == Interval.exactly(2)

    bindings = compute_bindings(state, root)
    assert bindings["tc"]["lower"] == ["R15"], "lower bound must come from zero divisors"
    assert "R3" in bindings["tc"]["upper"], "upper bound must come from the tcd + tctilde rule"
    rules_fired = {e.rule_id for e in state.log if e.node == "X"}
    assert "R14" in rules_fired, "tcd and tctilde must come from the product split"

    # the zero-divisor bound really is 4 over Q on the tensor ring
    ring = tensor_ring(exterior_ring(2, Q), sphere_ring(2, Q))
    assert zero_divisor_cup_length(ring) == 4
    assert root.interval("zcl") == Interval.exactly(4)

    elapsed = time.monotonic() - t0
    assert elapsed < 1.0, f"took {elapsed:.3f}s"
    report_pass(1, f"TC(T^2 x S^2) = [4,4], lower via R15 (zcl=4 over Q), "
                   f"upper via R3 with TCD=2 and TCtilde=2 ({elapsed:.3f}s)")


def test_criterion_2_even_projective_spaces():
    t0 = time.monotonic()
    for n in (2, 4, 6, 8):
        t_run = time.monotonic()
        state = analyze(RealProjective(n))
        root = state.root
        assert root.interval("tctilde") == Interval.exactly(2), f"RP^{n}"
        cover = state.nodes["X.cover"]
        assert cover.interval("tc") == Interval.exactly(2), "TC of the sphere cover"
        assert tc_ceiling_bound(n, n - 1) == 2
        assert time.monotonic() - t_run < 1.0
    state8 = analyze(RealProjective(8))
    assert state8.root.interval("tcd") == Interval.exactly(15)
    assert state8.root.interval("tc") == Interval.exactly(15)
    ceiling_upper = 15 + tc_ceiling_bound(8, 7)
    assert ceiling_upper == 17
    assert state8.root.interval("tc").upper <= ceiling_upper
    report_pass(2, f"TCtilde(RP^n) = [2,2] for even n in 2,4,6,8; TCD(RP^8) = [15,15], "
                   f"consistent with the ceiling upper bound 17 "
                   f"({time.monotonic() - t0:.3f}s)")


def test_criterion_3_skeleton_gap():
    t0 = time.monotonic()
    state = analyze(SkeletonSpace(Torus(5), 2))
    root = state.root
    assert root.interval("tcd").upper == 4
    assert root.interval("tcd_pi") == Interval.exactly(5)
    rules = {e.rule_id for e in state.log if e.node == "X" and e.target == "tc"}
    assert "R21" in rules, "the 2*dim bound must participate"
    bindings = compute_bindings(state, root)
    assert "R21" in bindings["tc"]["upper"]
    assert "R5" in bindings["tcd"]["upper"]
    doc = report(state)
    assert doc["gap"]["statement"] == "TC^D(X) <= 4 < 5 <= TC^D(pi)"
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    report_pass(3, f"skeleton of T^5: TC^D(X) <= 4 while TC^D(pi) = 5, "
                   f"strict gap exhibited ({elapsed:.3f}s)")


def test_criterion_4_complement_dimension_bound():
    t0 = time.monotonic()
    rng = random.Random(SEED)
    checked = 0
    for _ in range(50):
        K = random_complex(rng, max_vertices=8, max_dim=4, max_facets=8)
        while K.dim < 1:
            K = random_complex(rng, max_vertices=8, max_dim=4, max_facets=8)
        for r in range(K.dim):
            value = skeleton_complement_dimension(K, r)
            assert value <= K.dim - r - 1, (sorted(K.simplices), r)
            checked += 1
    elapsed = time.monotonic() - t0
    assert elapsed < 30.0
    report_pass(4, f"complement-of-skeleton dimension bound held in {checked}/{checked} "
                   f"cases over 50 complexes ({elapsed:.2f}s)")


def _full_pairs():
    """(K, L) pairs with L full in K: shipped examples plus induced subcomplexes."""
    pairs = []
    torus7 = from_maximal_simplices(
        [sorted([i, (i + 1) % 7, (i + 3) % 7]) for i in range(7)]
        + [sorted([i, (i + 2) % 7, (i + 3) % 7]) for i in range(7)], name="torus_7")
    rp2 = from_maximal_simplices(
        [[0, 1, 3], [0, 1, 4], [0, 2, 3], [0, 2, 5], [0, 4, 5],
         [1, 2, 4], [1, 2, 5], [1, 3, 5], [2, 3, 4], [3, 4, 5]], name="rp2_6")
    for K in (boundary_sphere(1), boundary_sphere(2), boundary_sphere(3), torus7, rp2):
        pairs.append((K, subcomplex_from_faces(K, [[0]])))
    # induced subcomplex on two vertices of the torus: both vertices plus their edge
    pairs.append((torus7, subcomplex_from_faces(torus7, [[0, 2]])))
    rng = random.Random(SEED + 1)
    while len(pairs) < 25:
        K = random_complex(rng, max_vertices=6, max_dim=3, max_facets=5)
        verts = list(K.vertices)
        size = rng.randint(1, max(1, len(verts) - 1))
        chosen = set(rng.sample(verts, size))
        induced = [s for s in K.simplices if set(s) <= chosen]
        if not induced or len(induced) == len(K.simplices):
            continue
        L = subcomplex_from_faces(K, [list(s) for s in induced])
        pairs.append((K, L))
    return pairs


def test_criterion_5_complement_oracle_equivalence():
    t0 = time.monotonic()
    pairs = _full_pairs()
    assert len(pairs) >= 25
    for K, L in pairs:
        assert is_full_subcomplex(K, L)
        nerve = complement_nerve(K, L)
        chains = complement_complex(K, L)
        for coeff in (Z2, Q):
            bn, bc = betti(nerve, coeff), betti(chains, coeff)
            width = max(len(bn), len(bc))
            pad = lambda b: tuple(b) + (0,) * (width - len(b))
            assert pad(bn) == pad(bc), (sorted(K.simplices), sorted(L.simplices), coeff)
    elapsed = time.monotonic() - t0
    report_pass(5, f"nerve and chain complement models agree on Betti numbers over "
                   f"Z/2 and Q for {len(pairs)} full pairs ({elapsed:.2f}s)")


def test_criterion_6_cover_lemmas():
    t0 = time.monotonic()
    lemma = fuzz_multiplicity_lemma(1000, seed=SEED)
    assert lemma["passed"] and lemma["trials"] == 1000
    combine = fuzz_combine(500, seed=SEED + 1)
    assert combine["passed"] and combine["trials"] == 500
    elapsed = time.monotonic() - t0
    assert elapsed < 30.0
    report_pass(6, f"multiplicity lemma held in 1000 trials ({lemma['checks']} checks); "
                   f"500 cover combinations verified ({elapsed:.2f}s)")


def test_criterion_7_ring_cross_validation():
    t0 = time.monotonic()
    circle_ring = cohomology_ring(boundary_sphere(1), Q)
    tensor = tensor_ring(circle_ring, circle_ring)
    square = cohomology_ring(product(boundary_sphere(1), boundary_sphere(1)), Q)
    torus7 = from_maximal_simplices(
        [sorted([i, (i + 1) % 7, (i + 3) % 7]) for i in range(7)]
        + [sorted([i, (i + 2) % 7, (i + 3) % 7]) for i in range(7)])
    minimal = cohomology_ring(torus7, Q)
    for ring in (tensor, square, minimal):
        assert ring.betti_numbers() == (1, 2, 1)
        assert cup_length(ring) == 2
        assert zero_divisor_cup_length(ring) == 2
    report_pass(7, f"tensor square of a circle, staircase product, and the 7-vertex "
                   f"torus all give Betti (1,2,1), cup-length 2, zcl 2 over Q "
                   f"({time.monotonic() - t0:.2f}s)")


def test_criterion_8_coefficient_sensitivity():
    t0 = time.monotonic()
    s2 = boundary_sphere(2)
    assert zero_divisor_cup_length(cohomology_ring(s2, Q)) == 2
    assert zero_divisor_cup_length(cohomology_ring(s2, Z2)) == 1
    rp2 = from_maximal_simplices(
        [[0, 1, 3], [0, 1, 4], [0, 2, 3], [0, 2, 5], [0, 4, 5],
         [1, 2, 4], [1, 2, 5], [1, 3, 5], [2, 3, 4], [3, 4, 5]])
    assert cup_length(cohomology_ring(rp2, Z2)) == 2
    homology = integral_homology(rp2)
    assert homology.torsion == ((), (2,), ())
    report_pass(8, f"zcl(S^2) = 2 over Q vs 1 over Z/2; cup-length(RP^2; Z/2) = 2; "
                   f"integral RP^2 torsion Z/2 in degree 1 ({time.monotonic() - t0:.2f}s)")


def test_criterion_9_ceiling_formulas_against_oracle():
    t0 = time.monotonic()
    for dim in range(0, 51):
        for k in range(0, dim + 1):
            expected = max(0, math.ceil(Fraction(dim - k, k + 1)))
            assert secat_tilde_bound(dim, k) == expected, (dim, k)
            if k >= 1:
                expected2 = max(0, math.ceil(Fraction(2 * dim - k, k + 1)))
                assert tc_ceiling_bound(dim, k) == expected2, (dim, k)
    # anchored instances
    assert secat_tilde_bound(7, 0) == 7
    assert secat_tilde_bound(3, 5) == 0
    assert secat_tilde_bound(5, 1) == 2
    assert all(tc_ceiling_bound(n, n - 1) == 2 for n in (2, 4, 6, 8))
    assert tc_ceiling_bound(9, 1) == 9
    assert tc_ceiling_bound(7, 2) == math.ceil(Fraction(2 * (7 - 1), 3))
    report_pass(9, f"ceiling formulas match the exact rational oracle on all "
                   f"(dim, k) with dim <= 50 ({time.monotonic() - t0:.2f}s)")


def test_criterion_10_determinism_and_replay():
    t0 = time.monotonic()
    for argv in (["bounds", "t2xs2", "--explain"],
                 ["bounds", "t5_skeleton2", "--explain"],
                 ["zcl", "s2", "--coeff", "q"],
                 ["cover", "fuzz", "--kind", "lemma", "--trials", "100",
                  "--seed", str(SEED)]):
        cmd = [sys.executable, "-m", "tcbounds.cli", *argv]
        first = subprocess.run(cmd, capture_output=True, check=True)
        second = subprocess.run(cmd, capture_output=True, check=True)
        assert first.stdout == second.stdout and first.stdout, argv
    for descriptor in (ProductSpace((Torus(2), Sphere(2))), RealProjective(8)):
        state = analyze(descriptor)
        assert states_agree(state, replay(descriptor, state.log))
    report_pass(10, f"byte-identical CLI reruns and replayable derivation logs "
                    f"({time.monotonic() - t0:.2f}s)")
