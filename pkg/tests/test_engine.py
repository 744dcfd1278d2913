import json
import math
from fractions import Fraction

import pytest

from tcbounds.descriptors import (
    AsphericalSpace,
    AttributeSet,
    EilenbergMacLane,
    GroupClass,
    ProductSpace,
    RealProjective,
    SkeletonSpace,
    Sphere,
    Torus,
    descriptor_from_json,
    descriptor_to_json,
)
from tcbounds.engine import (
    INVARIANTS,
    _load_kb_doc,
    analyze,
    analyze_complex,
    compute_bindings,
    load_kb,
    parse_report,
    propagate,
    replay,
    report,
    secat_tilde_bound,
    seed_facts,
    states_agree,
    tc_ceiling_bound,
)
from tcbounds.errors import ConflictError, InvalidInputError
from tcbounds.intervals import INF, Interval
from tcbounds.simplicial import boundary_sphere, from_maximal_simplices


def interval(state, name, node="X"):
    return state.nodes[node].interval(name)


class TestCeilingFormulas:
    @pytest.mark.parametrize("d", [0, 1, 4, 9])
    def test_k_zero_gives_dim(self, d):
        assert secat_tilde_bound(d, 0) == d

    @pytest.mark.parametrize("d,k", [(3, 3), (3, 7), (0, 0)])
    def test_high_connectivity_gives_zero(self, d, k):
        assert secat_tilde_bound(d, k) == 0

    def test_half_dim(self):
        assert secat_tilde_bound(5, 1) == 2

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_projective_instance(self, n):
        assert tc_ceiling_bound(n, n - 1) == 2

    @pytest.mark.parametrize("d", [0, 1, 5, 12])
    def test_k_one_gives_dim(self, d):
        assert tc_ceiling_bound(d, 1) == d

    @pytest.mark.parametrize("d", [2, 5, 9])
    def test_k_two(self, d):
        assert tc_ceiling_bound(d, 2) == math.ceil(Fraction(2 * d - 2, 3))

    def test_k_zero_rejected(self):
        with pytest.raises(InvalidInputError):
            tc_ceiling_bound(4, 0)

    def test_negative_rejected(self):
        with pytest.raises(InvalidInputError):
            secat_tilde_bound(-1, 0)


class TestSeeds:
    def test_even_sphere(self):
        state = seed_facts(Sphere(2))
        assert interval(state, "tc") == Interval.exactly(2)

    def test_circle(self):
        state = seed_facts(Sphere(1))
        assert interval(state, "tc") == Interval.exactly(1)
        assert interval(state, "tcd") == Interval.exactly(1)

    def test_rp8_diagonal_tc(self):
        state = seed_facts(RealProjective(8))
        assert interval(state, "tcd") == Interval.exactly(15)

    def test_every_seed_carries_a_citation(self):
        state = seed_facts(ProductSpace((Torus(2), Sphere(2))))
        assert state.log
        for entry in state.log:
            assert entry.kind == "seed"
            assert entry.citation.strip()


class TestPropagation:
    def test_torus_times_sphere(self):
        state = analyze(ProductSpace((Torus(2), Sphere(2))))
        assert interval(state, "tc") == Interval.exactly(4)
        assert interval(state, "tcd") == Interval.exactly(2)
        assert interval(state, "tctilde") == Interval.exactly(2)
        assert interval(state, "zcl") == Interval.exactly(4)

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_even_projective_tctilde(self, n):
        state = analyze(RealProjective(n))
        assert interval(state, "tctilde") == Interval.exactly(2)

    def test_projective_cat_from_cup_length(self):
        state = analyze(RealProjective(5))
        assert interval(state, "cat") == Interval.exactly(5)

    def test_skeleton_gap(self):
        state = analyze(SkeletonSpace(Torus(5), 2))
        assert interval(state, "tcd").upper == 4
        assert interval(state, "tcd_pi") == Interval.exactly(5)
        gap = report(state)["gap"]
        assert gap["statement"] == "TC^D(X) <= 4 < 5 <= TC^D(pi)"

    def test_torus_is_its_own_fixpoint(self):
        state = analyze(Torus(3))
        assert interval(state, "tc") == Interval.exactly(3)
        assert interval(state, "tcd") == Interval.exactly(3)
        assert interval(state, "tctilde") == Interval.exactly(0)
        assert interval(state, "cat1") == Interval.exactly(3)
        assert interval(state, "cat") == Interval.exactly(3)

    def test_h_space_rule_on_odd_sphere(self):
        state = analyze(Sphere(3))
        # simply connected H-space: tcd = cat1 = 0
        assert interval(state, "tcd") == Interval.exactly(0)
        assert interval(state, "cat1") == Interval.exactly(0)

    def test_aspherical_with_abstract_group(self):
        group = GroupClass("abstract", abstract_cd=3, abstract_tc=(3, 5))
        state = analyze(EilenbergMacLane(group))
        assert interval(state, "tc") == Interval(3, 5)
        assert interval(state, "tcd") == Interval(3, 5)
        assert interval(state, "tctilde") == Interval.exactly(0)

    def test_torsion_group_keeps_r2_out(self):
        from tcbounds.engine import RULES_BY_ID

        # infinite group TC makes the group-plus-dimension bound inapplicable,
        # while the connectivity ceiling bound still produces a conclusion
        state = analyze(RealProjective(4))
        assert RULES_BY_ID["R2"].fn(state, state.root) == []
        r4 = RULES_BY_ID["R4"].fn(state, state.root)
        assert r4 and r4[0][2].upper == 7 + tc_ceiling_bound(4, 3)
        # and R2 does fire for a torsion-free group of the same dimension
        state2 = analyze(SkeletonSpace(Torus(5), 2))
        assert any(e.rule_id == "R2" and e.node == "X" for e in state2.log)

    def test_free_group_em(self):
        state = analyze(EilenbergMacLane(GroupClass("free", n=3)))
        assert interval(state, "tc") == Interval.exactly(2)
        assert interval(state, "dim") == Interval.exactly(1)


class TestAnalyzeComplex:
    def test_sphere_complex(self):
        state = analyze_complex(boundary_sphere(2), AttributeSet(simply_connected=True))
        assert interval(state, "tc") == Interval.exactly(2)
        assert interval(state, "tcd") == Interval.exactly(0)
        assert interval(state, "conn") == Interval.exactly(1)

    def test_aspherical_assertion_merges_tcd_and_tc(self, torus7):
        state = analyze_complex(torus7, AttributeSet(aspherical=True))
        assert interval(state, "tcd") == interval(state, "tc")
        assert interval(state, "tc").lower == 2
        assert interval(state, "tctilde") == Interval.exactly(0)

    def test_h_space_assertion_is_consistent_on_the_torus(self, torus7):
        state = analyze_complex(torus7, AttributeSet(aspherical=True, h_space=True))
        assert interval(state, "cat1") == interval(state, "tcd")

    def test_point(self):
        state = analyze_complex(from_maximal_simplices([[0]]))
        for name in INVARIANTS:
            if name == "conn":
                continue
            assert interval(state, name) == Interval.exactly(0), name
        assert interval(state, "conn") == Interval.exactly(INF)

    def test_explicit_lower_bounds_from_rings(self, torus7):
        state = analyze_complex(torus7)
        assert interval(state, "tc").lower >= interval(state, "zcl").lower == 2
        assert interval(state, "cat").lower >= interval(state, "cuplen").lower == 2

    def test_disconnected_rejected(self):
        K = from_maximal_simplices([[0], [1]])
        with pytest.raises(InvalidInputError):
            analyze_complex(K)

    def test_dim_assertion_must_match(self, torus7):
        with pytest.raises(InvalidInputError):
            analyze_complex(torus7, AttributeSet(dim=3))

    def test_connectivity_assertion_feeds_the_ceiling_bound(self):
        # without claiming simple connectivity, an asserted cover
        # connectivity still sharpens the ceiling upper bounds
        state = analyze_complex(boundary_sphere(2),
                                AttributeSet(univ_cover_connectivity=1))
        assert interval(state, "conn").lower == 1
        assert interval(state, "tc") == Interval(2, 4)

    def test_connectivity_assertion_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            AttributeSet(univ_cover_connectivity=0)

    def test_contradictory_assertions_conflict(self):
        with pytest.raises(ConflictError) as exc:
            analyze_complex(boundary_sphere(2),
                            AttributeSet(simply_connected=True, aspherical=True))
        assert exc.value.node == "X"

    def test_impossible_group_dimension_conflict(self):
        # an aspherical 2-complex cannot carry a group with TC pinned to 5
        group = GroupClass("abstract", abstract_cd=5, abstract_tc=(5, 5))
        with pytest.raises(ConflictError):
            analyze(AsphericalSpace(group, dim=2))


class TestReplayAndDeterminism:
    @pytest.mark.parametrize("descriptor", [
        ProductSpace((Torus(2), Sphere(2))),
        RealProjective(8),
        SkeletonSpace(Torus(5), 2),
        Sphere(3),
    ])
    def test_replay_reproduces_fixpoint(self, descriptor):
        state = analyze(descriptor)
        replayed = replay(descriptor, state.log)
        assert states_agree(state, replayed)

    def test_propagation_is_idempotent(self):
        state = analyze(ProductSpace((Torus(2), Sphere(2))))
        before = {p: dict(n.intervals) for p, n in state.nodes.items()}
        propagate(state)
        after = {p: dict(n.intervals) for p, n in state.nodes.items()}
        assert before == after

    def test_two_runs_agree(self):
        a = analyze(ProductSpace((Torus(2), Sphere(2))))
        b = analyze(ProductSpace((Torus(2), Sphere(2))))
        assert states_agree(a, b)
        assert [e.to_json() for e in a.log] == [e.to_json() for e in b.log]


class TestRuleBaseConsistency:
    CORPUS = (
        [Sphere(n) for n in range(1, 7)]
        + [Torus(n) for n in range(1, 5)]
        + [RealProjective(n) for n in range(1, 9)]
        + [EilenbergMacLane(GroupClass("trivial")),
           EilenbergMacLane(GroupClass("free_abelian", n=3)),
           EilenbergMacLane(GroupClass("cyclic_two")),
           ProductSpace((Torus(1), Sphere(2))),
           ProductSpace((Sphere(2), Sphere(3))),
           ProductSpace((SkeletonSpace(Torus(4), 2), Sphere(2))),
           SkeletonSpace(Torus(4), 2)]
    )

    @pytest.mark.parametrize("descriptor", CORPUS, ids=lambda d: d.label())
    def test_no_rule_contradicts_the_knowledge_base(self, descriptor):
        state = analyze(descriptor)  # a conflict would raise
        for name in INVARIANTS:
            iv = interval(state, name)
            assert iv.lower <= iv.upper

    @pytest.mark.parametrize("descriptor", CORPUS, ids=lambda d: d.label())
    def test_bounded_by_twice_dimension(self, descriptor):
        state = analyze(descriptor)
        dim = interval(state, "dim")
        if dim.upper == INF:
            return
        for name in ("cat", "cat1", "tc", "tcd", "tctilde", "cattilde", "zcl", "cuplen"):
            assert interval(state, name).upper <= 2 * dim.upper + 1, name


class TestBindings:
    def test_binding_rules_achieve_the_bound(self):
        state = analyze(ProductSpace((Torus(2), Sphere(2))))
        bindings = compute_bindings(state, state.root)
        assert bindings["tc"]["lower"] == ["R15"]
        assert "R3" in bindings["tc"]["upper"]
        assert "R19" in bindings["tc"]["upper"]

    def test_seed_reported_when_binding(self):
        state = analyze(Sphere(2))
        bindings = compute_bindings(state, state.root)
        assert "seed" in bindings["tc"]["upper"]


class TestKnowledgeBase:
    def test_entries_all_cited(self):
        for entry in load_kb():
            assert entry.citation.strip()
            assert entry.provenance in ("rule-base", "classical")

    def test_missing_citation_rejected(self):
        doc = {"entries": [{"space": {"type": "sphere"}, "invariant": "tc",
                            "lower": 1, "upper": 1, "provenance": "classical"}]}
        with pytest.raises(InvalidInputError):
            _load_kb_doc(doc, "test")

    def test_unknown_provenance_rejected(self):
        doc = {"entries": [{"space": {"type": "sphere"}, "invariant": "tc",
                            "lower": 1, "upper": 1, "citation": "x",
                            "provenance": "folklore"}]}
        with pytest.raises(InvalidInputError):
            _load_kb_doc(doc, "test")

    def test_user_entries_extend_the_base(self, tmp_path):
        extra = tmp_path / "extra.json"
        extra.write_text(json.dumps({"entries": [{
            "space": {"type": "real_projective", "n": 6},
            "invariant": "tc", "lower": 7, "upper": 7,
            "citation": "immersion dimension of RP^6 is 7",
            "provenance": "classical",
        }]}))
        kb = load_kb(str(extra))
        state = analyze(RealProjective(6), kb)
        assert interval(state, "tc") == Interval.exactly(7)
        assert interval(state, "tcd") == Interval.exactly(7)

    def test_user_entry_contradicting_builtin_conflicts(self, tmp_path):
        extra = tmp_path / "extra.json"
        extra.write_text(json.dumps({"entries": [{
            "space": {"type": "sphere", "n": 2},
            "invariant": "tc", "lower": 3, "upper": 3,
            "citation": "a wrong claim, to exercise conflict surfacing",
            "provenance": "classical",
        }]}))
        with pytest.raises(ConflictError):
            analyze(Sphere(2), load_kb(str(extra)))


class TestReport:
    def test_json_round_trip(self):
        state = analyze(ProductSpace((Torus(2), Sphere(2))))
        doc = report(state)
        parsed = parse_report(doc)
        for name in INVARIANTS:
            assert parsed[name] == interval(state, name)

    def test_json_round_trip_with_infinite_bounds(self):
        state = analyze(EilenbergMacLane(GroupClass("cyclic_two")))
        doc = json.loads(json.dumps(report(state)))
        parsed = parse_report(doc)
        for name in INVARIANTS:
            assert parsed[name] == interval(state, name)

    def test_every_derivation_cites(self):
        state = analyze(RealProjective(8))
        doc = report(state, explain=True)
        assert doc["derivations"]
        for entry in doc["derivations"]:
            assert entry["citation"].strip()

    def test_text_format(self):
        state = analyze(SkeletonSpace(Torus(5), 2))
        text = report(state, fmt="text", explain=True)
        assert "TC^D(X) <= 4 < 5 <= TC^D(pi)" in text
        assert "[R21]" in text

    def test_point_has_no_rule_derivations_beyond_seeds(self):
        state = analyze(EilenbergMacLane(GroupClass("trivial")))
        non_seed = [e for e in state.log if e.kind != "seed"]
        # everything about a point follows from seeds and zero-valued rules
        for entry in non_seed:
            assert (entry.value == Interval.exactly(0)
                    or entry.target in ("conn", "dim")
                    or entry.target.startswith("attr:"))

    def test_descriptor_json_round_trip(self):
        for descriptor in (ProductSpace((Torus(2), Sphere(2))),
                           SkeletonSpace(Torus(5), 2),
                           EilenbergMacLane(GroupClass("free", n=2)),
                           AsphericalSpace(GroupClass("abstract", abstract_cd=2), dim=2),
                           EilenbergMacLane(GroupClass("abstract", abstract_cd=3,
                                                       abstract_tc=(3, 5)))):
            doc = descriptor_to_json(descriptor)
            assert descriptor_from_json(doc) == descriptor
