import itertools

import pytest

from antipodal import (ClassDescriptor, GeneralClassDescriptor, InputError,
                       Variant, antipodal_closure, automorphisms, delta_matching,
                       find_forbidden_triple, fold, is_forbidden_triangle,
                       is_member, parity_parts, unfold)

from conftest import all_complete_graphs, graph, matched_members


class TestDescriptors:
    def test_variant_inference(self):
        assert ClassDescriptor(3, 1).variant is Variant.ODD_NON_BIPARTITE
        assert ClassDescriptor(4, 4).variant is Variant.EVEN_BIPARTITE
        assert ClassDescriptor(3, 3).variant is Variant.UNRESTRICTED
        assert ClassDescriptor(4, 2).variant is Variant.UNRESTRICTED

    def test_parameter_validation(self):
        with pytest.raises(InputError):
            ClassDescriptor(3, 2)  # 2 > 3/2 and 2 != 3
        with pytest.raises(InputError):
            ClassDescriptor(1, 1)
        with pytest.raises(InputError):
            ClassDescriptor(4, 4, Variant.ODD_NON_BIPARTITE)

    def test_folded_parameters(self):
        got = ClassDescriptor(5, 2).folded()
        assert (got.delta, got.K1, got.K2, got.C0, got.C1) == (4, 2, 3, 12, 11)
        bip = ClassDescriptor(4, 4).folded()
        assert bip.K1 == float("inf")
        assert (bip.delta, bip.K2, bip.C0, bip.C1) == (3, 0, 10, 9)


class TestForbiddenTriangles:
    def test_delta3_k1_examples(self):
        desc = ClassDescriptor(3, 1)
        assert is_forbidden_triangle(1, 1, 3, desc)    # breaks the triangle inequality
        assert not is_forbidden_triangle(1, 1, 1, desc)
        assert is_forbidden_triangle(3, 3, 2, desc)
        assert is_forbidden_triangle(2, 2, 3, desc)

    def test_bipartite_forbids_odd(self):
        assert is_forbidden_triangle(1, 1, 1, ClassDescriptor(4, 4))

    def test_delta3_k1_full_forbidden_list(self):
        # the family omits exactly (1,1,3), (2,2,3) and (3,3,a) for 1 <= a <= 3
        desc = ClassDescriptor(3, 1)
        forbidden = {m for m in itertools.combinations_with_replacement(range(1, 4), 3)
                     if is_forbidden_triangle(*m, desc)}
        assert forbidden == {(1, 1, 3), (2, 2, 3), (1, 3, 3), (2, 3, 3), (3, 3, 3)}

    def test_out_of_range_labels(self):
        with pytest.raises(InputError):
            is_forbidden_triangle(1, 1, 4, ClassDescriptor(3, 1))
        with pytest.raises(InputError):
            is_forbidden_triangle(0, 1, 1, ClassDescriptor(3, 1))

    def test_k_equals_delta_shape(self):
        # with K = delta the constraint collapses to parity plus perimeter
        for delta in (3, 4, 5):
            desc = ClassDescriptor(delta, delta)
            for t in itertools.product(range(1, delta + 1), repeat=3):
                p = sum(t)
                nonmetric = 2 * max(t) > p
                assert is_forbidden_triangle(*t, desc) == \
                    (nonmetric or p % 2 == 1 or p > 2 * delta)

    def test_general_matches_antipodal(self):
        for delta in (3, 4, 5):
            for K in list(range(1, delta // 2 + 1)) + [delta]:
                desc = ClassDescriptor(delta, K)
                gen = GeneralClassDescriptor(
                    delta, float("inf") if K == delta else K,
                    delta - K, 2 * delta + 2, 2 * delta + 1)
                for t in itertools.product(range(1, delta + 1), repeat=3):
                    assert is_forbidden_triangle(*t, desc) == \
                        is_forbidden_triangle(*t, gen)


class TestMembership:
    def test_quadruple_is_member(self, quadruple, desc31):
        assert is_member(quadruple, desc31)

    def test_flattened_quadruple_is_not(self, desc31):
        g = graph("uvwx", 3, [("u", "v", 3), ("w", "x", 3),
                              ("u", "w", 1), ("u", "x", 1),
                              ("v", "x", 1), ("v", "w", 2)])
        assert not is_member(g, desc31)
        # first forbidden triple in canonical scan order; (u, w, x) is forbidden too
        assert find_forbidden_triple(g, desc31) == ("u", "v", "x")

    def test_trivial_members(self, desc31):
        assert is_member(graph("", 3), desc31)
        assert is_member(graph("u", 3), desc31)

    def test_incomplete_graph_refused(self, desc31):
        with pytest.raises(InputError, match="completion"):
            is_member(graph("uv", 3), desc31)


class TestDeltaMatching:
    def test_enumeration_order(self, quadruple):
        m = delta_matching(quadruple)
        assert m.edges == (("u", "v"), ("w", "x"))
        assert m.index_of("x") == 2 and m.mate("u") == "v"

    def test_rejects_double_matching(self):
        g = graph("abc", 3, [("a", "b", 3), ("a", "c", 3)])
        with pytest.raises(InputError, match="matching"):
            delta_matching(g)

    def test_matching_and_sum_rule_hold_in_all_members(self):
        # exhaustive over complete labelled graphs on 4 vertices
        for delta, K in ((3, 1), (4, 4), (4, 1)):
            desc = ClassDescriptor(delta, K)
            for g in all_complete_graphs("abcd", delta):
                if not is_member(g, desc):
                    continue
                matching = delta_matching(g)  # would raise if not a matching
                for x, y in matching.edges:
                    for w in g.vertices:
                        if w not in (x, y):
                            assert g.dist(x, w) + g.dist(y, w) == delta

    def test_parity_parts(self):
        g = graph("abcd", 4, [("a", "b", 4), ("c", "d", 4),
                              ("a", "c", 2), ("b", "d", 2),
                              ("a", "d", 2), ("b", "c", 2)])
        p1, p2 = parity_parts(g)
        assert p1 == frozenset("abcd") and p2 == frozenset()


class TestAntipodalClosure:
    def test_already_matched_unchanged(self, edge3, desc31):
        closed, matching = antipodal_closure(edge3, desc31)
        assert closed == edge3 and matching.m == 1

    def test_single_vertex(self, desc31):
        closed, matching = antipodal_closure(graph("u", 3), desc31)
        assert closed.vertices == ("u", "u*")
        assert closed.dist("u", "u*") == 3
        assert matching.edges == (("u", "u*"),)

    def test_three_points_at_distance_two(self, desc31):
        g = graph("abc", 3, [("a", "b", 2), ("a", "c", 2), ("b", "c", 2)])
        closed, _ = antipodal_closure(g, desc31)
        assert len(closed) == 6
        for v in "abc":
            assert closed.dist(v, f"{v}*") == 3
        assert closed.dist("a*", "b") == 1 and closed.dist("a*", "c") == 1
        assert closed.dist("a*", "b*") == 2
        assert is_member(closed, desc31)

    def test_idempotent(self, desc31):
        g = graph("abc", 3, [("a", "b", 2), ("a", "c", 2), ("b", "c", 2)])
        closed, _ = antipodal_closure(g, desc31)
        again, _ = antipodal_closure(closed, desc31)
        assert again == closed

    def test_non_member_rejected(self, desc31):
        bad = graph("abc", 3, [("a", "b", 1), ("a", "c", 1), ("b", "c", 3)])
        with pytest.raises(InputError):
            antipodal_closure(bad, desc31)


class TestFoldUnfold:
    def test_fold_canonical(self, quadruple, desc31):
        folded = fold(quadruple, desc=desc31)
        assert folded.vertices == ("u", "w")
        assert folded.dist("u", "w") == 1 and folded.delta == 2

    def test_fold_other_representatives(self, quadruple):
        folded = fold(quadruple, representatives=["u", "x"])
        assert folded.dist("u", "x") == 2

    def test_fold_single_edge(self, edge3):
        folded = fold(edge3)
        assert folded.vertices == ("u",) and folded.delta == 2

    def test_fold_requires_perfect_matching(self):
        with pytest.raises(InputError):
            fold(graph("uvw", 3, [("u", "v", 3), ("u", "w", 1), ("v", "w", 2)]))

    def test_unfold_single_vertex(self, desc31):
        got = unfold(graph("a", 2), desc31)
        assert got.vertices == ("a", "a'") and got.dist("a", "a'") == 3

    def test_unfold_edge_gives_quadruple(self, desc31):
        got = unfold(graph("uw", 2, [("u", "w", 1)]), desc31)
        expected = graph(["u", "w", "u'", "w'"], 3,
                         [("u", "w", 1), ("u", "u'", 3), ("w", "w'", 3),
                          ("u", "w'", 2), ("w", "u'", 2), ("u'", "w'", 1)])
        assert got == expected
        assert is_member(got, desc31)

    def test_unfold_triangle_diameter5(self):
        desc = ClassDescriptor(5, 2)
        tri = graph("abc", 4, [("a", "b", 2), ("a", "c", 2), ("b", "c", 2)])
        got = unfold(tri, desc)
        assert len(got) == 6
        for u in "abc":
            for v in "abc":
                if u != v:
                    assert got.dist(u, f"{v}'") == 3
        assert is_member(got, desc)

    def test_fold_after_unfold_is_identity(self, desc31):
        for g in (graph("a", 2), graph("ab", 2, [("a", "b", 2)]),
                  graph("abc", 2, [("a", "b", 1), ("a", "c", 2), ("b", "c", 1)])):
            assert fold(unfold(g, desc31), desc=desc31) == g

    def test_unfold_after_fold_is_isomorphic(self, desc31):
        for g in itertools.islice(matched_members("abcdef", desc31), 0, None, 7):
            folded = fold(g, desc=desc31)
            back = unfold(folded, desc31)
            # brute-force isomorphism via relabelling by the canonical layout
            rename = {}
            for v in folded.vertices:
                rename[v] = v
                rename[f"{v}'"] = delta_matching(g).mate(v)
            assert all(back.dist(a, b) == g.dist(rename[a], rename[b])
                       for a, b in back.pairs())

    def test_fold_equivalence_between_representative_choices(self, desc31):
        # switching one representative flips incident labels a -> delta - a
        g = next(matched_members("abcdef", desc31))
        matching = delta_matching(g)
        reps_a = [x for x, _ in matching.edges]
        reps_b = list(reps_a)
        reps_b[1] = matching.mate(reps_b[1])
        fa = fold(g, representatives=reps_a)
        fb = fold(g, representatives=reps_b)
        switched = {reps_b[1]}
        for u, v in fa.pairs():
            u2 = matching.mate(u) if matching.mate(u) in switched else u
            v2 = matching.mate(v) if matching.mate(v) in switched else v
            flip = (u2 in switched) != (v2 in switched)
            expect = 3 - fa.dist(u, v) if flip else fa.dist(u, v)
            assert fb.dist(u2, v2) == expect

    def test_unfold_membership_sweep(self):
        # every folded member of the diameter-3 family on 3 points unfolds to a member
        desc = ClassDescriptor(3, 1)
        for folded in all_complete_graphs("abc", 2):
            assert is_member(unfold(folded, desc), desc)
