import itertools
import random

import pytest

from antipodal import (ClassDescriptor, CompletionError, CycleSpec,
                       GeneralClassDescriptor, InputError, NonMetricCycleError,
                       OrientationSet, ParityFunction, PreconditionError,
                       antipodal_complete, automorphisms, check_f_conditions,
                       find_non_metric_cycle, forbidden_cycle_oracle,
                       is_completion_of, is_member, local_finiteness_bound,
                       shortest_path_completion)

from conftest import brute_completions, graph, random_connected_partial


class TestShortestPathCompletion:
    def test_path_of_twos(self):
        g = graph("uvw", 5, [("u", "v", 2), ("v", "w", 2)])
        got = shortest_path_completion(g)
        assert got.dist("u", "w") == 4
        assert is_completion_of(got, g)

    def test_complete_input_unchanged(self, quadruple):
        assert shortest_path_completion(quadruple) == quadruple

    def test_non_metric_triangle_raises_with_witness(self):
        g = graph("abc", 5, [("a", "b", 1), ("b", "c", 1), ("a", "c", 5)])
        with pytest.raises(NonMetricCycleError) as err:
            shortest_path_completion(g)
        assert sorted(err.value.cycle.labels) == [1, 1, 5]

    def test_disconnected_raises(self):
        g = graph("abcd", 3, [("a", "b", 1), ("c", "d", 1)])
        with pytest.raises(InputError, match="disconnected"):
            shortest_path_completion(g)

    def test_bound_grows_when_needed(self):
        g = graph("abc", 3, [("a", "b", 3), ("b", "c", 3)])
        got = shortest_path_completion(g)
        assert got.dist("a", "c") == 6 and got.delta == 6

    def test_random_graphs_metric_and_symmetry_preserving(self):
        rng = random.Random(20240811)
        done = 0
        while done < 60:
            g = random_connected_partial(rng, rng.randint(2, 6), 5)
            if find_non_metric_cycle(g) is not None:
                continue
            done += 1
            got = shortest_path_completion(g)
            assert got.is_complete() and is_completion_of(got, g)
            for a, b, c in itertools.combinations(got.vertices, 3):
                x, y, z = got.dist(a, b), got.dist(a, c), got.dist(b, c)
                assert x <= y + z and y <= x + z and z <= x + y
            # every input symmetry survives; the completion may gain symmetries
            # when an asymmetric definedness pattern completes symmetrically
            out = {a.pairs for a in automorphisms(got)}
            assert all(a.pairs in out for a in automorphisms(g))


class TestNonMetricCycles:
    def test_triangle_found(self):
        g = graph("abc", 5, [("a", "b", 1), ("b", "c", 1), ("a", "c", 5)])
        cycle = find_non_metric_cycle(g)
        assert cycle.is_non_metric and sorted(cycle.labels) == [1, 1, 5]

    def test_complete_metric_space_has_none(self, quadruple):
        assert find_non_metric_cycle(quadruple) is None

    def test_square_cycle(self):
        g = graph("abcd", 5, [("a", "b", 1), ("b", "c", 1), ("c", "d", 1),
                              ("a", "d", 5)])
        cycle = find_non_metric_cycle(g)
        assert sorted(cycle.labels) == [1, 1, 1, 5]
        assert set(cycle.vertices) == set("abcd")


class TestForbiddenCycleOracle:
    def test_non_metric_triangle_is_forbidden(self):
        gdesc = ClassDescriptor(7, 1).folded()
        assert forbidden_cycle_oracle(CycleSpec((1, 1, 5)), gdesc)

    def test_allowed_triangle_is_not(self):
        gdesc = ClassDescriptor(5, 2).folded()
        assert not forbidden_cycle_oracle(CycleSpec((2, 2, 2)), gdesc)

    def test_odd_perimeter_forbidden_in_bipartite(self):
        gdesc = ClassDescriptor(4, 4).folded()
        assert forbidden_cycle_oracle(CycleSpec((1, 1, 1)), gdesc)
        assert forbidden_cycle_oracle(CycleSpec((1, 1, 1, 1, 1)), gdesc)
        assert not forbidden_cycle_oracle(CycleSpec((1, 1, 1, 1)), gdesc)

    def test_oracle_agrees_with_triangle_predicate(self):
        gdesc = ClassDescriptor(5, 1).folded()
        for t in itertools.product(range(1, 5), repeat=3):
            from antipodal import is_forbidden_triangle
            assert forbidden_cycle_oracle(CycleSpec(t), gdesc) == \
                is_forbidden_triangle(*t, gdesc)

    def test_length_refusal(self):
        gdesc = ClassDescriptor(3, 1).folded()
        with pytest.raises(Exception, match="bounded"):
            forbidden_cycle_oracle(CycleSpec((1,) * 9), gdesc)


class TestLocalFinitenessBound:
    def test_diameter3_is_unconstrained(self):
        # the folded diameter-2 family has no forbidden cycles at all
        got = local_finiteness_bound(ClassDescriptor(3, 1), 6)
        assert got.largest_forbidden == 0 and got.n == 4 and got.exhaustive

    def test_bipartite_odd_cycles_push_the_bound(self):
        got = local_finiteness_bound(ClassDescriptor(4, 4), 5)
        assert got.largest_forbidden == 5 and got.n == 10 and not got.exhaustive

    def test_diameter5(self):
        got = local_finiteness_bound(ClassDescriptor(5, 1), 5)
        assert got.n == max(4, 2 * got.largest_forbidden)
        assert got.largest_forbidden >= 3  # (1, 1, 4) breaks the triangle inequality


class TestOrientationSet:
    def test_default_is_valid(self):
        o = OrientationSet.default(4)
        assert o.sorted_members() == [2, 3, 4]

    def test_delta_must_belong(self):
        with pytest.raises(InputError):
            OrientationSet(4, frozenset({0, 1, 2}))

    def test_pairing_rule(self):
        with pytest.raises(InputError):
            OrientationSet(4, frozenset({1, 2, 3, 4}))  # both 1 and 3 inside

    def test_half_must_belong(self):
        with pytest.raises(InputError):
            OrientationSet(4, frozenset({3, 4}))


def canonical_f(g, delta=3):
    """Parity function read off the stored labels, free bits chosen as 1."""
    values = []
    for u, v in g.pairs():
        d = g.dist(u, v)
        values.append((u, v, (d % 2) if d is not None else 1))
    return ParityFunction(values)


class TestCheckFConditions:
    def test_quadruple_canonical_f_is_clean(self, quadruple, desc31):
        assert check_f_conditions(quadruple, canonical_f(quadruple), desc31) == []

    def test_constant_zero_breaks_label_side(self, edge3, desc31):
        f = ParityFunction([("u", "v", 0)])
        kinds = {v.kind for v in check_f_conditions(edge3, f, desc31)}
        assert "label-side" in kinds

    def test_crossing_violation(self, desc31):
        g = graph("abcd", 3, [("a", "b", 3), ("c", "d", 3)])
        f = ParityFunction([("a", "b", 1), ("c", "d", 1),
                            ("a", "c", 1), ("b", "d", 1),
                            ("a", "d", 1), ("b", "c", 1)])
        kinds = {v.kind for v in check_f_conditions(g, f, desc31)}
        assert "crossing" in kinds

    def test_missing_pairs_reported(self, quadruple, desc31):
        f = ParityFunction([("u", "v", 1)])
        kinds = {v.kind for v in check_f_conditions(quadruple, f, desc31)}
        assert "missing" in kinds


def two_disjoint_long_edges():
    return graph(["u1", "v1", "u2", "v2"], 3, [("u1", "v1", 3), ("u2", "v2", 3)])


def coherent_f(pairs_to_one, g):
    ones = {frozenset(p) for p in pairs_to_one}
    return ParityFunction([(u, v, 1 if frozenset((u, v)) in ones else 0)
                           for u, v in g.pairs()])


class TestAntipodalComplete:
    def test_two_long_edges(self, desc31):
        g = two_disjoint_long_edges()
        f = coherent_f([("u1", "v1"), ("u2", "v2"), ("u1", "u2"), ("v1", "v2")], g)
        got = antipodal_complete(g, f, desc31)
        assert got.dist("u1", "u2") == 1 and got.dist("u1", "v2") == 2
        assert got.dist("v1", "v2") == 1 and got.dist("v1", "u2") == 2
        assert is_member(got, desc31)

    def test_complete_input_unchanged(self, quadruple, desc31):
        got = antipodal_complete(quadruple, canonical_f(quadruple), desc31)
        assert got == quadruple

    def test_three_long_edges_against_brute_force(self, desc31):
        g = graph(["u1", "v1", "u2", "v2", "u3", "v3"], 3,
                  [("u1", "v1", 3), ("u2", "v2", 3), ("u3", "v3", 3)])
        f = coherent_f([("u1", "v1"), ("u2", "v2"), ("u3", "v3"),
                        ("u1", "u2"), ("v1", "v2"),
                        ("u1", "u3"), ("v1", "v3"),
                        ("u2", "u3"), ("v2", "v3")], g)
        got = antipodal_complete(g, f, desc31)
        # oracle: every completion by raw assignment, then filter by f
        oracle = brute_completions(g, desc31)
        assert any(all(got.dist(u, v) == labels[frozenset((u, v))]
                       for u, v in got.pairs()) for labels in oracle)
        for u, v in got.pairs():
            assert got.dist(u, v) % 2 == f.value(u, v)
        f_preserving = [a for a in automorphisms(g)
                        if all(f.value(u, v) == f.value(a[u], a[v])
                               for u, v in g.pairs())]
        for a in f_preserving:
            assert all(got.dist(u, v) == got.dist(a[u], a[v])
                       for u, v in got.pairs())

    def test_imperfect_matching_precondition(self, desc31):
        g = graph("uvw", 3, [("u", "v", 3)])
        with pytest.raises(PreconditionError) as err:
            antipodal_complete(g, canonical_f(g), desc31)
        assert err.value.clause == "perfect-matching"

    def test_half_joined_precondition(self, desc31):
        g = graph(["u1", "v1", "u2", "v2"], 3,
                  [("u1", "v1", 3), ("u2", "v2", 3), ("u1", "u2", 1)])
        with pytest.raises(PreconditionError) as err:
            antipodal_complete(g, canonical_f(g), desc31)
        assert err.value.clause == "antipodal-sum"

    def test_broken_f_precondition(self, desc31):
        g = two_disjoint_long_edges()
        f = coherent_f([("u1", "v1"), ("u2", "v2"),
                        ("u1", "u2"), ("u1", "v2")], g)  # crossing pair agrees
        with pytest.raises(PreconditionError) as err:
            antipodal_complete(g, f, desc31)
        assert err.value.clause == "parity-function"

    def test_forbidden_cycle_precondition(self):
        desc = ClassDescriptor(7, 1)
        # folded triangle (1, 1, 5) breaks the triangle inequality
        g = graph(["u1", "v1", "u2", "v2", "u3", "v3"], 7,
                  [("u1", "v1", 7), ("u2", "v2", 7), ("u3", "v3", 7),
                   ("u1", "u2", 1), ("v1", "v2", 1), ("u1", "v2", 6), ("v1", "u2", 6),
                   ("u1", "u3", 1), ("v1", "v3", 1), ("u1", "v3", 6), ("v1", "u3", 6),
                   ("u2", "u3", 5), ("v2", "v3", 5), ("u2", "v3", 2), ("v2", "u3", 2)])
        f = canonical_f(g)
        with pytest.raises(PreconditionError) as err:
            antipodal_complete(g, f, desc)
        assert err.value.clause == "forbidden-cycle"

    def test_bipartite_completion(self):
        desc = ClassDescriptor(4, 4)
        orientation = OrientationSet.default(4)
        g = graph(["u1", "v1", "u2", "v2"], 4, [("u1", "v1", 4), ("u2", "v2", 4)])
        f = coherent_f([("u1", "v1"), ("u2", "v2"), ("u1", "u2"), ("v1", "v2")], g)
        got = antipodal_complete(g, f, desc, orientation)
        assert is_member(got, desc)
        for u, v in got.pairs():
            d = got.dist(u, v)
            if f.value(u, v) == 1:
                assert d in orientation
            else:
                assert orientation.co_contains(d)

    def test_orientation_argument_policing(self, quadruple, desc31):
        with pytest.raises(InputError):
            antipodal_complete(quadruple, canonical_f(quadruple), desc31,
                               OrientationSet.default(3))
        with pytest.raises(InputError):
            antipodal_complete(quadruple, canonical_f(quadruple),
                               ClassDescriptor(4, 4))
