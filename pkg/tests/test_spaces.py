from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from conftest import closure
from ucml.errors import MalformedSpaceError, NotMeasurableError, SortError
from ucml.spaces import (Inj, check_measurable_map, coproduct_space, generate_algebra, make_space,
                         preimage, product_space, rectangle)


def as_sets(A):
    return {frozenset(A.points_of(m)) for m in range(1 << A.n_atoms)}


def test_generated_algebra_on_three_points():
    A = generate_algebra("abc", [{"a"}])
    assert A.atoms == (("a",), ("b", "c"))
    assert as_sets(A) == {frozenset(), frozenset("a"), frozenset("bc"), frozenset("abc")}


def test_generated_algebra_on_four_points():
    A = generate_algebra(["x", "y", "z", "t"], [{"x", "y"}])
    assert A.atoms == (("x", "y"), ("z", "t"))


def test_singleton_without_generators():
    A = generate_algebra(["a"], [])
    assert A.atoms == (("a",),)
    assert len(A) == 2


def test_unknown_generator_point_rejected():
    with pytest.raises(MalformedSpaceError):
        generate_algebra("ab", [{"q"}])


def test_duplicate_points_rejected():
    with pytest.raises(MalformedSpaceError):
        generate_algebra("aab", [])


def test_empty_carrier_is_allowed():
    A = generate_algebra([], [])
    assert A.n_atoms == 0 and len(A) == 1


def test_product_of_running_spaces():
    X = make_space("X", ["x", "y", "z", "t"], [{"x", "y"}])
    M = make_space("M", "abc", [{"a"}])
    P = product_space(X, M)
    blocks = {frozenset(a) for a in P.atoms}
    want = {frozenset(product(u, v)) for u in (("x", "y"), ("z", "t")) for v in (("a",), ("b", "c"))}
    assert blocks == want


def test_product_with_singleton_mirrors_factor():
    one = make_space("1", ["*"])
    A = make_space("A", "abcd", [{"a", "b"}, {"c"}])
    P = product_space(one, A)
    assert [tuple(q for _, q in atom) for atom in P.atoms] == list(A.atoms)


@pytest.mark.parametrize("sizes", [(2, 2), (1, 3), (3, 2)])
def test_product_matches_rectangle_closure(sizes):
    A = make_space("A", [f"a{i}" for i in range(4)], [{"a0", "a1"}] if sizes[0] == 2 else
                   ([] if sizes[0] == 1 else [{"a0"}, {"a1"}]))
    B = make_space("B", [f"b{i}" for i in range(3)], [{"b0"}] if sizes[1] == 2 else
                   ([] if sizes[1] == 1 else [{"b0"}, {"b1"}]))
    P = product_space(A, B)
    rects = [frozenset(product(u, v)) for u in as_sets(A.algebra) for v in as_sets(B.algebra)]
    assert as_sets(P.algebra) == closure(P.carrier, rects)
    assert P.algebra.n_atoms == A.algebra.n_atoms * B.algebra.n_atoms


def test_coproduct_atoms_and_closure():
    M = make_space("M", "abc", [{"a"}])
    C = coproduct_space(M, M)
    assert C.algebra.n_atoms == 4
    assert C.atoms[0] == (Inj(1, "a"),) and C.atoms[3] == (Inj(2, "b"), Inj(2, "c"))
    gens = [frozenset(Inj(1, p) for p in s) for s in as_sets(M.algebra)]
    gens += [frozenset(Inj(2, p) for p in s) for s in as_sets(M.algebra)]
    assert as_sets(C.algebra) == closure(C.carrier, gens)


def test_coproduct_with_empty_space():
    A = make_space("A", "ab", [{"a"}])
    E = make_space("E", [])
    C = coproduct_space(A, E)
    assert C.atoms == ((Inj(1, "a"),), (Inj(1, "b"),))


def test_set_operations():
    M = make_space("M", "abc", [{"a"}])
    A = M.algebra
    U = A.from_points({"a"})
    assert set((~U).points) == {"b", "c"}
    assert (U | ~U).is_full()
    assert (U & A.empty).is_empty()
    assert "a" in U and "b" not in U
    with pytest.raises(NotMeasurableError):
        A.from_points({"b"})


def test_mixing_algebras_is_a_sort_error():
    A = make_space("A", "ab", [{"a"}]).algebra
    B = make_space("B", "ab", []).algebra
    with pytest.raises(SortError):
        A.full | B.full


def test_rectangle_and_projection_measurability():
    X = make_space("X", "xyzt", [{"x", "y"}])
    M = make_space("M", "abc", [{"a"}])
    P = product_space(X, M)
    for m in range(1 << M.algebra.n_atoms):
        V = M.algebra.set(m)
        R = rectangle(P.algebra, X.algebra.full, V)
        assert preimage(lambda p: p[1], V, P.algebra) == R
    assert check_measurable_map(lambda p: p[0], P.algebra, X.algebra) is None
    assert check_measurable_map({"x": "a", "y": "b", "z": "c", "t": "c"}, X.algebra, M.algebra) is not None


partitions = st.lists(st.sets(st.integers(0, 5)), max_size=4)


@settings(max_examples=80, deadline=None)
@given(partitions)
def test_generated_algebra_is_least_closed_family(gens):
    carrier = list(range(6))
    A = generate_algebra(carrier, gens)
    sets = as_sets(A)
    assert sets == closure(carrier, gens)
    for g in gens:
        assert A.is_measurable(g)
    for u in sets:
        assert frozenset(carrier) - u in sets
        for v in sets:
            assert u | v in sets
