import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from gomea.core import make_rng
from gomea.linkage import (
    FILTER_EPSILON, LinkageModel, SimilarityMatrix, build_linkage_tree,
    build_similarity_matrix, fos_order, learn_dependencies, order_fos,
)


def _random_population(seed, n, length):
    return np.random.default_rng(seed).integers(0, 2, size=(n, length), dtype=np.uint8)


@pytest.mark.parametrize("measure", ["mi", "nmi"])
def test_similarity_matches_counting_oracle(measure):
    X = _random_population(0, 40, 7)
    X[:, 3] = X[:, 1]          # perfectly linked pair
    X[:, 5] = 1                # constant column
    S = build_similarity_matrix(X, measure).values
    for i in range(7):
        for j in range(7):
            if i == j:
                continue
            mi, nmi = oracles.pairwise_mi(X, i, j)
            assert S[i, j] == pytest.approx(mi if measure == "mi" else nmi, abs=1e-12)
    assert np.allclose(S, S.T)


def test_identical_columns_have_unit_nmi_and_one_bit_mi():
    X = np.array([[0, 0], [1, 1], [0, 0], [1, 1]], dtype=np.uint8)
    assert build_similarity_matrix(X, "nmi").values[0, 1] == pytest.approx(1.0)
    assert build_similarity_matrix(X, "mi").values[0, 1] == pytest.approx(1.0)


def test_constant_columns_have_zero_nmi():
    X = np.zeros((5, 3), dtype=np.uint8)
    assert np.all(build_similarity_matrix(X, "nmi").values == 0)


def test_unknown_measure_rejected():
    with pytest.raises(ValueError):
        build_similarity_matrix(np.zeros((2, 2), dtype=np.uint8), "pearson")


def _check_tree(model, length):
    tree = model.tree
    assert len(tree) == 2 * length - 1
    assert sorted(int(e.indices[0]) for e in tree[:length]) == list(range(length))
    assert all(len(e) == 1 for e in tree[:length])
    for e in tree[length:]:
        a, b = e.children
        left, right = set(tree[a].indices.tolist()), set(tree[b].indices.tolist())
        assert not left & right
        assert left | right == set(e.indices.tolist())
    assert sorted(tree[-1].indices.tolist()) == list(range(length))


@pytest.mark.parametrize("length", [2, 4, 8, 16, 32])
def test_unfiltered_tree_is_binary_with_2l_minus_1_nodes(length):
    for seed in range(10):
        sim = build_similarity_matrix(_random_population(seed, 64, length), "mi")
        model = build_linkage_tree(sim, filtered=False, rng=make_rng(seed))
        assert len(model.elements) == 2 * length - 1
        _check_tree(model, length)


def test_average_linkage_merges_strongest_pair_first():
    S = np.array([
        [0.0, 0.9, 0.1, 0.1],
        [0.9, 0.0, 0.1, 0.1],
        [0.1, 0.1, 0.0, 0.5],
        [0.1, 0.1, 0.5, 0.0],
    ])
    model = build_linkage_tree(SimilarityMatrix(S, "mi"), False, make_rng(0))
    # the nearest-neighbour chain may emit independent merges in either order
    merges = {frozenset(e.indices.tolist()): e.merge_similarity for e in model.elements[4:]}
    assert merges == pytest.approx({frozenset({0, 1}): 0.9, frozenset({2, 3}): 0.5,
                                    frozenset({0, 1, 2, 3}): 0.1})
    assert len(model.elements[-1]) == 4


def test_upgma_uses_size_weighted_average():
    # after merging {0,1}, sim({0,1},2) = (0.2 + 0.6) / 2 = 0.4 < sim(2,3)=0.45
    S = np.array([
        [0.0, 0.9, 0.2, 0.0],
        [0.9, 0.0, 0.6, 0.0],
        [0.2, 0.6, 0.0, 0.45],
        [0.0, 0.0, 0.45, 0.0],
    ])
    model = build_linkage_tree(SimilarityMatrix(S, "mi"), False, make_rng(1))
    merges = [set(e.indices.tolist()) for e in model.elements[4:]]
    assert {0, 1} in merges and {2, 3} in merges
    assert {0, 1, 2} not in merges


def test_filtering_drops_children_of_near_perfect_merges():
    # columns 0,1,2 identical -> NMI 1; column 3 independent noise
    X = _random_population(3, 200, 4)
    X[:, 1] = X[:, 0]
    X[:, 2] = X[:, 0]
    sim = build_similarity_matrix(X, "nmi")
    full = build_linkage_tree(sim, filtered=False, rng=make_rng(0))
    kept = build_linkage_tree(sim, filtered=True, rng=make_rng(0))
    sets = kept.index_sets()
    assert {0, 1, 2} in sets
    assert {0} not in sets and {1} not in sets and {2} not in sets
    assert {3} in sets
    assert {0, 1, 2, 3} in sets
    assert len(kept.elements) < len(full.elements)
    for e in kept.tree[4:]:
        if e.merge_similarity > 1 - FILTER_EPSILON:
            assert all(set(kept.tree[c].indices.tolist()) not in sets for c in e.children)


def test_filter_keeps_root_even_when_perfect():
    X = np.array([[0, 0], [1, 1]] * 5, dtype=np.uint8)
    model = build_linkage_tree(build_similarity_matrix(X, "nmi"), True, make_rng(0))
    assert model.index_sets() == [{0, 1}]
    assert model.without_root(2).elements == []


def test_tie_breaking_varies_with_seed():
    sim = SimilarityMatrix(np.zeros((6, 6)), "mi")
    first_merges = {
        frozenset(build_linkage_tree(sim, False, make_rng(s)).elements[6].indices.tolist())
        for s in range(40)
    }
    assert len(first_merges) > 3


def test_fos_orderings():
    model = LinkageModel.from_sets([{0, 1, 2}, {3}, {0, 1}, {4}, {2}])
    assert fos_order(model, "ascending", make_rng(0)).tolist() == [1, 3, 4, 2, 0]
    perm = fos_order(model, "random", make_rng(0))
    assert sorted(perm.tolist()) == [0, 1, 2, 3, 4]
    assert fos_order(model, "none", make_rng(0)).tolist() == [0, 1, 2, 3, 4]
    with pytest.raises(ValueError):
        fos_order(model, "descending", make_rng(0))
    ordered = order_fos(model, "ascending", make_rng(0))
    assert [len(e) for e in ordered.elements] == [1, 1, 1, 2, 3]


def test_dependencies_follow_threshold_rule():
    S = np.array([
        [0.0, 0.8, 0.5, 0.1],
        [0.8, 0.0, 0.3, 0.0],
        [0.5, 0.3, 0.0, 0.2],
        [0.1, 0.0, 0.2, 0.0],
    ])
    model = LinkageModel.from_sets([{0}, {0, 1}, {0, 1, 2, 3}])
    deps = learn_dependencies(model, SimilarityMatrix(S, "nmi"), 0.6).dependencies
    # {0}: R = [., .8, .5, .1], M = .8, threshold .48 -> {1, 2}
    assert deps[0].tolist() == [1, 2]
    # {0,1}: R_2 = .4, R_3 = .05, M = .4, threshold .24 -> {2}
    assert deps[1].tolist() == [2]
    assert deps[2].tolist() == []


def test_dependencies_empty_when_outside_similarity_is_zero():
    S = np.zeros((3, 3))
    model = LinkageModel.from_sets([{0}, {1}])
    deps = learn_dependencies(model, SimilarityMatrix(S, "nmi"), 0.8).dependencies
    assert all(len(d) == 0 for d in deps)
    with pytest.raises(ValueError):
        learn_dependencies(model, SimilarityMatrix(S, "nmi"), 0.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 20), st.integers(2, 40), st.integers(0, 2 ** 32 - 1),
       st.sampled_from(["mi", "nmi"]))
def test_tree_invariants_hold_for_any_population(length, n, seed, measure):
    X = _random_population(seed, n, length)
    sim = build_similarity_matrix(X, measure)
    assert np.all(sim.values >= 0)
    if measure == "nmi":
        assert np.all(sim.values <= 1 + 1e-12)
    model = build_linkage_tree(sim, filtered=False, rng=make_rng(seed))
    _check_tree(model, length)
    filtered = build_linkage_tree(sim, filtered=True, rng=make_rng(seed))
    assert {frozenset(s) for s in filtered.index_sets()} <= {frozenset(s) for s in model.index_sets()}
    assert set(range(length)) in filtered.index_sets()


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 12), st.integers(0, 2 ** 32 - 1), st.floats(0.05, 1.0))
def test_dependencies_lie_outside_their_element(length, seed, lam):
    X = _random_population(seed, 30, length)
    sim = build_similarity_matrix(X, "nmi")
    model = build_linkage_tree(sim, True, make_rng(seed)).without_root(length)
    model = learn_dependencies(model, sim, lam)
    for element, deps in zip(model.elements, model.dependencies):
        assert not set(deps.tolist()) & set(element.indices.tolist())
