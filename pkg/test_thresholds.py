"""Tests for windowed random subgraphs and the threshold experiments."""

import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from graph_thresholds.capacity import path_threshold
from graph_thresholds.config import settings
from graph_thresholds.core.errors import DomainError
from graph_thresholds.core.models import DirectedGraph, SimplexDist, SubgraphSample
from graph_thresholds.graph_core import (
    binary_tree,
    clique_number,
    complete_graph,
    hom_exists,
    longest_path_length,
    symmetric_closure,
)
from graph_thresholds.measures import BernoulliModel, MixtureModel
from graph_thresholds.thresholds import (
    IndependentEdges,
    MorphismEvents,
    NeqEvents,
    OrderEvents,
    RealsEvents,
    depth_coloring,
    estimate_chromatic_distribution,
    estimate_morphism_probability,
    estimate_path_probability,
    finb_model,
    has_root_to_leaf_path,
    morphism_subgraph,
    neq_subgraph,
    order_subgraph,
    path_probabilities,
    reals_model,
    run_path_experiment,
    verify_finpath_bound,
)

words = st.integers(1, 4).flatmap(lambda p: st.lists(st.integers(0, p - 1), min_size=1, max_size=12).map(lambda w: (p, w)))


# Subgraphs of one word

def test_order_subgraph_of_decreasing_word():
    sample = order_subgraph([2, 1, 0])
    assert sample.edge_list() == [(0, 1), (0, 2), (1, 2)]
    assert longest_path_length(sample.to_graph()) == 2


@given(words)
def test_order_subgraph_paths_stay_below_alphabet(pair):
    p, word = pair
    assert longest_path_length(order_subgraph(word).to_graph()) < p


@given(words)
def test_neq_subgraph_has_no_large_clique(pair):
    p, word = pair
    assert clique_number(neq_subgraph(word).to_graph()) <= p


@given(words)
def test_word_maps_its_morphism_subgraph_into_target(pair):
    p, word = pair
    target = complete_graph(p)
    sample = morphism_subgraph(word, target)
    assert all(word[i] != word[j] for i, j in sample.edge_list())
    assert hom_exists(sample.to_graph(), target) is not None


def test_subgraph_sample_rejects_lower_triangle():
    with pytest.raises(DomainError):
        SubgraphSample(2, np.array([[False, False], [True, False]]))


# Edge sources

def test_edge_source_probabilities():
    assert IndependentEdges(0.3).edge_probability() == 0.3
    assert OrderEvents(BernoulliModel(SimplexDist.uniform(3), 4)).edge_probability() == pytest.approx(1 / 3)
    assert NeqEvents(BernoulliModel(SimplexDist.uniform(3), 4)).edge_probability() == pytest.approx(2 / 3)
    k3 = complete_graph(3)
    assert MorphismEvents(BernoulliModel(SimplexDist.uniform(3), 4), k3).edge_probability() == pytest.approx(2 / 3)
    assert RealsEvents(0.2).edge_probability() == pytest.approx(0.32)
    with pytest.raises(DomainError):
        IndependentEdges(1.5)
    with pytest.raises(DomainError):
        MorphismEvents(BernoulliModel(SimplexDist.uniform(2), 4), k3)


def test_reals_longest_path_bound():
    source = RealsEvents(0.25)
    assert source.max_path_length == 3
    tables = source.sample_edges(12, 500, np.random.default_rng(3))
    longest = np.array([longest_path_length(DirectedGraph.from_adjacency(t)) for t in tables])
    assert longest.max() <= source.max_path_length


def test_reals_grid():
    source = reals_model(0.1, [0.0, 0.5, 1.0])
    assert source.sample_edges(3, 2, np.random.default_rng(0)).shape == (2, 3, 3)
    with pytest.raises(DomainError):
        source.sample_edges(4, 2, np.random.default_rng(0))
    with pytest.raises(DomainError):
        reals_model(0.1, [0.0, 0.0])
    with pytest.raises(DomainError):
        RealsEvents(1.0)


# Path experiments

def test_complete_edges_always_have_paths():
    experiment = run_path_experiment(IndependentEdges(1.0), p=3, window=8, trials=10)
    assert experiment.report.path_probability == 1.0
    assert experiment.report.min_edge_probability == 1.0
    assert experiment.report.bound == 1.0
    assert all(row["longest_path"] == 7 for row in experiment.trial_rows())


def test_no_edges_give_no_paths():
    report = estimate_path_probability(IndependentEdges(0.0), p=1, window=4, trials=20)
    assert report.path_probability == 0.0
    assert report.bound == 0.0
    assert verify_finpath_bound(report)


def test_uniform_order_events_stay_below_the_threshold():
    """Over p symbols every window pair has probability lambda_p, yet no path reaches p."""
    p = 3
    model = BernoulliModel(SimplexDist.uniform(p), window=12)
    experiment = run_path_experiment(model, p=p, window=12, trials=2000, seed=17)
    assert experiment.report.exact_edge_probability == pytest.approx(path_threshold(p))
    assert experiment.report.path_probability == 0.0
    assert experiment.longest_paths.max() <= p - 1


@pytest.mark.slow
def test_uniform_order_events_at_scale():
    p, window, trials = 3, 12, 100_000
    model = BernoulliModel(SimplexDist.uniform(p), window=window)
    experiment = run_path_experiment(model, p=p, window=window, trials=trials, seed=2024)
    assert experiment.report.path_probability == 0.0
    assert experiment.longest_paths.max() <= p - 1
    frequencies = experiment.edge_frequencies[np.triu_indices(window, 1)]
    sigma = math.sqrt(path_threshold(p) * (1 - path_threshold(p)) / trials)
    assert np.all(np.abs(frequencies - path_threshold(p)) <= 4 * sigma)


@pytest.mark.slow
@pytest.mark.parametrize("p", [2, 3, 4])
def test_neq_events_never_hold_a_larger_clique(p):
    mixture = MixtureModel([(0.5, SimplexDist.uniform(p)), (0.5, SimplexDist.from_array(np.arange(1, p + 1)))], window=10)
    for model in (BernoulliModel(SimplexDist.uniform(p), window=10), mixture):
        tables = NeqEvents(model).sample_edges(10, 10_000, np.random.default_rng(p))
        assert max(clique_number(DirectedGraph.from_adjacency(t)) for t in tables) <= p


def test_defaults_and_reproducibility():
    first = run_path_experiment(IndependentEdges(0.4), p=2, trials=300, seed=5)
    second = run_path_experiment(IndependentEdges(0.4), p=2, trials=300, seed=5)
    assert first.report.window == 8
    assert first.report.seed == 5
    np.testing.assert_array_equal(first.longest_paths, second.longest_paths)
    assert run_path_experiment(IndependentEdges(0.4), p=2, trials=5).report.seed == settings.default_seed


def test_results_do_not_depend_on_workers(monkeypatch):
    monkeypatch.setattr(settings, "trial_block_size", 64)
    serial = run_path_experiment(IndependentEdges(0.5), p=3, window=9, trials=500, seed=42, workers=1)
    threaded = run_path_experiment(IndependentEdges(0.5), p=3, window=9, trials=500, seed=42, workers=4)
    np.testing.assert_array_equal(serial.longest_paths, threaded.longest_paths)
    np.testing.assert_array_equal(serial.edge_frequencies, threaded.edge_frequencies)


def test_path_experiment_domain():
    with pytest.raises(DomainError):
        run_path_experiment(IndependentEdges(0.5), p=4, window=4)
    with pytest.raises(DomainError):
        run_path_experiment(IndependentEdges(0.5), p=2, trials=0)
    with pytest.raises(DomainError):
        run_path_experiment(IndependentEdges(0.5), p=0)
    with pytest.raises(DomainError):
        run_path_experiment(IndependentEdges(0.5), p=2, seed=-1)


def test_path_probabilities_are_nonincreasing():
    experiment = run_path_experiment(IndependentEdges(0.5), p=2, window=8, trials=400, seed=1)
    curve = path_probabilities(experiment.longest_paths, 7)
    assert curve[0] >= curve[-1]
    assert np.all(np.diff(curve) <= 0)
    assert curve[1] == experiment.report.path_probability


@pytest.mark.slow
def test_independent_edges_exceed_the_path_bound():
    report = estimate_path_probability(IndependentEdges(0.6), p=2, window=8, trials=100_000, seed=2024)
    assert report.lambda_p == 0.25
    assert report.bound == pytest.approx((0.6 - 0.25) / 0.75, abs=0.02)
    assert report.path_probability > report.bound
    assert verify_finpath_bound(report, sigmas=4.0)


@hsettings(max_examples=15, deadline=None)
@given(st.floats(0.0, 1.0), st.integers(1, 4), st.integers(0, 2**32))
def test_path_bound_holds_for_independent_edges(q, p, seed):
    report = estimate_path_probability(IndependentEdges(q), p=p, window=2 * p + 2, trials=400, seed=seed)
    assert verify_finpath_bound(report)


def test_mixture_order_events_respect_the_bound():
    model = MixtureModel([(0.5, SimplexDist((0.6, 0.4))), (0.5, SimplexDist.uniform(2))], window=6)
    report = estimate_path_probability(OrderEvents(model), p=2, window=6, trials=500, seed=3)
    # words over two symbols have no path of two order edges
    assert report.path_probability == 0.0
    assert report.exact_edge_probability <= path_threshold(2) + 1e-12


# Morphisms and chromatic numbers

def test_morphism_experiment_bounds():
    report = estimate_morphism_probability(IndependentEdges(0.9), complete_graph(2), window=6, trials=100, seed=8)
    assert report.capacity == pytest.approx(0.5)
    assert report.no_morphism_probability + 4 * report.stderr >= report.bound
    extremal = BernoulliModel(SimplexDist.uniform(3), window=6)
    mapped = estimate_morphism_probability(MorphismEvents(extremal, complete_graph(3)), complete_graph(3), window=6, trials=100)
    assert mapped.no_morphism_probability == 0.0


def test_morphism_into_loop_target_has_zero_bound():
    loop = DirectedGraph.from_edges(1, [(0, 0)])
    report = estimate_morphism_probability(IndependentEdges(0.7), loop, window=5, trials=50)
    assert report.bound == 0.0
    assert report.no_morphism_probability == 0.0


def test_chromatic_distribution():
    report = estimate_chromatic_distribution(1.0, colors=3, window=5, trials=20, seed=4)
    assert report.distribution == {5: 20}
    assert report.at_least_fraction == 1.0 and report.above_fraction == 1.0
    sparse = estimate_chromatic_distribution(0.0, colors=2, window=5, trials=20)
    assert sparse.distribution == {1: 20}
    assert sparse.at_least_fraction == 0.0
    with pytest.raises(DomainError):
        estimate_chromatic_distribution(0.5, colors=0, window=5)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_dense_samples_above_the_chromatic_threshold_need_p_colors(p):
    q = 1 - 1 / p + 0.1
    report = estimate_chromatic_distribution(q, colors=p, window=12, trials=40, seed=p)
    assert report.at_least_fraction > 0


# Finitely branching hosts

def test_finb_tree_loses_every_long_path():
    depth = 8
    tree = binary_tree(depth)
    construction = finb_model(0.2, tree, depth_coloring(tree))
    assert len(construction.zones) == 6
    assert max(construction.atoms.weights) < 0.2
    for edge in tree.edges:
        assert construction.inclusion_probability(edge) > 1 - 0.2
    drawn, tables = construction.sample(50, seed=6)
    assert drawn.shape == (50,)
    assert not has_root_to_leaf_path(tables, depth).any()


@pytest.mark.slow
@pytest.mark.parametrize("epsilon", [0.1, 0.01])
def test_finb_inclusion_frequencies_on_depth_eight_tree(epsilon):
    tree = binary_tree(8)
    construction = finb_model(epsilon, tree, depth_coloring(tree))
    frequencies = construction.inclusion_frequencies(20_000_000, seed=11)
    assert frequencies.keys() == tree.edges
    assert min(frequencies.values()) >= 1 - epsilon


def test_finb_atoms_cut_paths_only_when_every_zone_has_a_color():
    tree = binary_tree(8)
    covered = finb_model(0.2, tree, depth_coloring(tree))
    atoms = np.stack([covered.subgraph(n).edges for n in range(len(covered.zones))])
    assert not has_root_to_leaf_path(atoms, 8).any()
    # 11 zones over 8 depth colors leave zones 8..10 empty
    sparse = finb_model(0.1, tree, depth_coloring(tree))
    atoms = np.stack([sparse.subgraph(n).edges for n in range(len(sparse.zones))])
    np.testing.assert_array_equal(has_root_to_leaf_path(atoms, 8), [False] * 8 + [True] * 3)


def test_finb_inclusion_frequencies_domain():
    tree = binary_tree(2)
    construction = finb_model(0.3, tree, depth_coloring(tree))
    frequencies = construction.inclusion_frequencies(1000, seed=3)
    assert all(0.0 <= f <= 1.0 for f in frequencies.values())
    with pytest.raises(DomainError):
        construction.inclusion_frequencies(0, seed=3)


def test_finb_keeps_paths_when_zones_miss_colors():
    tree = binary_tree(2)
    construction = finb_model(0.6, tree, depth_coloring(tree), zones=[[5], [6]])
    _, tables = construction.sample(10, seed=1)
    assert has_root_to_leaf_path(tables, 2).all()


def test_finb_domain_errors():
    tree = binary_tree(2)
    colors = depth_coloring(tree)
    with pytest.raises(DomainError):
        finb_model(1.0, tree, colors)
    with pytest.raises(DomainError):
        finb_model(0.3, symmetric_closure(tree), colors)
    with pytest.raises(DomainError):
        finb_model(0.3, tree, {(0, 1): 0})
    with pytest.raises(DomainError):
        finb_model(0.6, tree, colors, zones=[[0, 1], [1]])
    with pytest.raises(DomainError):
        finb_model(0.3, tree, colors, zones=[[0], [1]])


def test_finb_atom_model():
    tree = binary_tree(3)
    construction = finb_model(0.3, tree, depth_coloring(tree))
    model = construction.atom_model()
    assert model.window == 1
    assert model.alphabet == len(construction.zones) == math.floor(1 / 0.3) + 1
