import numpy as np
import pytest

from semsim.experiments import ExperimentConfig
from semsim.graphs import ConceptGraph, SubstrateSpec, generate_substrate


@pytest.fixture
def ring_100_4():
    return generate_substrate(SubstrateSpec(100, 4))


@pytest.fixture
def two_triangles():
    return ConceptGraph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


@pytest.fixture
def barbell():
    # two triangles joined by a single bridge edge
    return ConceptGraph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


@pytest.fixture
def tiny_config():
    # small enough for sub-second experiment runs in unit tests
    return ExperimentConfig(
        population_size=12,
        graphs_per_p=5,
        S=4,
        R=4,
        iterations=3,
        ordered_pairs=20,
        prompts_per_pair=3,
        matched_instances=60,
        bootstrap_iters=200,
    )


def rng(seed=0):
    return np.random.default_rng(seed)
