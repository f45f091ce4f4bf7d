import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from gomea.problems import generate_instance  # noqa: E402

# (kind, length) pairs small enough for naive oracles and brute force
SMALL_CASES = [
    ("onemax", 13), ("trap55", 20), ("trap54", 20), ("bimodal", 18), ("hiff", 16),
    ("nk", 20), ("maxcut-sparse", 16), ("maxcut-dense", 20), ("spinglass", 16),
    ("maxsat", 20),
]


def oracle_for(instance):
    """Plain-Python fitness function for ``instance`` built from its raw data."""
    kind = instance.kind
    if kind == "onemax":
        return oracles.onemax
    if kind == "trap55":
        return lambda x: oracles.trap(x, 5, 5)
    if kind == "trap54":
        return lambda x: oracles.trap(x, 5, 4)
    if kind == "bimodal":
        return oracles.bimodal
    if kind == "hiff":
        return oracles.hiff
    if kind == "nk":
        table = instance.table.tolist()
        return lambda x: oracles.nk(x, table, instance.k)
    if kind.startswith("maxcut"):
        edges = instance.edges.tolist()
        return lambda x: oracles.maxcut(x, edges)
    if kind == "spinglass":
        edges = instance.edges.tolist()
        return lambda x: oracles.spinglass(x, edges)
    if kind == "maxsat":
        clauses = instance.clauses.tolist()
        return lambda x: oracles.maxsat(x, clauses)
    raise KeyError(kind)


@pytest.fixture(params=SMALL_CASES, ids=[f"{k}-{l}" for k, l in SMALL_CASES])
def small_instance(request):
    kind, length = request.param
    return generate_instance(kind, length, seed=11)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
