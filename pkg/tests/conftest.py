import sys
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from hamgraph.graph_model import enumerate_graphs, make_graph

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@lru_cache(maxsize=None)
def corpus(max_edges=6, max_label=4, max_den=2):
    return tuple(enumerate_graphs(max_edges, max_label, max_den))


@lru_cache(maxsize=None)
def small_corpus():
    return corpus(4, 3, 2)


def graph_m():
    return make_graph(0, 7, 1, [[(1, 1), (3, 3), (2, 2), (1, 1)]] * 2)


def graph_n():
    return make_graph(0, 8, 1, [[(1, 1), (2, 2), (3, 3), (1, 1)], [(1, 1), (3, 3), (2, 2), (1, 1)]])


@pytest.fixture
def m_graph():
    return graph_m()


@pytest.fixture
def n_graph():
    return graph_n()


# acceptance lines are collected here and repeated in the terminal summary
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
