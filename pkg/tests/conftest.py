"""
Shared fixtures for the affective_polarization tests.
"""

import pytest

from affective_polarization.core import BLUE, RED, PartyGraph
from affective_polarization.console import configure_logging


@pytest.fixture(autouse=True)
def _quiet_logging():
    configure_logging(-1)
    yield


def star_graph(in_counts, out_counts, center_party=BLUE):
    """
    A centre node whose neighbours are all leaves.

    ``in_counts``/``out_counts`` are (stance-1, stance-0) leaf counts in the
    centre's own party and in the other party.
    """
    other = 1 - center_party
    parties = {"v": center_party}
    stances = {"v": 0}
    edges = []
    k = 0
    for party, (ones, zeros) in ((center_party, in_counts), (other, out_counts)):
        for stance, count in ((1, ones), (0, zeros)):
            for _ in range(count):
                leaf = f"n{k}"
                k += 1
                parties[leaf] = party
                stances[leaf] = stance
                edges.append(("v", leaf))
    return PartyGraph.from_edges(parties, edges, stances)


@pytest.fixture
def path_graph():
    """Path a-b-c-d with parties (blue, blue, red, red) and stances (1, 0, 0, 1)."""
    parties = {"a": BLUE, "b": BLUE, "c": RED, "d": RED}
    edges = [("a", "b"), ("b", "c"), ("c", "d")]
    stances = {"a": 1, "b": 0, "c": 0, "d": 1}
    return PartyGraph.from_edges(parties, edges, stances)
