from pathlib import Path

import pytest

import graphvec as gv

DATA_DIR = Path(__file__).parent / "data"

CHESS_NODES = DATA_DIR / "chess_nodes.csv"
CHESS_EDGES = DATA_DIR / "chess_edges.csv"


@pytest.fixture(scope="session")
def chess():
    """The transcribed wiki/chess example graph: 5 people plus label nodes."""
    return gv.load_graph(str(CHESS_NODES), str(CHESS_EDGES))


@pytest.fixture()
def chess_paths():
    return str(CHESS_NODES), str(CHESS_EDGES)
