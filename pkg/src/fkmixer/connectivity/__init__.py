"""Dynamic connectivity of the open subgraph, with permanent boundary merges."""
from __future__ import annotations

from ..errors import InvalidInputError
from .base import ConnectivityOracle
from .hdt import HDTOracle
from .naive import NaiveOracle
from .search import SearchOracle, SearchWorkspace

NAIVE_EDGE_LIMIT = 512

BACKENDS = {"naive": NaiveOracle, "hdt": HDTOracle, "search": SearchOracle}


def new_oracle(g, bc=None, omega=None, backend: str = "auto") -> ConnectivityOracle:
    """Build an oracle for ``g`` with configuration ``omega`` and boundary ``bc``.

    ``auto`` uses the naive oracle up to 512 edges and the compiled search
    backend above that.
    """
    if backend == "auto":
        backend = "naive" if g.m <= NAIVE_EDGE_LIMIT else "search"
    try:
        cls = BACKENDS[backend]
    except KeyError:
        raise InvalidInputError(f"unknown backend {backend!r}; choose from {sorted(BACKENDS)}") from None
    return cls(g, bc, omega)


def is_cut_edge(oracle: ConnectivityOracle, e: int) -> bool:
    return oracle.is_cut_edge(e)


def set_edge(oracle: ConnectivityOracle, e: int, open_: bool) -> None:
    oracle.set_edge(e, open_)


__all__ = [
    "BACKENDS", "ConnectivityOracle", "HDTOracle", "NaiveOracle", "SearchOracle",
    "SearchWorkspace", "new_oracle", "is_cut_edge", "set_edge",
]
