"""Random-cluster and Potts dynamics on random graphs with prescribed degree sequences."""

__version__ = "0.1.0"
