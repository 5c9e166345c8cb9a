"""Exact computation of graph equivariant cohomology for GKM graphs with
legs, their hyperplane combinatorics, and shelling-derived module bases."""

__version__ = "0.1.0"
