"""Centrality graph shift operators: spectra, spectral clustering and learnable GNN operators."""

__version__ = "0.1.0"
