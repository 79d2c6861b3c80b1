"""Ontology-aware vector-space retrieval with latent named-entity features."""

__version__ = "0.1.0"
