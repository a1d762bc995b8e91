"""Structured hypergraphs, decks, and symbolic Feynman functors."""

__version__ = "0.1.0"
