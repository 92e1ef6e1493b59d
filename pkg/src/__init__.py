"""Hadamard lattice toolkit."""
