"""Numerical services: Hadamard matrices, Pauli algebra, automata, simulation, integrability."""
