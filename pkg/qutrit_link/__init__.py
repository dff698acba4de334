"""Deterministic two-node qutrit entanglement link: sender, receiver, oracle and readout simulation."""

__version__ = "0.1.0"
