"""Simulation and analysis toolkit for two-way quantum finite automata and
their multi-head probabilistic counterparts."""

__version__ = "0.1.0"
