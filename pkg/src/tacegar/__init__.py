"""Reachability checking for timed automata by abstraction refinement."""

__version__ = "0.1.0"
