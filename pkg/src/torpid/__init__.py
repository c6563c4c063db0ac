"""Exact and Monte-Carlo tools for Glauber dynamics on 3-colourings of
regular bipartite graphs: counting, mixing times, bottleneck cuts, height
functions, container-style approximations and bound evaluators."""

__version__ = "0.1.0"
