"""Graph capacities and random-subgraph thresholds on finite windows."""

__version__ = "0.1.0"
