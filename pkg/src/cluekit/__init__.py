"""cluekit: exact and Monte Carlo analysis of how much coordinate subsets
reveal about functions of independent inputs."""

__version__ = "0.1.0"
