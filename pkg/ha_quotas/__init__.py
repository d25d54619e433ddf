"""House allocation with lower and upper quotas: solvers, verifiers and oracles."""

__version__ = "0.1.0"
