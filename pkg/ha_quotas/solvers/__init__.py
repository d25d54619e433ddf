"""Exact solvers: brute-force oracle, weight reductions, gadget and flow algorithms."""
