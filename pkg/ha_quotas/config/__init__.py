"""Configuration schemas and Hydra helpers."""
