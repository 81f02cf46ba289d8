"""Experiment labs built on the operator, model, spectral and filter layers."""
