"""Experiment configuration, execution, traces and reports."""
