"""Partitioned evacuation simulator with a hybrid-cloud deployment cost model."""

__version__ = "0.1.0"
