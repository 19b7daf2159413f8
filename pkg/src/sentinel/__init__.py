"""Graph-based anomaly detection and prediction engine for cluster monitoring."""

__version__ = "0.1.0"
