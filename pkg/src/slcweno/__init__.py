"""Semi-Lagrangian schemes with CWENO/CWENOZ reconstruction for HJB equations."""

__version__ = "0.1.0"
