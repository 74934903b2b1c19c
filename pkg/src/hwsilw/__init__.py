"""Fifth-order finite-difference HWENO solver with least-squares SILW
ghost-point boundary treatment on non-body-fitted Cartesian grids."""

__version__ = "0.1.0"
