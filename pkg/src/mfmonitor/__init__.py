"""Sequential changepoint monitoring for the factor structure of matrix time series."""

__version__ = "0.1.0"

from .errors import (ArgumentError, ConfigError, ConvergenceError, DomainError, FormatError,
                     MonitorError, SymmetryError)
from .series import MatrixSeries
from .linalg import SymmetricSpectrum, eigh_sym, eigenvalue_ratio_k, top_eigenvalues
from .projection import (MonitoredEigenvalues, ProjectionState, RefreshedProjectedCovariance,
                         RollingProjectedCovariance, eigenvalue_path, flattened_cov_rows,
                         initial_projection, monitored_eigenvalues, refreshed_projected_cov,
                         rolling_projected_cov)
from .rng import GaussianStream, derive_seed
from .detector import (CriticalValueTable, DarlingErdos, DetectorConfig, Monitor, MonitorState,
                       PartialSum, Renyi, Verdict, WorstCase, run_monitor)

__all__ = [
    "__version__", "ArgumentError", "ConfigError", "ConvergenceError", "DomainError",
    "FormatError", "MonitorError", "SymmetryError", "MatrixSeries", "SymmetricSpectrum",
    "eigh_sym", "eigenvalue_ratio_k", "top_eigenvalues", "MonitoredEigenvalues",
    "ProjectionState", "RefreshedProjectedCovariance", "RollingProjectedCovariance",
    "eigenvalue_path", "flattened_cov_rows", "initial_projection", "monitored_eigenvalues",
    "refreshed_projected_cov", "rolling_projected_cov", "GaussianStream", "derive_seed",
    "CriticalValueTable", "DarlingErdos", "DetectorConfig", "Monitor", "MonitorState",
    "PartialSum", "Renyi", "Verdict", "WorstCase", "run_monitor",
]
