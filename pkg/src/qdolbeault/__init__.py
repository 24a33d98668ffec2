"""Exact computations for quantum Dolbeault-Dirac operators on cominuscule
quantum flag manifolds: root data, braidings, quadratic algebras, quantum
Schubert cells, Clifford factorisation and the Dirac operator itself."""
from .cartan import RootSystem, parabolic_data, parse_flag_spec
from .pipeline import Flag
from .report import JobConfig, run
from .scalars import Scalar

__version__ = "0.1.0"
__all__ = ["Flag", "JobConfig", "RootSystem", "Scalar", "parabolic_data", "parse_flag_spec", "run"]
