"""Transfer-operator cocycles of paired tent maps.

A numerical laboratory for the metastable regime of randomly driven paired
tent maps: exact piecewise-constant pushforwards, Ulam discretizations,
quarantine-cone machine checks, and Lyapunov-spectrum estimators.
"""

from .interval_maps import PairedTentMap, HolePair
from .densities import PCDensity, BVNormReport
from .driving import DriverSpec, DriverOrbit
from .ulam import UlamMatrix
from .quarantine import ConeParams, QuarantineTuple
from .lyapunov import CocycleRun, SpectrumReport, UlamBackend, ExactPCBackend

__all__ = [
    "PairedTentMap",
    "HolePair",
    "PCDensity",
    "BVNormReport",
    "DriverSpec",
    "DriverOrbit",
    "UlamMatrix",
    "ConeParams",
    "QuarantineTuple",
    "CocycleRun",
    "SpectrumReport",
    "UlamBackend",
    "ExactPCBackend",
]

__version__ = "0.1.0"
