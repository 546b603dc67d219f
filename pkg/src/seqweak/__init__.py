"""Sequential weak-measurement pointer simulator.

Three mutually validating routes to the joint pointer deflection of two
sequential weak polarization couplings: closed-form expressions, an exact
Gaussian-superposition calculus, and a discretized Fourier-optics grid
engine.
"""

__version__ = "0.1.0"

from .experiments import (
    Engine,
    Scenario,
    ScenarioKind,
    SweepSpec,
    analytic_deflections,
    grid_deflections,
    run_sweep,
)
from .grid import GridSpec
from .pointer import (
    DeflectionTriple,
    anomaly_threshold,
    closed_form_sequential,
    closed_form_two_qubit,
    max_reversal_delta,
)
from .qubit import (
    Observable,
    QubitState,
    WeakValueResult,
    expectation,
    product_eigen_range,
    sequential_weak_value,
    waveplate_hwp,
    weak_value,
)

__all__ = [
    "DeflectionTriple",
    "Engine",
    "GridSpec",
    "Observable",
    "QubitState",
    "Scenario",
    "ScenarioKind",
    "SweepSpec",
    "WeakValueResult",
    "__version__",
    "analytic_deflections",
    "anomaly_threshold",
    "closed_form_sequential",
    "closed_form_two_qubit",
    "expectation",
    "grid_deflections",
    "max_reversal_delta",
    "product_eigen_range",
    "run_sweep",
    "sequential_weak_value",
    "waveplate_hwp",
    "weak_value",
]
