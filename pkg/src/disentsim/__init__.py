"""Nonlinear density-matrix dynamics: spontaneous disentanglement + thermalisation.

The package provides the full master-equation engine (:mod:`disentsim.engine`),
the operator machinery behind it (:mod:`disentsim.linalg`,
:mod:`disentsim.gellmann`, :mod:`disentsim.observables`), three reduced models
(:mod:`disentsim.schmidt`, :mod:`disentsim.twospin`, :mod:`disentsim.mfa`), and
a scenario-driven CLI (:mod:`disentsim.cli`).
"""

__version__ = "0.1.0"

from .linalg import (  # noqa: F401
    DensityMatrix,
    HermitianOperator,
    kron,
    matrix_log_clamped,
    partial_trace,
)
from .gellmann import (  # noqa: F401
    FactorizedBasis,
    GellMannBasis,
    bloch_matrix,
    correlation_matrix_D,
    is_product,
    reconstruct_density,
)
from .observables import (  # noqa: F401
    EntanglementConfig,
    ThermalConfig,
    c_operator,
    entropy,
    free_energy,
    q_disentangle,
    q_thermal,
    tau,
    thermal_state,
)
from .engine import (  # noqa: F401
    LindbladSpec,
    MmeModel,
    ThetaSpec,
    Trajectory,
    integrate,
    lindblad_dissipator,
    mme_rhs,
)
from .ode import NumericalFailure  # noqa: F401
