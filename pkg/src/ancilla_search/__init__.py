"""State-vector experiments on ancilla-assisted unstructured search."""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    DomainError,
    ParseError,
    SimulationError,
    ValidationError,
)
from .statevector import (
    GateOp,
    QueryLedger,
    RegisterLayout,
    StateVector,
    apply_ccx,
    apply_cnot,
    apply_controlled_block,
    apply_h,
    apply_oracle_flip,
    apply_phase_oracle,
    apply_x,
    inner_product,
    marginal_prob,
    new_basis,
    random_unitary,
)
from .grover import (
    SearchOutcome,
    closed_form_success,
    grover_angle,
    optimal_iterations,
    run_grover,
)
