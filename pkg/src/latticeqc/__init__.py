"""Simulated optical matrix-vector multiplier on a lattice of Gaussian modes.

The x register of the transverse plane carries an input state, the y register
acts as an ancilla for the gate matrix, and a cylindrical-lens Fourier
transform contracts x so the product is read out along y.
"""

from latticeqc.errors import (
    DimensionError,
    FunctionClassError,
    LatticeQCError,
    ParseError,
    SamplingError,
)
from latticeqc.lattice import (
    Field,
    LatticeLayout,
    cell_center,
    gaussian_cell_mode,
    uniform_lattice,
)
from latticeqc.gates import (
    BooleanFunction,
    dj_expected_output,
    hadamard_basis_state,
    hadamard_matrix,
    matvec_oracle,
    oracle_matrix,
)
from latticeqc.optics import (
    PipelineConfig,
    ReadoutResult,
    cylindrical_transform,
    encode_matrix,
    encode_vector,
    extract_zero_order,
    propagate,
    run_pipeline,
)
from latticeqc.experiments import (
    CrosstalkMatrix,
    DjVerdict,
    crosstalk_bench,
    dj_run,
    scaling_study,
)

__version__ = "0.1.0"
