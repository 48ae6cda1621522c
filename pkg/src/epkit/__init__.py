"""epkit: exceptional points of non-Hermitian parameterized matrix families.

Subpackages and modules
-----------------------
``linalg``      self-contained dense complex eigen machinery (n <= 8)
``twolevel``    closed forms for the 2x2 model: eigenvalues, EPs, vectors
``oscillator``  two coupled damped driven oscillators
``finder``      EP searches, branch tracking, monodromy, biorthogonal tools
``cli``         the ``epkit`` command

The hot kernels run on a compiled backend when the extension built;
``epkit.backend_name()`` reports which one is active.
"""

from ._core import backend_name
from .finder import (
    BranchTrack,
    ExceptionalPoint,
    MatrixFamily,
    MonodromyResult,
    biorth_expansion,
    branch_exponent,
    coalescence_residual,
    grid_scan,
    monodromy_loop,
    newton_ep_search,
    oscillator_f_family,
    oscillator_fg_family,
    resultant_quintic_in_f,
    track_branches,
    tune_g_for_real_f,
    two_level_family,
)
from .linalg import (
    DefectReport,
    EigenSystem,
    Polynomial,
    char_poly,
    defect_report,
    determinant,
    eig,
    poly_roots,
)
from .oscillator import (
    DriveSpec,
    FrequencySweep,
    OscillatorParams,
    StationaryResponse,
    build_M,
    build_M0_M1,
    ep_amplitude_ratio,
    frequency_sweep,
    physical_frequency,
    physical_response,
    raw_frequency,
    secular_det,
    secular_det_derivative,
    secular_poly,
    secular_roots,
    stationary_response,
)
from .twolevel import (
    EpPair,
    TwoLevelSystem,
    build_h,
    discriminant,
    eigenvalues_closed_form,
    ep_eigensystem,
    ep_eigenvector_left,
    ep_eigenvector_right,
    ep_locations,
    real_spectrum_window,
    self_orthogonality,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
