"""luequiv: local-unitary equivalence of multipartite density matrices.

Decides whether two mixed states are related by a tensor product of local
unitaries, using realignment rank-one tests on the diagonal-phase coset of
the eigenbasis change, and produces explicit witness unitaries on success.
"""

from .decompose import FactorSet, NotDecomposableError, factor_full, factor_pair, is_decomposable
from .equivalence import (
    BlockContext,
    PhaseContext,
    SearchConfig,
    Verdict,
    VerdictStatus,
    build_V,
    build_V0,
    check_equivalence,
    objective,
    phase_search,
    verify_witness,
)
from .matfile import MatrixFile, MatrixFileError, load_matrix, save_matrix
from .oracle import (
    PairLabel,
    PairSample,
    haar_unitary,
    make_degenerate_pair,
    make_equivalent_pair,
    make_spectrum_mismatch_pair,
    paper_example,
    random_density,
    reduced_density,
)
from .spectral import (
    DegeneracyProfile,
    RankOneReport,
    Spectrum,
    degeneracy_profile,
    eig_hermitian,
    rank_one_test,
    spectra_match,
)
from .states import DensityMatrix, validate_density
from .tensor import (
    CutRealignment,
    DimProfile,
    ShapeError,
    kron,
    kron_all,
    realign,
    realign_all,
    unrealign,
    unvec,
    vec,
)

__version__ = "0.1.0"

__all__ = [
    "BlockContext",
    "CutRealignment",
    "DegeneracyProfile",
    "DensityMatrix",
    "DimProfile",
    "FactorSet",
    "MatrixFile",
    "MatrixFileError",
    "NotDecomposableError",
    "PairLabel",
    "PairSample",
    "PhaseContext",
    "RankOneReport",
    "SearchConfig",
    "ShapeError",
    "Spectrum",
    "Verdict",
    "VerdictStatus",
    "build_V",
    "build_V0",
    "check_equivalence",
    "degeneracy_profile",
    "eig_hermitian",
    "factor_full",
    "factor_pair",
    "haar_unitary",
    "is_decomposable",
    "kron",
    "kron_all",
    "load_matrix",
    "make_degenerate_pair",
    "make_equivalent_pair",
    "make_spectrum_mismatch_pair",
    "objective",
    "paper_example",
    "phase_search",
    "random_density",
    "rank_one_test",
    "realign",
    "realign_all",
    "reduced_density",
    "save_matrix",
    "spectra_match",
    "unrealign",
    "unvec",
    "validate_density",
    "vec",
    "verify_witness",
]
