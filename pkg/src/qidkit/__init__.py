"""Numerical toolkit for quasi-infinitely divisible distributions."""

__version__ = "0.1.0"

from .analysis import AnalysisReport, analyze, detect_lattice
from .charfn import (
    CharFunctionGrid,
    TailBound,
    charfn_eval,
    discrete_floor,
    riemann_lebesgue_bound,
    tail_cutoff,
    total_variation,
)
from .constructions import (
    MixingDistribution,
    interpolate,
    nonqid_sequence,
    normal_mixture,
    normal_mixture_factor,
    normal_mixture_report,
    scale_triplet,
    sequence_zero_certificate,
    variance_cofactor,
    variance_mixture,
    variance_report,
)
from .densities import (
    ExponentialDensity,
    GaussianVarianceMixDensity,
    MixtureDensity,
    NormalDensity,
    TabulatedDensity,
    UniformDensity,
)
from .distribution import Atom, Distribution, cdf_grid, validate_spec
from .errors import (
    ExtractionError,
    GridError,
    IndeterminateZeroError,
    QidkitError,
    ScanError,
    SpecError,
    UnsupportedFormError,
    UnwrapError,
)
from .krein import (
    ExtractionResult,
    KreinReport,
    QidVerdict,
    QuasiLevyTriplet,
    SignedTabulation,
    assemble_triplet,
    extract_g,
    im_residual,
    q_correction,
    qid_verdict,
    reconstruct_charfn,
    reconstruct_on_grid,
    singular_log_term,
)
from .lattice import (
    LatticeLogResult,
    LatticeSeries,
    MixedDecomposition,
    lattice_triplet,
    mixed_decompose,
    mixed_qid_verdict,
    mixed_triplet,
    wiener_invert,
)
from .metrics import levy_distance
from .winding import (
    LogGrid,
    distinguished_log,
    unwrap_phase,
    winding_from_log,
    winding_from_samples,
    winding_index,
)
from .wiener import WienerElement, wiener_norm, wiener_product
from .zeros import ScanConfig, ZeroCertificate, find_zeros, golden_min

__all__ = [
    "__version__",
    "AnalysisReport",
    "analyze",
    "detect_lattice",
    "CharFunctionGrid",
    "TailBound",
    "charfn_eval",
    "discrete_floor",
    "riemann_lebesgue_bound",
    "tail_cutoff",
    "total_variation",
    "MixingDistribution",
    "interpolate",
    "nonqid_sequence",
    "normal_mixture",
    "normal_mixture_factor",
    "normal_mixture_report",
    "scale_triplet",
    "sequence_zero_certificate",
    "variance_cofactor",
    "variance_mixture",
    "variance_report",
    "ExponentialDensity",
    "GaussianVarianceMixDensity",
    "MixtureDensity",
    "NormalDensity",
    "TabulatedDensity",
    "UniformDensity",
    "Atom",
    "Distribution",
    "cdf_grid",
    "validate_spec",
    "ExtractionError",
    "GridError",
    "IndeterminateZeroError",
    "QidkitError",
    "ScanError",
    "SpecError",
    "UnsupportedFormError",
    "UnwrapError",
    "ExtractionResult",
    "KreinReport",
    "QidVerdict",
    "QuasiLevyTriplet",
    "SignedTabulation",
    "assemble_triplet",
    "extract_g",
    "im_residual",
    "q_correction",
    "singular_log_term",
    "qid_verdict",
    "reconstruct_charfn",
    "reconstruct_on_grid",
    "LatticeLogResult",
    "LatticeSeries",
    "MixedDecomposition",
    "lattice_triplet",
    "mixed_decompose",
    "mixed_qid_verdict",
    "mixed_triplet",
    "wiener_invert",
    "levy_distance",
    "LogGrid",
    "distinguished_log",
    "unwrap_phase",
    "winding_from_log",
    "winding_from_samples",
    "winding_index",
    "WienerElement",
    "wiener_norm",
    "wiener_product",
    "ScanConfig",
    "ZeroCertificate",
    "find_zeros",
    "golden_min",
]
