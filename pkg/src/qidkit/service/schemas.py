"""Request and response models for the HTTP service.

The distribution wire format mirrors ``qidkit.distribution.validate_spec``;
the ``ac`` payload stays a free-form object because density kinds carry
different fields, and the model layer performs the deep validation anyway.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class AtomSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    x: float
    p: float


class LatticeDecl(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r: float
    h: float


class DistributionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    atoms: List[AtomSpec] = Field(default_factory=list)
    lattice: Optional[LatticeDecl] = None
    ac: Optional[Dict[str, Any]] = None

    def to_raw(self) -> dict:
        raw: dict = {}
        if self.atoms:
            raw["atoms"] = [{"x": a.x, "p": a.p} for a in self.atoms]
        if self.lattice is not None:
            raw["lattice"] = {"r": self.lattice.r, "h": self.lattice.h}
        if self.ac is not None:
            raw["ac"] = self.ac
        return raw


class ScanOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    z_scan_min: float = Field(default=64.0, gt=0)
    refine_tol: float = Field(default=1e-12, gt=0)
    scan_bound: Optional[float] = Field(default=None, gt=0)


def _check_n_points(n: int) -> int:
    if n < (1 << 10) or n > (1 << 20) or (n & (n - 1)) != 0:
        raise ValueError("n_points must be a power of two in [2^10, 2^20]")
    return n


class AnalyzeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: DistributionSpec
    n_points: int = 1 << 16
    scan: Optional[ScanOptions] = None
    include_grids: bool = True
    grid_z_max: float = Field(default=64.0, gt=0)
    grid_points: int = Field(default=2001, ge=16, le=1 << 20)

    _n = field_validator("n_points")(_check_n_points)


class ZerosRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: DistributionSpec
    scan: Optional[ScanOptions] = None


class IndexRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: DistributionSpec
    n_points: int = 1 << 14
    z_max: Optional[float] = Field(default=None, gt=0)
    scan: Optional[ScanOptions] = None

    _n = field_validator("n_points")(_check_n_points)


class ReconstructRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: DistributionSpec
    n_points: int = 1 << 16
    scan: Optional[ScanOptions] = None
    grid_z_max: float = Field(default=64.0, gt=0)
    grid_points: int = Field(default=2001, ge=16, le=1 << 20)

    _n = field_validator("n_points")(_check_n_points)


class LatticeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: DistributionSpec
    n_fft: int = 1 << 12
    truncation_tol: float = Field(default=1e-14, gt=0)
    n_points: int = 1 << 16
    scan: Optional[ScanOptions] = None

    _n = field_validator("n_points")(_check_n_points)
    _nf = field_validator("n_fft")(_check_n_points)


class InterpolateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec1: DistributionSpec
    spec2: DistributionSpec
    t_grid: List[float]
    n_points: int = 1 << 14
    metric_grid: int = Field(default=4001, ge=64, le=1 << 20)

    _n = field_validator("n_points")(_check_n_points)

    @field_validator("t_grid")
    @classmethod
    def _check_t(cls, ts: List[float]) -> List[float]:
        if not ts:
            raise ValueError("t_grid must be nonempty")
        for t in ts:
            if not (0.0 <= t <= 1.0):
                raise ValueError(f"t = {t} outside [0, 1]")
        return ts


class SequenceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: DistributionSpec          # the weak limit mu
    spec_factor: DistributionSpec   # nu, whose transform must vanish somewhere
    n_ladder: List[int]
    scan: Optional[ScanOptions] = None
    metric_grid: int = Field(default=4001, ge=64, le=1 << 20)

    @field_validator("n_ladder")
    @classmethod
    def _check_ladder(cls, ns: List[int]) -> List[int]:
        if not ns:
            raise ValueError("n_ladder must be nonempty")
        for n in ns:
            if n < 1:
                raise ValueError(f"ladder entry {n} must be >= 1")
        return ns


# -- response payloads -------------------------------------------------------


class ComplexValue(BaseModel):
    re: float
    im: float


class TripletHeader(BaseModel):
    a: float
    gamma0: float
    index: int
    x0: float
    im_residual: float
    recon_error: float
    finite_variation: bool


class Certificate(BaseModel):
    verdict: str
    min_modulus_observed: float
    z_lo: Optional[float] = None
    z_hi: Optional[float] = None
    refined_location: Optional[float] = None
    refined_modulus: Optional[float] = None
    z_max_used: Optional[float] = None
    tail_bound_used: Optional[float] = None
    tail_kind: Optional[str] = None


class RealGrid(BaseModel):
    """Uniform tabulation start + step * arange(len(values))."""

    start: float
    step: float
    values: List[float]


class ComplexGrid(BaseModel):
    start: float
    step: float
    re: List[float]
    im: List[float]


class LatticeAtom(BaseModel):
    location: float
    mass: float


class AnalyzeResponse(BaseModel):
    verdict: str
    form: str
    note: str = ""
    certificate: Optional[Certificate] = None
    triplet: Optional[TripletHeader] = None
    q_est: Optional[ComplexValue] = None
    truncated_mass: Optional[float] = None
    lattice_atoms: Optional[List[LatticeAtom]] = None
    g: Optional[RealGrid] = None
    charfn: Optional[ComplexGrid] = None
    recon: Optional[ComplexGrid] = None
    recon_sup_error: Optional[float] = None
    parameters: Dict[str, Any]


class ZerosResponse(BaseModel):
    verdict: str                 # "zero_found" | "no_zeros" | "indeterminate"
    note: str = ""
    certificate: Optional[Certificate] = None
    parameters: Dict[str, Any]


class IndexResponse(BaseModel):
    verdict: str
    kind: str = ""            # "winding" or "lattice_period"
    index: Optional[int] = None
    drift: Optional[float] = None
    note: str = ""
    certificate: Optional[Certificate] = None
    parameters: Dict[str, Any]


class SeriesPayload(BaseModel):
    r: float
    h: float
    l1_norm: float
    coefficients: List[Dict[str, float]]  # rows {k, re, im}


class LatticeResponse(BaseModel):
    verdict: str
    note: str = ""
    certificate: Optional[Certificate] = None
    series: Optional[SeriesPayload] = None
    inverse: Optional[SeriesPayload] = None
    inverse_residual: Optional[float] = None
    winding: Optional[int] = None
    drift: Optional[float] = None
    log_masses: Optional[List[Dict[str, float]]] = None  # rows {k, re, im}
    log_im_max: Optional[float] = None
    log_recon_error: Optional[float] = None
    ac_weight: Optional[float] = None
    identity_error: Optional[float] = None
    parameters: Dict[str, Any]


class PathRow(BaseModel):
    t: float
    levy_to_mu1: float
    levy_to_mu2: float
    qid_verdict: str
    spacing: float


class InterpolateResponse(BaseModel):
    rows: List[PathRow]
    parameters: Dict[str, Any]


class SequenceRow(BaseModel):
    n: int
    zero_location: float
    levy_to_limit: float
    verdict: str
    spacing: float


class SequenceResponse(BaseModel):
    factor_certificate: Certificate
    rows: List[SequenceRow]
    parameters: Dict[str, Any]


class HealthResponse(BaseModel):
    status: str
    version: str
