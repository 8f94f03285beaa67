"""HTTP front end over the analysis library.

Verdicts always travel with HTTP 200; an uncertifiable computation comes
back with verdict "indeterminate" and a note rather than an error status.
Bad inputs (malformed specs, invalid grids, unsupported forms) map to 400,
model validation failures to FastAPI's usual 422.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from fastapi import FastAPI
from fastapi.requests import Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..analysis import AnalysisReport, analyze, detect_lattice
from ..constructions import (
    interpolate,
    nonqid_sequence,
    sequence_zero_certificate,
)
from ..charfn import charfn_eval
from ..distribution import Distribution, validate_spec
from ..errors import (
    ExtractionError,
    GridError,
    IndeterminateZeroError,
    ScanError,
    SpecError,
    UnsupportedFormError,
    UnwrapError,
)
from ..krein import _IM_RESIDUAL_HARD, _extraction_z, reconstruct_on_grid
from ..lattice import (
    LatticeSeries,
    lattice_triplet,
    mixed_decompose,
    wiener_invert,
)
from ..metrics import levy_distance
from ..winding import winding_index
from ..zeros import ScanConfig, find_zeros
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    Certificate,
    ComplexGrid,
    ComplexValue,
    DistributionSpec,
    HealthResponse,
    IndexRequest,
    IndexResponse,
    InterpolateRequest,
    InterpolateResponse,
    LatticeAtom,
    LatticeRequest,
    LatticeResponse,
    PathRow,
    RealGrid,
    ReconstructRequest,
    ScanOptions,
    SequenceRequest,
    SequenceResponse,
    SequenceRow,
    SeriesPayload,
    TripletHeader,
    ZerosRequest,
    ZerosResponse,
)

_INDETERMINATE_EXC = (ScanError, IndeterminateZeroError, UnwrapError,
                      ExtractionError)


def _build(spec: DistributionSpec) -> Distribution:
    return validate_spec(spec.to_raw())


def _scan_config(opts: Optional[ScanOptions]) -> ScanConfig:
    if opts is None:
        return ScanConfig()
    return ScanConfig(z_scan_min=opts.z_scan_min,
                      refine_tol=opts.refine_tol,
                      scan_bound=opts.scan_bound)


def _scan_params(cfg: ScanConfig) -> dict:
    return {"z_scan_min": cfg.z_scan_min, "refine_tol": cfg.refine_tol,
            "scan_bound": cfg.scan_bound,
            "indeterminate_band": [1e-10, 1e-6]}


def _certificate(cert) -> Optional[Certificate]:
    if cert is None:
        return None
    return Certificate(**cert.to_dict())


def _charfn_grid(dist: Distribution, z_max: float, m: int) -> ComplexGrid:
    dz = 2.0 * z_max / (m - 1)
    vals = dist.charfn_uniform(-z_max, dz, m)
    return ComplexGrid(start=-z_max, step=dz,
                       re=np.real(vals).tolist(), im=np.imag(vals).tolist())


def _analysis_payload(dist: Distribution, rep: AnalysisReport,
                      include_grids: bool, z_max: float, m: int,
                      parameters: dict) -> AnalyzeResponse:
    resp = AnalyzeResponse(verdict=rep.verdict, form=rep.form, note=rep.note,
                           certificate=_certificate(rep.certificate),
                           parameters=parameters)
    if rep.report is not None:
        kr = rep.report
        resp.triplet = TripletHeader(
            **kr.triplet.to_header(kr.im_residual, kr.recon_error))
        resp.q_est = ComplexValue(re=float(np.real(kr.q_est)),
                                  im=float(np.imag(kr.q_est)))
        resp.truncated_mass = kr.truncated_mass
        resp.lattice_atoms = [LatticeAtom(location=loc, mass=b)
                              for loc, b in kr.triplet.lattice_atoms]
        dens = kr.triplet.ac_density
        if dens is not None:
            resp.g = RealGrid(start=dens.x0, step=dens.dx,
                              values=dens.values.tolist())
    if include_grids:
        charfn = _charfn_grid(dist, z_max, m)
        resp.charfn = charfn
        if rep.report is not None:
            recon = reconstruct_on_grid(rep.report.triplet, -z_max,
                                        charfn.step, m)
            truth = np.asarray(charfn.re) + 1j * np.asarray(charfn.im)
            resp.recon = ComplexGrid(start=-z_max, step=charfn.step,
                                     re=np.real(recon).tolist(),
                                     im=np.imag(recon).tolist())
            resp.recon_sup_error = float(np.abs(recon - truth).max())
    return resp


def _series_payload(series: LatticeSeries) -> SeriesPayload:
    rows = [{"k": float(k), "re": re, "im": im}
            for k, re, im in series.rows()]
    return SeriesPayload(r=series.offset, h=series.step,
                         l1_norm=series.l1_norm(), coefficients=rows)


def _inverse_residual(series: LatticeSeries,
                      inverse: LatticeSeries) -> float:
    conv = np.convolve(series.coefficients, inverse.coefficients)
    pos = -(series.k_min + inverse.k_min)
    err = np.abs(conv).sum() - abs(conv[pos]) + abs(conv[pos] - 1.0)
    return float(err)


def create_app() -> FastAPI:
    app = FastAPI(title="qidkit", version=__version__)

    @app.exception_handler(SpecError)
    @app.exception_handler(GridError)
    @app.exception_handler(UnsupportedFormError)
    async def _input_error(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze_endpoint(req: AnalyzeRequest) -> AnalyzeResponse:
        dist = _build(req.spec)
        cfg = _scan_config(req.scan)
        rep = analyze(dist, n_points=req.n_points, scan_config=cfg)
        params = {"n_points": req.n_points,
                  "grid_z_max": req.grid_z_max,
                  "grid_points": req.grid_points,
                  "im_residual_hard": _IM_RESIDUAL_HARD,
                  **_scan_params(cfg)}
        return _analysis_payload(dist, rep, req.include_grids,
                                 req.grid_z_max, req.grid_points, params)

    @app.post("/zeros", response_model=ZerosResponse)
    def zeros_endpoint(req: ZerosRequest) -> ZerosResponse:
        dist = _build(req.spec)
        cfg = _scan_config(req.scan)
        params = _scan_params(cfg)
        try:
            cert = find_zeros(dist, cfg)
        except _INDETERMINATE_EXC as exc:
            return ZerosResponse(verdict="indeterminate", note=str(exc),
                                 parameters=params)
        verdict = "zero_found" if cert.verdict == "zero_found" else "no_zeros"
        return ZerosResponse(verdict=verdict, certificate=_certificate(cert),
                             parameters=params)

    @app.post("/index", response_model=IndexResponse)
    def index_endpoint(req: IndexRequest) -> IndexResponse:
        dist = _build(req.spec)
        cfg = _scan_config(req.scan)
        params = {"n_points": req.n_points, "z_max": req.z_max,
                  **_scan_params(cfg)}
        try:
            cert = find_zeros(dist, cfg)
        except _INDETERMINATE_EXC as exc:
            return IndexResponse(verdict="indeterminate", note=str(exc),
                                 parameters=params)
        if cert.verdict == "zero_found":
            return IndexResponse(verdict="NotQID", index=None,
                                 certificate=_certificate(cert),
                                 note="transform vanishes; no index",
                                 parameters=params)

        if len(dist.atoms) == 1 and dist.lattice is None:
            z_star = req.z_max if req.z_max is not None \
                else _extraction_z(dist)
            try:
                grid = charfn_eval(dist, z_star, req.n_points)
                m = winding_index(grid, dist)
            except _INDETERMINATE_EXC as exc:
                return IndexResponse(verdict="indeterminate", note=str(exc),
                                     certificate=_certificate(cert),
                                     parameters=params)
            params["z_max"] = z_star
            return IndexResponse(verdict="QID", kind="winding", index=m,
                                 certificate=_certificate(cert),
                                 parameters=params)

        lat_dist = dist
        if dist.atoms and dist.lattice is None:
            det = detect_lattice(dist.atom_locations())
            if det is not None:
                lat_dist = Distribution(dist.atoms, dist.ac_weight,
                                        dist.ac_density, det)
        if lat_dist.lattice is not None and lat_dist.atoms:
            series = LatticeSeries.from_distribution(lat_dist).normalized()
            try:
                log_res = lattice_triplet(series)
            except _INDETERMINATE_EXC as exc:
                return IndexResponse(verdict="indeterminate", note=str(exc),
                                     certificate=_certificate(cert),
                                     parameters=params)
            r, h = lat_dist.lattice
            return IndexResponse(verdict="QID", kind="lattice_period",
                                 index=log_res.winding,
                                 drift=r + log_res.winding * h,
                                 certificate=_certificate(cert),
                                 parameters=params)
        raise UnsupportedFormError(
            "index is computed through the single-atom winding or the "
            "lattice period; this law offers neither")

    @app.post("/triplet", response_model=AnalyzeResponse)
    def triplet_endpoint(req: AnalyzeRequest) -> AnalyzeResponse:
        return analyze_endpoint(req)

    @app.post("/reconstruct", response_model=AnalyzeResponse)
    def reconstruct_endpoint(req: ReconstructRequest) -> AnalyzeResponse:
        dist = _build(req.spec)
        cfg = _scan_config(req.scan)
        rep = analyze(dist, n_points=req.n_points, scan_config=cfg)
        params = {"n_points": req.n_points,
                  "grid_z_max": req.grid_z_max,
                  "grid_points": req.grid_points,
                  "im_residual_hard": _IM_RESIDUAL_HARD,
                  **_scan_params(cfg)}
        return _analysis_payload(dist, rep, True, req.grid_z_max,
                                 req.grid_points, params)

    @app.post("/lattice", response_model=LatticeResponse)
    def lattice_endpoint(req: LatticeRequest) -> LatticeResponse:
        dist = _build(req.spec)
        cfg = _scan_config(req.scan)
        params = {"n_fft": req.n_fft, "truncation_tol": req.truncation_tol,
                  "n_points": req.n_points, **_scan_params(cfg)}
        if dist.lattice is None:
            det = detect_lattice(dist.atom_locations())
            if det is None:
                raise UnsupportedFormError(
                    "atoms do not sit on a common lattice")
            dist = Distribution(dist.atoms, dist.ac_weight,
                                dist.ac_density, det)
        series = LatticeSeries.from_distribution(dist)
        resp = LatticeResponse(verdict="indeterminate",
                               series=_series_payload(series),
                               ac_weight=dist.ac_weight,
                               parameters=params)
        try:
            cert = find_zeros(dist, cfg)
        except _INDETERMINATE_EXC as exc:
            resp.note = str(exc)
            return resp
        resp.certificate = _certificate(cert)
        if cert.verdict == "zero_found":
            resp.verdict = "NotQID"
            return resp
        try:
            inverse = wiener_invert(series, n_fft=req.n_fft,
                                    truncation_tol=req.truncation_tol)
            log_res = lattice_triplet(series.normalized(),
                                      n_grid=req.n_fft,
                                      truncation_tol=req.truncation_tol)
            if dist.ac_weight > 0:
                dec = mixed_decompose(dist, n_fft=req.n_fft)
                resp.identity_error = dec.identity_error
        except _INDETERMINATE_EXC as exc:
            resp.note = str(exc)
            return resp
        resp.verdict = "QID"
        resp.inverse = _series_payload(inverse)
        resp.inverse_residual = _inverse_residual(series, inverse)
        resp.winding = log_res.winding
        r, h = dist.lattice
        resp.drift = r + log_res.winding * h
        resp.log_masses = [{"k": float(k), "re": float(b.real),
                            "im": float(b.imag)}
                           for k, b in zip(log_res.b_indices,
                                           log_res.b_values)]
        resp.log_im_max = log_res.im_max
        resp.log_recon_error = log_res.recon_error
        return resp

    @app.post("/interpolate", response_model=InterpolateResponse)
    def interpolate_endpoint(req: InterpolateRequest) -> InterpolateResponse:
        mu1 = _build(req.spec1)
        mu2 = _build(req.spec2)
        rows = []
        for t in req.t_grid:
            law = interpolate(mu1, mu2, t)
            rep = analyze(law, n_points=req.n_points)
            d1, s1 = levy_distance(law, mu1, n_grid=req.metric_grid)
            d2, s2 = levy_distance(law, mu2, n_grid=req.metric_grid)
            rows.append(PathRow(t=t, levy_to_mu1=d1, levy_to_mu2=d2,
                                qid_verdict=rep.verdict,
                                spacing=max(s1, s2)))
        params = {"n_points": req.n_points, "metric": "levy",
                  "metric_grid": req.metric_grid}
        return InterpolateResponse(rows=rows, parameters=params)

    @app.post("/sequence", response_model=SequenceResponse)
    def sequence_endpoint(req: SequenceRequest) -> SequenceResponse:
        mu = _build(req.spec)
        nu = _build(req.spec_factor)
        cfg = _scan_config(req.scan)
        nu_cert = find_zeros(nu, cfg)
        if nu_cert.verdict != "zero_found":
            raise SpecError(
                "the factor transform shows no certified real zero; the "
                "sequence construction needs one")
        rows = []
        for n in req.n_ladder:
            law = nonqid_sequence(mu, nu, n, nu_certificate=nu_cert)
            zcert = sequence_zero_certificate(mu, nu, n, nu_cert)
            d, s = levy_distance(law, mu, n_grid=req.metric_grid)
            rows.append(SequenceRow(n=n,
                                    zero_location=zcert.refined_location,
                                    levy_to_limit=d, verdict="NotQID",
                                    spacing=s))
        params = {"metric": "levy", "metric_grid": req.metric_grid,
                  **_scan_params(cfg)}
        return SequenceResponse(factor_certificate=_certificate(nu_cert),
                                rows=rows, parameters=params)

    return app


app = create_app()
