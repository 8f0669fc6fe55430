"""End-to-end: matrix factorization -> norm ideal -> blow-up charts -> verdict."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Optional

from .blowup import BlowupChart, blowup_charts
from .errors import NotAMatrixFactorization
from .groebner import Ideal
from .mf import MatrixFactorization, NormChoice, VerifyReport, norm_ideal, rank_of_coker, verify_mf
from .poly import Polynomial
from .singularity import PipelineVerdict, SingularityReport, analyze_charts, pipeline_verdict


def worker_count() -> int:
    """Concurrency cap from ``MFBLOW_THREADS`` (unset or 0: sequential)."""
    raw = os.environ.get("MFBLOW_THREADS", "0").strip() or "0"
    try:
        return max(0, int(raw))
    except ValueError:
        return 0


@dataclass
class BlowupResult:
    f: Polynomial
    center: Ideal
    charts: List[BlowupChart]
    reports: List[SingularityReport]
    verdict: PipelineVerdict


@dataclass
class PipelineResult(BlowupResult):
    verify: Optional[VerifyReport] = None
    rank: Optional[int] = None


def analyze_blowup(f: Polynomial, center: Ideal, workers: int = None) -> BlowupResult:
    workers = worker_count() if workers is None else workers
    charts = blowup_charts(f, center, workers=workers)
    reports = analyze_charts(charts, workers=workers)
    verdict = pipeline_verdict(reports, f, charts)
    return BlowupResult(f, center, charts, reports, verdict)


def run_pipeline(mf: MatrixFactorization, choice: NormChoice = NormChoice(),
                 full_minors: bool = False, workers: int = None) -> PipelineResult:
    check = verify_mf(mf)
    if not check.ok:
        raise NotAMatrixFactorization("phi*psi and psi*phi must both equal f*Id")
    rank = rank_of_coker(mf)
    center = norm_ideal(mf, choice, full_minors=full_minors)
    res = analyze_blowup(mf.f, center, workers)
    return PipelineResult(res.f, res.center, res.charts, res.reports, res.verdict, check, rank)
