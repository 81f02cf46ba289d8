"""Experiment execution: grid expansion, worker pool, per-kind handlers and artifacts."""

from __future__ import annotations

import json
import math
import time
from collections.abc import Callable, Iterator
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel

from revlab.chebyshev import filter_params, filter_profile, filter_report
from revlab.errors import ArgumentError, ArtifactWriteError, RevlabError
from revlab.labs.fluctuation import AdditiveOperator, fisher_neff, gap_variance_tradeoff, ground_tail_profile, lmg_scaling_fit
from revlab.labs.meanfield import energy_density_mf_error, mf_deviation_sum
from revlab.labs.reversibility import (
    chebyshev_reverse,
    energy_tail_check,
    macroscopicity_witness,
    make_disturbance,
    optimal_local_reverse,
)
from revlab.manifest import (
    ExperimentManifest,
    FilterProfileOptions,
    FluctuationOptions,
    LmgScalingOptions,
    MacroscopicityOptions,
    MeanfieldOptions,
    ReverseOptions,
    TailOptions,
)
from revlab.models import HamiltonianSpec, make_special_state, toric_loop_pair
from revlab.operators import apply_local_operator
from revlab.settings import get_settings, rng_for
from revlab.spectral import GroundSolution, ground_state, write_csv
from revlab.states import StateVector

UTC = timezone.utc

REVERSE_COLUMNS = [
    "model", "n", "q", "k", "g", "L_size", "deltaE", "n0", "xi",
    "method", "residual", "rhs_bound", "margin", "overlap_abs",
]  # fmt: skip


class PointOutcome(BaseModel):
    """Rows and summary produced by one grid point."""

    index: int
    point: dict[str, Any]
    rows: list[dict[str, Any]]
    summary: dict[str, Any] | None = None


class RunStatus(BaseModel):
    """Run status: pending, working, completed or failed."""

    run_id: str
    state: str
    progress: float | None = None
    message: str | None = None
    error: str | None = None


class RunResult(BaseModel):
    """Outcome of one manifest run."""

    run_id: str
    state: str
    rows: int = 0
    artifacts: list[str] | None = None
    duration_seconds: float | None = None


def _solve(spec: HamiltonianSpec, seed: int) -> GroundSolution:
    return ground_state(spec, seed=seed)


def _base_row(spec: HamiltonianSpec) -> dict[str, Any]:
    return {"model": spec.name, "n": spec.n_sites}


def _reverse_point(manifest: ExperimentManifest, index: int, point: dict[str, Any]) -> PointOutcome:
    options = ReverseOptions.model_validate(manifest.options)
    spec = manifest.model.build(point)  # type: ignore[union-attr]
    solution = _solve(spec, manifest.seed)
    omega = solution.ground_state
    gamma = options.disturbance.build(spec, rng_for(manifest.seed, index))
    disturbance = make_disturbance(gamma, omega, options.region)
    q = int(point["q"])
    rows = []
    for method in options.methods:
        if method == "chebyshev":
            result = chebyshev_reverse(spec, omega, disturbance, q, solution=solution)
        else:
            damaged = apply_local_operator(gamma, omega)
            result = optimal_local_reverse(omega, damaged, q, region=disturbance.region)
        params = result.params
        rows.append(
            {
                **_base_row(spec),
                "q": q,
                "k": spec.k,
                "g": spec.g,
                "L_size": disturbance.L_size,
                "deltaE": solution.gap,
                "n0": params.n0 if params else None,
                "xi": params.xi if params else None,
                "method": result.method,
                "residual": result.residual,
                "rhs_bound": result.rhs_bound,
                "margin": result.margin,
                "overlap_abs": abs(disturbance.overlap),
            }
        )
    return PointOutcome(index=index, point=point, rows=rows)


def _tail_point(manifest: ExperimentManifest, index: int, point: dict[str, Any]) -> PointOutcome:
    options = TailOptions.model_validate(manifest.options)
    spec = manifest.model.build(point)  # type: ignore[union-attr]
    omega = _solve(spec, manifest.seed).ground_state
    gamma = options.disturbance.build(spec, rng_for(manifest.seed, index))
    report = energy_tail_check(spec, omega, make_disturbance(gamma, omega))
    rows = [{**_base_row(spec), **p.model_dump()} for p in report.points]
    return PointOutcome(
        index=index, point=point, rows=rows, summary={"worst_margin": report.worst_margin, "holds": report.holds}
    )


def _fluctuation_point(manifest: ExperimentManifest, index: int, point: dict[str, Any]) -> PointOutcome:
    options = FluctuationOptions.model_validate(manifest.options)
    spec = manifest.model.build(point)  # type: ignore[union-attr]
    solution = _solve(spec, manifest.seed)
    row: dict[str, Any] = {**_base_row(spec)}
    if spec.representation == "collective_spin":
        report = gap_variance_tradeoff(spec, solution=solution, axis=options.axis)
        row |= {"deltaE": report.delta_e, "variance": report.variance, "L_size": report.L_size, "ratio": report.ratio}
        return PointOutcome(index=index, point=point, rows=[row])
    A = AdditiveOperator.uniform(spec.n_sites, options.letter, options.sites)
    report = gap_variance_tradeoff(spec, A, solution)
    profile = ground_tail_profile(spec, A, solution, fit=options.fit)
    row |= {
        "deltaE": report.delta_e,
        "variance": report.variance,
        "L_size": report.L_size,
        "ratio": report.ratio,
        "tail_rate": profile.rate,
        "reference_rate": profile.reference_rate,
    }
    if options.fisher:
        fisher = fisher_neff(solution.ground_state, restarts=options.restarts, seed=manifest.seed)
        row |= {"neff_lower": fisher.neff_lower, "neff_upper": fisher.neff_upper}
    return PointOutcome(index=index, point=point, rows=[row], summary={"tail": profile.model_dump()})


def _lmg_point(manifest: ExperimentManifest, index: int, point: dict[str, Any]) -> PointOutcome:
    options = LmgScalingOptions.model_validate(manifest.options)
    report = lmg_scaling_fit(
        options.N_list, options.lam, options.h, options.gamma, axis=options.axis, field_axis=options.field_axis
    )
    return PointOutcome(
        index=index,
        point=point,
        rows=report.rows,
        summary={"gap_fit": report.gap_fit.model_dump(), "variance_fit": report.variance_fit.model_dump()},
    )


def _meanfield_point(manifest: ExperimentManifest, index: int, point: dict[str, Any]) -> PointOutcome:
    options = MeanfieldOptions.model_validate(manifest.options)
    spec = manifest.model.build(point)  # type: ignore[union-attr]
    solution = _solve(spec, manifest.seed)
    L = options.L if options.L is not None else [j for j in range(spec.n_sites) if j != options.site]
    deviation = mf_deviation_sum(solution.ground_state, options.site, L, solution.gap)
    rows = [{**_base_row(spec), **r} for r in deviation.to_frame().to_dict("records")]
    summary: dict[str, Any] = deviation.model_dump(include={"total", "scale", "witness_bound"})
    if spec.k <= 2:
        summary["energy_density"] = energy_density_mf_error(spec, options.site, solution).model_dump()
    return PointOutcome(index=index, point=point, rows=rows, summary=summary)


def _macroscopic_state(options: MacroscopicityOptions, spec: HamiltonianSpec, seed: int) -> tuple[StateVector, GroundSolution | None]:
    if options.state == "ground":
        solution = _solve(spec, seed)
        return solution.ground_state, solution
    if options.method == "chebyshev":
        raise ArgumentError(f"the Chebyshev reverse operator needs the ground state, not {options.state!r}")
    if options.state == "toric_loop":
        return toric_loop_pair(spec)[0], None
    return make_special_state(options.state, spec.n_sites), None


def _macroscopicity_point(manifest: ExperimentManifest, index: int, point: dict[str, Any]) -> PointOutcome:
    options = MacroscopicityOptions.model_validate(manifest.options)
    spec = manifest.model.build(point)  # type: ignore[union-attr]
    psi, solution = _macroscopic_state(options, spec, manifest.seed)
    projector = options.projector.build(spec, rng_for(manifest.seed, index))
    q = int(point["q"])
    report = macroscopicity_witness(
        psi,
        projector,
        q,
        spec=spec if options.method == "chebyshev" else None,
        solution=solution,
        region=options.region,
        symmetry_generators=spec.symmetry_generators if options.symmetry_restricted else None,
    )
    row = {**_base_row(spec), "state": options.state, **report.model_dump()}
    return PointOutcome(index=index, point=point, rows=[row])


def _filter_profile_point(manifest: ExperimentManifest, index: int, point: dict[str, Any]) -> PointOutcome:
    options = FilterProfileOptions.model_validate(manifest.options)
    spec = manifest.model.build(point)  # type: ignore[union-attr]
    solution = _solve(spec, manifest.seed)
    q = int(point.get("q", options.q))
    params = filter_params(q, spec.k, spec.g, options.L_size, solution.gap)
    x_max = options.x_max or 1.5 * params.window_top
    frame = filter_profile(params, np.linspace(0.0, x_max, options.points))
    frame.insert(0, "q", q)
    return PointOutcome(
        index=index,
        point=point,
        rows=frame.to_dict("records"),
        summary={"params": params.model_dump(), "window": filter_report(params).model_dump()},
    )


HANDLERS: dict[str, Callable[[ExperimentManifest, int, dict[str, Any]], PointOutcome]] = {
    "reverse": _reverse_point,
    "tail": _tail_point,
    "fluctuation": _fluctuation_point,
    "lmg_scaling": _lmg_point,
    "meanfield": _meanfield_point,
    "macroscopicity": _macroscopicity_point,
    "filter_profile": _filter_profile_point,
}


def run_point(manifest: ExperimentManifest, index: int, point: dict[str, Any]) -> PointOutcome:
    """Run one grid point; errors are logged with the point's coordinates and re-raised as RevlabError."""
    try:
        return HANDLERS[manifest.kind](manifest, index, point)
    except Exception as e:
        logger.error(f"{manifest.kind} point {index} {point} failed: {e}")
        if isinstance(e, RevlabError):
            raise
        raise RevlabError(f"{manifest.kind} point {index} {point}: {e}") from e


def _run_point_star(args: tuple[ExperimentManifest, int, dict[str, Any]]) -> PointOutcome:
    return run_point(*args)


def results_frame(manifest: ExperimentManifest, outcomes: list[PointOutcome]) -> pd.DataFrame:
    """Concatenate rows in grid order; grid keys missing from a kind's columns are appended."""
    records = []
    for outcome in outcomes:
        for row in outcome.rows:
            extra = {key: value for key, value in outcome.point.items() if key not in row}
            records.append({**row, **extra})
    frame = pd.DataFrame.from_records(records)
    if manifest.kind == "reverse":
        trailing = [c for c in frame.columns if c not in REVERSE_COLUMNS]
        frame = frame.reindex(columns=REVERSE_COLUMNS + trailing)
    return frame


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_json_safe(v) for v in value]
    return value


class ExperimentRunner:
    """Runs manifests and tracks their status."""

    def __init__(self, threads: int | None = None) -> None:
        """Initialize with a worker count (settings default) and empty run state."""
        self.threads = threads or get_settings().threads
        self._runs: dict[str, RunStatus] = {}

    def _collect(self, run_id: str, outcomes: Iterator[PointOutcome], total: int) -> list[PointOutcome]:
        collected: list[PointOutcome] = []
        for outcome in outcomes:
            collected.append(outcome)
            self._runs[run_id] = RunStatus(
                run_id=run_id,
                state="working",
                progress=len(collected) / total,
                message=f"{len(collected)}/{total} point(s) done",
            )
        return collected

    def _execute(self, manifest: ExperimentManifest, run_id: str) -> list[PointOutcome]:
        jobs = [(manifest, index, point) for index, point in enumerate(manifest.grid_points())]
        if self.threads == 1 or len(jobs) == 1:
            return self._collect(run_id, map(_run_point_star, jobs), len(jobs))
        with ProcessPoolExecutor(max_workers=self.threads) as pool:
            # map keeps grid order regardless of completion order
            return self._collect(run_id, pool.map(_run_point_star, jobs), len(jobs))

    def run(self, manifest: ExperimentManifest, run_id: str | None = None) -> RunResult:
        """Run every grid point, then write results, summary and manifest echo.

        Nothing is written unless every point succeeds.

        Args:
            manifest: Validated experiment manifest
            run_id: Status key, defaults to the experiment kind

        Returns:
            RunResult with the written artifact paths

        Raises:
            RevlabError: On the first failing grid point
            ArtifactWriteError: If an artifact cannot be written
        """
        run_id = run_id or manifest.kind
        started = datetime.now(UTC)
        start_time = time.time()
        self._runs[run_id] = RunStatus(run_id=run_id, state="pending", message="Run created")
        try:
            self._runs[run_id] = RunStatus(
                run_id=run_id, state="working", progress=0.0, message=f"Running {len(manifest.grid_points())} point(s)"
            )
            outcomes = self._execute(manifest, run_id)
            frame = results_frame(manifest, outcomes)
            artifacts = self._write(manifest, outcomes, frame, started, time.time() - start_time)
        except Exception as e:
            progress = self._runs[run_id].progress
            self._runs[run_id] = RunStatus(
                run_id=run_id, state="failed", progress=progress, message="Run failed", error=str(e)
            )
            raise
        duration = time.time() - start_time
        self._runs[run_id] = RunStatus(run_id=run_id, state="completed", progress=1.0, message="Run completed")
        logger.info(f"{manifest.kind}: {len(frame)} row(s) in {duration:.2f}s")
        return RunResult(run_id=run_id, state="completed", rows=len(frame), artifacts=artifacts, duration_seconds=duration)

    def _write(
        self,
        manifest: ExperimentManifest,
        outcomes: list[PointOutcome],
        frame: pd.DataFrame,
        started: datetime,
        wall_seconds: float,
    ) -> list[str]:
        """Write all three artifacts to temporary siblings, then move them into place together.

        Raises:
            ArtifactWriteError: After removing every temporary and already moved artifact
        """
        outputs = manifest.outputs
        summaries = [{"index": o.index, "point": o.point, **(o.summary or {})} for o in outcomes if o.summary]
        echo = {
            "manifest": manifest.model_dump(mode="json"),
            "run": {
                "started_at": started.isoformat(),
                "wall_seconds": wall_seconds,
                "threads": self.threads,
                "settings": get_settings().model_dump(),
            },
        }
        writers: list[tuple[Path, Callable[[Path], Any]]] = [
            (outputs.results, lambda path: write_csv(frame, path)),
            (outputs.summary, lambda path: _write_json(path, _json_safe({"kind": manifest.kind, "points": summaries}))),
            (outputs.echo, lambda path: _write_json(path, _json_safe(echo))),
        ]
        staged: list[tuple[Path, Path]] = []
        placed: list[Path] = []
        try:
            for final, write in writers:
                temporary = final.with_name(f".{final.name}.tmp")
                staged.append((temporary, final))
                write(temporary)
            for temporary, final in staged:
                temporary.replace(final)
                placed.append(final)
        except Exception as e:
            for path in [temporary for temporary, _ in staged] + placed:
                path.unlink(missing_ok=True)
            raise ArtifactWriteError(f"writing artifacts failed: {e}") from e
        return [str(final) for _, final in staged]

    def get_status(self, run_id: str) -> RunStatus | None:
        """Current status of a run, if known."""
        return self._runs.get(run_id)


def _write_json(path: Path, payload: dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
