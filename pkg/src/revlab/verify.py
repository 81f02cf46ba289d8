"""Self-verification suite: every asserted inequality on the bundled models, with its margin."""

from __future__ import annotations

import math
import time
from collections.abc import Callable
from typing import Literal

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel, Field
from scipy.stats import linregress

from revlab.chebyshev import filter_params, filter_report, verify_cheby_bounds
from revlab.errors import RevlabError
from revlab.labs.fluctuation import (
    CriticalExponents,
    additive_locality_gap_check,
    critical_exponent_inequality,
    fisher_neff,
    lmg_scaling_fit,
    random_additive,
)
from revlab.labs.meanfield import mf_deviation_sum, projector_decomposition_check
from revlab.labs.reversibility import (
    chebyshev_reverse,
    energy_tail_check,
    local_projector,
    make_disturbance,
    optimal_local_reverse,
    pauli_disturbance,
    topo_indistinguishability_check,
)
from revlab.models import (
    build_model,
    build_random_two_local,
    make_special_state,
    random_site_states,
    toric_ground_space,
    toric_logical_loop,
    toric_loop_pair,
)
from revlab.operators import LocalOperator, PauliString, apply_local_operator
from revlab.settings import rng_for
from revlab.spectral import ground_state
from revlab.states import StateVector, product_state

VerifyLevel = Literal["quick", "full"]
SUITE_SEED = 20_240_601


class CheckResult(BaseModel):
    """One asserted inequality; a positive margin means it holds with room to spare."""

    group: str
    name: str
    passed: bool
    margin: float | None = None
    detail: str = ""
    informational: bool = False  # reported, never counted against the suite


class VerifyReport(BaseModel):
    """All checks of one suite run."""

    level: VerifyLevel
    checks: list[CheckResult] = Field(default_factory=list)
    seconds: dict[str, float] = Field(default_factory=dict)

    @property
    def asserted(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.informational]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.asserted)

    @property
    def failures(self) -> list[CheckResult]:
        return [check for check in self.asserted if not check.passed]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([check.model_dump() for check in self.checks], columns=list(CheckResult.model_fields))


def _random_state(n: int, rng: np.random.Generator) -> StateVector:
    amplitudes = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector(n_sites=n, amplitudes=amplitudes / np.linalg.norm(amplitudes))


def _y_correlated_state() -> StateVector:
    """Sites 0 and 1 share only a ``Y Y`` correlation; site 2 purifies them."""
    y_plus = np.array([1.0, 1.0j]) / math.sqrt(2.0)
    y_minus = np.array([1.0, -1.0j]) / math.sqrt(2.0)
    first = product_state([y_plus, y_plus, [1.0, 0.0]]).amplitudes
    second = product_state([y_minus, y_minus, [0.0, 1.0]]).amplitudes
    return StateVector(n_sites=3, amplitudes=(first + second) / math.sqrt(2.0))


def _gapped_instances(level: VerifyLevel) -> list[tuple[str, str, int, dict[str, object], dict[int, str]]]:
    instances: list[tuple[str, str, int, dict[str, object], dict[int, str]]] = [
        ("product n=8", "product", 8, {"seed": 7}, {0: "Z", 1: "Z", 2: "Z"}),
        ("graph ring n=8", "graph_ring", 8, {}, {0: "Z", 1: "X", 2: "Z"}),
        ("tfi n=10 h=2J", "tfi", 10, {"J": 1.0, "h": 2.0}, {0: "X", 1: "X", 2: "X"}),
    ]
    if level == "full":
        instances.append(("tfi n=12 h=1.5J", "tfi", 12, {"J": 1.0, "h": 1.5}, {0: "X", 1: "X", 2: "X"}))
    return instances


def check_reverse_bound(level: VerifyLevel) -> list[CheckResult]:
    """Chebyshev residual against its bound, and the least-squares optimum against the Chebyshev residual."""
    results = []
    for label, name, n, params, letters in _gapped_instances(level):
        spec = build_model(name, n, params=params)
        solution = ground_state(spec, solver="iterative" if n > 10 else None, seed=SUITE_SEED)
        omega = solution.ground_state
        disturbances = {
            "projector(4)": local_projector(n, range(4)),
            "pauli(3)": pauli_disturbance(n, letters),
        }
        for gamma_label, gamma in disturbances.items():
            disturbance = make_disturbance(gamma, omega)
            damaged = apply_local_operator(gamma, omega)
            for q in (2, 4, 6, 8):
                result = chebyshev_reverse(spec, omega, disturbance, q, solution=solution)
                results.append(
                    CheckResult(
                        group="reverse_bound",
                        name=f"{label} {gamma_label} q={q}",
                        passed=bool(result.holds),
                        margin=result.margin,
                        detail=f"residual={result.residual:.3e} rhs={result.rhs_bound:.3e}",
                    )
                )
                optimal = optimal_local_reverse(omega, damaged, q)
                results.append(
                    CheckResult(
                        group="reverse_dominance",
                        name=f"{label} {gamma_label} q={q}",
                        passed=optimal.residual <= result.residual + 1e-9,
                        margin=result.residual - optimal.residual,
                        detail=f"optimal={optimal.residual:.3e} chebyshev={result.residual:.3e}",
                    )
                )
    return results


def check_filter_window(count: int = 50) -> list[CheckResult]:
    """``F_R(0) = 1`` and the window cap for random filter parameters."""
    results = []
    for trial in range(count):
        rng = rng_for(SUITE_SEED, trial)
        params = filter_params(
            q=int(rng.integers(0, 21)),
            k=int(rng.integers(1, 5)),
            g=float(rng.uniform(0.1, 3.0)),
            L_size=int(rng.integers(1, 11)),
            delta_e=float(rng.uniform(0.05, 3.0)),
        )
        report = filter_report(params)
        origin_error = abs(report.f_at_zero - 1.0)
        results.append(
            CheckResult(
                group="filter_window",
                name=f"trial {trial} q={params.q} k={params.k}",
                passed=origin_error <= 1e-10 and report.within_cap,
                margin=report.cap - report.sampled_sup,
                detail=f"|F_R(0)-1|={origin_error:.1e}",
            )
        )
    return results


def check_chebyshev_bounds() -> list[CheckResult]:
    results = []
    for n in range(1, 21):
        report = verify_cheby_bounds(n)
        margin = min(report.inside_margin, report.upper_margin, report.lower_margin)
        results.append(CheckResult(group="chebyshev_bounds", name=f"T_{n}", passed=report.passed, margin=margin))
    return results


def check_energy_tail(count: int = 20) -> list[CheckResult]:
    """Squared energy tails of disturbed ground states of random 2-local chains."""
    results = []
    for trial in range(count):
        spec = build_random_two_local(8, seed=trial)
        omega = ground_state(spec, seed=SUITE_SEED).ground_state
        rng = rng_for(SUITE_SEED, 1000 + trial)
        sites = rng.choice(8, size=1 + trial % 2, replace=False)
        letters = {int(s): str(rng.choice(["X", "Y", "Z"])) for s in sites}
        report = energy_tail_check(spec, omega, make_disturbance(pauli_disturbance(8, letters), omega))
        results.append(
            CheckResult(group="energy_tail", name=f"seed {trial} {letters}", passed=report.holds, margin=report.worst_margin)
        )
    return results


def check_ghz_certificate(n: int = 8) -> list[CheckResult]:
    """No operator on fewer than ``n`` sites restores GHZ from one of its branches."""
    ghz = make_special_state("ghz", n)
    branch = apply_local_operator(local_projector(n, [0]), ghz)
    floor = 1.0 / math.sqrt(2.0) - 1e-9
    results = []
    for q in range(n):
        residual = optimal_local_reverse(ghz, branch, q).residual
        results.append(
            CheckResult(group="ghz_certificate", name=f"GHZ({n}) q={q}", passed=residual >= floor, margin=residual - floor)
        )
    return results


def check_lmg_scaling() -> list[CheckResult]:
    report = lmg_scaling_fit([256, 512, 1024, 2048, 4096])
    results = []
    for label, fit, target in (("gap", report.gap_fit, -1.0 / 3.0), ("variance", report.variance_fit, 4.0 / 3.0)):
        error = abs(fit.exponent - target)
        results.append(
            CheckResult(
                group="lmg_scaling",
                name=f"{label} exponent",
                passed=error <= 0.05,
                margin=0.05 - error,
                detail=f"fitted {fit.exponent:.4f} +- {fit.stderr:.1e}, expected {target:.4f}",
            )
        )
    return results


def check_critical_exponents() -> list[CheckResult]:
    report = critical_exponent_inequality(CriticalExponents(z=1.0, eta=0.25, gamma=1.75, nu=1.0, D=1.0))
    return [
        CheckResult(group="critical_exponents", name="1D TFI p = 7/4", passed=report.p == 1.75, margin=0.0),
        CheckResult(
            group="critical_exponents",
            name="1D TFI z >= 1 - eta/2",
            passed=report.satisfied,
            margin=report.lhs_z - report.rhs_fluctuation,
        ),
    ]


def check_locality_gap(trials: int = 100) -> list[CheckResult]:
    """No low-support string connects ``A <= m`` with ``A >= m + h`` once ``2q < h``."""
    results = []
    for trial in range(trials):
        q = 1 + trial % 2
        h = 2.0 * q + 0.5
        A = random_additive(5, seed=trial)
        m = float(rng_for(SUITE_SEED, 2000 + trial).uniform(-3.0, 3.0))
        report = additive_locality_gap_check(A, q, h, m)
        results.append(
            CheckResult(
                group="locality_gap",
                name=f"trial {trial} q={q} h={h}",
                passed=report.violations == 0,
                margin=-report.max_norm,
                detail=f"{report.strings_checked} strings",
            )
        )
    return results


def check_meanfield(level: VerifyLevel, marginals: int = 50) -> list[CheckResult]:
    results = []
    cases = [(f"marginal {trial}", _random_state(3, rng_for(SUITE_SEED, 3000 + trial))) for trial in range(marginals)]
    cases.append(("Y Y correlated", _y_correlated_state()))
    partial_failures = 0
    for name, psi in cases:
        report = projector_decomposition_check(psi, 0, 1)
        partial_failures += not report.holds
        results.append(
            CheckResult(
                group="projector_decomposition",
                name=name,
                passed=report.holds_complete,
                margin=report.rhs_complete - report.lhs,
            )
        )
        results.append(
            CheckResult(
                group="projector_decomposition_four",
                name=name,
                passed=report.holds,
                margin=report.rhs - report.lhs,
                detail="Z and X eigenprojectors only",
                informational=True,
            )
        )
    logger.info(f"four-projector sum below the deviation norm on {partial_failures}/{len(cases)} marginals")

    sizes = list(range(4, 15 if level == "full" else 10))
    totals = [mf_deviation_sum(make_special_state("ghz_w_hybrid", M + 1), 0, range(1, M + 1)).total for M in sizes]
    slope = float(linregress(np.log(sizes), np.log(totals)).slope)
    results.append(
        CheckResult(
            group="meanfield_hybrid",
            name=f"deviation-sum exponent |L|={sizes[0]}..{sizes[-1]}",
            passed=abs(slope - 0.5) <= 0.1,
            margin=0.1 - abs(slope - 0.5),
            detail=f"fitted {slope:.4f}",
        )
    )

    product = product_state(random_site_states(6, SUITE_SEED))
    total = mf_deviation_sum(product, 0, range(1, 6)).total
    results.append(
        CheckResult(group="meanfield_product", name="product n=6", passed=total < 1e-10, margin=1e-10 - total)
    )
    return results


def check_macroscopicity(level: VerifyLevel) -> list[CheckResult]:
    """``N_eff`` brackets: product states, GHZ and a gapped Ising ground state."""
    product = fisher_neff(product_state(random_site_states(6, SUITE_SEED)), seed=SUITE_SEED)
    ghz = fisher_neff(make_special_state("ghz", 8), seed=SUITE_SEED)
    n, h = (12, 1.5) if level == "full" else (10, 2.0)
    tfi = build_model("tfi", n, params={"J": 1.0, "h": h})
    omega = ground_state(tfi, solver="iterative" if n > 10 else None, seed=SUITE_SEED).ground_state
    gapped = fisher_neff(omega, seed=SUITE_SEED)
    return [
        CheckResult(
            group="neff",
            name="product n=6 upper <= 1",
            passed=product.neff_upper <= 1.0 + 1e-9,
            margin=1.0 + 1e-9 - product.neff_upper,
        ),
        CheckResult(
            group="neff", name="GHZ(8) lower >= 8", passed=ghz.neff_lower >= 8.0 - 1e-6, margin=ghz.neff_lower - 8.0 + 1e-6
        ),
        CheckResult(
            group="neff",
            name=f"tfi n={n} h={h}J upper <= 3",
            passed=gapped.neff_upper <= 3.0,
            margin=3.0 - gapped.neff_upper,
            detail=f"bracket [{gapped.neff_lower:.4f}, {gapped.neff_upper:.4f}]",
        ),
    ]


def check_topological() -> list[CheckResult]:
    """Toric-code degeneracies, local indistinguishability and the loop-restricted reverse residual."""
    torus = build_model("toric", 0, "torus", {"Lx": 2, "Ly": 2})
    planar = build_model("toric", 0, "planar", {"Lx": 2, "Ly": 2})
    torus_degeneracy = ground_state(torus).degeneracy
    planar_degeneracy = ground_state(planar).degeneracy
    results = [
        CheckResult(group="toric", name="2x2 torus degeneracy 4", passed=torus_degeneracy == 4, detail=str(torus_degeneracy)),
        CheckResult(
            group="toric", name="2x2 planar degeneracy 1", passed=planar_degeneracy == 1, detail=str(planar_degeneracy)
        ),
    ]
    report = topo_indistinguishability_check(toric_ground_space(torus), support_cutoff=1)
    results.append(
        CheckResult(
            group="toric",
            name="torus indistinguishability cutoff 1",
            passed=report.passed,
            margin=-max(report.worst_diagonal_spread, report.worst_off_diagonal),
            detail=f"{report.checked} strings",
        )
    )

    omega, _ = toric_loop_pair(torus)
    loop = toric_logical_loop(torus)
    n = torus.n_sites
    parity = LocalOperator.from_terms(n, [(0.5, PauliString.identity(n)), (-0.5, loop)])
    branch = apply_local_operator(parity, omega)
    residual = optimal_local_reverse(omega, branch, 1, region=loop.support).residual
    results.append(
        CheckResult(
            group="toric",
            name="loop-restricted reverse q=1",
            passed=residual >= 0.4,
            margin=residual - 0.4,
            detail=f"residual={residual:.6f}",
        )
    )

    cluster = build_model("cluster", 8, "open_degenerate")
    states = list(ground_state(cluster).ground_states)
    symmetric = topo_indistinguishability_check(states, 2, symmetry_generators=cluster.symmetry_generators)
    results.append(
        CheckResult(
            group="spt",
            name="open cluster n=8 symmetric strings cutoff 2",
            passed=symmetric.passed,
            margin=-max(symmetric.worst_diagonal_spread, symmetric.worst_off_diagonal),
            detail=f"{symmetric.checked} strings",
        )
    )
    return results


def verify_suite(level: VerifyLevel = "quick") -> VerifyReport:
    """Run the verification groups for ``level``.

    ``quick`` covers systems of at most 10 sites. ``full`` adds the 12-site Ising instances, the longer
    hybrid-state fit and the LMG scaling fit up to N = 4096. A group that raises is recorded as one
    failed check carrying the error.
    """
    groups: list[tuple[str, Callable[[], list[CheckResult]]]] = [
        ("reverse_bound", lambda: check_reverse_bound(level)),
        ("filter_window", check_filter_window),
        ("chebyshev_bounds", check_chebyshev_bounds),
        ("energy_tail", check_energy_tail),
        ("ghz_certificate", check_ghz_certificate),
        ("critical_exponents", check_critical_exponents),
        ("locality_gap", check_locality_gap),
        ("meanfield", lambda: check_meanfield(level)),
        ("neff", lambda: check_macroscopicity(level)),
        ("topological", check_topological),
    ]
    if level == "full":
        groups.append(("lmg_scaling", check_lmg_scaling))
    report = VerifyReport(level=level)
    for group, run in groups:
        start = time.time()
        try:
            report.checks.extend(run())
        except RevlabError as e:
            logger.error(f"verify group {group} raised: {e}")
            report.checks.append(CheckResult(group=group, name="group", passed=False, detail=str(e)))
        report.seconds[group] = time.time() - start
        logger.info(f"{group}: done in {report.seconds[group]:.1f}s")
    for failure in report.failures:
        logger.warning(f"FAILED {failure.group} / {failure.name}: margin={failure.margin} {failure.detail}")
    return report
