"""Experiment manifest schema and loader."""

from __future__ import annotations

import itertools
import json
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from revlab import __version__
from revlab.errors import ArgumentError, ManifestError
from revlab.models import MODEL_CATALOG, HamiltonianSpec, build_model, toric_logical_loop
from revlab.operators import LocalOperator, PauliString

ExperimentKind = Literal["reverse", "tail", "fluctuation", "lmg_scaling", "meanfield", "macroscopicity", "filter_profile"]
SEED_LIMIT = 2**64


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelConfig(_Strict):
    """Catalog model name, size, boundary and builder parameters."""

    name: str
    n: int = Field(default=0, ge=0)
    boundary: str | None = None
    params: dict[str, Any] = Field(default_factory=dict)

    @field_validator("name")
    @classmethod
    def _known_model(cls, value: str) -> str:
        if value not in MODEL_CATALOG:
            raise ValueError(f"unknown model {value!r}; known: {', '.join(sorted(MODEL_CATALOG))}")
        return value

    @model_validator(mode="after")
    def _known_params(self) -> ModelConfig:
        entry = MODEL_CATALOG[self.name]
        unknown = sorted(set(self.params) - set(entry.params))
        if unknown:
            raise ValueError(f"unknown parameter(s) {unknown} for model {self.name!r}")
        if self.boundary and entry.boundaries and self.boundary not in entry.boundaries:
            raise ValueError(f"boundary {self.boundary!r} not in {entry.boundaries}")
        return self

    def build(self, overrides: dict[str, Any] | None = None) -> HamiltonianSpec:
        """Build the model with grid values applied on top of the configured parameters."""
        overrides = dict(overrides or {})
        n = int(overrides.pop("n", self.n))
        params = {**self.params, **{k: v for k, v in overrides.items() if k in MODEL_CATALOG[self.name].params}}
        return build_model(self.name, n, self.boundary, params)


class DisturbanceConfig(_Strict):
    """A local operator on the model: projector, Pauli string, identity or a toric loop parity."""

    kind: Literal["projector", "pauli", "identity", "loop_parity"] = "projector"
    sites: list[int] | None = None  # None picks `size` distinct sites from the point's random stream
    size: int = Field(default=4, ge=1)
    letters: str = "Z"
    outcome: Literal[1, -1] = 1
    direction: Literal["x", "y"] = "x"

    def resolve_sites(self, n_sites: int, rng: np.random.Generator) -> list[int]:
        if self.sites is not None:
            if any(not 0 <= s < n_sites for s in self.sites):
                raise ArgumentError(f"disturbance sites {self.sites} leave 0..{n_sites - 1}")
            return list(self.sites)
        if self.size > n_sites:
            raise ArgumentError(f"disturbance of size {self.size} on {n_sites} sites")
        return sorted(int(s) for s in rng.choice(n_sites, size=self.size, replace=False))

    def build(self, spec: HamiltonianSpec, rng: np.random.Generator) -> LocalOperator:
        """The disturbance as a LocalOperator on ``spec``'s sites."""
        from revlab.labs.reversibility import local_projector, pauli_disturbance

        n = spec.n_sites
        if self.kind == "identity":
            return LocalOperator.identity(n)
        if self.kind == "loop_parity":
            loop = toric_logical_loop(spec, self.direction)
            return LocalOperator.from_terms(n, [(0.5, PauliString.identity(n)), (-0.5, loop)])
        sites = self.resolve_sites(n, rng)
        if self.kind == "projector":
            return local_projector(n, sites, self.letters[0], self.outcome)
        letters = self.letters * len(sites) if len(self.letters) == 1 else self.letters
        if len(letters) != len(sites):
            raise ArgumentError(f"{len(self.letters)} letters for {len(sites)} sites")
        return pauli_disturbance(n, dict(zip(sites, letters, strict=True)))


class ReverseOptions(_Strict):
    disturbance: DisturbanceConfig = Field(default_factory=DisturbanceConfig)
    methods: list[Literal["chebyshev", "optimal_lsq"]] = Field(default_factory=lambda: ["chebyshev"])
    region: list[int] | None = None


class TailOptions(_Strict):
    disturbance: DisturbanceConfig = Field(default_factory=lambda: DisturbanceConfig(kind="pauli", size=1, letters="X"))


class FluctuationOptions(_Strict):
    letter: Literal["X", "Y", "Z"] = "Z"
    sites: list[int] | None = None
    axis: Literal["x", "y", "z"] = "x"
    fit: Literal["linear", "quadratic"] = "linear"
    fisher: bool = True
    restarts: int = Field(default=16, ge=0)


class LmgScalingOptions(_Strict):
    N_list: list[int] = Field(default_factory=lambda: [256, 512, 1024, 2048, 4096])
    lam: float = 1.0
    h: float = 1.0
    gamma: float = 0.0
    axis: Literal["x", "y", "z"] = "x"
    field_axis: Literal["x", "z"] = "z"


class MeanfieldOptions(_Strict):
    site: int = Field(default=0, ge=0)
    L: list[int] | None = None  # defaults to every other site


class MacroscopicityOptions(_Strict):
    projector: DisturbanceConfig = Field(default_factory=DisturbanceConfig)
    state: Literal["ground", "ghz", "w", "ghz_w_hybrid", "toric_loop"] = "ground"
    method: Literal["chebyshev", "optimal_lsq"] = "chebyshev"
    region: list[int] | None = None
    symmetry_restricted: bool = False


class FilterProfileOptions(_Strict):
    q: int = Field(default=8, ge=0)
    L_size: int = Field(default=4, ge=1)
    points: int = Field(default=200, ge=2)
    x_max: float | None = None  # defaults to 1.5 (2 E_c + dE)


OPTION_MODELS: dict[str, type[BaseModel]] = {
    "reverse": ReverseOptions,
    "tail": TailOptions,
    "fluctuation": FluctuationOptions,
    "lmg_scaling": LmgScalingOptions,
    "meanfield": MeanfieldOptions,
    "macroscopicity": MacroscopicityOptions,
    "filter_profile": FilterProfileOptions,
}
_Q_KINDS = frozenset({"reverse", "macroscopicity", "filter_profile"})
_Q_REQUIRED = frozenset({"reverse", "macroscopicity"})


class OutputPaths(_Strict):
    """Every file a run may write."""

    results: Path = Path("results.csv")
    summary: Path = Path("summary.json")
    echo: Path = Path("manifest.echo.json")

    def resolved(self, base: Path) -> OutputPaths:
        return OutputPaths(**{name: path if path.is_absolute() else base / path for name, path in self})


class ExperimentManifest(_Strict):
    """One experiment: kind, model, parameter grid, seed and output paths."""

    kind: ExperimentKind
    model: ModelConfig | None = None
    grid: dict[str, list[Any]] = Field(default_factory=dict)
    options: dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)
    outputs: OutputPaths = Field(default_factory=OutputPaths)
    tool_version: str = __version__

    @model_validator(mode="after")
    def _check_grid(self) -> ExperimentManifest:
        if self.kind != "lmg_scaling" and self.model is None:
            raise ValueError(f"experiment kind {self.kind!r} needs a model")
        allowed = {"n"} | (set(MODEL_CATALOG[self.model.name].params) if self.model else set())
        if self.kind in _Q_KINDS:
            allowed.add("q")
        for key, values in self.grid.items():
            if key not in allowed:
                raise ValueError(f"grid key {key!r} not in {sorted(allowed)}")
            if not values:
                raise ValueError(f"grid key {key!r} has no values")
        if self.kind in _Q_REQUIRED and "q" not in self.grid:
            raise ValueError(f"experiment kind {self.kind!r} needs a 'q' grid")
        return self

    def grid_points(self) -> list[dict[str, Any]]:
        """Cartesian product of the grid in declaration order; one empty point for an empty grid."""
        keys = list(self.grid)
        return [dict(zip(keys, combo, strict=True)) for combo in itertools.product(*(self.grid[k] for k in keys))]

    def typed_options(self) -> BaseModel:
        return OPTION_MODELS[self.kind].model_validate(self.options)


def _manifest_error(exc: ValidationError, prefix: str = "") -> ManifestError:
    first = exc.errors()[0]
    key = ".".join(str(part) for part in (prefix, *first["loc"]) if part != "")
    return ManifestError(first["msg"], key=key or None)


def parse_manifest(data: dict[str, Any], base: Path | None = None) -> ExperimentManifest:
    """Validate a manifest document and resolve option defaults and output paths.

    Raises:
        ManifestError: On any schema violation, naming the offending key
    """
    try:
        manifest = ExperimentManifest.model_validate(data)
    except ValidationError as exc:
        raise _manifest_error(exc) from exc
    try:
        options = manifest.typed_options()
    except ValidationError as exc:
        raise _manifest_error(exc, "options") from exc
    outputs = manifest.outputs.resolved(base) if base is not None else manifest.outputs
    return manifest.model_copy(update={"options": options.model_dump(mode="json"), "outputs": outputs})


def load_manifest(path: Path) -> ExperimentManifest:
    """Read a JSON manifest; relative output paths resolve against its directory.

    Raises:
        ManifestError: If the file is not a JSON object or violates the schema
    """
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object")
    return parse_manifest(data, base=path.parent)
