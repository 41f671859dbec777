"""Declarative problem files (YAML) and the pipeline built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .bounds import CONVENTIONS, BoundInputs, ProblemContext
from .discretization import BoundaryCondition, assemble_problem
from .eigensolver import SolverConfig, solve
from .errors import ConfigError, SpectralLabError
from .fields import (FieldNorms, ScalarFieldExpr, VectorPotentialSpec, constant,
                     constant_field_gauge, field_norms, parse_field)
from .geometry import DomainSpec, GeometryMeasures, measure
from .oracles import AnalyticSpectrum, disk_dirichlet_spectrum, rectangle_spectrum
from .verify import ConvergenceStudy, convergence_study

TOP_LEVEL_KEYS = {"domain", "dimension", "boundary", "potential", "vector_potential",
                  "grid_sizes", "solver", "k_max", "convention", "melas_constant",
                  "norm_resolution", "mode", "force_bounds", "output"}


@dataclass
class ProblemConfig:
    domain: DomainSpec
    bc: BoundaryCondition
    potential: ScalarFieldExpr | None
    vector_potential: VectorPotentialSpec | None
    grid_sizes: list[int]
    solver: SolverConfig
    k_max: int
    conventions: tuple[str, ...] = CONVENTIONS
    melas_constant: float = 0.0
    norm_resolution: int = 64
    mode: str = "discretized"
    force_bounds: bool = False
    output_dir: Path = Path("out")
    source: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.domain.dimension


def _get(mapping: dict, key: str, path: str, kind=None, default=...):
    if key not in mapping:
        if default is ...:
            raise ConfigError(path, "missing required key")
        return default
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(path, f"expected {getattr(kind, '__name__', kind)}, "
                                f"got {type(value).__name__}")
    return value


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    return float(value)


def _expr(text, d: int, path: str) -> ScalarFieldExpr:
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        text = repr(float(text))
    if not isinstance(text, str):
        raise ConfigError(path, f"expected an expression string, got {text!r}")
    try:
        return parse_field(text, d)
    except SpectralLabError as exc:
        raise ConfigError(path, str(exc)) from exc


def read_mask_file(path: Path) -> np.ndarray:
    """2D text mask: one row per line, '1' or '#' marks an interior cell."""
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        rows.append([ch in "1#" for ch in line if not ch.isspace()])
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError("mask rows must be non-empty and of equal length")
    # row 0 of the file is the top of the picture, i.e. the largest y
    return np.array(rows, dtype=bool)[::-1].T.copy()


def _domain(raw: dict, base: Path) -> DomainSpec:
    shape = _get(raw, "shape", "domain.shape", str)
    try:
        if shape == "rectangle":
            lengths = _get(raw, "lengths", "domain.lengths", list)
            return DomainSpec.rectangle(*[_number(x, "domain.lengths") for x in lengths])
        if shape == "disk":
            return DomainSpec.disk(_number(_get(raw, "radius", "domain.radius"), "domain.radius"))
        if shape == "mask":
            size = _number(_get(raw, "cell_size", "domain.cell_size"), "domain.cell_size")
            if "cells" in raw:
                return DomainSpec.mask(np.array(raw["cells"], dtype=bool), size)
            mask_path = base / _get(raw, "mask_file", "domain.mask_file", str)
            if not mask_path.exists():
                raise ConfigError("domain.mask_file", f"file not found: {mask_path}")
            try:
                cells = read_mask_file(mask_path)
            except ValueError as exc:
                raise ConfigError("domain.mask_file", str(exc)) from exc
            return DomainSpec.mask(cells, size)
    except ConfigError:
        raise
    except SpectralLabError as exc:
        raise ConfigError("domain", str(exc)) from exc
    raise ConfigError("domain.shape", f"unknown shape {shape!r} (rectangle, disk or mask)")


def _boundary(raw: dict, d: int) -> BoundaryCondition:
    kind = _get(raw, "kind", "boundary.kind", str)
    scheme = raw.get("scheme", "first-order")
    if scheme not in ("first-order", "second-order"):
        raise ConfigError("boundary.scheme", f"unknown scheme {scheme!r}")
    if kind == "dirichlet":
        return BoundaryCondition.dirichlet()
    if kind == "neumann":
        return BoundaryCondition("robin", constant(0.0, d), scheme)
    if kind == "robin":
        sigma = _expr(_get(raw, "sigma", "boundary.sigma"), d, "boundary.sigma")
        return BoundaryCondition.robin(sigma, scheme)
    raise ConfigError("boundary.kind", f"unknown kind {kind!r} (dirichlet, neumann or robin)")


def _vector_potential(raw, d: int) -> VectorPotentialSpec | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError("vector_potential", "expected a mapping")
    if "constant_field" in raw:
        cf = raw["constant_field"]
        if not isinstance(cf, dict):
            raise ConfigError("vector_potential.constant_field", "expected a mapping")
        if d != 2:
            raise ConfigError("vector_potential.constant_field", "constant fields need d = 2")
        B = _number(_get(cf, "B", "vector_potential.constant_field.B"),
                    "vector_potential.constant_field.B")
        gauge = cf.get("gauge", "symmetric")
        if gauge not in ("symmetric", "landau"):
            raise ConfigError("vector_potential.constant_field.gauge", f"unknown gauge {gauge!r}")
        return constant_field_gauge(B, gauge)
    comps = _get(raw, "components", "vector_potential.components", list)
    if len(comps) != d:
        raise ConfigError("vector_potential.components", f"need {d} components, got {len(comps)}")
    return VectorPotentialSpec(tuple(_expr(c, d, f"vector_potential.components[{i}]")
                                     for i, c in enumerate(comps)))


def parse_config(raw: Any, base_dir: Path | str = ".") -> ProblemConfig:
    """Validate a decoded YAML mapping; every error names its key."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "the problem file must be a mapping")
    unknown = sorted(set(raw) - TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    base = Path(base_dir)
    domain = _domain(_get(raw, "domain", "domain", dict), base)
    d = domain.dimension
    if "dimension" in raw and raw["dimension"] != d:
        raise ConfigError("dimension", f"domain has dimension {d}, config says {raw['dimension']}")
    bc = _boundary(_get(raw, "boundary", "boundary", dict), d)
    V = raw.get("potential")
    V = None if V is None else _expr(V, d, "potential")
    A = _vector_potential(raw.get("vector_potential"), d)

    grid_sizes = _get(raw, "grid_sizes", "grid_sizes", list, default=[32, 64, 128])
    if not grid_sizes or not all(isinstance(n, int) and not isinstance(n, bool) and n > 0
                                 for n in grid_sizes):
        raise ConfigError("grid_sizes", "expected a non-empty list of positive integers")
    if any(b <= a for a, b in zip(grid_sizes, grid_sizes[1:])):
        raise ConfigError("grid_sizes", "grid sizes must be strictly increasing")

    k_max = _get(raw, "k_max", "k_max", int, default=10)
    if k_max < 1:
        raise ConfigError("k_max", "must be >= 1")
    s = _get(raw, "solver", "solver", dict, default={})
    try:
        solver = SolverConfig(count=int(s.get("count", k_max + 1)),
                              tolerance=float(s.get("tolerance", 1e-10)),
                              max_iterations=int(s.get("max_iterations", 20000)),
                              seed=int(s.get("seed", 0)))
    except (TypeError, ValueError) as exc:
        raise ConfigError("solver", str(exc)) from exc
    if solver.count < k_max + 1:
        raise ConfigError("solver.count", f"must be >= k_max + 1 = {k_max + 1}")

    conv = raw.get("convention", "both")
    conventions = _conventions(conv, "convention")
    melas = _number(raw.get("melas_constant", 0.0), "melas_constant")
    if melas < 0:
        raise ConfigError("melas_constant", "must be >= 0")
    mode = raw.get("mode", "discretized")
    if mode not in ("discretized", "oracle"):
        raise ConfigError("mode", f"unknown mode {mode!r} (discretized or oracle)")
    out = _get(raw, "output", "output", dict, default={})
    res = raw.get("norm_resolution", 64)
    if not isinstance(res, int) or res < 8:
        raise ConfigError("norm_resolution", "must be an integer >= 8")
    return ProblemConfig(domain=domain, bc=bc, potential=V, vector_potential=A,
                         grid_sizes=list(grid_sizes), solver=solver, k_max=k_max,
                         conventions=conventions, melas_constant=melas, norm_resolution=res,
                         mode=mode, force_bounds=bool(raw.get("force_bounds", False)),
                         output_dir=base / str(out.get("dir", "out")), source=raw)


def _conventions(value, key) -> tuple[str, ...]:
    if value == "both":
        return CONVENTIONS
    if value in CONVENTIONS:
        return (value,)
    raise ConfigError(key, f"unknown convention {value!r} (surface, ball or both)")


def load_config(path) -> ProblemConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError("--config", f"file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError("<root>", f"malformed YAML: {exc}") from exc
    return parse_config(raw, path.parent)


# -- pipeline ----------------------------------------------------------------

@dataclass
class ProblemSetup:
    config: ProblemConfig
    measures: GeometryMeasures
    norms: FieldNorms

    def bound_inputs(self, k: int = 1, convention: str = "ball") -> BoundInputs:
        return BoundInputs(d=self.config.dimension, k=k, measures=self.measures,
                           a_l2_sq=self.norms.a_l2_sq, v_l1=self.norms.v_l1,
                           sigma_sup=self.norms.sigma_sup, convention=convention,
                           melas_constant=self.config.melas_constant)

    def context(self) -> ProblemContext:
        cfg = self.config
        A = cfg.vector_potential
        a_zero = A is None or A.is_zero
        const_field = A is not None and A.is_constant_field
        return ProblemContext(d=cfg.dimension, bc=cfg.bc.label, sigma_sign=self.norms.sigma_sign,
                              a_zero=a_zero, constant_field=const_field,
                              v_zero=cfg.potential is None or cfg.potential.is_zero)

    def describe(self) -> dict:
        cfg = self.config
        dom = cfg.domain
        desc = {"domain": {"kind": dom.kind, "dimension": dom.dimension,
                           "smooth_boundary": dom.smooth_boundary},
                "boundary": cfg.bc.label, "scheme": cfg.bc.scheme,
                "sigma": None if cfg.bc.sigma is None else str(cfg.bc.sigma),
                "potential": None if cfg.potential is None else str(cfg.potential),
                "vector_potential": None if cfg.vector_potential is None
                else [str(c) for c in cfg.vector_potential.components],
                "grid_sizes": cfg.grid_sizes, "k_max": cfg.k_max, "mode": cfg.mode,
                "seed": cfg.solver.seed, "tolerance": cfg.solver.tolerance,
                "measures": {"volume": self.measures.volume,
                             "boundary_area": self.measures.boundary_area,
                             "inertia": self.measures.inertia},
                "norms": {"v_l1": self.norms.v_l1, "a_l2_sq": self.norms.a_l2_sq,
                          "sigma_sup": self.norms.sigma_sup, "sigma_sign": self.norms.sigma_sign,
                          "unresolved": self.norms.unresolved}}
        if dom.kind == "rectangle":
            desc["domain"]["lengths"] = list(dom.lengths)
        elif dom.kind == "disk":
            desc["domain"]["radius"] = dom.radius
        return desc


def prepare(cfg: ProblemConfig) -> ProblemSetup:
    sigma = cfg.bc.sigma if cfg.bc.kind == "robin" else None
    norms = field_norms(cfg.potential, cfg.vector_potential, sigma, cfg.domain,
                        cfg.norm_resolution)
    return ProblemSetup(cfg, measure(cfg.domain), norms)


def oracle_spectrum(cfg: ProblemConfig, count: int | None = None) -> AnalyticSpectrum:
    """Analytic spectrum for field-free rectangles (constant V shifts it) and the Dirichlet disk."""
    count = count or cfg.solver.count
    A = cfg.vector_potential
    if A is not None and not A.is_zero:
        raise ConfigError("mode", "oracle mode needs a zero vector potential")
    shift = 0.0
    if cfg.potential is not None:
        c = cfg.potential.constant_value
        if c is None:
            raise ConfigError("mode", "oracle mode needs a constant potential")
        shift = c
    dom, bc = cfg.domain, cfg.bc
    if dom.kind == "rectangle":
        if bc.kind == "dirichlet":
            spec = rectangle_spectrum(dom.lengths, "dirichlet", count)
        else:
            sigma = bc.sigma.constant_value if bc.sigma is not None else 0.0
            if sigma is None or sigma < 0:
                raise ConfigError("mode", "oracle mode needs a constant sigma >= 0")
            kind = "neumann" if sigma == 0 else "robin"
            spec = rectangle_spectrum(dom.lengths, kind, count, sigma)
    elif dom.kind == "disk" and bc.kind == "dirichlet":
        spec = disk_dirichlet_spectrum(dom.radius, count)
    else:
        raise ConfigError("mode", f"no oracle for a {dom.kind} with {bc.label} boundary")
    if shift:
        spec = AnalyticSpectrum(spec.eigenvalues + shift, spec.labels, spec.source)
    return spec


@dataclass
class LevelResult:
    n: int
    h: float
    spectrum: Any


def solve_levels(setup: ProblemSetup, method: str = "auto") -> list[LevelResult]:
    cfg = setup.config
    out = []
    for n in cfg.grid_sizes:
        op = assemble_problem(cfg.domain, n, cfg.bc, cfg.vector_potential, cfg.potential,
                              norms=setup.norms)
        out.append(LevelResult(n, op.grid.h, solve(op, cfg.solver, method=method)))
    return out


def study_from_levels(levels: list[LevelResult]) -> ConvergenceStudy | None:
    if len(levels) < 3:
        return None
    return convergence_study([lv.n for lv in levels], [lv.h for lv in levels],
                             [lv.spectrum for lv in levels])
