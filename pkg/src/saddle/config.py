"""Run configurations: flat key-value text files, one section per component.

A solve config looks like::

    [problem]
    kind = dirichlet          ; or neumann
    domain = -1 1 -1 1        ; x_lo x_hi [y_lo y_hi]; two numbers = 1D
    n = 128
    ell = 0                   ; dirichlet only
    gamma = 3                 ; dirichlet only
    a = 1                     ; neumann only

    [support]
    files =
        runs/u1/solution.grid

    [initial]
    omega1 = halfplane(1, 0, 0)      ; dirichlet region recipes
    omega2 = complement(halfplane(1, 0, 0))
    ; rho0 = 1 - cos(theta)          ; neumann boundary data

    [rule]
    tag = zh
    sigma = 1e-4
    rho = 0.2
    M = 10
    eta = 0.85
    lambda_min = 1e-6
    lambda_max = 10
    lambda0 = 0.1

    [trial]
    source = bb1

    [stopping]
    grad_tol = 1e-5
    residual_tol = 5e-5
    max_iter = 5000

    [output]
    dir = runs/u2

Comparison configs reuse [problem], [rule] and [stopping] and add a
[compare] section plus one [target:NAME] section per target.  File paths
are resolved relative to the config file.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError, DimensionMismatchError, GridFileError
from .grid import GridSpec, read_solution
from .hilbert import SupportSpace
from .problems import DirichletProblem, NeumannProblem
from .regions import BoundaryData, Region, parse_region
from .solver import SolverConfig

COMPARE_METHODS = ("exact", "armijo", "zh", "gll",
                   "bb1", "pbb1", "bb2", "pbb2", "abb", "apbb")


@dataclass(frozen=True)
class ProblemConfig:
    kind: str
    bounds: tuple
    n: int
    ell: float = 0.0
    gamma: float = 3.0
    a: float = 1.0

    def grid(self) -> GridSpec:
        if len(self.bounds) == 2:
            return GridSpec.interval(self.bounds[0], self.bounds[1], self.n)
        return GridSpec.rectangle(*self.bounds, self.n)

    def build(self):
        try:
            if self.kind == "dirichlet":
                return DirichletProblem(self.grid(), ell=self.ell, gamma=self.gamma)
            if self.kind == "neumann":
                return NeumannProblem(self.grid(), a=self.a, gamma=self.gamma)
        except ValueError as exc:
            raise ConfigError(f"problem: {exc}") from exc
        raise ConfigError(f"problem.kind must be dirichlet or neumann, "
                          f"got {self.kind!r}")


@dataclass(frozen=True)
class InitialConfig:
    omega1: Optional[Region] = None
    omega2: Optional[Region] = None
    rho0: Optional[BoundaryData] = None

    def build_direction(self, problem):
        if isinstance(problem, DirichletProblem):
            if self.omega1 is None:
                raise ConfigError("initial.omega1 is required for dirichlet problems")
            return problem.initial_direction(self.omega1,
                                             self.omega2 or parse_region("empty"))
        if self.rho0 is None:
            raise ConfigError("initial.rho0 is required for neumann problems")
        return problem.initial_direction(self.rho0)


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemConfig
    support_files: tuple
    initial: InitialConfig
    solver: SolverConfig
    out_dir: Path

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        parser = _read(path)
        problem = _parse_problem(parser)
        initial = _parse_initial(parser, problem.kind)
        solver = _parse_solver(parser)
        files = _parse_files(parser, "support", "files", path.parent)
        if not parser.has_option("output", "dir"):
            raise ConfigError("output.dir is required")
        out_dir = _resolve(parser.get("output", "dir"), path.parent)
        _reject_unknown(parser, {"problem", "support", "initial", "rule",
                                 "trial", "stopping", "output"})
        return cls(problem, tuple(files), initial, solver, out_dir)


@dataclass(frozen=True)
class TargetConfig:
    name: str
    support_files: tuple
    initial: InitialConfig


@dataclass(frozen=True)
class CompareConfig:
    problem: ProblemConfig
    methods: tuple
    targets: tuple
    base_solver: SolverConfig  # carries shared rule/stopping parameters
    globalization: str = "zh"
    concurrency: int = 1
    out_path: Path = field(default=Path("comparison.csv"))

    def solver_for(self, method: str) -> SolverConfig:
        base = self.base_solver
        if method in ("exact", "armijo"):
            rule, trial = method, "fixed"
        elif method in ("zh", "gll"):
            rule, trial = method, "fixed"
        elif method in COMPARE_METHODS:
            rule, trial = self.globalization, method
        else:
            raise ConfigError(f"compare: unknown method {method!r}")
        return _replace_solver(base, rule=rule, trial=trial)

    @classmethod
    def from_file(cls, path) -> "CompareConfig":
        path = Path(path)
        parser = _read(path)
        problem = _parse_problem(parser)
        solver = _parse_solver(parser, require_rule_tag=False)
        if not parser.has_section("compare"):
            raise ConfigError("compare section is required")
        methods = tuple(parser.get("compare", "methods", fallback="").split())
        if not methods:
            raise ConfigError("compare.methods must list at least one method")
        for m in methods:
            if m not in COMPARE_METHODS:
                raise ConfigError(f"compare.methods: unknown method {m!r} "
                                  f"(choose from {COMPARE_METHODS})")
        globalization = parser.get("compare", "globalization", fallback="zh")
        if globalization not in ("zh", "gll"):
            raise ConfigError("compare.globalization must be zh or gll")
        concurrency = _to_int(parser.get("compare", "concurrency", fallback="1"),
                              "compare.concurrency")
        if concurrency < 1:
            raise ConfigError("compare.concurrency must be >= 1")
        out_path = _resolve(parser.get("compare", "out", fallback="comparison.csv"),
                            path.parent)
        targets = []
        for section in parser.sections():
            if not section.startswith("target:"):
                continue
            name = section.split(":", 1)[1]
            files = _parse_files(parser, section, "support", path.parent)
            initial = _parse_initial(parser, problem.kind, section=section)
            targets.append(TargetConfig(name, tuple(files), initial))
        if not targets:
            raise ConfigError("compare config needs at least one [target:NAME] section")
        _reject_unknown(parser, {"problem", "rule", "stopping", "compare"},
                        prefixes=("target:",))
        return cls(problem, methods, tuple(targets), solver, globalization,
                   concurrency, out_path)


def load_support(problem, files) -> SupportSpace:
    """Read support solutions and bind them to the problem's grid."""
    basis = []
    for f in files:
        w = read_solution(f)
        if w.grid != problem.grid:
            raise GridFileError(
                f"{f}: solution grid {w.grid.grid_id} does not match the "
                f"problem grid {problem.grid.grid_id}"
            )
        basis.append(w)
    try:
        return SupportSpace(basis, problem.gram)
    except DimensionMismatchError as exc:
        raise GridFileError(str(exc)) from exc


# --- parsing helpers -------------------------------------------------------

def _read(path: Path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None,
                                       inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return parser


def _resolve(text: str, base: Path) -> Path:
    p = Path(text.strip())
    return p if p.is_absolute() else base / p


def _to_float(text: str, label: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{label}: expected a number, got {text!r}")


def _to_int(text: str, label: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{label}: expected an integer, got {text!r}")


def _parse_files(parser, section, option, base: Path):
    if not parser.has_option(section, option):
        return []
    text = parser.get(section, option)
    return [_resolve(tok, base) for tok in text.split()]


def _parse_problem(parser) -> ProblemConfig:
    if not parser.has_section("problem"):
        raise ConfigError("problem section is required")
    sec = parser["problem"]
    kind = sec.get("kind", "").strip()
    if kind not in ("dirichlet", "neumann"):
        raise ConfigError(f"problem.kind must be dirichlet or neumann, got {kind!r}")
    dom = sec.get("domain", "").split()
    if len(dom) not in (2, 4):
        raise ConfigError("problem.domain needs 2 (interval) or 4 (rectangle) numbers")
    bounds = tuple(_to_float(t, "problem.domain") for t in dom)
    if "n" not in sec:
        raise ConfigError("problem.n is required")
    n = _to_int(sec["n"], "problem.n")
    cfg = ProblemConfig(
        kind=kind, bounds=bounds, n=n,
        ell=_to_float(sec.get("ell", "0"), "problem.ell"),
        gamma=_to_float(sec.get("gamma", "3"), "problem.gamma"),
        a=_to_float(sec.get("a", "1"), "problem.a"),
    )
    cfg.build()  # validate eagerly
    return cfg


def _parse_initial(parser, kind: str, section: str = "initial") -> InitialConfig:
    if not parser.has_section(section):
        raise ConfigError(f"{section} section is required")
    sec = parser[section]
    keys = set(sec.keys()) - {"support"}
    if kind == "dirichlet":
        if "rho0" in keys:
            raise ConfigError(f"{section}.rho0 applies to neumann problems only")
        if "omega1" not in keys:
            raise ConfigError(f"{section}.omega1 is required for dirichlet problems")
        omega1 = parse_region(sec["omega1"])
        omega2 = parse_region(sec.get("omega2", "empty"))
        return InitialConfig(omega1=omega1, omega2=omega2)
    if keys & {"omega1", "omega2"}:
        raise ConfigError(f"{section}.omega1/omega2 apply to dirichlet problems only")
    if "rho0" not in keys:
        raise ConfigError(f"{section}.rho0 is required for neumann problems")
    return InitialConfig(rho0=BoundaryData(sec["rho0"]))


def _parse_solver(parser, require_rule_tag: bool = True) -> SolverConfig:
    kwargs = {}
    if parser.has_section("rule"):
        sec = parser["rule"]
        if "tag" in sec:
            kwargs["rule"] = sec["tag"].strip()
        for key, name in (("sigma", "sigma"), ("rho", "rho"), ("eta", "eta"),
                          ("lambda_min", "lam_min"), ("lambda_max", "lam_max"),
                          ("lambda0", "lam0")):
            if key in sec:
                kwargs[name] = _to_float(sec[key], f"rule.{key}")
        if "m" in sec:
            kwargs["M"] = _to_int(sec["m"], "rule.M")
    if require_rule_tag and "rule" not in kwargs:
        raise ConfigError("rule.tag is required")
    if parser.has_section("trial"):
        if parser.has_option("trial", "source"):
            kwargs["trial"] = parser.get("trial", "source").strip()
    elif require_rule_tag:
        kwargs.setdefault("trial", "fixed")
    if parser.has_section("stopping"):
        sec = parser["stopping"]
        if "grad_tol" in sec:
            kwargs["grad_tol"] = _to_float(sec["grad_tol"], "stopping.grad_tol")
        if "residual_tol" in sec:
            kwargs["residual_tol"] = _to_float(sec["residual_tol"],
                                               "stopping.residual_tol")
        if "max_iter" in sec:
            kwargs["max_iter"] = _to_int(sec["max_iter"], "stopping.max_iter")
    kwargs.setdefault("rule", "armijo")
    kwargs.setdefault("trial", "fixed")
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"rule/stopping: {exc}") from exc


def _replace_solver(base: SolverConfig, **kwargs) -> SolverConfig:
    from dataclasses import replace
    try:
        return replace(base, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"rule: {exc}") from exc


def _reject_unknown(parser, known, prefixes=()):
    for section in parser.sections():
        if section in known or any(section.startswith(p) for p in prefixes):
            continue
        raise ConfigError(f"unknown config section [{section}]")
