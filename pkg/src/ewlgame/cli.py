"""Command-line front end.

Every failure prints one line ``ewlgame: error[<kind>]: <message>`` to
stderr and exits with the status for that kind (see ``EXIT_CODES``).
"""
from __future__ import annotations

import argparse
import ast
import math
import operator
import os
import re
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import checks
from .equilibrium import SolverError, SolverSettings, check_pareto_nash_coincidence, symmetric_nash
from .game_core import (
    GameMatrix2,
    PrisonersDilemmaParams,
    StrategyDensity,
    ValidationError,
    classical_payoff,
    conjugate_payoff,
)
from .quantum_engine import (
    CASE3,
    CASE4,
    PSEUDOCLASSICAL,
    TRIVIAL,
    DensityPayoff,
    PhaseProfile,
    QuantumStrategy,
    effective_decomposition,
    payoff_from_decomposition,
    quantum_payoff,
    quantum_payoff_player2,
)
from .scenarios import ClosedFormMismatch, gamma_sweep, phase_sweep

PROG = "ewlgame"
EXIT_CODES = {"verify": 1, "config": 2, "numeric": 3, "io": 4}
NAMED_PHASES = {"trivial": TRIVIAL, "pseudo": PSEUDOCLASSICAL, "case3": CASE3, "case4": CASE4}

GAMMA_SWEEP_HEADER = ("gamma", "t_star", "payoff_classical", "payoff_quantum", "branch", "eq_count")
PHASE_SWEEP_HEADER = ("xi0", "xi1", "gamma", "t_star", "payoff_classical", "payoff_quantum")
NASH_HEADER = ("gamma", "t_star", "payoff_classical", "payoff_quantum", "kind",
               "pareto_efficient", "pareto_dominant")


class CliError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


def _config_error(message: str) -> CliError:
    return CliError("config", message)


# ---------------------------------------------------------------- parsing

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_angle(text: str) -> float:
    """Evaluate a radian expression built from numbers, ``pi`` and ``+ - * /``.

    ``pi/4`` evaluates to ``math.pi / 4``; ``3pi/4`` is read as ``3*pi/4``.
    """
    src = re.sub(r"(\d)\s*pi\b", r"\1*pi", str(text).strip())
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError:
        raise _config_error(f"cannot parse angle {text!r}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise _config_error(f"unsupported token in angle {text!r}")

    try:
        value = ev(tree)
    except ZeroDivisionError:
        raise _config_error(f"division by zero in angle {text!r}") from None
    if not math.isfinite(value):
        raise _config_error(f"angle {text!r} is not finite")
    return value


def _floats(text: str, n: int, what: str, angle=False) -> tuple[float, ...]:
    parts = [p for p in str(text).split(",")]
    if len(parts) != n:
        raise _config_error(f"{what} needs {n} comma-separated values, got {text!r}")
    out = []
    for p in parts:
        if angle:
            out.append(parse_angle(p))
            continue
        try:
            v = float(p)
        except ValueError:
            raise _config_error(f"{what}: {p.strip()!r} is not a number") from None
        if not math.isfinite(v):
            raise _config_error(f"{what}: {p.strip()!r} is not finite")
        out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class GridSpec:
    """A single value (``count == 1``) or an inclusive ``min:max:count`` grid."""

    lo: float
    hi: float
    count: int

    @classmethod
    def parse(cls, text: str, what: str) -> GridSpec:
        parts = str(text).split(":")
        if len(parts) == 1:
            v = parse_angle(parts[0])
            return cls(v, v, 1)
        if len(parts) != 3:
            raise _config_error(f"{what} must be a value or min:max:count, got {text!r}")
        try:
            count = int(parts[2])
        except ValueError:
            raise _config_error(f"{what}: count {parts[2]!r} is not an integer") from None
        if count < 2:
            raise _config_error(f"{what}: sweep count must be at least 2, got {count}")
        return cls(parse_angle(parts[0]), parse_angle(parts[1]), count)

    @property
    def is_single(self) -> bool:
        return self.count == 1

    def values(self) -> np.ndarray:
        if self.is_single:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.count)

    def format(self) -> str:
        if self.is_single:
            return _fmt(self.lo)
        return f"{_fmt(self.lo)}:{_fmt(self.hi)}:{self.count}"


def _fmt(v: float) -> str:
    v = float(v)
    return format(v + 0.0 if v == 0.0 else v, ".17g")  # no "-0"


def _parse_int(text: str, what: str, minimum: int) -> int:
    try:
        v = int(str(text).strip())
    except ValueError:
        raise _config_error(f"{what} must be an integer, got {text!r}") from None
    if v < minimum:
        raise _config_error(f"{what} must be at least {minimum}, got {v}")
    return v


def _parse_tol(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise _config_error(f"tol must be a number, got {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise _config_error(f"tol must be positive, got {text!r}")
    return v


def _parse_phases(text: str):
    key = str(text).strip().lower()
    if key in NAMED_PHASES:
        return key
    return _floats(text, 2, "phases", angle=True)


# ---------------------------------------------------------------- config

@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; ``None`` means "use the command default"."""

    pd: tuple[float, float, float] | None = None
    matrix: tuple[float, float, float, float] | None = None
    gamma: GridSpec | None = None
    phases: str | tuple[float, float] = "pseudo"
    x: tuple[float, float] | None = None
    y: tuple[float, float] | None = None
    xi0: GridSpec | None = None
    xi1: GridSpec | None = None
    grid: int = 2001
    oracle_grid: int = 1001
    tol: float = 1e-9
    seed: int = 0
    samples: int = 1000
    jobs: int = 1
    out: str | None = None

    def game(self):
        if (self.pd is None) == (self.matrix is None):
            raise _config_error("exactly one of pd or matrix is required")
        try:
            if self.pd is not None:
                return PrisonersDilemmaParams(*self.pd)
            return GameMatrix2(*self.matrix)
        except ValidationError as exc:
            raise _config_error(str(exc)) from None

    def game_matrix(self) -> GameMatrix2:
        g = self.game()
        return g.matrix() if isinstance(g, PrisonersDilemmaParams) else g

    def phase_profile(self) -> PhaseProfile:
        if isinstance(self.phases, str):
            return NAMED_PHASES[self.phases]
        return PhaseProfile(*self.phases)

    def settings(self) -> SolverSettings:
        return SolverSettings(grid_n=self.grid, tol=self.tol, oracle_grid=self.oracle_grid)

    def single_gamma(self, default: float | None = None) -> float:
        if self.gamma is None:
            if default is None:
                raise _config_error("gamma is required")
            return default
        if not self.gamma.is_single:
            raise _config_error("this command needs a single gamma value, not a sweep")
        return self.gamma.lo

    def serialize(self) -> str:
        """Render as a ``key = value`` file accepted by :func:`parse_config_text`."""
        lines = []
        for key, (name, _, fmt) in CONFIG_KEYS.items():
            value = getattr(self, name)
            if value is None:
                continue
            lines.append(f"{key} = {fmt(value)}")
        return "\n".join(lines) + "\n"


def _fmt_tuple(v):
    return ",".join(_fmt(x) for x in v)


def _fmt_phases(v):
    return v if isinstance(v, str) else _fmt_tuple(v)


# key in file/flags -> (field name, parser, formatter)
CONFIG_KEYS = {
    "pd": ("pd", lambda s: _floats(s, 3, "pd"), _fmt_tuple),
    "matrix": ("matrix", lambda s: _floats(s, 4, "matrix"), _fmt_tuple),
    "gamma": ("gamma", lambda s: GridSpec.parse(s, "gamma"), GridSpec.format),
    "phases": ("phases", _parse_phases, _fmt_phases),
    "x": ("x", lambda s: _floats(s, 2, "x"), _fmt_tuple),
    "y": ("y", lambda s: _floats(s, 2, "y"), _fmt_tuple),
    "xi0": ("xi0", lambda s: GridSpec.parse(s, "xi0"), GridSpec.format),
    "xi1": ("xi1", lambda s: GridSpec.parse(s, "xi1"), GridSpec.format),
    "grid": ("grid", lambda s: _parse_int(s, "grid", 3), str),
    "oracle-grid": ("oracle_grid", lambda s: _parse_int(s, "oracle-grid", 101), str),
    "tol": ("tol", _parse_tol, _fmt),
    "seed": ("seed", lambda s: _parse_int(s, "seed", 0), str),
    "samples": ("samples", lambda s: _parse_int(s, "samples", 1), str),
    "jobs": ("jobs", lambda s: _parse_int(s, "jobs", 1), str),
    "out": ("out", str, str),
}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines (``#`` starts a comment) into field values."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _config_error(f"config line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in CONFIG_KEYS:
            raise _config_error(f"config line {lineno}: unknown key {key!r}")
        name, parse, _ = CONFIG_KEYS[key]
        values[name] = parse(value)
    return values


def config_from_text(text: str) -> RunConfig:
    return _validated(RunConfig(**parse_config_text(text)))


def _validated(cfg: RunConfig) -> RunConfig:
    if cfg.pd is not None and cfg.matrix is not None:
        raise _config_error("pd and matrix are mutually exclusive")
    return cfg


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise _config_error(f"cannot read config {args.config}: {exc.strerror}") from None
        values.update(parse_config_text(text))
    for key, (name, parse, _) in CONFIG_KEYS.items():
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = parse(flag)
    # a flag-level matrix source replaces one from the file
    if args.pd is not None:
        values.pop("matrix", None)
    if args.matrix is not None:
        values.pop("pd", None)
    return _validated(RunConfig(**values))


# ---------------------------------------------------------------- output

def write_csv_atomic(path: str, header, rows) -> None:
    """Write rows to ``path`` via a temporary file and an atomic rename."""
    target = os.path.abspath(path)
    directory = os.path.dirname(target)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else _fmt(v) if isinstance(v, float) else str(v)
                              for v in row))
    payload = ("\n".join(lines) + "\n").encode("ascii")
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(prefix=".ewlgame-", suffix=".tmp", dir=directory)
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, target)
        tmp = None
    except OSError as exc:
        raise CliError("io", f"cannot write {path}: {exc.strerror or exc}") from None
    finally:
        if tmp is not None and os.path.exists(tmp):
            os.unlink(tmp)


def _density(pair, what) -> StrategyDensity:
    if pair is None:
        raise _config_error(f"{what} density is required")
    try:
        return StrategyDensity(*pair)
    except ValidationError as exc:
        raise _config_error(f"{what}: {exc}") from None


# ---------------------------------------------------------------- commands

def cmd_payoff(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    A = cfg.game_matrix()
    gamma = cfg.single_gamma()
    phases = cfg.phase_profile()
    x, y = _density(cfg.x, "x"), _density(cfg.y, "y")
    alpha = QuantumStrategy(x, phases.xi0, phases.xi1)
    beta = QuantumStrategy(y, phases.upsilon0, phases.upsilon1)
    q1 = quantum_payoff(gamma, alpha, beta, A)
    q2 = quantum_payoff_player2(gamma, alpha, beta, A)
    recon = payoff_from_decomposition(effective_decomposition(gamma, phases, A), x, y)
    residual = abs(recon - q1)
    for name, v in (("classical_payoff", classical_payoff(x, y, A)),
                    ("conjugate_payoff", conjugate_payoff(x, y, A)),
                    ("quantum_payoff_player1", q1),
                    ("quantum_payoff_player2", q2),
                    ("decomposition_residual", residual)):
        print(f"{name} = {_fmt(v)}", file=out)
    if not math.isfinite(residual):
        raise CliError("numeric", "non-finite reconstruction residual")
    return 0


def cmd_nash(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    A = cfg.game_matrix()
    gamma = cfg.single_gamma()
    payoff = DensityPayoff.quantum(gamma, cfg.phase_profile(), A)
    report = symmetric_nash(payoff, cfg.settings())
    print(f"gamma = {_fmt(gamma)}", file=out)
    print(f"equilibria = {len(report.equilibria)}", file=out)
    for e in report.equilibria:
        flags = [e.kind.value]
        if e.pareto_dominant:
            flags.append("pareto_dominant")
        if e.pareto_efficient:
            flags.append("pareto_efficient")
        seg = f" segment=[{_fmt(e.segment[0])},{_fmt(e.segment[1])}]" if e.segment else ""
        print(f"  t_star = {_fmt(e.t_star)} payoff_classical = {_fmt(e.payoff_classical)} "
              f"payoff_quantum = {_fmt(e.payoff_quantum)} [{' '.join(flags)}]{seg}", file=out)
    print(f"pareto_t = {_fmt(report.pareto_t)}", file=out)
    print(f"pareto_payoff = {_fmt(report.pareto_payoff)}", file=out)
    coincide = check_pareto_nash_coincidence(report, report.settings.coincidence_tol)
    print(f"coincidence = {str(coincide).lower()}", file=out)
    if cfg.out:
        rows = [(gamma, e.t_star, e.payoff_classical, e.payoff_quantum, e.kind.value,
                 str(e.pareto_efficient).lower(), str(e.pareto_dominant).lower())
                for e in report.equilibria]
        write_csv_atomic(cfg.out, NASH_HEADER, rows)
    return 0


def _require_out(cfg):
    if not cfg.out:
        raise _config_error("--out is required for sweeps")
    return cfg.out


def cmd_sweep_gamma(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    path = _require_out(cfg)
    game = cfg.game()
    gammas = cfg.gamma or GridSpec(0.0, 0.5 * math.pi, 101)
    records = gamma_sweep(game, cfg.phase_profile(), settings=cfg.settings(),
                          workers=cfg.jobs, gammas=gammas.values())
    rows = [(r.gamma, r.t_star, r.payoff_classical_at_eq, r.payoff_quantum_at_eq,
             r.branch.value, r.equilibrium_count) for r in records]
    write_csv_atomic(path, GAMMA_SWEEP_HEADER, rows)
    print(f"wrote {len(rows)} rows to {path}", file=out)
    return 0


def cmd_sweep_phases(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    path = _require_out(cfg)
    game = cfg.game()
    gammas = (cfg.gamma or GridSpec(0.0, 0.5 * math.pi, 5)).values()
    xi0 = (cfg.xi0 or GridSpec(-0.4, 0.4, 21)).values()
    xi1 = (cfg.xi1 or GridSpec(0.5 * math.pi - 0.4, 0.5 * math.pi + 0.4, 21)).values()
    records = phase_sweep(game, gammas, xi0, xi1, settings=cfg.settings(), workers=cfg.jobs)
    rows = [(r.xi0, r.xi1, r.gamma, r.t_star, r.payoff_classical, r.payoff_quantum)
            for r in records]
    write_csv_atomic(path, PHASE_SWEEP_HEADER, rows)
    print(f"wrote {len(rows)} rows to {path}", file=out)
    return 0


def cmd_verify(cfg: RunConfig, out=None, inject_fault: bool = False) -> int:
    out = out or sys.stdout
    results = checks.run_all(seed=cfg.seed, samples=cfg.samples, inject_fault=inject_fault,
                             settings=cfg.settings())
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name} residual={r.residual:.3e} tol={r.tol:.1e} samples={r.samples}",
              file=out)
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise CliError("verify", f"{len(failed)} check(s) failed: {', '.join(failed)}")
    print(f"all {len(results)} checks passed (seed {cfg.seed})", file=out)
    return 0


COMMANDS = {
    "payoff": cmd_payoff,
    "nash": cmd_nash,
    "sweep-gamma": cmd_sweep_gamma,
    "sweep-phases": cmd_sweep_phases,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------- entry

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _config_error(message)


def make_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("game and solver")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--pd", metavar="A,B,C", help="Prisoner's dilemma payoffs 0<a<b<c")
    src.add_argument("--matrix", metavar="A00,A01,A10,A11", help="explicit 2x2 payoff matrix")
    g.add_argument("--gamma", metavar="VAL|MIN:MAX:COUNT",
                   help="entanglement in radians; pi expressions allowed")
    g.add_argument("--phases", metavar="NAME|XI0,XI1",
                   help="trivial, pseudo, case3, case4 or an explicit pair (default pseudo)")
    g.add_argument("--x", metavar="X0,X1", help="player 1 density")
    g.add_argument("--y", metavar="Y0,Y1", help="player 2 density")
    g.add_argument("--xi0", metavar="MIN:MAX:COUNT", help="xi0 grid for sweep-phases")
    g.add_argument("--xi1", metavar="MIN:MAX:COUNT", help="xi1 grid for sweep-phases")
    g.add_argument("--grid", metavar="N", help="solver grid size (default 2001)")
    g.add_argument("--oracle-grid", dest="oracle_grid", metavar="N",
                   help="brute-force oracle grid size (default 1001)")
    g.add_argument("--tol", metavar="EPS", help="solver tolerance (default 1e-9)")
    g.add_argument("--seed", metavar="N", help="seed for verify (default 0)")
    g.add_argument("--samples", metavar="N", help="random samples per verify check")
    g.add_argument("--jobs", metavar="N", help="worker threads for sweeps")
    g.add_argument("--out", metavar="PATH", help="CSV output path")
    g.add_argument("--config", metavar="FILE", help="key = value file; flags override it")

    parser = _Parser(prog=PROG, description="Density-only analysis of quantum 2x2 symmetric games.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    helps = {
        "payoff": "classical and quantum payoffs of two densities",
        "nash": "symmetric equilibria and Pareto optimum",
        "sweep-gamma": "equilibrium along a gamma grid (CSV)",
        "sweep-phases": "equilibrium over a phase grid (CSV)",
        "verify": "run the identity and oracle self-checks",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text, description=text)
        if name == "verify":
            p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


VALUE_FLAGS = ("--pd", "--matrix", "--gamma", "--phases", "--x", "--y", "--xi0", "--xi1", "--grid",
               "--oracle-grid", "--tol", "--seed", "--samples", "--jobs", "--out", "--config")
_NEGATIVE_VALUE = re.compile(r"^-(\d|\.\d|pi\b)")


def _attach_negative_values(argv):
    """Turn ``--xi0 -0.4:0.4:21`` into ``--xi0=-0.4:0.4:21``.

    argparse would otherwise read the leading minus as the start of an option.
    """
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_FLAGS and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv=None, out=None) -> int:
    """Parse ``argv`` and run a command, raising :class:`CliError` on failure."""
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    args = make_parser().parse_args(_attach_negative_values(argv))
    cfg = build_config(args)
    cmd = COMMANDS[args.command]
    try:
        if args.command == "verify":
            return cmd(cfg, out=out, inject_fault=args.inject_fault)
        return cmd(cfg, out=out)
    except ValidationError as exc:
        raise _config_error(str(exc)) from None
    except (SolverError, ClosedFormMismatch, FloatingPointError, ArithmeticError, LookupError) as exc:
        raise CliError("numeric", f"{type(exc).__name__}: {exc}") from None


def main(argv=None) -> int:
    try:
        return run(argv)
    except CliError as exc:
        message = " ".join(str(exc).split())
        print(f"{PROG}: error[{exc.kind}]: {message}", file=sys.stderr)
        return EXIT_CODES[exc.kind]


if __name__ == "__main__":
    sys.exit(main())
