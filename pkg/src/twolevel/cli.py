"""Command-line entry point.

Subcommands: ``fig1``, ``sweep``, ``ep-find``, ``lineshape``, ``regimes``.
Exit status is 0 on success, 2 for configuration errors and 1 for runtime
failures such as an unwritable output path.

Config files are flat ``key = value`` text with ``#`` comments.  Complex
values are written ``re+imi`` (``0+0.05i``).  Recognised keys::

    kind = open | pt_balanced | pt_lossy
    e1.intercept, e1.slope, e2.*, gamma1.*, gamma2.*   (floats)
    e.*, gamma.*          aliases of e1.* and gamma1.* for the PT kinds
    coupling = 0+0.05i
    coupling.model = constant | gaussian
    grid = 1201
    range.min, range.max
    tol = 1e-8
    format = csv | json
    out = path
    mode = 1d | 2d                      (ep-find)
    box = p_min p_max q_min q_max       (ep-find, mode = 2d)
    resonance.E1, .E2, .G1, .G2         (lineshape)
    double_pole.E, double_pole.G        (lineshape)
    energy.min, energy.max, energy.n    (lineshape)
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .ep import EP_TOL, classify_regime, locate_eps_1d, locate_eps_2d, open_difference_family
from .model import AffineLaw, CouplingModel, Kind, ParamTrajectory, params_at
from .scattering import DoublePole, ResonancePair, sample_line_shape
from .sweep import LEFT_RANGE, RIGHT_RANGE, export_table, fig1_presets, run_sweep

log = logging.getLogger("twolevel")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


_FLOAT_KEYS = {
    f"{law}.{part}"
    for law in ("e1", "e2", "gamma1", "gamma2", "e", "gamma")
    for part in ("intercept", "slope")
} | {
    "range.min", "range.max", "tol",
    "resonance.E1", "resonance.E2", "resonance.G1", "resonance.G2",
    "double_pole.E", "double_pole.G", "energy.min", "energy.max",
}
_INT_KEYS = {"grid", "energy.n"}
_COMPLEX_KEYS = {"coupling"}
_TEXT_KEYS = {"kind", "coupling.model", "format", "out", "mode", "box"}
_KNOWN = _FLOAT_KEYS | _INT_KEYS | _COMPLEX_KEYS | _TEXT_KEYS
_ALIASES = {"e.intercept": "e1.intercept", "e.slope": "e1.slope",
            "gamma.intercept": "gamma1.intercept", "gamma.slope": "gamma1.slope"}


def parse_complex(text: str) -> complex:
    """Parse ``re+imi`` style literals (``0+0.05i``, ``-0.1i``, ``2``)."""
    s = text.strip().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    if "j" in s[:-1] or not s:
        raise ValueError(f"bad complex literal {text!r}")
    return complex(s)


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)
    lines: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def trajectory(self) -> ParamTrajectory:
        try:
            kind = Kind(self.get("kind", "open"))
        except ValueError:
            raise ConfigError(f"unknown kind {self.get('kind')!r}", self.lines.get("kind"))
        try:
            model = CouplingModel(self.get("coupling.model", "constant"))
        except ValueError:
            raise ConfigError("coupling.model must be constant or gaussian", self.lines.get("coupling.model"))

        def law(name):
            return AffineLaw(self.get(f"{name}.intercept", 0.0), self.get(f"{name}.slope", 0.0))

        return ParamTrajectory(kind, law("e1"), law("e2"), law("gamma1"), law("gamma2"),
                               self.get("coupling", 0j), model, name="config")


def parse_config(text: str) -> RunConfig:
    """Parse and validate config text; raises :class:`ConfigError` with a line number."""
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in _KNOWN:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in cfg.values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        try:
            if key in _FLOAT_KEYS:
                parsed = float(value)
            elif key in _INT_KEYS:
                parsed = int(value)
            elif key in _COMPLEX_KEYS:
                parsed = parse_complex(value)
            else:
                parsed = value
        except ValueError:
            raise ConfigError(f"bad value {value!r} for {key!r}", lineno) from None
        cfg.values[key] = parsed
        cfg.lines[key] = lineno
    return cfg


def _load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def _grid_and_range(args, cfg: RunConfig, default_range=(0.0, 1.0), default_grid=1201, min_grid=2):
    grid = args.grid if args.grid is not None else cfg.get("grid", default_grid)
    if grid < min_grid:
        raise ConfigError(f"grid too small: {grid} (need >= {min_grid})", cfg.lines.get("grid"))
    if args.range is not None:
        a_min, a_max = args.range
    else:
        a_min = cfg.get("range.min", default_range[0])
        a_max = cfg.get("range.max", default_range[1])
    if not a_min < a_max:
        raise ConfigError(f"empty range [{a_min}, {a_max}]", cfg.lines.get("range.min"))
    return grid, a_min, a_max


def _tol(args, cfg):
    tol = args.tol if args.tol is not None else cfg.get("tol", EP_TOL)
    if not tol > 0:
        raise ConfigError("tol must be positive", cfg.lines.get("tol"))
    return tol


def _format(args, cfg):
    fmt = (args.format or cfg.get("format", "csv")).lower()
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown format {fmt!r}", cfg.lines.get("format"))
    return fmt


def _write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _write_meta(path: Path, command: str, extra: dict):
    meta = {
        "command": command,
        "version": __version__,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        **extra,
    }
    _write(path, (json.dumps(meta, indent=2) + "\n").encode("utf-8"))


def cmd_fig1(args, cfg) -> int:
    fmt = _format(args, cfg)
    grid = args.grid if args.grid is not None else 1201
    if grid < 2:
        raise ConfigError(f"grid too small: {grid} (need >= 2)")
    out = Path(args.out or cfg.get("out", "."))
    left, right = fig1_presets()
    eps = {}
    for traj, (a_min, a_max) in ((left, LEFT_RANGE), (right, RIGHT_RANGE)):
        table = run_sweep(traj, a_min, a_max, grid)
        _write(out / f"{traj.name}.{fmt}", export_table(table, fmt))
        eps[traj.name] = [r.a_star for r in table.eps]
        print(f"{traj.name}: {len(table.rows)} rows, EPs at " + ", ".join(f"{a:.6f}" for a in eps[traj.name]))
    _write_meta(out / "fig1.meta.json", "fig1", {"grid": grid, "eps": eps})
    return EXIT_OK


def cmd_sweep(args, cfg) -> int:
    traj = cfg.trajectory()
    grid, a_min, a_max = _grid_and_range(args, cfg)
    tol, fmt = _tol(args, cfg), _format(args, cfg)
    table = run_sweep(traj, a_min, a_max, grid, tol=tol)
    data = export_table(table, fmt)
    out = args.out or cfg.get("out")
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        _write(Path(out), data)
        _write_meta(Path(str(out) + ".meta.json"), "sweep", {"config": cfg.values | {"coupling": str(cfg.get("coupling", 0j))}})
    for r in table.eps:
        print(f"EP a_star={r.a_star:.12g} residual={r.residual:.3g}", file=sys.stderr)
    return EXIT_OK


def cmd_ep_find(args, cfg) -> int:
    tol = _tol(args, cfg)
    mode = cfg.get("mode", "1d")
    if mode == "2d":
        box_text = cfg.get("box", "-1 1 -1 1")
        try:
            box = tuple(float(x) for x in box_text.split())
        except ValueError:
            box = ()
        if len(box) != 4:
            raise ConfigError("box needs four numbers: p_min p_max q_min q_max", cfg.lines.get("box"))
        records = locate_eps_2d(open_difference_family(cfg.get("coupling", 0j)), box, tol=tol)
    elif mode == "1d":
        traj = cfg.trajectory()
        grid, a_min, a_max = _grid_and_range(args, cfg, min_grid=16)
        records = locate_eps_1d(traj, a_min, a_max, grid_n=grid, tol=tol)
    else:
        raise ConfigError(f"mode must be 1d or 2d, got {mode!r}", cfg.lines.get("mode"))

    if not records:
        print("no exceptional points in range")
    lines = ["a_star,b_star,eigenvalue_re,eigenvalue_im,residual,method"]
    for r in records:
        b = "" if r.b_star is None else repr(r.b_star)
        lines.append(f"{r.a_star!r},{b},{r.eigenvalue.real!r},{r.eigenvalue.imag!r},{r.residual!r},{r.method.value}")
        coord = f"a_star={r.a_star:.12g}" + ("" if r.b_star is None else f" b_star={r.b_star:.12g}")
        print(f"{coord} eigenvalue={r.eigenvalue:.12g} residual={r.residual:.3g}")
    out = args.out or cfg.get("out")
    if out is not None:
        _write(Path(out), ("\n".join(lines) + "\n").encode("utf-8"))
    return EXIT_OK


def cmd_lineshape(args, cfg) -> int:
    if "double_pole.E" in cfg.values or "double_pole.G" in cfg.values:
        try:
            shape_src = DoublePole(cfg.get("double_pole.E", 0.0), cfg.get("double_pole.G", 1.0))
        except ValueError as exc:
            raise ConfigError(str(exc), cfg.lines.get("double_pole.G"))
        centre, width = shape_src.E_d, shape_src.G_d
    else:
        try:
            shape_src = ResonancePair(*(cfg.get(f"resonance.{k}", 0.0) for k in ("E1", "E2", "G1", "G2")))
        except ValueError as exc:
            raise ConfigError(str(exc))
        centre, width = 0.5 * (shape_src.E1 + shape_src.E2), max(shape_src.G1, shape_src.G2, abs(shape_src.E1 - shape_src.E2), 1e-3)
    e_min = cfg.get("energy.min", centre - 5 * width)
    e_max = cfg.get("energy.max", centre + 5 * width)
    n = args.grid if args.grid is not None else cfg.get("energy.n", 1001)
    if n < 2:
        raise ConfigError("need at least two energy samples", cfg.lines.get("energy.n"))
    if not e_min < e_max:
        raise ConfigError("energy.min must be below energy.max", cfg.lines.get("energy.min"))
    shape = sample_line_shape(shape_src, e_min, e_max, n)
    lines = ["E,S_re,S_im,sigma"]
    lines += [f"{e!r},{s.real!r},{s.imag!r},{x!r}" for e, s, x in zip(shape.E.tolist(), shape.S.tolist(), shape.sigma.tolist())]
    data = ("\n".join(lines) + "\n").encode("utf-8")
    out = args.out or cfg.get("out")
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        _write(Path(out), data)
    return EXIT_OK


def cmd_regimes(args, cfg) -> int:
    traj = cfg.trajectory()
    grid, a_min, a_max = _grid_and_range(args, cfg)
    tol = _tol(args, cfg)
    lines = ["a,regime"]
    for a in np.linspace(a_min, a_max, grid).tolist():
        lines.append(f"{a!r},{classify_regime(params_at(traj, a), tol).value}")
    data = ("\n".join(lines) + "\n").encode("utf-8")
    out = args.out or cfg.get("out")
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        _write(Path(out), data)
    return EXIT_OK


_COMMANDS = {
    "fig1": cmd_fig1,
    "sweep": cmd_sweep,
    "ep-find": cmd_ep_find,
    "lineshape": cmd_lineshape,
    "regimes": cmd_regimes,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--out", help="output file (directory for fig1)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--grid", type=int, help="number of grid points")
    common.add_argument("--range", type=float, nargs=2, metavar=("A", "B"))
    common.add_argument("--tol", type=float, help="EP acceptance tolerance on |Z|")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="twolevel", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load_config(args.config)
        return _COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        where = f"{args.config}: " if args.config else ""
        print(f"config error: {where}{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
