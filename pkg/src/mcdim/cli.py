"""``mcdim`` command line.

Exit codes: 0 success, 1 failed verification, 2 configuration error,
3 numerical-regime error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass, field

from .bowen import solve_bowen, solve_bowen_extrapolated
from .errors import ConfigError, RegimeError
from .identities import run_checks
from .mapcore import McMullenMap
from .periodic import default_workers
from .raster import FIGURE_WINDOW, Window, box_count, render
from .series import TruncatedSeries, predict_dimension
from .sweep import fit_rows, sweep, write_rows

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_REGIME, EXIT_IO = 0, 1, 2, 3, 4


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``bi`` or ``a+bi`` (``a-bi``)."""
    s = text.strip()
    if not s or "j" in s or " " in s:
        raise ConfigError(f"cannot parse parameter {text!r}; expected a, bi or a+bi")
    try:
        z = complex(s[:-1] + "j" if s.endswith("i") else s)
    except ValueError:
        raise ConfigError(f"cannot parse parameter {text!r}; expected a, bi or a+bi") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ConfigError(f"parameter {text!r} is not finite")
    return z


def parse_p_list(text: str) -> list[complex]:
    return [parse_complex(tok) for tok in text.split(",") if tok.strip()]


def parse_n(text: str) -> tuple[int, int]:
    """``"8"`` gives ``(8, 8)``, ``"4..10"`` gives ``(4, 10)``."""
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split(".."))
        else:
            lo = hi = int(text)
    except ValueError:
        raise ConfigError(f"cannot parse period {text!r}; expected n or lo..hi") from None
    if lo < 1 or hi < lo:
        raise ConfigError(f"invalid period range {text!r}")
    return lo, hi


def parse_window(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse window {text!r}") from None
    if len(vals) != 4:
        raise ConfigError("window needs four numbers: x_min,x_max,y_min,y_max")
    return vals


def _check_writable(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise FileNotFoundError(f"output directory {parent} does not exist")
    if not os.access(parent, os.W_OK):
        raise PermissionError(f"output directory {parent} is not writable")


@dataclass
class RunConfig:
    Q: int = 3
    p: list[complex] = field(default_factory=lambda: [0j])
    n: tuple[int, int] = (6, 12)
    trunc: int | None = None
    tol: float = 1e-13
    res: int | None = None
    window: tuple[float, float, float, float] = FIGURE_WINDOW
    out: str | None = None
    workers: int = 1

    @classmethod
    def from_args(cls, args: argparse.Namespace, default_n: str, default_res: int | None) -> RunConfig:
        if args.Q < 3:
            raise ConfigError("Q must be >= 3")
        if args.tol is not None and args.tol <= 0:
            raise ConfigError("tol must be positive")
        if args.trunc is not None and args.trunc < 1:
            raise ConfigError("trunc must be >= 1")
        if args.workers is not None and args.workers < 1:
            raise ConfigError("workers must be >= 1")
        if args.out:
            _check_writable(args.out)
        ps = parse_p_list(args.p)
        if not ps:
            raise ConfigError("no parameter given")
        return cls(Q=args.Q, p=ps, n=parse_n(args.n or default_n), trunc=args.trunc,
                   tol=args.tol if args.tol is not None else 1e-13,
                   res=args.res if args.res is not None else default_res,
                   window=parse_window(args.window) if args.window else FIGURE_WINDOW,
                   out=args.out, workers=args.workers or default_workers())

    @property
    def single_p(self) -> complex:
        if len(self.p) != 1:
            raise ConfigError("this command takes a single parameter")
        return self.p[0]

    def make_window(self) -> Window:
        if self.res is None:
            raise ConfigError("resolution required")
        return Window(*self.window, self.res, self.res)


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_dim(cfg: RunConfig) -> int:
    fmap = McMullenMap(cfg.Q, cfg.single_p)
    lo, hi = cfg.n
    pred = predict_dimension(cfg.Q, fmap.p).D
    if lo == hi:
        est = solve_bowen(fmap, lo, tol=cfg.tol, workers=cfg.workers)
        rows = [(lo, est.D, est.residual)]
    else:
        est = solve_bowen_extrapolated(fmap, lo, hi, cfg.tol, workers=cfg.workers)
        rows = list(zip(est.details["n"], est.details["D_n"], est.details["residuals"]))
    print(f"D {est.D:.10f} method {est.method} residual {est.residual:.3g} "
          f"predicted {pred:.10f} difference {est.D - pred:.3g}")
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "D_n", "residual"])
            for n, D, r in rows:
                w.writerow([n, _fmt(D), _fmt(r)])
    return EXIT_OK


def cmd_predict(cfg: RunConfig) -> int:
    for p in cfg.p:
        print(f"{predict_dimension(cfg.Q, p).D:.7f}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    trunc = TruncatedSeries(cfg.trunc, cfg.trunc) if cfg.trunc else None
    checks = run_checks(cfg.Q, trunc)
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


def cmd_sweep(cfg: RunConfig) -> int:
    lo, hi = cfg.n
    window = cfg.make_window() if cfg.res else None
    rows = sweep(cfg.Q, cfg.p, lo, hi, cfg.tol, cfg.res, window, cfg.workers)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            write_rows(fh, rows)
    else:
        write_rows(sys.stdout, rows)
    if len(rows) and any(r.p != 0 for r in rows):
        fit = fit_rows(rows)
        print(f"a11 {fit.a:.6f} rms {fit.rms:.3g} quartic_a11 {fit.a_quartic:.6f} "
              f"quartic_b {fit.b_quartic:.4g} target {fit.target:.6f}",
              file=sys.stderr if not cfg.out else sys.stdout)
    return EXIT_OK


def cmd_render(cfg: RunConfig) -> int:
    fmap = McMullenMap(cfg.Q, cfg.single_p)
    result = render(fmap, cfg.make_window(), path=cfg.out or "mcdim.ppm", workers=cfg.workers)
    borders = result.infinity_touches_borders()
    print(f"boundary_components {result.boundary_components()} "
          f"encloses_origin {result.boundary_encloses(0j)} "
          f"infinity_touches_all_borders {all(borders.values())}")
    return EXIT_OK


def cmd_boxcount(cfg: RunConfig) -> int:
    fmap = McMullenMap(cfg.Q, cfg.single_p)
    window = cfg.make_window()
    result = render(fmap, window, path=cfg.out, workers=cfg.workers)
    est = box_count(result.boundary_mask, window)
    print(f"D {est.D:.6f} residual {est.residual:.3g} "
          f"bracket {est.bracket_lo:.6f} {est.bracket_hi:.6f}")
    return EXIT_OK


COMMANDS = {
    "dim": (cmd_dim, "6..12", None, "dimension from periodic points (extrapolated over a range of n)"),
    "predict": (cmd_predict, "1", None, "closed-form prediction 1 + |p|^2 / log Q"),
    "verify": (cmd_verify, "1", None, "run the identity suite"),
    "sweep": (cmd_sweep, "6..12", None, "dimension over a comma-separated list of p, with the |p|^2 fit"),
    "render": (cmd_render, "1", 800, "escape-time render of the figure window to a P6 pixmap"),
    "boxcount": (cmd_boxcount, "1", 1024, "box-counting dimension of the rendered outer boundary"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcdim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, _, _, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--Q", type=int, default=3, help="degree Q >= 3")
        sp.add_argument("--p", default="0", help="parameter a, bi or a+bi (comma list for sweep)")
        sp.add_argument("--n", help="period n or range lo..hi")
        sp.add_argument("--trunc", type=int, help="series truncation depth (verify)")
        sp.add_argument("--tol", type=float, help="root tolerance in D")
        sp.add_argument("--res", type=int, help="raster width and height in pixels")
        sp.add_argument("--window", help="x_min,x_max,y_min,y_max")
        sp.add_argument("--out", help="output file (CSV or pixmap)")
        sp.add_argument("--workers", type=int, help="worker threads (default: $MCDIM_WORKERS or CPU count)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    func, default_n, default_res, _ = COMMANDS[args.command]
    try:
        cfg = RunConfig.from_args(args, default_n, default_res)
        return func(cfg)
    except ConfigError as exc:
        print(f"mcdim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RegimeError, ArithmeticError) as exc:
        print(f"mcdim: numerical regime error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except OSError as exc:
        print(f"mcdim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def console() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console()
