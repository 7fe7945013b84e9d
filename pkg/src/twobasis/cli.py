"""Command line entry point: ``twobasis <command> [options]``.

Exit status is 0 on success, 1 on a usage error and 2 on an I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dictionary import make_dictionary, mutual_incoherence
from .experiments import (ReportIOError, SweepConfig, emit_report, load_result,
                          parse_fractions, plot_success_curve, run_sweep, to_csv, to_json)
from .l1 import SolverConfig, basis_pursuit, kkt_check, recovery_success
from .sampling import (CoefficientModel, qrup_budget, sample_coefficients,
                       sample_support_exact)

log = logging.getLogger("twobasis")

EXIT_USAGE = 1
EXIT_IO = 2

# flag name -> SweepConfig field
_CONFIG_FIELDS = {
    "n": "n",
    "dict": "dictionary_kind",
    "seed": "base_seed",
    "trials": "trials_per_point",
    "fractions": "fractions",
    "beta": "beta",
    "split": "split",
    "workers": "workers",
    "dict_seed": "dictionary_seed",
    "max_iterations": "max_iterations",
    "inject_comb": "inject_comb",
}
_DEFAULTS = {
    "n": 256,
    "dict": "spike-fourier",
    "seed": 0,
    "trials": 100,
    "fractions": None,
    "beta": 1.0,
    "out": None,
    "format": "csv",
    "split": "even",
    "workers": 1,
    "dict_seed": None,
    "max_iterations": 20000,
    "inject_comb": False,
    "k": None,
    "fraction": 0.2,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p, sweep=True):
    p.add_argument("--config", metavar="PATH", help="JSON file with the same field names as the flags")
    p.add_argument("--n", type=int)
    p.add_argument("--dict", choices=["spike-fourier", "spike-random"])
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=["csv", "json"])
    if sweep:
        p.add_argument("--trials", type=int)
        p.add_argument("--fractions", metavar="A:B:STEP")
        p.add_argument("--beta", type=float)
        p.add_argument("--split", choices=["even", "random"])
        p.add_argument("--workers", type=int)
        p.add_argument("--dict-seed", type=int, help="seed of the random basis (default: --seed)")
        p.add_argument("--max-iterations", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twobasis", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="basis pursuit recovery sweep")
    _common(p)
    p = sub.add_parser("certify", help="minimum-energy dual certificate sweep")
    _common(p)
    p = sub.add_parser("qrup", help="uncertainty-principle sweep with Bernoulli supports")
    _common(p)
    p.add_argument("--inject-comb", action="store_true", default=None,
                   help="add one Dirac-comb trial per grid point")

    p = sub.add_parser("incoherence", help="print the mutual incoherence of a dictionary")
    _common(p, sweep=False)

    p = sub.add_parser("solve", help="solve one random instance and summarize it")
    _common(p, sweep=False)
    p.add_argument("--k", type=int, help="total support size |T| + |Omega|")
    p.add_argument("--fraction", type=float, help="total support size as a fraction of n")

    p = sub.add_parser("plot", help="render saved JSON results to SVG")
    p.add_argument("inputs", nargs="+", metavar="RESULT.json")
    p.add_argument("--out", metavar="PATH", required=True)
    return parser


def _merge(args) -> dict:
    opts = dict(_DEFAULTS)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ReportIOError(f"cannot read config {args.config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(data) - set(_DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        opts.update({k.replace("-", "_"): v for k, v in data.items()})
    for key, value in vars(args).items():
        if value is not None and key in opts:
            opts[key] = value
    return opts


def _sweep_config(opts, mode) -> SweepConfig:
    fields = {_CONFIG_FIELDS[k]: opts[k] for k in _CONFIG_FIELDS}
    fr = fields["fractions"]
    if fr is None:
        if mode == "qrup":
            fields["fractions"] = [qrup_budget(opts["n"], opts["beta"]) / opts["n"]]
        else:
            fields.pop("fractions")
    elif isinstance(fr, str):
        fields["fractions"] = parse_fractions(fr)
    return SweepConfig(mode=mode, **fields)


def _write(text, opts):
    if opts["out"] is None:
        sys.stdout.write(text)
        return
    try:
        Path(opts["out"]).write_text(text)
    except OSError as exc:
        raise ReportIOError(f"cannot write {opts['out']}: {exc.strerror}") from exc


def _cmd_sweep(args, mode):
    opts = _merge(args)
    try:
        cfg = _sweep_config(opts, mode)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    result = run_sweep(cfg)
    if opts["out"] is None:
        sys.stdout.write(to_csv(result) if opts["format"] == "csv" else to_json(result))
        return
    out = Path(opts["out"])
    emit_report(result, opts["format"], out)
    figure = plot_success_curve([result], out.with_suffix(".svg"),
                                title=f"{mode}, {cfg.dictionary_kind}")
    log.info("wrote %s and %s", out, figure)


def _cmd_incoherence(args):
    opts = _merge(args)
    d = _dictionary(opts)
    mu = mutual_incoherence(d)
    info = {"n": d.n, "dictionary_kind": d.kind, "mu": mu, "normalized_mu": float(np.sqrt(d.n) * mu)}
    _write(json.dumps(info) + "\n", opts)


def _dictionary(opts):
    try:
        return make_dictionary(opts["n"], opts["dict"], opts["seed"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _cmd_solve(args):
    opts = _merge(args)
    d = _dictionary(opts)
    k = opts["k"] if opts["k"] is not None else int(round(opts["fraction"] * d.n))
    if not 0 <= k <= d.n:
        raise UsageError(f"support size {k} out of range for n={d.n}")
    support = sample_support_exact(d.n, k // 2, k - k // 2, opts["seed"])
    alpha = sample_coefficients(support, CoefficientModel(), opts["seed"])
    f = d.synthesize(alpha)
    res = basis_pursuit(d, f, SolverConfig(max_iterations=opts["max_iterations"]))
    err = float(np.linalg.norm(res.alpha_hat.entries - alpha.entries))
    ref = float(np.linalg.norm(alpha.entries))
    summary = {
        "n": d.n,
        "dictionary_kind": d.kind,
        "seed": opts["seed"],
        "t_size": int(support.t_set.size),
        "omega_size": int(support.omega_set.size),
        "status": res.status,
        "iterations": res.iterations,
        "l1_value": res.l1_value,
        "true_l1_value": alpha.l1_norm(),
        "support_size_hat": int(res.alpha_hat.support.size),
        "relative_error": err / ref if ref else err,
        "recovered": recovery_success(res.alpha_hat, alpha),
        "duality_gap": kkt_check(d, f, res).gap,
    }
    _write(json.dumps(summary, indent=2) + "\n", opts)


def _cmd_plot(args):
    results = [load_result(p) for p in args.inputs]
    try:
        plot_success_curve(results, args.out)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command in ("sweep", "certify", "qrup"):
            mode = {"sweep": "recovery", "certify": "certificate", "qrup": "qrup"}[args.command]
            _cmd_sweep(args, mode)
        elif args.command == "incoherence":
            _cmd_incoherence(args)
        elif args.command == "solve":
            _cmd_solve(args)
        elif args.command == "plot":
            _cmd_plot(args)
    except UsageError as exc:
        print(f"twobasis: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"twobasis: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
