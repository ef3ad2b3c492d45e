"""
Command-line front end: spectra, entropy sweeps, holographic comparisons and
the oracle suite, driven by experiment configs or bundled recipes.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from config_manager import (ExperimentConfig, HolographyRequest, effective_config, get_config_manager,
                            get_output_settings, get_plot_settings, get_run_settings, load_experiment_config,
                            read_config_file)
from constants import DEFAULT_WORKERS, EXIT_NUMERICAL, EXIT_OK, PLOT_FORMAT, VERSION
from errors import ConfigError, EntanglementError, UsageError
from holography import central_charge_ratio, fit_metric, holographic_entropy, pure_ads_length
from models import dispersion
from output_writer import fit_summary, format_value, write_csv
from plotting import plot_entropy_curves, plot_holography
from resource_manager import get_output_path, list_recipes
from scaling import crossover_report, fit, linear_trend, sweep
from spectral import count_fermi_points
from verify import VerifyContext, run_verification

logger = logging.getLogger(__name__)


class _ArgumentParser(argparse.ArgumentParser):
    """Parser whose errors map to the usage exit code."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _extent(value: str) -> List[int]:
    try:
        return [int(v) for v in value.replace("x", ",").split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"extent must look like 400 or 61x61, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug output")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key, e.g. model.alpha=30")
    common.add_argument("--alpha", type=float, help="override alpha of every model")
    common.add_argument("--extent", type=_extent, help="override the lattice extent, e.g. 400 or 61x61")
    common.add_argument("--seed", type=int, help="override the random seed")
    common.add_argument("--workers", type=int, help="threads for subregion sweeps")
    common.add_argument("--out", help="CSV output path")

    parser = _ArgumentParser(prog="main.py", description="Entanglement entropy of nonlocal lattice fermions")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    spectrum = commands.add_parser("spectrum", parents=[common], help="single-particle spectrum per wavenumber")
    spectrum.add_argument("config", help="config file or bundled recipe name")

    sweep_cmd = commands.add_parser("sweep", parents=[common], help="entropy versus subregion size")
    sweep_cmd.add_argument("config", help="config file or bundled recipe name")
    sweep_cmd.add_argument("--plot", help="figure output path")
    sweep_cmd.add_argument("--logx", action="store_true", help="logarithmic L axis")
    sweep_cmd.add_argument("--bits", action="store_true", help="entropy in bits")
    sweep_cmd.add_argument("--no-fit", action="store_true", help="skip the configured fits")

    holo = commands.add_parser("holo", parents=[common], help="lattice entropy against the geodesic length")
    holo.add_argument("config", help="config file or bundled recipe name")
    holo.add_argument("--plot", help="figure output path")
    holo.add_argument("--logx", action="store_true", help="logarithmic L axis")
    holo.add_argument("--no-fit", action="store_true", help="use the metric parameters from the config")

    verify = commands.add_parser("verify", parents=[common], help="run the oracle suite")
    verify.add_argument("config", nargs="?", help="optional config supplying the lattice size and seed")
    verify.add_argument("--inject-tolerance", action="append", default=[], metavar="NAME=VALUE",
                        help="replace one check's limit (test hook)")
    verify.add_argument("--only", action="append", default=[], metavar="NAME", help="run only the named checks")

    recipes = commands.add_parser("recipes", parents=[common], help="list bundled recipes")
    recipes.set_defaults(config=None)

    settings = commands.add_parser("settings", help="show or change the persistent settings")
    settings.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                          help="store a setting, e.g. run.workers=4")
    settings.add_argument("--reset", action="store_true", help="restore the default settings first")
    settings.set_defaults(config=None, verbose=0)
    return parser


def configure_logging(verbosity: int):
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, str(get_run_settings().get("log_level", "WARNING")).upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


class EntanglementApp:
    """Runs one parsed command line."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.run_settings = get_run_settings()
        self.output_settings = get_output_settings()
        self.plot_settings = get_plot_settings()
        self.commands = {
            "spectrum": self.cmd_spectrum,
            "sweep": self.cmd_entropy_sweep,
            "holo": self.cmd_holo,
            "verify": self.cmd_verify,
            "recipes": self.cmd_recipes,
            "settings": self.cmd_settings,
        }

    def run(self) -> int:
        command = self.commands[self.args.command]
        if self.args.command in ("verify", "recipes", "settings"):
            return command()
        return command(self.load_config())

    def load_config(self) -> ExperimentConfig:
        return load_experiment_config(self.args.config, self.args.set, alpha=self.args.alpha,
                                      extent=self.args.extent, seed=self.args.seed, workers=self.args.workers)

    def _workers(self, config: ExperimentConfig) -> int:
        workers = config.workers if config.workers is not None else self.run_settings.get("workers", DEFAULT_WORKERS)
        if workers < 1:
            raise UsageError("workers must be at least 1")
        return int(workers)

    def _solver_options(self) -> Dict[str, str]:
        return {"multiplet_policy": self.run_settings.get("multiplet_policy", "whole"),
                "bdg_method": self.run_settings.get("bdg_method", "auto")}

    def _csv_path(self, config: ExperimentConfig, command: str) -> Path:
        name = self.args.out or config.output.get("csv") or f"{config.name}_{command}.csv"
        return get_output_path(name, self.output_settings.get("directory"))

    def _plot_path(self, config: ExperimentConfig) -> Optional[Path]:
        name = getattr(self.args, "plot", None) or config.output.get("plot")
        if not name:
            return None
        path = Path(name)
        if not path.suffix:
            path = path.with_suffix("." + self.plot_settings.get("format", PLOT_FORMAT))
        return get_output_path(str(path), self.output_settings.get("directory"))

    def _logx(self, config: ExperimentConfig) -> bool:
        return bool(getattr(self.args, "logx", False) or config.plot.get("logx", self.plot_settings.get("logx")))

    def cmd_spectrum(self, config: ExperimentConfig) -> int:
        """One row per wavenumber: indices, wavenumbers, energies (both BdG branches)."""
        lattice = config.lattice
        multi = len(config.models) > 1
        pairing = any(model.is_pairing for model in config.models)
        axes = [""] if lattice.dim == 1 else ["1", "2"]
        columns = (["model"] if multi else []) + [f"n{a}" for a in axes] + [f"k{a}" for a in axes]
        columns += ["E_plus", "E_minus"] if pairing else ["E"]

        rows, footer = [], []
        for model in config.models:
            prefix = [model.label] if multi else []
            for q, energy in dispersion(model, lattice):
                if model.is_pairing:
                    energies = [energy, -energy]
                elif pairing:
                    energies = [energy, ""]
                else:
                    energies = [energy]
                rows.append(prefix + list(q.n) + list(q.k) + energies)
            if lattice.dim == 1 and not model.is_pairing:
                estimate = count_fermi_points(model, lattice)
                footer.append(f"fermi_points curve={model.label!r} count={estimate.count} "
                              f"c_eff_estimate={format_value(estimate.c_eff_estimate)} "
                              f"E_F={format_value(estimate.fermi_energy)}")

        path = write_csv(self._csv_path(config, "spectrum"), columns, rows, "spectrum", effective_config(config),
                         config.seed, footer=footer, precision=self.output_settings.get("precision", 12))
        print(f"wrote {path}")
        return EXIT_OK

    def cmd_entropy_sweep(self, config: ExperimentConfig) -> int:
        """S(L) for every model, with the configured fits and crossover report as footer lines."""
        if not config.sweep:
            raise UsageError("the sweep list is empty")
        workers = self._workers(config)
        options = self._solver_options()
        curves = [sweep(model, config.lattice, config.sweep, workers=workers, **options) for model in config.models]

        footer = []
        fits = {}
        if not getattr(self.args, "no_fit", False):
            for i, curve in enumerate(curves):
                fits[i] = [fit(curve, request.form, request.window, request.chord) for request in config.fits]
                footer.extend(fit_summary(curve.model.label, result) for result in fits[i])

        if config.crossover:
            alphas, c_effs = [], []
            for curve in curves:
                if curve.model.alpha <= 0:
                    continue
                report = crossover_report(curve, curve.model.alpha)
                footer.append(f"crossover curve={curve.model.label!r} alpha={format_value(report.alpha)} "
                              f"A={format_value(report.A)} c_eff={format_value(report.c_eff)} "
                              f"c_eff_over_alpha={format_value(report.B)} flags={','.join(report.flags) or 'none'}")
                if report.c_eff is not None:
                    alphas.append(report.alpha)
                    c_effs.append(report.c_eff)
            if len(alphas) >= 2:
                trend = linear_trend(alphas, c_effs)
                footer.append(f"trend c_eff_vs_alpha slope={format_value(trend.slope)} "
                              f"intercept={format_value(trend.intercept)} r2={format_value(trend.r_squared)}")

        bits = bool(getattr(self.args, "bits", False) or config.output.get("bits", self.output_settings.get("bits")))
        unit = np.log(2.0) if bits else 1.0
        multi = len(curves) > 1
        columns = (["curve"] if multi else []) + ["L", "S"]
        rows = []
        for curve in curves:
            for L, S in curve.samples:
                rows.append(([curve.model.label] if multi else []) + [L, S / unit])

        path = write_csv(self._csv_path(config, "sweep"), columns, rows, "sweep", effective_config(config),
                         config.seed, extra={"units": "bits" if bits else "nats", "workers": workers},
                         footer=footer, precision=self.output_settings.get("precision", 12))
        print(f"wrote {path}")
        for line in footer:
            print(line)

        plot_path = self._plot_path(config)
        if plot_path is not None:
            plot_entropy_curves(curves, plot_path, logx=self._logx(config),
                                per_length=bool(config.plot.get("per_length", False)), fits=fits,
                                title=config.plot.get("title", config.name), bits=bits)
            print(f"wrote {plot_path}")
        return EXIT_OK

    def cmd_holo(self, config: ExperimentConfig) -> int:
        """Lattice entropy of the first model against a S + b with the geodesic length."""
        if not config.sweep:
            raise UsageError("the sweep list is empty")
        request = config.holography or HolographyRequest()
        curve = sweep(config.model, config.lattice, config.sweep, workers=self._workers(config),
                      **self._solver_options())

        extra = {}
        if request.fit and not getattr(self.args, "no_fit", False):
            metric = fit_metric(curve, request.window)
            params = metric.params
            extra.update({"params_source": "fit", "objective": metric.objective, "fit_rms": metric.rms,
                          "fit_evaluations": metric.iterations})
            report = crossover_report(curve, config.model.alpha)
            if report.c_eff is not None:
                extra["lattice_c_eff"] = report.c_eff
                extra["central_charge_ratio"] = central_charge_ratio(metric, report.c_eff)
        else:
            if request.params is None:
                raise ConfigError("holography.params is required when the metric fit is disabled")
            params = request.params
            extra["params_source"] = "config"
        extra.update({"alpha_c": params.alpha_c, "a": params.a, "b": params.b})

        S_holo = holographic_entropy(params, curve.L)
        residual = curve.S - S_holo
        extra["max_abs_residual"] = float(np.max(np.abs(residual)))
        rows = [[L, s, h, r] for L, s, h, r in zip(curve.L.tolist(), curve.S, S_holo, residual)]
        path = write_csv(self._csv_path(config, "holo"), ["L", "S_lattice", "S_holographic", "residual"], rows,
                         "holo", effective_config(config), config.seed, extra=extra,
                         precision=self.output_settings.get("precision", 12))
        print(f"wrote {path}")
        print(f"alpha_c={params.alpha_c:.6g} a={params.a:.6g} b={params.b:.6g} "
              f"max |residual|={extra['max_abs_residual']:.4g}")

        plot_path = self._plot_path(config)
        if plot_path is not None:
            reference = params.a * pure_ads_length(params.alpha_c, curve.L) + params.b
            plot_holography(curve.L, curve.S, S_holo, plot_path, logx=self._logx(config),
                            title=config.plot.get("title", config.name), reference=reference)
            print(f"wrote {plot_path}")
        return EXIT_OK

    def cmd_verify(self) -> int:
        """Oracle suite; exit code 2 when any check fails."""
        context = VerifyContext()
        R, seed = context.R, self.args.seed
        if self.args.config:
            config = self.load_config()
            if config.lattice.dim == 1:
                R = config.lattice.extent[0]
            seed = config.seed
        context = VerifyContext(R=R, seed=context.seed if seed is None else seed)

        inject = {}
        for item in self.args.inject_tolerance:
            name, sep, value = item.partition("=")
            try:
                inject[name.strip()] = float(value)
            except ValueError:
                sep = ""
            if not sep:
                raise UsageError(f"--inject-tolerance expects NAME=VALUE, got {item!r}")

        results = run_verification(context, inject=inject, only=self.args.only or None)
        for result in results:
            print(result.describe())
        failed = [r.name for r in results if not r.passed]
        print(f"{len(results) - len(failed)} of {len(results)} checks passed")
        if failed:
            print(f"failed: {', '.join(failed)}", file=sys.stderr)
            return EXIT_NUMERICAL
        return EXIT_OK

    def cmd_recipes(self) -> int:
        for name in list_recipes():
            description = read_config_file(name).get("description", "")
            print(f"{name:<24} {description}")
        return EXIT_OK

    def cmd_settings(self) -> int:
        manager = get_config_manager()
        if self.args.reset:
            manager.reset_to_defaults()
        if self.args.set:
            manager.update(self.args.set)
        print(json.dumps(manager.as_dict(), indent=2))
        return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main function"""
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbose)
        app = EntanglementApp(args)
        return app.run()
    except EntanglementError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        import traceback
        traceback.print_exc()
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
