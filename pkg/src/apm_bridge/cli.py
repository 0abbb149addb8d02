"""Command-line front end.

Every subcommand writes a CSV table: ``#`` comment lines (including the
full run configuration as JSON), then ``x,value[,stderr]`` rows.

Exit status: 0 success, 1 invalid input, 2 numerical failure.
"""

import argparse
import json
import math
import re
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional, Tuple

import numpy as np

from . import __version__
from .channels import CascadedGNM, GeneralizedNakagami, Nakagami, Rayleigh, db_to_linear
from .errors import ApmBridgeError, IntegrationError
from .measures import Capacity, OutageIndicator, Reliability, WojnarBer, apm_monte_carlo, apm_quadrature

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2

SUBCOMMANDS = (
    "simulate-aber",
    "aber2acc",
    "acc2op",
    "acc2oc",
    "acc2pdf",
    "acc2apm",
    "oracle",
    "gcq-table",
    "selftest",
)
MODELS = ("rayleigh", "nakagami", "gnm", "cascaded")
MEASURES = ("capacity", "ber", "reliability", "outage")


class ConfigError(ApmBridgeError, ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    subcommand: str
    model: str = "rayleigh"
    m: float = 1.0
    xi: float = 1.0
    hops: List[Tuple[float, float]] = field(default_factory=list)
    a: float = 1.0
    b: float = 0.5
    grid_n: int = 41
    grid_db: float = 20.0
    snr_db: Optional[List[float]] = None
    bits: int = 10 ** 6
    samples: int = 10 ** 6
    seed: int = 1
    tol: float = 1e-8
    eps: float = 1e-4
    units: str = "nats"
    input: Optional[str] = None
    output: Optional[str] = None
    gamma_th_db: Optional[List[float]] = None
    c_th: Optional[List[float]] = None
    r: Optional[List[float]] = None
    measure: str = "capacity"
    method: str = "quadrature"
    n: int = 64

    def to_json(self):
        data = asdict(self)
        data["hops"] = [list(h) for h in self.hops]
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data["hops"] = [tuple(h) for h in data.get("hops", [])]
        config = cls(**data)
        config.validate()
        return config

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.model not in MODELS:
            raise ConfigError(f"--model must be one of {MODELS}")
        if self.model == "cascaded" and not self.hops:
            raise ConfigError("--model cascaded needs --hops m1:xi1,m2:xi2,...")
        for name in ("m", "xi", "a", "b", "grid_db", "tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"--{name.replace('_', '-')} must be a positive number, got {value!r}")
        if not (math.isfinite(self.eps) and self.eps >= 0):
            raise ConfigError("--eps must be non-negative")
        if self.m < 0.5:
            raise ConfigError("--m must be >= 0.5")
        for name in ("grid_n", "bits", "samples", "n"):
            if getattr(self, name) < 1:
                raise ConfigError(f"--{name.replace('_', '-')} must be >= 1")
        if self.grid_n < 2:
            raise ConfigError("--grid-n must be >= 2")
        if self.samples < 2:
            raise ConfigError("--samples must be >= 2")
        if self.units not in ("nats", "bits"):
            raise ConfigError("--units must be nats or bits")
        if self.measure not in MEASURES:
            raise ConfigError(f"--measure must be one of {MEASURES}")
        if self.method not in ("quadrature", "mc"):
            raise ConfigError("--method must be quadrature or mc")
        for name in ("snr_db", "gamma_th_db", "c_th", "r"):
            values = getattr(self, name)
            if values is not None and (not values or not all(math.isfinite(v) for v in values)):
                raise ConfigError(f"--{name.replace('_', '-')} needs finite values")
        for name in ("c_th", "r"):
            values = getattr(self, name)
            if values is not None and any(v <= 0 for v in values):
                raise ConfigError(f"--{name.replace('_', '-')} values must be positive")
        if self.subcommand == "simulate-aber" and not self.output:
            raise ConfigError("simulate-aber needs --out")
        if self.subcommand in ("acc2op", "acc2oc", "acc2pdf") and self.snr_db is not None and len(self.snr_db) != 1:
            raise ConfigError(f"{self.subcommand} takes a single --snr-db value")
        if self.subcommand == "acc2apm" and self.measure == "outage" and (
            self.gamma_th_db is None or len(self.gamma_th_db) != 1
        ):
            raise ConfigError("--measure outage needs a single --gamma-th-db value")


# ---------------------------------------------------------------- parsing

def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _hops(text):
    hops = []
    for item in text.split(","):
        m, sep, xi = item.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"hop {item!r} must look like m:xi")
        try:
            hops.append((float(m), float(xi)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"hop {item!r} must look like m:xi") from None
    return hops


_LIST_FLAGS = ("--snr-db", "--gamma-th-db", "--c-th", "--r")
_NEGATIVE_VALUE = re.compile(r"^-(\d|\.\d)")


def _join_negative_lists(argv):
    # argparse reads "-5,0" as an option; bind it to the preceding list flag
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in _LIST_FLAGS and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("channel and modulation")
    g.add_argument("--model", choices=MODELS, default="rayleigh")
    g.add_argument("--m", type=float, default=1.0, help="fading figure (nakagami, gnm)")
    g.add_argument("--xi", type=float, default=1.0, help="GNM shape")
    g.add_argument("--hops", type=_hops, default=[], help="cascaded hops as m1:xi1,m2:xi2,...")
    g.add_argument("--a", type=float, default=1.0, help="modulation: 1/2 FSK, 1 PSK")
    g.add_argument("--b", type=float, default=0.5, help="detection: 1/2 coherent, 1 non-coherent")
    g = common.add_argument_group("grids")
    g.add_argument("--grid-n", type=int, default=41)
    g.add_argument("--grid-db", type=float, default=20.0)
    g.add_argument("--snr-db", type=_float_list, default=None, help="comma list of average SNRs in dB")
    g.add_argument("--gamma-th-db", type=_float_list, default=None, help="outage thresholds in dB")
    g.add_argument("--c-th", type=_float_list, default=None, help="capacity thresholds in nats")
    g.add_argument("--r", type=_float_list, default=None, help="SNR values (linear) for the density")
    g = common.add_argument_group("numerics")
    g.add_argument("--bits", type=int, default=10 ** 6)
    g.add_argument("--samples", type=int, default=10 ** 6)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--tol", type=float, default=1e-8)
    g.add_argument("--eps", type=float, default=1e-4)
    g.add_argument("--measure", choices=MEASURES, default="capacity")
    g.add_argument("--method", choices=("quadrature", "mc"), default="quadrature")
    g.add_argument("--n", type=int, default=64, help="rule order for gcq-table")
    g = common.add_argument_group("input and output")
    g.add_argument("--units", choices=("nats", "bits"), default="nats")
    g.add_argument("--in", dest="input", default=None, help="measurement-set file (CSV or .json)")
    g.add_argument("--out", dest="output", default=None, help="output file (default: standard output)")

    parser = argparse.ArgumentParser(
        prog="apm-bridge",
        description="Conversions among average performance measures of fading links.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    helps = {
        "simulate-aber": "simulate an ABER measurement campaign and write a measurement set",
        "aber2acc": "ACC from ABER (measurement file or model closed form)",
        "acc2op": "outage probability from the ACC over thresholds",
        "acc2oc": "outage capacity from the ACC over capacity thresholds",
        "acc2pdf": "SNR density recovered from the ACC",
        "acc2apm": "any measure from the ACC",
        "oracle": "direct averaging by quadrature or Monte Carlo",
        "gcq-table": "nodes and weights of the half-line Chebyshev rule",
        "selftest": "run the acceptance checks",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
    return parser


def config_from_args(args):
    values = {f.name: getattr(args, f.name) for f in fields(RunConfig) if hasattr(args, f.name)}
    config = RunConfig(**values)
    config.validate()
    return config


# ---------------------------------------------------------------- helpers

def make_model(config):
    if config.model == "rayleigh":
        return Rayleigh()
    if config.model == "nakagami":
        return Nakagami(config.m)
    if config.model == "gnm":
        return GeneralizedNakagami(config.m, config.xi)
    return CascadedGNM(tuple(config.hops))


def make_measure(config):
    if config.measure == "capacity":
        return Capacity()
    if config.measure == "ber":
        return WojnarBer(config.a, config.b)
    if config.measure == "reliability":
        return Reliability(config.a, config.b)
    return OutageIndicator(db_to_linear(config.gamma_th_db[0]))


def snr_points(config):
    from .empirical import make_grid

    if config.snr_db is not None:
        return np.asarray(config.snr_db, dtype=float)
    return make_grid(config.grid_n, config.grid_db)


def single_snr_db(config):
    return 0.0 if config.snr_db is None else float(config.snr_db[0])


def format_float(value):
    text = f"{float(value):.17g}"
    if all(ch not in text for ch in ".enai"):
        text += ".0"
    return text


def header_lines(config, columns):
    return [
        f"apm-bridge {__version__} {config.subcommand}",
        f"config={config.to_json()}",
        f"columns: {columns}",
    ]


def write_table(config, columns, rows, stream):
    lines = [f"# {line}" for line in header_lines(config, columns)]
    lines += [",".join(format_float(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stream.write(text)


def read_config_header(path):
    """Recover the RunConfig embedded in an output file."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# config="):
                return RunConfig.from_json(line[len("# config="):].strip())
    raise ConfigError(f"{path}: no embedded config line")


def _capacity_scale(config):
    return 1.0 / math.log(2.0) if config.units == "bits" else 1.0


# ---------------------------------------------------------------- subcommands

def cmd_simulate_aber(config, stream):
    from .empirical import measure_aber_campaign, write_set
    from .relationships import ModulationParams

    campaign = measure_aber_campaign(
        make_model(config), snr_points(config), ModulationParams(config.a, config.b), config.bits, config.seed,
        label=f"simulated {config.model}",
    )
    write_set(campaign, config.output, comments=header_lines(config, "snr_db,value,stderr"))


def cmd_aber2acc(config, stream):
    from .empirical import SafetyMarginWarning, ibp_acc, read_set
    from .relationships import ModulationParams, aber_curve, acc_from_aber

    scale = _capacity_scale(config)
    points = snr_points(config)
    rows = []
    if config.input:
        mset = read_set(config.input)
        if mset.modulation is None:
            mset.modulation = ModulationParams(config.a, config.b)
        outside = []
        for db in points:
            with warnings.catch_warnings():
                warnings.simplefilter("error", SafetyMarginWarning)
                try:
                    value = ibp_acc(mset, db_to_linear(db), config.tol)
                except SafetyMarginWarning:
                    outside.append(db)
                    warnings.simplefilter("ignore", SafetyMarginWarning)
                    value = ibp_acc(mset, db_to_linear(db), config.tol)
            rows.append((db, scale * value))
        if outside:
            print(
                f"apm-bridge: notice: {len(outside)} of {len(points)} points lie outside the IBP safety margin "
                f"of the measurement grid",
                file=sys.stderr,
            )
    else:
        params = ModulationParams(config.a, config.b)
        curve = aber_curve(make_model(config), params)
        for db in points:
            rows.append((db, scale * acc_from_aber(curve, params, db_to_linear(db), config.tol)))
    write_table(config, f"x=snr_db,value=acc_{config.units}", rows, stream)


def _acc_curve(config):
    from .relationships import acc_curve

    return acc_curve(make_model(config))


def cmd_acc2op(config, stream):
    from .relationships import op_from_acc

    curve = _acc_curve(config)
    mean_db = single_snr_db(config)
    if config.gamma_th_db is not None:
        thresholds = config.gamma_th_db
    else:
        from .empirical import make_grid

        thresholds = mean_db + make_grid(config.grid_n, config.grid_db)
    rows = [(t, op_from_acc(curve, db_to_linear(mean_db), db_to_linear(t), config.eps)) for t in thresholds]
    write_table(config, "x=gamma_th_db,value=outage_probability", rows, stream)


def cmd_acc2oc(config, stream):
    from .relationships import oc_from_acc

    curve = _acc_curve(config)
    mean = db_to_linear(single_snr_db(config))
    thresholds = config.c_th if config.c_th is not None else np.linspace(0.25, 5.0, 20)
    rows = [(c, oc_from_acc(curve, mean, float(c), config.eps)) for c in thresholds]
    write_table(config, "x=c_th_nats,value=outage_capacity", rows, stream)


def cmd_acc2pdf(config, stream):
    from .relationships import pdf_from_acc

    curve = _acc_curve(config)
    mean = db_to_linear(single_snr_db(config))
    r = np.asarray(config.r if config.r is not None else mean * np.linspace(0.05, 10.0, 200), dtype=float)
    dens = np.atleast_1d(pdf_from_acc(curve, mean, r))
    write_table(config, "x=r,value=pdf", zip(r, dens), stream)


def cmd_acc2apm(config, stream):
    from .relationships import apm_from_acc

    curve = _acc_curve(config)
    measure = make_measure(config)
    scale = _capacity_scale(config) if config.measure == "capacity" else 1.0
    rows = [
        (db, scale * apm_from_acc(curve, measure, db_to_linear(db), config.tol, config.eps)) for db in snr_points(config)
    ]
    write_table(config, f"x=snr_db,value={config.measure}", rows, stream)


def cmd_oracle(config, stream):
    model = make_model(config)
    measure = make_measure(config)
    scale = _capacity_scale(config) if config.measure == "capacity" else 1.0
    rows = []
    if config.method == "mc":
        for i, db in enumerate(snr_points(config)):
            mean, se = apm_monte_carlo(model, db_to_linear(db), measure, config.samples, config.seed + i)
            rows.append((db, scale * mean, scale * se))
        columns = f"x=snr_db,value={config.measure},stderr"
    else:
        for db in snr_points(config):
            rows.append((db, scale * apm_quadrature(model, db_to_linear(db), measure, config.tol)))
        columns = f"x=snr_db,value={config.measure}"
    write_table(config, columns, rows, stream)


def cmd_gcq_table(config, stream):
    from .numerics import gcq_rule

    rule = gcq_rule(config.n)
    write_table(config, "x=node,value=weight", zip(rule.nodes, rule.weights), stream)


def cmd_selftest(config, stream):
    from .acceptance import run_all

    results = run_all(stream=sys.stderr)
    failed = [r for r in results if not r.passed]
    rows = [(r.number, 1.0 if r.passed else 0.0) for r in results]
    write_table(config, "x=criterion,value=passed", rows, stream)
    return EXIT_NUMERICAL if failed else EXIT_OK


COMMANDS = {
    "simulate-aber": cmd_simulate_aber,
    "aber2acc": cmd_aber2acc,
    "acc2op": cmd_acc2op,
    "acc2oc": cmd_acc2oc,
    "acc2pdf": cmd_acc2pdf,
    "acc2apm": cmd_acc2apm,
    "oracle": cmd_oracle,
    "gcq-table": cmd_gcq_table,
    "selftest": cmd_selftest,
}


def run(config, stream=None):
    """Execute a validated configuration; returns the exit status."""
    stream = stream or sys.stdout
    try:
        config.validate()
        status = COMMANDS[config.subcommand](config, stream)
    except IntegrationError as exc:
        print(f"apm-bridge: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ApmBridgeError, OSError) as exc:
        print(f"apm-bridge: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK if status is None else status


def main(argv=None):
    parser = build_parser()
    argv = _join_negative_lists(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        config = config_from_args(args)
    except ApmBridgeError as exc:
        print(f"apm-bridge: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(config)


if __name__ == "__main__":
    raise SystemExit(main())
