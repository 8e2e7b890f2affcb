"""
mdtk command line
Builds statistics, computes moments, runs Monte Carlo tail experiments and
prints bound reports. Results go to stdout or --output; logs go to stderr.
"""

import argparse
import logging
import sys
import time
from pathlib import Path

from common import __version__
from common.config import load_config, default_lanes
from common.errors import MdtkError, ConfigError, UnsupportedSizeError, EXIT_OK, EXIT_VALIDATION
from common.logs import setup_logging
from common.protocol import RunManifest, TailKind, MomentMethod, Provenance, dumps, error_payload
from common.streams import RNG_ID
from applications import (KRunsSpec, UStatSpec, SubgraphSpec, build_kruns, build_ustat, build_subgraph,
                          build_iid, kernel_facts, kruns_raw_model, Statistic)
from localstat import BaseVariableSpec, load_model, build_dependency, check_parameter_inequalities
from mc.engine import ExperimentConfig, estimate_tails
from mc.mgf import mgf_check, iid_log_mgf
from mc.report import CSV_COLUMNS, relative_error_table, row_record, to_csv, to_json
from mc.table1 import TABLE1_COLUMNS, run_table1
from moments import compute_moments, kruns_sigma2_analytic, ustat_sigma2_hoeffding, variance_exact
from oracle import run_oracle_check
from tails import (TailApprox, theorem1_bound, kolmogorov_bound, mgf_t_max, kruns_bound, ustat_bound,
                   subgraph_bound)

logger = logging.getLogger("mdtk.cli")

FAMILIES = ("kruns", "ustat", "subgraph", "iid", "file")
BOUND_FAMILIES = ("theorem1", "kruns", "ustat", "subgraph")
METHODS = ("auto", "exact", "analytic", "mc")
BOUND_COLUMNS = ["bound_value", "x_max", "in_range"]
TAIL_COLUMNS = ["x", "kind", "gamma", "right", "left", "log_right", "log_left"]
DEFAULT_T_GRID = "0,0.25,0.5,0.75,1"


def _grid(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _require(args, *names):
    missing = [f"--{name}" for name in names if getattr(args, name, None) is None]
    if missing:
        raise ConfigError(f"{args.command} needs {', '.join(missing)}")


class Run:
    """Resolved settings of one invocation plus its manifest"""

    def __init__(self, args):
        self.args = args
        self.config = load_config(args.config)
        self.seed = self.config["experiment"]["seed"] if args.seed is None else args.seed
        self.lanes = args.lanes or default_lanes(self.config)
        self.block_size = self.config["experiment"]["block_size"]
        self.C = self.config["bounds"]["C"] if args.C is None else args.C
        self.C0 = self.config["bounds"]["C0"] if args.C0 is None else args.C0
        self.started = time.perf_counter()
        flags = {k: v for k, v in vars(args).items() if k != "handler"}
        self.manifest = RunManifest(subcommand=args.command, flags=flags, seed=self.seed, rng_id=RNG_ID,
                                    code_version=__version__)

    @property
    def method(self) -> str:
        if self.args.exact_moments:
            if self.args.method not in ("auto", "exact"):
                raise ConfigError(f"--exact-moments conflicts with --method {self.args.method}")
            return "exact"
        return self.args.method

    def note(self, text: str):
        self.manifest.note(text)

    def emit(self, text: str):
        self.manifest.wall_time = time.perf_counter() - self.started
        if self.args.output:
            path = Path(self.args.output)
            path.write_text(text, encoding="utf-8")
            self.manifest.output_paths = [str(path)]
            sidecar = self.manifest.write_sidecar(str(path))
            logger.info(f"Wrote {path} (manifest {sidecar})")
        else:
            sys.stdout.write(text)
            logger.debug(f"Manifest: {self.manifest.to_json()}")

    def emit_records(self, records: list, columns: list):
        self.emit(to_json(records, columns) if self.args.format == "json" else to_csv(records, columns))

    def emit_document(self, doc):
        self.emit(dumps(doc, indent=2) + "\n")


def build_statistic(family: str, run: Run) -> Statistic:
    args = run.args
    kwargs = dict(config=run.config, seed=run.seed, lanes=run.lanes, moments_method=run.method,
                  progress=args.progress)
    if family == "kruns":
        _require(args, "n", "k", "p")
        return build_kruns(KRunsSpec(args.n, args.k, args.p), **kwargs)
    if family == "ustat":
        _require(args, "m", "s")
        spec = UStatSpec(args.m, args.s, args.kernel, BaseVariableSpec.parse(args.base),
                         require_nondegenerate=not args.allow_degenerate)
        return build_ustat(spec, **kwargs)
    if family == "subgraph":
        _require(args, "N", "p", "pattern")
        return build_subgraph(SubgraphSpec(args.N, args.p, args.pattern), **kwargs)
    if family == "iid":
        _require(args, "n")
        return build_iid(args.n, BaseVariableSpec.parse(args.base))
    if family == "file":
        _require(args, "model_file")
        model = load_model(args.model_file)
        moments = compute_moments(model, run.method, seed=run.seed, lanes=run.lanes, config=run.config,
                                  progress=args.progress)
        return Statistic(name=model.name, spec={"model_file": args.model_file}, model=model, direct=None,
                         sigma2=moments.sigma2, moments=moments, notes=list(moments.notes))
    raise ConfigError(f"unknown family {family!r}")


def family_bounds(family: str, stat: Statistic, xs, C: float, C0: float) -> list:
    spec = stat.spec
    if family == "kruns":
        return [kruns_bound(spec.n, spec.k, stat.sigma2, x, C, C0) for x in xs]
    if family == "ustat":
        return [ustat_bound(spec.m, spec.s, stat.sigma2, stat.extras["c1"], x, C, C0) for x in xs]
    if family == "subgraph":
        return [subgraph_bound(spec.N, spec.p, spec.graph, x, C, C0) for x in xs]
    params = stat.structural_params()
    return [theorem1_bound(params, x, C, C0, family=family) for x in xs]


def _record_statistic(run: Run, stat: Statistic):
    run.note(f"statistic: {stat.name}")
    run.note(f"sigma provenance: {stat.sigma_provenance}")
    if stat.sigma_provenance == Provenance.ESTIMATED.value:
        run.note(f"sigma^2 = {stat.sigma2!r} +/- {stat.sigma2_se!r} (Monte Carlo)")
    run.note(f"moments: {MomentMethod(stat.moments.method).value}")
    for note in stat.notes:
        run.note(note)


def cmd_run(run: Run):
    """kruns / ustat / subgraph: build, moments, tails, relative errors, bounds"""
    args = run.args
    stat = build_statistic(args.command, run)
    _record_statistic(run, stat)
    x_grid = args.x or run.config["experiment"]["x_grid"]
    exp_config = ExperimentConfig(x_grid=x_grid, reps=args.reps or run.config["experiment"]["reps"],
                                  seed=run.seed, lanes=run.lanes, block_size=run.block_size,
                                  model_ref=stat.name, progress=args.progress)
    estimates = estimate_tails(stat.sampler, exp_config)
    rows = relative_error_table(estimates, stat.moments.gamma)
    records = [row_record(row, exp_config.reps, exp_config.seed, exp_config.lanes, exp_config.rng_id)
               for row in rows]
    try:
        bounds = family_bounds(args.command, stat, exp_config.x_grid, run.C, run.C0)
        for rec, bound in zip(records, bounds):
            rec.update(bound_value=bound.bound_value, x_max=bound.x_max, in_range="yes" if bound.in_range else "no")
        run.note(f"bound constants {bounds[0].constants_used}: {bounds[0].constants_provenance}")
    except UnsupportedSizeError as e:
        logger.warning(f"No bound report: {e}")
        run.note(f"bounds skipped: {e}")
    run.emit_records(records, CSV_COLUMNS + BOUND_COLUMNS)


def cmd_table1(run: Run):
    args = run.args
    result = run_table1(reps=args.reps, seed=run.seed, lanes=run.lanes, x_grid=args.x, config=run.config,
                        progress=args.progress)
    run.note(f"gamma = {result.gamma!r} (analytic)")
    if result.failures:
        run.note(f"cells outside tolerance: {result.failures}")
    run.emit_records(result.records, TABLE1_COLUMNS)


def cmd_moments(run: Run):
    args = run.args
    stat = build_statistic(args.family, run)
    _record_statistic(run, stat)
    doc = stat.describe()
    if args.check_params and stat.model is not None:
        deps = build_dependency(stat.model)
        doc["inequalities"] = check_parameter_inequalities(stat.model, deps, stat.moments.var_W,
                                                           stat.moments.gamma).to_dict()
    run.emit_document(doc)


def cmd_tails(run: Run):
    args = run.args
    approx = TailApprox(TailKind(args.kind), args.gamma)
    records = [{
        "x": x, "kind": approx.kind.value, "gamma": args.gamma,
        "right": approx.right(x), "left": approx.left(x),
        "log_right": approx.log_right(x), "log_left": approx.log_left(x),
    } for x in (args.x or [0.0])]
    if args.json:
        args.format = "json"
    run.emit_records(records, TAIL_COLUMNS)


def _bound_sigma2_kruns(run: Run, spec: KRunsSpec) -> float:
    if run.args.sigma2 is not None:
        return run.args.sigma2
    if spec.k == 2:
        return kruns_sigma2_analytic(spec.n, spec.p)
    if spec.n <= run.config["moments"]["kruns_exact_max_n"]:
        return variance_exact(kruns_raw_model(spec))
    raise ConfigError(f"no closed form for k={spec.k}; pass --sigma2 for n={spec.n}")


def cmd_bounds(run: Run):
    args = run.args
    xs = args.x or [0.0]
    doc = {"family": args.family, "constants_provenance": Provenance.USER_SUPPLIED.value}
    params = None
    if args.family == "theorem1":
        _require(args, "params")
        if len(args.params) != 5:
            raise ConfigError(f"--params takes m,n,s,d,delta, got {args.params}")
        m, n, s, d, delta = args.params
        params = (int(m), int(n), int(s), int(d), delta)
        reports = [theorem1_bound(params, x, run.C, run.C0) for x in xs]
    elif args.family == "kruns":
        _require(args, "n", "k", "p")
        spec = KRunsSpec(args.n, args.k, args.p)
        reports = [kruns_bound(spec.n, spec.k, _bound_sigma2_kruns(run, spec), x, run.C, run.C0) for x in xs]
    elif args.family == "ustat":
        _require(args, "m", "s")
        spec = UStatSpec(args.m, args.s, args.kernel, BaseVariableSpec.parse(args.base),
                         require_nondegenerate=not args.allow_degenerate)
        facts = kernel_facts(spec)
        sigma2 = args.sigma2 if args.sigma2 is not None else ustat_sigma2_hoeffding(spec.m, spec.s, facts.zetas)
        reports = [ustat_bound(spec.m, spec.s, sigma2, facts.c1, x, run.C, run.C0) for x in xs]
    else:
        _require(args, "N", "p", "pattern")
        spec = SubgraphSpec(args.N, args.p, args.pattern)
        reports = [subgraph_bound(spec.N, spec.p, spec.graph, x, run.C, run.C0) for x in xs]
        doc["psi"] = reports[0].extras["psi"]
        doc["x_max"] = reports[0].x_max
    if params is None and args.family != "subgraph":
        p = reports[0].parameters
        params = (p["m"], p["n"], p["s"], p["d"], p["delta"])
    if params is not None:
        doc["kolmogorov_bound"] = kolmogorov_bound(params, run.C)
        doc["mgf_t_max"] = mgf_t_max(params, run.C0)
    doc["reports"] = [r.to_dict() for r in reports]
    run.emit_document(doc)


def cmd_mgf(run: Run):
    args = run.args
    stat = build_statistic(args.family, run)
    _record_statistic(run, stat)
    reps = args.reps or run.config["moments"]["mc_reps"]
    report = mgf_check(stat.sampler, args.t, reps, run.seed, stat.moments.gamma, lanes=run.lanes,
                       block_size=run.block_size, bootstrap=args.bootstrap or run.config["mgf"]["bootstrap"],
                       progress=args.progress)
    doc = report.to_dict()
    doc["statistic"] = stat.name
    if stat.params is not None or stat.model is not None:
        doc["t_max"] = mgf_t_max(stat.structural_params(), run.C0)
    if args.family == "iid":
        base = BaseVariableSpec.parse(args.base)
        for row in doc["rows"]:
            row["exact"] = iid_log_mgf(args.n, base, row["t"])
    run.emit_document(doc)


def cmd_oracle_check(run: Run) -> int:
    report = run_oracle_check(seed=run.seed, trials=run.args.trials)
    run.note(f"oracle check passed: {report.passed}")
    run.emit_document(report.to_dict())
    return EXIT_OK if report.passed else EXIT_VALIDATION


def _add_family_flags(parser):
    group = parser.add_argument_group("statistic")
    group.add_argument('--n', type=int, default=None, help='k-runs length / i.i.d. sample size')
    group.add_argument('--k', type=int, default=None, help='Run length')
    group.add_argument('--p', type=float, default=None, help='Success / edge probability')
    group.add_argument('--m', type=int, default=None, help='U-statistic sample size')
    group.add_argument('--s', type=int, default=None, help='Kernel order')
    group.add_argument('--kernel', default='product', choices=['product', 'product-plus-linear'])
    group.add_argument('--base', default='rademacher',
                       help='rademacher | bernoulli:p | centered-bernoulli:p')
    group.add_argument('--allow-degenerate', action='store_true', help='Accept kernels with zero first projection')
    group.add_argument('--N', type=int, default=None, help='Vertices of G(N,p)')
    group.add_argument('--pattern', default=None, help='edge | triangle | path:L | star:L | cycle:L | custom:<file>')
    group.add_argument('--model-file', default=None, help='JSON model description')


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=None, help='Unsigned 64-bit master seed')
    common.add_argument('--reps', type=int, default=None, help='Monte Carlo repetitions')
    common.add_argument('--lanes', type=int, default=None, help='Worker lanes (env MDTK_DEFAULT_LANES)')
    common.add_argument('--output', default=None, help='Output file (a .manifest.json sidecar is written next to it)')
    common.add_argument('--format', default='csv', choices=['csv', 'json'])
    common.add_argument('--x', type=_grid, default=None, help='Comma separated x grid, e.g. 2,2.5,3')
    common.add_argument('--C', type=float, default=None, help='Bound constant C (user-supplied)')
    common.add_argument('--C0', type=float, default=None, help='Range constant C0 (user-supplied)')
    common.add_argument('--method', default='auto', choices=METHODS, help='Moment method')
    common.add_argument('--exact-moments', action='store_true', help='Shorthand for --method exact')
    common.add_argument('--config', default=None, help='Alternate defaults file (env MDTK_CONFIG)')
    common.add_argument('--log-level', default='info', choices=['debug', 'info', 'warning', 'error'])
    common.add_argument('--progress', action='store_true', help='Show a progress bar over Monte Carlo blocks')

    parser = argparse.ArgumentParser(prog='mdtk', description='Skewness-corrected tails of local statistics')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('table1', parents=[common], help='k-runs (1500, 2, 0.25) against published relative errors')
    p.set_defaults(handler=cmd_table1)

    for name, help_text in (('kruns', 'Circular k-runs'), ('ustat', 'U-statistic sums'),
                            ('subgraph', 'Subgraph counts in G(N,p)')):
        p = sub.add_parser(name, parents=[common], help=help_text)
        _add_family_flags(p)
        p.set_defaults(handler=cmd_run)

    p = sub.add_parser('moments', parents=[common], help='Variance and gamma of a statistic')
    p.add_argument('--family', default='file', choices=FAMILIES)
    p.add_argument('--check-params', action='store_true', help='Also check the structural parameter inequalities')
    _add_family_flags(p)
    p.set_defaults(handler=cmd_moments)

    p = sub.add_parser('tails', parents=[common], help='Normal, skew-corrected and Poisson tail values')
    p.add_argument('--gamma', type=float, default=0.0)
    p.add_argument('--kind', default='skew', choices=[k.value for k in TailKind])
    p.add_argument('--json', action='store_true', help='Same as --format json')
    p.set_defaults(handler=cmd_tails)

    p = sub.add_parser('bounds', parents=[common], help='Error bound and range reports')
    p.add_argument('--family', default='theorem1', choices=BOUND_FAMILIES)
    p.add_argument('--params', type=_grid, default=None, help='theorem1: m,n,s,d,delta')
    p.add_argument('--sigma2', type=float, default=None, help='Raw variance, overrides the computed one')
    _add_family_flags(p)
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser('mgf', parents=[common], help='log E exp(tW) against t^2/2 + gamma t^3/6')
    p.add_argument('--family', default='kruns', choices=FAMILIES)
    p.add_argument('--t', type=_grid, default=_grid(DEFAULT_T_GRID), help='Comma separated t grid')
    p.add_argument('--bootstrap', type=int, default=None, help='Bootstrap resamples over blocks')
    _add_family_flags(p)
    p.set_defaults(handler=cmd_mgf)

    p = sub.add_parser('oracle-check', parents=[common], help='Cross-validate moments and samplers on tiny models')
    p.add_argument('--trials', type=int, default=50, help='Random tiny models')
    p.set_defaults(handler=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    try:
        run = Run(args)
        code = args.handler(run)
        return EXIT_OK if code is None else code
    except MdtkError as e:
        logger.error(f"{e.kind}: {e}")
        sys.stderr.write(error_payload(e.kind, str(e)) + "\n")
        return e.exit_code
    except OSError as e:
        logger.error(f"io: {e}")
        sys.stderr.write(error_payload("io", str(e)) + "\n")
        return EXIT_VALIDATION
