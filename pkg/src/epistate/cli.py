"""``epistate`` command-line front end.

Exit codes: 0 success, 1 runtime failure, 2 usage error. Angles are in
degrees. Reports go to stdout or ``--output`` as JSON (default) or CSV.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from . import experiments as ex
from .contextprob import joint_measure_feasible
from .rng import BOOTSTRAP_STREAM, MAX_SEED, make_rng
from .report import Derived, ExperimentReport, bootstrap

EXPERIMENTS = ("double-slit", "mzi", "epr", "chsh", "teleport-ideal", "teleport-optical", "rho", "gns-demo")


# --- argument types -------------------------------------------------------------


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _angle(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("angle must be finite")
    return v


def _fraction(text: str) -> float:
    v = _angle(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return v


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'A,B' in degrees, got {text!r}")
    return _angle(parts[0]), _angle(parts[1])


def _sites(text: str) -> tuple[int, ...]:
    try:
        sites = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated site indices, got {text!r}")
    if not sites:
        raise argparse.ArgumentTypeError("slit needs at least one site")
    return sites


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="64-bit unsigned seed (default 0)")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--shards", type=_positive, default=1, help="worker threads (results do not depend on it)")
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv"), default="json")
    engine = argparse.ArgumentParser(add_help=False)
    engine.add_argument("--engine", choices=ex.ENGINES, default="qm", help="qm (standard) or ess (elementary states)")
    shots = argparse.ArgumentParser(add_help=False)
    shots.add_argument("--shots", type=_positive, default=100_000, help="shots per configuration")

    p = argparse.ArgumentParser(prog="epistate", description="Quantum and elementary-state experiment simulators.")
    sub = p.add_subparsers(dest="experiment", required=True, metavar="EXPERIMENT")

    s = sub.add_parser("double-slit", parents=[common, fmt, shots], help="three-term double-slit spectrum")
    s.add_argument("--sites", type=_positive, default=64)
    s.add_argument("--slit-a", type=_sites, default=(23, 24))
    s.add_argument("--slit-b", type=_sites, default=(39, 40))
    s.add_argument("--readout", choices=("momentum", "position"), default="momentum")
    s.add_argument("--single", action="store_true", help="detect the classical mixture of single-slit runs")

    s = sub.add_parser("mzi", parents=[common, fmt, engine, shots], help="delayed-choice Mach-Zehnder")
    s.add_argument("--config", nargs="+", choices=ex.MZ_CONFIGS, default=["closed"])
    s.add_argument("--decision-time", nargs="+", choices=ex.ess.DECISION_TIMES, default=["before_entry"])
    s.add_argument("--delta", type=_angle, default=0.0, help="extra arm phase in degrees (qm engine)")

    s = sub.add_parser("epr", parents=[common, fmt, engine, shots], help="singlet correlation sweep")
    s.add_argument("--axes", nargs="+", type=_pair, default=[(0.0, 0.0), (0.0, 90.0)],
                   help="measurement angle pairs 'A,B' in the x-z plane")

    s = sub.add_parser("chsh", parents=[common, fmt, engine, shots], help="CHSH value and joint-measure test")
    for name, default in zip(("--a", "--a2", "--b", "--b2"), np.degrees(ex.CHSH_AXES)):
        s.add_argument(name, type=_angle, default=float(default))

    s = sub.add_parser("teleport-ideal", parents=[common, fmt, shots], help="spin teleportation with Bell measurement")
    s.add_argument("--theta", type=_angle, default=60.0, help="alpha = cos(theta/2)")
    s.add_argument("--phi", type=_angle, default=30.0, help="beta = exp(i phi) sin(theta/2)")
    s.add_argument("--no-correction", action="store_true")

    s = sub.add_parser("teleport-optical", parents=[common, fmt, engine, shots], help="two-pair optical teleportation")
    s.add_argument("--encoder", type=_angle, default=90.0)
    s.add_argument("--pbs", type=_angle, default=90.0)
    s.add_argument("--misaligned", action="store_true", help="photons {1},{2} never meet at the BS")
    s.add_argument("--overlap", type=_fraction, default=1.0, help="chance {1},{2} arrive together when aligned")

    s = sub.add_parser("rho", parents=[common, fmt, engine], help="N-(45)/N-(90) at matched coincidence counts")
    s.add_argument("--target", type=_positive, default=1_000_000)
    s.add_argument("--overlap", type=_fraction, default=ex.DEFAULT_OVERLAP)

    s = sub.add_parser("gns-demo", parents=[common], help="projector state on two spins and its GNS representation")
    s.add_argument("--format", choices=("text", "json", "csv"), default="text")
    s.add_argument("--samples", type=_positive, default=100)
    return p


def _check_output(parser: argparse.ArgumentParser, path: str | None) -> None:
    if path is None:
        return
    if os.path.isdir(path):
        parser.error(f"--output {path!r} is a directory")
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        parser.error(f"--output {path!r} is not writable")
    if os.path.exists(path) and not os.access(path, os.W_OK):
        parser.error(f"--output {path!r} is not writable")


def _validate(parser: argparse.ArgumentParser, a: argparse.Namespace) -> None:
    if a.experiment == "double-slit":
        if not 2 <= a.sites <= 256:
            parser.error("--sites must lie in [2, 256]")
        try:
            a.model = ex.DoubleSlitModel(a.sites, a.slit_a, a.slit_b)
        except ValueError as e:
            parser.error(str(e))
    if a.experiment == "mzi" and a.engine == "ess" and a.delta != 0.0:
        parser.error("--delta applies to the qm engine only")
    _check_output(parser, a.output)


# --- runners --------------------------------------------------------------------


def _frac_ci(num_cells, rng):
    """Bootstrap of the share of category 0 among the given cells."""
    return bootstrap([num_cells], lambda d: d[:, 0] / d.sum(axis=1), rng)


def _double_slit(a, rng) -> ExperimentReport:
    model = a.model
    projs = model.site_projectors() if a.readout == "position" else None
    spectrum = ex.double_slit_spectrum(model, not a.single, projs)
    counts = ex.sample_double_slit(spectrum, a.shots, a.seed, a.shards)
    derived = {
        "interference_sign_changes": Derived(spectrum.sign_changes()),
        "max_abs_interference": Derived(float(np.abs(spectrum.interference).max())),
        "three_term_sum": Derived(float(spectrum.total.sum())),
        "classical_gap": Derived(float(np.abs(spectrum.total - spectrum.interference - spectrum.classical).max())),
        "p_pass_a": Derived(spectrum.p_pass_a),
        "p_pass_b": Derived(spectrum.p_pass_b),
    }
    params = {"sites": a.sites, "slit_a": list(a.slit_a), "slit_b": list(a.slit_b), "readout": a.readout,
              "both_open": not a.single}
    return ExperimentReport("double-slit", None, a.seed, a.shots, params,
                            {f"k{i}": int(c) for i, c in enumerate(counts)}, derived)


def _mzi(a, rng) -> ExperimentReport:
    schedule = [(c, t) for c in a.config for t in a.decision_time]
    res = ex.run_delayed_choice(schedule, a.shots, a.engine, a.seed, np.radians(a.delta), a.shards)
    counts, derived = {}, {}
    single = len(schedule) == 1
    for (c, t), n in zip(schedule, res.counts):
        prefix = "" if single else f"{c}/{t}:"
        counts[prefix + "Da"] = n["Da"]
        counts[prefix + "Db"] = n["Db"]
        lo, hi = _frac_ci([n["Db"], n["Da"]], rng)
        derived[prefix + "P(Db)"] = Derived(n["Db"] / a.shots, lo, hi)
    if not single:
        derived["timing_independent"] = Derived(int(res.timing_independent()))
    params = {"config": a.config, "decision_time": a.decision_time, "delta_deg": a.delta}
    return ExperimentReport("mzi", a.engine, a.seed, a.shots, params, counts, derived)


def _corr_stat(d):
    return (d[:, 0] + d[:, 3] - d[:, 1] - d[:, 2]) / d.sum(axis=1)


def _epr_like(a, axes_deg, rng):
    axes = [(np.radians(x), np.radians(y)) for x, y in axes_deg]
    res = ex.run_epr_sweep(axes, a.shots, a.engine, a.seed, a.shards)
    counts, derived = {}, {}
    for i, ((x, y), c) in enumerate(zip(axes_deg, res.counts)):
        tag = f"({x:g},{y:g})"
        for lab in ex.PAIR_LABELS:
            counts[f"{tag}:{lab}"] = c[lab]
        lo, hi = bootstrap([[c[k] for k in ex.PAIR_LABELS]], _corr_stat, rng)
        derived[f"E{tag}"] = Derived(float(res.correlation(i)), lo, hi)
        if ex._same_axis(*axes[i]):
            derived[f"violations{tag}"] = Derived(res.violations(i))
    return res, counts, derived


def _epr(a, rng) -> ExperimentReport:
    _, counts, derived = _epr_like(a, a.axes, rng)
    params = {"axes_deg": [list(p) for p in a.axes]}
    return ExperimentReport("epr", a.engine, a.seed, a.shots, params, counts, derived)


def _chsh(a, rng) -> ExperimentReport:
    pairs = [(a.a, a.b), (a.a, a.b2), (a.a2, a.b), (a.a2, a.b2)]
    res, counts, derived = _epr_like(a, pairs, rng)
    cells = [[c[k] for k in ex.PAIR_LABELS] for c in res.counts]
    lo, hi = bootstrap(cells, lambda *d: _corr_stat(d[0]) + _corr_stat(d[1]) + _corr_stat(d[2]) - _corr_stat(d[3]), rng)
    derived["CHSH"] = Derived(ex.chsh_value(res), lo, hi)
    feas = joint_measure_feasible(res.table)
    derived["joint_measure_feasible"] = Derived(int(feas.feasible))
    derived["max_abs_chsh"] = Derived(feas.chsh)
    params = {"a": a.a, "a2": a.a2, "b": a.b, "b2": a.b2}
    return ExperimentReport("chsh", a.engine, a.seed, a.shots, params, counts, derived)


def _teleport_ideal(a, rng) -> ExperimentReport:
    t, f = np.radians(a.theta), np.radians(a.phi)
    alpha, beta = complex(np.cos(t / 2)), complex(np.exp(1j * f) * np.sin(t / 2))
    res = ex.run_teleport_ideal(alpha, beta, a.shots, a.seed, not a.no_correction, a.shards)
    names = list(res.counts)
    cells = [res.counts[k] for k in names]
    fid = np.array([res.fidelities[k] for k in names])
    derived = {}
    lo, hi = bootstrap([cells], lambda d: (d @ fid) / d.sum(axis=1), rng)
    derived["mean_fidelity"] = Derived(res.mean_fidelity, lo, hi)
    for i, k in enumerate(names):
        lo, hi = bootstrap([cells], lambda d, i=i: d[:, i] / d.sum(axis=1), rng)
        derived[f"P({k})"] = Derived(res.counts[k] / a.shots, lo, hi)
        derived[f"fidelity({k})"] = Derived(res.fidelities[k])
    params = {"theta_deg": a.theta, "phi_deg": a.phi, "correction": not a.no_correction}
    return ExperimentReport("teleport-ideal", "qm", a.seed, a.shots, params, res.counts, derived)


def _optical_derived(counts, rng) -> Derived:
    nm, np_ = counts["N_minus"], counts["N_plus"]
    if nm + np_ == 0:
        return Derived(None)
    lo, hi = bootstrap([[nm, np_, counts["N_other"]]], lambda d: d[:, 0] / (d[:, 0] + d[:, 1]), rng)
    return Derived(nm / (nm + np_), lo, hi)


def _teleport_optical(a, rng) -> ExperimentReport:
    app = ex.TeleportApparatus(a.encoder, a.pbs, not a.misaligned, a.shots, a.engine, a.overlap)
    res = ex.run_optical_teleport(app, a.seed, a.shards)
    minus = _optical_derived(res.counts, rng)
    derived = {"minus_fraction": minus}
    if app.pbs_angle == app.encoder_angle and minus.value is not None:
        # photon 3 read in the encoded basis: the plus share of coincidences is the ensemble fidelity
        derived["fidelity"] = Derived(1 - minus.value, 1 - minus.ci_high, 1 - minus.ci_low)
    params = {"encoder_deg": app.encoder_angle, "pbs_deg": app.pbs_angle, "mirror_aligned": app.mirror_aligned,
              "overlap": a.overlap}
    return ExperimentReport("teleport-optical", a.engine, a.seed, a.shots, params, res.counts, derived)


def _rho(a, rng) -> ExperimentReport:
    res = ex.rho_statistic(a.target, a.seed, a.engine, a.overlap, a.shards)
    counts, derived = {}, {}
    for angle, run in res.runs.items():
        for k, v in run.counts.items():
            counts[f"{k}({angle:g})"] = v
    derived["rho"] = Derived(res.rho, res.ci_low, res.ci_high)
    for angle, run in res.runs.items():
        derived[f"minus_fraction({angle:g})"] = _optical_derived(run.counts, rng)
    params = {"target": a.target, "overlap": a.overlap, "angles_deg": list(ex.RHO_ANGLES)}
    return ExperimentReport("rho", a.engine, a.seed, res.shots, params, counts, derived, status=res.status)


def _gns_demo(a, rng) -> ExperimentReport:
    res = ex.gns_demo(a.samples, a.seed)
    derived = {k: Derived(v) for k, v in res.values.items()}
    derived["gns_dimension"] = Derived(res.rep_dim)
    derived["reproduction_error"] = Derived(res.reproduction_error)
    derived["homomorphism_error"] = Derived(res.homomorphism_error)
    return ExperimentReport("gns-demo", None, a.seed, 0, {"samples": a.samples}, {}, derived)


def gns_text(report: ExperimentReport) -> str:
    rows = [(k, d.value) for k, d in report.derived.items()]
    width = max(len(k) for k, _ in rows)
    lines = [f"{'quantity':<{width}}  value"]
    lines += [f"{k:<{width}}  {v:.12g}" for k, v in rows]
    return "\n".join(lines) + "\n"


RUNNERS = {
    "double-slit": _double_slit,
    "mzi": _mzi,
    "epr": _epr,
    "chsh": _chsh,
    "teleport-ideal": _teleport_ideal,
    "teleport-optical": _teleport_optical,
    "rho": _rho,
    "gns-demo": _gns_demo,
}


def run(args: argparse.Namespace) -> ExperimentReport:
    rng = make_rng(args.seed, BOOTSTRAP_STREAM)
    t0 = time.perf_counter()
    report = RUNNERS[args.experiment](args, rng)
    report.elapsed = time.perf_counter() - t0
    return report


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(parser, args)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        report = run(args)
        text = gns_text(report) if args.format == "text" else report.encode(args.format)
    except Exception as e:  # noqa: BLE001 - any failure after validation is a runtime error
        print(f"epistate: error: {e}", file=sys.stderr)
        return 1
    if report.status != "ok":
        print(f"epistate: {report.status}", file=sys.stderr)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            print(f"epistate: error: {e}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
