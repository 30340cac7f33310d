"""Command line: run a configured experiment and write its artifacts.

    python3 -m swirlmodel <command> [--config FILE] [--out DIR] [--threads N]

Commands: ode, rd, euler1d, lagrangian (run one model), sweep (vary one
config key), lift-check (3D residuals of a snapshot), verify (recompute
verdicts from stored files).

Exit status: 0 completed (or checks passed), 2 blowup, 1 error or failed check.
The output directory is ``--out``, else ``$SWIRLMODEL_OUT``, else
``[output] dir`` of the config.
"""

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import diagnostics, lagrangian, lift, model1d, ode, output, spectral
from .errors import SwirlModelError

ENV_OUT = "SWIRLMODEL_OUT"
EXIT_OK, EXIT_ERROR, EXIT_BLOWUP = 0, 1, 2
ODE_SAMPLES = 1000
LIFT_TOL = 1e-8

DEFAULT_EPS = {"rd": 1e-3, "gaussian": 1e-4}


@dataclass
class RunOutcome:
    status: str
    t_star: float = math.nan
    cause: str = ""
    peak_u: float = math.nan
    peak_v: float = math.nan
    peak_r: float = math.nan
    files: list = field(default_factory=list)

    @property
    def exit_code(self):
        return EXIT_BLOWUP if self.status == "Blowup" else EXIT_OK


# --- building blocks ----------------------------------------------------------

def resolve_scheme(doc):
    m = doc["model"]
    if m["scheme"] != "auto":
        return m["scheme"]
    return model1d.IMEX if m["nu"] > 0 else model1d.RK3


def init_kind(doc):
    kind = doc["init"]["kind"]
    if kind != "auto":
        return kind
    return "rd" if doc["model"]["kind"] == "rd" else "gaussian"


def _eps(doc, kind):
    eps = doc["init"]["eps"]
    return eps if eps > 0 else DEFAULT_EPS.get(kind, 1e-4)


def model_config(doc):
    m = doc["model"]
    return model1d.ModelConfig(nu=m["nu"], sign=m["sign"], dealias=m["dealias"],
                               scheme=resolve_scheme(doc), cfl=m["cfl"])


def default_dt0(doc):
    """dt0 = 0.01 eps for reaction-diffusion data, 1e-4 for Lagrangian runs, else 1e-3."""
    if doc["model"]["kind"] == "lagrangian":
        return 1e-4
    if init_kind(doc) == "rd":
        return 0.01 * _eps(doc, "rd")
    return 1e-3


def controller(doc):
    m = doc["model"]
    dt0 = m["dt0"] if m["dt0"] > 0 else default_dt0(doc)
    return model1d.StepController(dt0=dt0, cap=m["cap"], dt_min=m["dt_min"])


def initial_state(doc):
    kind = init_kind(doc)
    i = doc["init"]
    grid = spectral.grid_for(doc["grid"]["n"])
    model = doc["model"]["kind"]
    if model == "rd" and kind != "rd":
        raise cfgmod.BadValue("kind", f"the rd model needs rd initial data, not {kind}")
    if model == "euler1d" and kind == "rd":
        raise cfgmod.BadValue("kind", "rd initial data is for the rd model")
    if model == "lagrangian":
        if kind != "gaussian":
            raise cfgmod.BadValue("kind", "the lagrangian model supports gaussian data only")
        return lagrangian.make_lagrangian_gaussian(grid.n, _eps(doc, kind), doc["model"]["sign"])
    return model1d.make_initial_data(kind, grid, eps=_eps(doc, kind), A=i["a"], M=i["m"],
                                     profile_u=i["profile_u"], profile_psi=i["profile_psi"],
                                     sign=doc["model"]["sign"])


def _peaks(series):
    if len(series) == 0:
        return math.nan, math.nan
    pu = float(np.nanmax(np.maximum(np.abs(series["max_u"]), np.abs(series["min_u"]))))
    pv = float(np.nanmax(np.maximum(np.abs(series["max_v"]), np.abs(series["min_v"]))))
    return pu, pv


# --- single runs ---------------------------------------------------------------

def _run_ode(doc, out):
    m = doc["model"]
    s0 = ode.OdeState(m["u0"], m["v0"])
    p = ode.OdeParams(m["d"])
    verdict = ode.classify_trajectory(s0, p, m["t_end"])
    truncated = math.nan
    if m["t_end"] > 0:
        try:
            traj = ode.integrate_ode(s0, p, m["t_end"], m["t_end"] / ODE_SAMPLES)
        except ode.OdeBlowup as exc:
            traj = exc.trajectory
            truncated = exc.t_star
    else:
        traj = ode.OdeTrajectory(np.array([0.0]), np.array([s0.u]), np.array([s0.v]))
    series = diagnostics.Series()
    for t, u, v in zip(traj.t, traj.u, traj.v):
        series.append(diagnostics.DiagnosticsRecord(t=t, max_u=u, min_u=u, max_v=v, min_v=v))
    output.write_series(out / "series.csv", series)
    status = "Blowup" if verdict.kind is ode.TrajectoryClass.BLOWUP else "Completed"
    # a truncated series understates the peaks; the classifier's peak radius does not
    pu, pv = _peaks(series) if math.isnan(truncated) else (math.nan, math.nan)
    peak_r = math.exp(verdict.log_r_peak) if verdict.log_r_peak < 709.0 else math.inf
    outcome = RunOutcome(status, verdict.t_star, verdict.kind.value, pu, pv, peak_r, ["series.csv"])
    extra = {"classification": verdict.kind.value, "log_r_final": verdict.log_r_final,
             "log_r_peak": verdict.log_r_peak, "series_truncated_at": truncated}
    return outcome, extra


def _write_pde_snapshots(out, snapshots, nu):
    names = []
    for s in snapshots:
        name = output.snapshot_name(s.t)
        if isinstance(s, lagrangian.LagrangianState):
            z, psi = s.z, lagrangian.particle_stream(s)
        elif s.kind == model1d.EULER1D:
            z, psi = spectral.grid_for(len(s.u)).nodes, s.psi
        else:
            z, psi = spectral.grid_for(len(s.u)).nodes, np.full(len(s.u), np.nan)
        output.write_snapshot(out / name, s.t, z, s.u, s.v, psi, nu)
        names.append(name)
    return names


def _run_pde(doc, out):
    m, o = doc["model"], doc["output"]
    init = initial_state(doc)
    extra = {}
    if m["kind"] == "lagrangian":
        c0 = diagnostics.amplification_constant(init.u, init.v)
        run = lagrangian.run_lagrangian(init, controller(doc), m["t_end"], o["record_every"],
                                        o["snapshot_times"])
        series = run.series
        nu = 0.0  # inviscid model; [model] nu is not used
    else:
        c0 = diagnostics.amplification_constant(init.u, init.v)
        run = model1d.run_model(init, model_config(doc), controller(doc), m["t_end"],
                                record_every=o["record_every"],
                                snapshot_times=o["snapshot_times"],
                                snapshot_every=o["snapshot_every"] or None)
        series = run.series
        nu = m["nu"]
        extra["scheme"] = resolve_scheme(doc)
    extra["dt0"] = controller(doc).dt0
    output.write_series(out / "series.csv", series)
    files = ["series.csv"] + _write_pde_snapshots(out, run.snapshots, nu)
    extra.update({"c0": c0, "u0_inf": float(np.max(np.abs(init.u))), "steps": run.steps,
                  "t_final": run.state.t})
    pu, pv = _peaks(series)
    return RunOutcome(run.status, run.t_star, run.cause, pu, pv, files=files), extra


def run_config(doc, out_dir):
    """Run the model named in ``doc`` and write series, snapshots and manifest.

    Returns a :class:`RunOutcome`; the manifest is written even on blowup.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if doc["model"]["kind"] == "ode":
        outcome, extra = _run_ode(doc, out)
    else:
        outcome, extra = _run_pde(doc, out)
    entries = {
        "model": doc["model"]["kind"],
        "n": doc["grid"]["n"],
        "init": "ode" if doc["model"]["kind"] == "ode" else init_kind(doc),
        "t_start": 0.0,
        "t_end": doc["model"]["t_end"],
        "status": outcome.status,
        "t_star": outcome.t_star,
        "cause": outcome.cause,
        **extra,
    }
    output.write_manifest(out / "manifest.txt", entries, outcome.files, cfgmod.emit(doc))
    return outcome


# --- sweeps ----------------------------------------------------------------------

SWEEP_HEADER = ("param", "value", "status", "t_star", "peak_u", "peak_v", "peak_r", "cause")


def _sweep_one(args):
    doc, param, value, out_dir = args
    try:
        outcome = run_config(doc.replace(param, value), out_dir)
        return (param, value, outcome.status, outcome.t_star, outcome.peak_u, outcome.peak_v,
                outcome.peak_r, outcome.cause)
    except Exception as exc:  # recorded per run; the sweep continues
        msg = f"{type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")
        return (param, value, "Error", math.nan, math.nan, math.nan, math.nan, msg)


def run_sweep(doc, out_dir, threads=1):
    """Run one job per value of ``[sweep] param``; rows sorted by value.

    Each run writes into its own subdirectory; the aggregate ``sweep.csv``
    is written once, after every run has finished.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    param = doc["sweep"]["param"]
    values = sorted(doc["sweep"]["values"])
    if values and not param:
        raise cfgmod.BadValue("param", "a sweep needs [sweep] param")
    jobs = [(doc, param, v, out / f"run_{i:04d}") for i, v in enumerate(values)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    rows.sort(key=lambda r: r[1])
    output.write_table(out / "sweep.csv", SWEEP_HEADER, rows)
    return rows


# --- checks on stored output --------------------------------------------------------

def verify_dir(out_dir):
    """Recompute verdicts from ``series.csv`` (and ``manifest.txt`` if present).

    Returns a list of (name, Verdict).
    """
    out = Path(out_dir)
    series = output.read_series(out / "series.csv")
    entries, sums, config_text = {}, {}, ""
    if (out / "manifest.txt").exists():
        entries, sums, config_text = output.read_manifest(out / "manifest.txt")
    verdicts = []
    for name, digest in sums.items():
        ok = (out / name).exists() and output.sha256(out / name) == digest
        verdicts.append((f"checksum {name}", diagnostics.Verdict(ok)))
    doc = cfgmod.parse_config(config_text) if config_text else None
    model = entries.get("model", "")
    sign = doc["model"]["sign"] if doc else 1
    limit = math.inf if model == "rd" else diagnostics.BLOWUP_MAGNITUDE
    ev = diagnostics.detect_blowup_series(series, gradient_limit=limit)
    verdicts.append(("no blowup", diagnostics.Verdict(
        ev is None, "" if ev is None else f"{ev.cause} at t*={ev.t_star:.9g}")))
    if model in ("euler1d", "lagrangian"):
        worst = float(np.nanmax(np.abs(series["mean_v"]))) if len(series) else 0.0
        verdicts.append(("mean of v", diagnostics.Verdict(worst <= 1e-9, f"max |mean v| = {worst:.3g}")))
    if model == "euler1d" and sign == 1:
        verdicts.append(("maximum principle", diagnostics.max_principle_monitor(series)))
        if "c0" in entries and "u0_inf" in entries:
            verdicts.append(("sup bounds", diagnostics.sup_bounds_from_constants(
                series, float(entries["c0"]), float(entries["u0_inf"]))))
    if model == "lagrangian":
        dj = float(np.max(np.abs(series["int_J"] - 1.0)))
        dvj = float(np.max(np.abs(series["int_vJ"])))
        verdicts.append(("int J = 1", diagnostics.Verdict(dj <= 1e-8, f"max deviation {dj:.3g}")))
        verdicts.append(("int vJ = 0", diagnostics.Verdict(dvj <= 1e-8, f"max deviation {dvj:.3g}")))
    return verdicts


def lift_check(snapshot_path, sign=1):
    """3D residual report for an Eulerian snapshot file."""
    meta, cols = output.read_snapshot(snapshot_path)
    nu = meta["nu"]
    state = model1d.EulerState.from_fields(cols["u"], cols["v"], meta["t"], sign)
    cfg = model1d.ModelConfig(nu=nu, sign=sign, scheme=model1d.IMEX if nu > 0 else model1d.RK3)
    rep = lift.residual_axisym(state, cfg)
    comp = lift.compatibility_check(state)
    incomp = lift.incompressibility_residual(state.psi)
    return rep, comp, incomp


# --- entry point ------------------------------------------------------------------

def _load(args, kind=None):
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise SwirlModelError(f"cannot read config {args.config}: {exc.strerror}") from None
        doc = cfgmod.parse_config(text)
    else:
        doc = cfgmod.defaults()
    if kind is not None:
        if args.config and doc["model"]["kind"] != kind and "kind" in _explicit_model_keys(args):
            raise cfgmod.BadValue("kind", f"config says {doc['model']['kind']}, command is {kind}")
        doc = doc.replace("model.kind", kind)
    return doc


def _explicit_model_keys(args):
    import configparser
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    cp.read(args.config, encoding="utf-8")
    return set(cp["model"]) if cp.has_section("model") else set()


def _out_dir(args, doc):
    if args.out:
        return Path(args.out)
    if os.environ.get(ENV_OUT):
        return Path(os.environ[ENV_OUT])
    return Path(doc["output"]["dir"])


def build_parser():
    p = argparse.ArgumentParser(prog="swirlmodel", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("ode", "rd", "euler1d", "lagrangian", "sweep", "verify", "lift-check"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="configuration file")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--threads", type=int, default=1, help="parallel sweep workers")
        if name == "lift-check":
            sp.add_argument("--snapshot", required=True, help="snap_<t>.csv of an euler1d run")
            sp.add_argument("--tol", type=float, default=LIFT_TOL)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("ode", "rd", "euler1d", "lagrangian"):
            doc = _load(args, args.command)
            out = _out_dir(args, doc)
            outcome = run_config(doc, out)
            msg = outcome.status
            if outcome.status == "Blowup":
                msg += f" at t*={outcome.t_star:.9g} ({outcome.cause})"
            print(f"{args.command}: {msg}; output in {out}")
            return outcome.exit_code
        if args.command == "sweep":
            doc = _load(args)
            out = _out_dir(args, doc)
            rows = run_sweep(doc, out, max(1, args.threads))
            print(f"sweep: {len(rows)} runs; aggregate in {out / 'sweep.csv'}")
            return EXIT_OK
        if args.command == "verify":
            out = Path(args.out) if args.out else Path(os.environ.get(ENV_OUT, "out"))
            verdicts = verify_dir(out)
            lines = [f"{name}: {v}" for name, v in verdicts]
            (out / "verify.txt").write_text("\n".join(lines) + "\n")
            print("\n".join(lines))
            return EXIT_OK if all(v.passed for _, v in verdicts) else EXIT_ERROR
        if args.command == "lift-check":
            rep, comp, incomp = lift_check(args.snapshot)
            lines = [
                f"residual_u = {output.fmt(rep.u)}",
                f"residual_omega = {output.fmt(rep.omega)}",
                f"residual_psi = {output.fmt(rep.psi)}",
                f"incompressibility = {output.fmt(incomp)}",
                f"axis_max = {output.fmt(comp.axis_max)}",
                f"oddness_max = {output.fmt(comp.oddness_max)}",
                f"r_samples = {', '.join(output.fmt(r) for r in rep.r_samples)}",
                f"passed = {'true' if rep.passed(args.tol) and comp.passed else 'false'}",
            ]
            out = Path(args.out) if args.out else Path(args.snapshot).parent
            out.mkdir(parents=True, exist_ok=True)
            (out / "lift_report.txt").write_text("\n".join(lines) + "\n")
            print("\n".join(lines))
            return EXIT_OK if rep.passed(args.tol) and comp.passed else EXIT_ERROR
    except (SwirlModelError, OSError) as exc:
        where = f" ({exc.filename})" if isinstance(exc, OSError) and exc.filename else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
