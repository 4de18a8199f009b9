"""Command-line front end.

    su11dyn run    --family example1 --param w=1 --t-max 10 --samples 1001 --out ex1.csv [--plot]
    su11dyn verify --family nu --param nu=sqrt(2) --t-max 20 --tol 1e-9 --out nu_report.json

A JSON document can be given with ``--config``; flags override its values.
Exit codes: 0 success, 1 verification failed, 2 invalid configuration,
3 numerical error, 4 file I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .closed_forms import (
    CONVENTIONS,
    TAU_COUPLING,
    Example1Model,
    NuFamilyModel,
    ex1_gamma,
    ex1_solution,
    ex2_hamiltonian,
    ex2_solution,
    fig2_preset,
    nu_solution,
)
from .core import RHO_MINUS, SIGMA_X, SIGMA_Z, CayleyKlein, Su11Hamiltonian, evolve_density, transition_probability
from .errors import ConfigError, Su11Error
from .expr import parse, parse_number
from .oracle import TOL_RANGE, compare_solutions, integrate_schrodinger
from .quadrature import CumulativeIntegral
from .scenarios import WaveguideParams, propagate_fields, waveguide_coupling, waveguide_transform
from .solver import SolvableModel, ThetaSchedule

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

COLUMNS = ["t", "kappa", "theta", "lambda", "scriptR", "omega_big", "omega_abs",
           "a_re", "a_im", "b_re", "b_im", "det_check", "P", "sigma_z", "sigma_x", "gamma"]
WAVEGUIDE_COLUMNS = ["E1_re", "E1_im", "E2_re", "E2_im", "power_fraction"]

# required keys and defaults per family; string defaults are expressions
FAMILIES = {
    "example1": ({"w"}, {"phi_omega": math.pi / 2}),
    "example2": ({"w"}, {}),
    "fig2": ({"w0"}, {}),
    "nu": ({"nu"}, {"w": 1.0, "omega_abs": None, "phi_omega0": math.pi / 2, "phi_omega_rate": 0.0}),
    "custom": ({"theta", "omega_abs"}, {"theta_dot": None, "phi_omega": "pi/2", "phi_omega_dot": None}),
    "waveguide": ({"epsilon"}, {"e1": 1.0, "e2": 0.0, "convention": TAU_COUPLING}),
}
EXPRESSION_KEYS = {
    "custom": {"theta", "theta_dot", "omega_abs", "phi_omega", "phi_omega_dot"},
    "nu": {"omega_abs"},
}
STRING_KEYS = {"convention"}
FIELD_TOL = 1e-11


@dataclass
class RunConfig:
    family: str
    parameters: dict = field(default_factory=dict)
    t_max: float = 10.0
    samples: int = 1001
    tol: float = 1e-9
    output_path: str = "su11dyn_out.csv"
    threshold: float = 1e-6
    plot: bool = False

    def validate(self) -> RunConfig:
        """Check the schema and normalise parameter values; raises ConfigError."""
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; valid: {', '.join(FAMILIES)}")
        try:
            self.samples = int(self.samples)
            self.t_max = float(self.t_max)
            self.tol = float(self.tol)
            self.threshold = float(self.threshold)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if self.samples < 2:
            raise ConfigError("samples must be >= 2")
        if not self.t_max > 0:
            raise ConfigError("t_max must be positive")
        if not TOL_RANGE[0] <= self.tol <= TOL_RANGE[1]:
            raise ConfigError(f"tol must lie in [{TOL_RANGE[0]}, {TOL_RANGE[1]}]")
        if not self.threshold > 0:
            raise ConfigError("threshold must be positive")
        required, defaults = FAMILIES[self.family]
        missing = required - set(self.parameters)
        if missing:
            raise ConfigError(f"family {self.family} requires parameters: {', '.join(sorted(missing))}")
        unknown = set(self.parameters) - required - set(defaults)
        if unknown:
            raise ConfigError(f"unknown parameters for {self.family}: {', '.join(sorted(unknown))}")
        params = dict(defaults)
        params.update(self.parameters)
        expressions = EXPRESSION_KEYS.get(self.family, set())
        for key, val in params.items():
            if val is None or key in expressions:
                params[key] = None if val is None else str(val)
            elif key in STRING_KEYS:
                params[key] = str(val)
            else:
                params[key] = parse_number(val)
        if "convention" in params and params["convention"] not in CONVENTIONS:
            raise ConfigError(f"convention must be one of {CONVENTIONS}")
        for key in ("w", "w0", "epsilon"):
            if key in params and not params[key] > 0:
                raise ConfigError(f"{key} must be positive")
        if "nu" in params and not params["nu"] >= 0:
            raise ConfigError("nu must be nonnegative")
        self.parameters = params
        return self


@dataclass
class Family:
    """Everything a run needs: the closed form (or oracle trajectory) and the column sources."""

    solution: Callable[[float], CayleyKlein]
    hamiltonian: Su11Hamiltonian
    columns: dict
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def _cumulative(f, t_max):
    cum = CumulativeIntegral(f, t_max, tol=1e-12)
    return lambda t: 2.0 * cum(t)


def _from_model(model: SolvableModel, t_max: float) -> dict:
    return {
        "kappa": _cumulative(model.omega_abs, t_max),
        "theta": model.theta.theta,
        "lambda": model.lambda_theta,
        "scriptR": model.script_r,
        "omega_big": model.induced_omega_big,
        "omega_abs": model.omega_abs,
    }


def build_family(cfg: RunConfig, times: np.ndarray) -> Family:
    p = cfg.parameters
    fam = cfg.family
    if fam == "example1":
        m = Example1Model(p["w"], p["phi_omega"])
        cols = {
            "kappa": m.kappa, "theta": m.theta, "lambda": m.lambda_theta, "scriptR": m.script_r,
            "omega_big": m.omega_big, "omega_abs": lambda t: m.w,
            "gamma": lambda t: ex1_gamma(m, m.w * t, TAU_COUPLING),
        }
        notes = [
            "gamma is the tau-form coupling (w/2)[2 + 1/(1 + tau^2)], tau = w t; "
            "omega_big is the coupling that makes the closed form exact, "
            "w[1 + 1/(1 + kappa^2)] with kappa = 2 w t. The two differ.",
        ]
        return Family(lambda t: ex1_solution(m, t), m.hamiltonian(cfg.t_max), cols, notes)
    if fam == "example2":
        w = p["w"]
        cols = {
            "kappa": lambda t: 2 * w * t, "theta": lambda t: math.atan(w * t),
            "lambda": lambda t: math.asinh(w * t), "scriptR": lambda t: 0.5 * math.atan(w * t),
            "omega_big": lambda t: w, "omega_abs": lambda t: w,
        }
        return Family(lambda t: ex2_solution(2 * w * t, w), ex2_hamiltonian(w, cfg.t_max), cols,
                      ["omega_big equals omega_abs (side condition Omega = |omega|)"])
    if fam in ("fig2", "custom"):
        if fam == "fig2":
            model = fig2_preset(p["w0"], cfg.t_max)
            notes = ["R evaluated by quadrature; Lambda vanishes at w0 t = pi, 2 pi, ..."]
        else:
            model = _custom_model(p, cfg.t_max)
            notes = [f"custom Theta(t) = {p['theta']}, |omega|(t) = {p['omega_abs']}"]
        return Family(model.cayley_klein_solution, model.hamiltonian(), _from_model(model, cfg.t_max), notes)
    if fam == "nu":
        if p["omega_abs"] is not None:
            wfun = parse(p["omega_abs"])
            m = NuFamilyModel(p["nu"], wfun, p["phi_omega0"], p["phi_omega_rate"], t_max=cfg.t_max)
        else:
            m = NuFamilyModel(p["nu"], p["w"], p["phi_omega0"], p["phi_omega_rate"], t_max=cfg.t_max)
        cols = {
            "kappa": lambda t: 2 * m.integrated_coupling(t),
            "omega_big": m.omega_big, "omega_abs": m.omega_abs,
        }
        return Family(lambda t: nu_solution(m, t), m.hamiltonian(), cols,
                      [f"nu = {m.nu}, regime {m.regime.value}"])
    if fam == "waveguide":
        wp = WaveguideParams(p["epsilon"], cfg.t_max, (complex(p["e1"]), complex(p["e2"])),
                             p["convention"])
        # rows come straight from the propagator, so keep its drift well under the det check
        traj = propagate_fields(wp, times, min(cfg.tol, FIELD_TOL))
        lookup = {float(z): i for i, z in enumerate(traj.z)}
        eps = wp.epsilon
        cols = {
            "kappa": lambda z: 2 * eps * z, "omega_abs": lambda z: eps,
            "omega_big": lambda z: waveguide_coupling(eps, z, wp.convention),
            "gamma": lambda z: waveguide_coupling(eps, z, wp.convention),
        }
        extra = {
            "E1_re": traj.E1.real, "E1_im": traj.E1.imag,
            "E2_re": traj.E2.real, "E2_im": traj.E2.imag,
            "power_fraction": traj.power_fraction,
        }
        exact = Example1Model(eps, -math.pi / 2)
        notes = [
            f"coupling convention: {wp.convention}; t is the propagation distance z",
            "a, b come from the numerical propagator in the rotated frame (phi_omega = -pi/2)",
        ]
        if wp.convention == TAU_COUPLING:
            notes.append("the tau-form coupling is not the exactly solvable one; "
                         "use convention=kappa to reproduce the closed form")
        fam_obj = Family(lambda z: traj.cayley_klein[lookup[float(z)]], waveguide_transform(wp),
                         cols, notes, extra)
        fam_obj.closed_form = lambda z: ex1_solution(exact, z)
        return fam_obj
    raise ConfigError(f"unknown family {fam!r}")


def _custom_model(p: dict, t_max: float) -> SolvableModel:
    theta = parse(p["theta"])
    theta_dot = parse(p["theta_dot"]) if p["theta_dot"] else theta.derivative()
    phi = parse(p["phi_omega"])
    if p["phi_omega_dot"]:
        phi_dot = parse(p["phi_omega_dot"])
    else:
        phi_dot = phi.derivative()
    sched = ThetaSchedule(theta, theta_dot, t_max)
    return SolvableModel(sched, parse(p["omega_abs"]), phi, phi_dot)


def _fmt(x) -> str:
    return "" if x is None else format(float(x), ".17g")


def compute_rows(cfg: RunConfig) -> tuple[list[str], list[list[str]], Family]:
    times = np.linspace(0.0, cfg.t_max, cfg.samples)
    fam = build_family(cfg, times)
    header = COLUMNS + (WAVEGUIDE_COLUMNS if fam.extra else [])
    rows = []
    for i, t in enumerate(times):
        t = float(t)
        ck = fam.solution(t)
        rho = evolve_density(ck, RHO_MINUS)
        det_check = (ck.det - 1.0) / max(1.0, abs(ck.a) ** 2)
        vals = {
            "t": t,
            "a_re": ck.a.real, "a_im": ck.a.imag, "b_re": ck.b.real, "b_im": ck.b.imag,
            "det_check": det_check,
            "P": transition_probability(ck),
            "sigma_z": rho.expectation(SIGMA_Z),
            "sigma_x": rho.expectation(SIGMA_X),
        }
        for name, fn in fam.columns.items():
            vals[name] = fn(t)
        for name, arr in fam.extra.items():
            vals[name] = arr[i]
        rows.append([_fmt(vals.get(c)) for c in header])
    return header, rows, fam


def _atomic_write(path: Path, text: str):
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    try:
        parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


PLOT_TEMPLATE = '''"""Plot {csv}: transition probability and diagonal coupling against t."""
import matplotlib.pyplot as plt
import numpy as np

data = np.genfromtxt("{csv}", delimiter=",", names=True)
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
ax1.plot(data["t"], data["P"])
ax1.axhline(0.5, color="k", lw=0.8)
ax1.set_xlabel("t")
ax1.set_ylabel("P")
ax2.plot(data["t"], data["omega_big"], label="Omega")
if not np.all(np.isnan(data["gamma"])):
    ax2.plot(data["t"], data["gamma"], "--", label="gamma")
ax2.set_xlabel("t")
ax2.legend()
fig.tight_layout()
fig.savefig("{png}", dpi=150)
'''


def run(cfg: RunConfig) -> int:
    header, rows, fam = compute_rows(cfg)
    out = Path(cfg.output_path)
    text = ",".join(header) + "\n" + "".join(",".join(r) + "\n" for r in rows)
    _atomic_write(out, text)
    meta = {"version": __version__, "config": asdict(cfg), "notes": fam.notes, "columns": header}
    _atomic_write(out.with_suffix(".meta.json"), json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if cfg.plot:
        script = PLOT_TEMPLATE.format(csv=out.name, png=out.with_suffix(".png").name)
        _atomic_write(out.with_name(out.stem + "_plot.py"), script)
    return EXIT_OK


def verify(cfg: RunConfig) -> int:
    times = np.linspace(0.0, cfg.t_max, cfg.samples)
    fam = build_family(cfg, times)
    analytic = getattr(fam, "closed_form", fam.solution)
    numeric = integrate_schrodinger(fam.hamiltonian, (0.0, cfg.t_max), cfg.tol, times)
    report = compare_solutions(analytic, numeric, cfg.threshold)
    doc = {
        "version": __version__,
        "config": asdict(cfg),
        "comparison": report.to_dict(),
        "det_drift": numeric.det_drift(),
        "oracle_steps": numeric.n_steps,
        "passed": report.passed,
        "notes": fam.notes,
    }
    _atomic_write(Path(cfg.output_path), json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def _parse_params(items):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def load_config(args) -> RunConfig:
    doc = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except OSError:
            raise
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
    if "out" in doc:
        doc["output_path"] = doc.pop("out")
    allowed = {"family", "parameters", "t_max", "samples", "tol", "output_path", "threshold", "plot"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    params = dict(doc.get("parameters") or {})
    params.update(_parse_params(args.param))
    doc["parameters"] = params
    for key in ("family", "t_max", "samples", "tol", "threshold"):
        val = getattr(args, key)
        if val is not None:
            doc[key] = val
    if args.out is not None:
        doc["output_path"] = args.out
    if getattr(args, "plot", False):
        doc["plot"] = True
    if "family" not in doc:
        raise ConfigError(f"no family given; valid: {', '.join(FAMILIES)}")
    if "output_path" not in doc:
        doc["output_path"] = f"{doc['family']}.csv" if args.command == "run" else f"{doc['family']}_report.json"
    return RunConfig(**doc).validate()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="su11dyn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("run", "write a CSV time series for a family"),
                           ("verify", "compare a family's closed form with the numerical oracle")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument("--family", help=f"one of: {', '.join(FAMILIES)}")
        sp.add_argument("--param", action="append", metavar="KEY=VALUE",
                        help="family parameter (repeatable); numbers accept constant expressions")
        sp.add_argument("--t-max", dest="t_max", type=float)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--tol", type=float, help="oracle tolerance")
        sp.add_argument("--out", help="output path")
        sp.add_argument("--threshold", type=float, help="pass threshold for verify")
        if name == "run":
            sp.add_argument("--plot", action="store_true", help="also write a matplotlib script")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return run(cfg) if args.command == "run" else verify(cfg)
    except Su11Error as exc:
        # value-type errors (bad schedule, parameter out of domain) are input problems
        if isinstance(exc, ValueError):
            print(f"su11dyn: configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"su11dyn: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"su11dyn: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
