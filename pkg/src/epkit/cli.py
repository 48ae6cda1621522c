"""Command-line surface: sweeps, searches and loops, emitted as CSV/JSON.

Subcommands
-----------
* ``epkit twolevel sweep``   eigenvalue pair over a real coupling interval
* ``epkit twolevel ep``      closed-form EP locations with diagnostics
* ``epkit osc sweep``        branch-tracked oscillator levels vs f or g
* ``epkit osc response``     driven stationary response vs drive frequency
* ``epkit osc find-ep``      combined quintic + Newton EP search
* ``epkit loop``             monodromy loop around a point in parameter space

Configuration comes from ``--config file.json`` plus ``--set key=value``
overrides; unknown keys are rejected.  Angles cross this boundary in
degrees; complex values are written ``"a+bi"`` on flags and either strings
or ``{"re": .., "im": ..}`` objects in JSON.

Exit codes: 0 success, 2 configuration error, 3 numerical/tracking
failure, 4 no convergence, 5 converged to a genuine degeneracy.
"""

import argparse
import json
import re
import sys

import numpy as np

from . import finder, oscillator, twolevel
from .errors import (
    ConfigError,
    ConvergedToDegenerate,
    EpkitError,
    NoConvergence,
    TrackingAmbiguous,
)
from .linalg import defect_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_NO_CONVERGENCE = 4
EXIT_DEGENERATE = 5

_DEG = np.pi / 180.0


def parse_complex(value):
    """One canonical complex parser: numbers, "a+bi" strings, {re, im} maps."""
    if isinstance(value, complex):
        return value
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, dict):
        extra = set(value) - {"re", "im"}
        if extra:
            raise ConfigError(f"unknown keys in complex value: {sorted(extra)}")
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    s = str(value).strip().replace(" ", "").replace("i", "j").replace("I", "j")
    s = re.sub(r"(?<![\d.])j", "1j", s)  # bare j means 1j
    try:
        return complex(s)
    except ValueError:
        raise ConfigError(f"cannot parse complex value {value!r}") from None


def _fmt(x):
    return f"{float(x):.17g}"


def _jsonify(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


class Config:
    """Merged configuration with required/optional key validation."""

    def __init__(self, args, required, optional=()):
        data = {}
        if args.config:
            with open(args.config) as fh:
                loaded = json.load(fh)
            if not isinstance(loaded, dict):
                raise ConfigError("config file must hold a JSON object")
            data.update(loaded)
        for item in args.set or []:
            if "=" not in item:
                raise ConfigError(f"override {item!r} is not key=value")
            key, _, raw = item.partition("=")
            data[key.strip()] = raw.strip()
        allowed = set(required) | set(optional)
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        missing = set(required) - set(data)
        if missing:
            raise ConfigError(f"missing required parameters: {sorted(missing)}")
        self.data = data

    def real(self, key, default=None):
        if key not in self.data:
            return default
        try:
            return float(self.data[key])
        except (TypeError, ValueError):
            raise ConfigError(f"parameter {key!r} must be a real number") from None

    def integer(self, key, default=None):
        if key not in self.data:
            return default
        try:
            return int(self.data[key])
        except (TypeError, ValueError):
            raise ConfigError(f"parameter {key!r} must be an integer") from None

    def cplx(self, key, default=None):
        if key not in self.data:
            return default
        return parse_complex(self.data[key])

    def text(self, key, default=None):
        return str(self.data.get(key, default))


def _write(args, lines):
    payload = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _write_json(args, record):
    payload = json.dumps(_jsonify(record), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload + "\n")
    else:
        sys.stdout.write(payload + "\n")


def _twolevel_system(cfg):
    return twolevel.TwoLevelSystem(
        eps1=cfg.cplx("eps1"),
        eps2=cfg.cplx("eps2"),
        om1=cfg.cplx("om1"),
        om2=cfg.cplx("om2"),
        phi1=cfg.cplx("phi1_deg") * _DEG,
        phi2=cfg.cplx("phi2_deg") * _DEG,
    )


_TWOLEVEL_KEYS = ("eps1", "eps2", "om1", "om2", "phi1_deg", "phi2_deg")


def cmd_twolevel_sweep(args):
    cfg = Config(
        args,
        required=_TWOLEVEL_KEYS + ("lambda_min", "lambda_max"),
        optional=("samples",),
    )
    sys_ = _twolevel_system(cfg)
    samples = cfg.integer("samples", 1001)
    rows = twolevel.real_spectrum_window(
        sys_, (cfg.real("lambda_min"), cfg.real("lambda_max")), samples
    )
    pair = twolevel.ep_locations(sys_)
    if args.format == "json":
        _write_json(
            args,
            {
                "rows": [
                    {
                        "lambda": lam,
                        "E1": e1,
                        "E2": e2,
                        "is_real_pair": flag,
                    }
                    for lam, e1, e2, flag in rows
                ],
                "ep": {
                    "lambda_plus": pair.lambda_plus,
                    "lambda_minus": pair.lambda_minus,
                    "both_real": pair.both_real,
                },
            },
        )
        return EXIT_OK
    lines = [
        f"# lambda_ep_plus = {_fmt(pair.lambda_plus.real)} + {_fmt(pair.lambda_plus.imag)}i",
        f"# lambda_ep_minus = {_fmt(pair.lambda_minus.real)} + {_fmt(pair.lambda_minus.imag)}i",
        f"# both_real = {str(pair.both_real).lower()}",
        "lambda,re_E1,im_E1,re_E2,im_E2,is_real_pair",
    ]
    for lam, e1, e2, flag in rows:
        lines.append(
            ",".join(
                [
                    _fmt(lam),
                    _fmt(e1.real),
                    _fmt(e1.imag),
                    _fmt(e2.real),
                    _fmt(e2.imag),
                    "1" if flag else "0",
                ]
            )
        )
    _write(args, lines)
    return EXIT_OK


def cmd_twolevel_ep(args):
    cfg = Config(args, required=_TWOLEVEL_KEYS)
    sys_ = _twolevel_system(cfg)
    pair = twolevel.ep_locations(sys_)
    records = twolevel.ep_eigensystem(sys_)
    out = {"both_real": pair.both_real, "eps": []}
    for label, (lam, energy, v, u) in zip(("plus", "minus"), records):
        report = defect_report(twolevel.build_h(sys_, lam), energy)
        out["eps"].append(
            {
                "branch": label,
                "lambda": lam,
                "energy": energy,
                "right_vector": v,
                "left_vector": u,
                "self_orthogonality": abs(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v)),
                "algebraic_multiplicity": report.algebraic_multiplicity,
                "geometric_multiplicity": report.geometric_multiplicity,
                "is_defective": report.is_defective,
                "discriminant_residual": abs(twolevel.discriminant(sys_, lam)),
            }
        )
    _write_json(args, out)
    return EXIT_OK


_OSC_KEYS = ("omega1", "omega2", "k1", "k2")


def _osc_params(cfg, f=0.0, g=0.0):
    return oscillator.OscillatorParams(
        omega1=cfg.real("omega1"),
        omega2=cfg.real("omega2"),
        k1=cfg.real("k1"),
        k2=cfg.real("k2"),
        f=cfg.real("f", f),
        g=cfg.real("g", g),
    )


def cmd_osc_sweep(args):
    cfg = Config(
        args,
        required=_OSC_KEYS + ("sweep", "sweep_min", "sweep_max"),
        optional=("f", "g", "samples"),
    )
    variable = cfg.text("sweep")
    if variable not in ("f", "g"):
        raise ConfigError("sweep variable must be 'f' or 'g'")
    base = _osc_params(cfg)
    samples = cfg.integer("samples", 401)
    values = np.linspace(cfg.real("sweep_min"), cfg.real("sweep_max"), samples)

    def evaluate(z):
        z = complex(z)
        params = (
            base.with_coupling(f=z) if variable == "f" else base.with_coupling(g=z)
        )
        # levels are plotted for i M: decaying modes sit in Im < 0
        return 1j * oscillator.build_M(params)

    family = finder.MatrixFamily(evaluate, (variable,), 4, "eigenvalue")
    track = finder.track_branches(family, values.astype(complex))
    lines = [
        "sweep_value,"
        + ",".join(f"re_E{k}" for k in range(1, 5))
        + ","
        + ",".join(f"im_E{k}" for k in range(1, 5))
    ]
    for i, v in enumerate(values):
        es = track.branches[:, i]
        lines.append(
            ",".join(
                [_fmt(v)]
                + [_fmt(e.real) for e in es]
                + [_fmt(e.imag) for e in es]
            )
        )
    if args.format == "json":
        _write_json(
            args,
            {
                "sweep": variable,
                "values": list(values),
                "branches": [list(b) for b in track.branches],
                "matching_cost": track.matching_cost,
            },
        )
        return EXIT_OK
    _write(args, lines)
    return EXIT_OK


def cmd_osc_response(args):
    cfg = Config(
        args,
        required=_OSC_KEYS + ("f", "g", "c1", "c2", "omega_min", "omega_max"),
        optional=("samples",),
    )
    params = _osc_params(cfg)
    c1, c2 = cfg.cplx("c1"), cfg.cplx("c2")
    if c1 == 0 and c2 == 0:
        raise ConfigError("degenerate drive: c1 and c2 are both zero")
    samples = cfg.integer("samples", 1101)
    sweep = oscillator.frequency_sweep(
        params, c1, c2, (cfg.real("omega_min"), cfg.real("omega_max")), samples
    )
    to_deg = 180.0 / np.pi
    if args.format == "json":
        _write_json(
            args,
            {
                "omega": list(sweep.omega),
                "abs_q1": list(sweep.abs_q1),
                "abs_q2": list(sweep.abs_q2),
                "phase_q1_deg": list(sweep.phase_q1 * to_deg),
                "phase_q2_deg": list(sweep.phase_q2 * to_deg),
                "phase_diff_deg": list(sweep.phase_diff * to_deg),
            },
        )
        return EXIT_OK
    lines = ["omega,abs_q1,abs_q2,phase_q1_deg,phase_q2_deg,phase_diff_deg"]
    for i in range(samples):
        lines.append(
            ",".join(
                _fmt(x)
                for x in (
                    sweep.omega[i],
                    sweep.abs_q1[i],
                    sweep.abs_q2[i],
                    sweep.phase_q1[i] * to_deg,
                    sweep.phase_q2[i] * to_deg,
                    sweep.phase_diff[i] * to_deg,
                )
            )
        )
    _write(args, lines)
    return EXIT_OK


def cmd_osc_find_ep(args):
    cfg = Config(
        args,
        required=_OSC_KEYS + ("g_min", "g_max"),
        optional=("g_samples",),
    )
    base = _osc_params(cfg)
    if (
        abs(base.omega1 - base.omega2) < 1e-12
        and abs(base.k1 - base.k2) < 1e-12
    ):
        raise ConvergedToDegenerate(
            "omega1 == omega2 and k1 == k2: only a genuine degeneracy exists"
        )
    hits = finder.tune_g_for_real_f(
        base,
        (cfg.real("g_min"), cfg.real("g_max")),
        samples=cfg.integer("g_samples", 61),
    )
    if not hits:
        raise NoConvergence("no real-f EP found in the g range")
    g_star, f_star, omega_phys = hits[0]
    family = finder.oscillator_fg_family(base)
    ep = finder.newton_ep_search(
        family, complex(f_star, g_star), oscillator.raw_frequency(omega_phys)
    )
    params = base.with_coupling(f=ep.params["f"], g=ep.params["g"])
    ratio = oscillator.ep_amplitude_ratio(
        params, oscillator.physical_frequency(ep.frequency)
    )
    _write_json(
        args,
        {
            "f": ep.params["f"],
            "g": ep.params["g"],
            "quintic_route": {"f": f_star, "g": g_star, "omega_ep": omega_phys},
            "omega_ep_raw": ep.frequency,
            "omega_ep": oscillator.physical_frequency(ep.frequency),
            "det_residual": ep.det_residual,
            "deriv_residual": ep.deriv_residual,
            "eigenvector": ep.eigenvector,
            "left_eigenvector": ep.left_eigenvector,
            "self_orthogonality": ep.self_orthogonality,
            "amplitude_ratio": ratio,
            "defect": {
                "algebraic_multiplicity": ep.defect.algebraic_multiplicity,
                "geometric_multiplicity": ep.defect.geometric_multiplicity,
                "jordan_residual": ep.defect.jordan_residual,
                "is_defective": ep.defect.is_defective,
            },
        },
    )
    return EXIT_OK


def cmd_loop(args):
    cfg = Config(
        args,
        required=("model", "center", "radius"),
        optional=_TWOLEVEL_KEYS + _OSC_KEYS + ("f", "g", "steps"),
    )
    model = cfg.text("model")
    if model == "twolevel":
        family = finder.two_level_family(_twolevel_system(cfg))
    elif model == "osc":
        family = finder.oscillator_f_family(_osc_params(cfg))
    else:
        raise ConfigError(f"unknown model {model!r} (expected twolevel or osc)")
    result = finder.monodromy_loop(
        family,
        cfg.cplx("center"),
        cfg.real("radius"),
        steps=cfg.integer("steps", 256),
    )
    _write_json(
        args,
        {
            "permutation": list(result.permutation),
            "loops_to_restore_eigenvalues": result.loops_to_restore_eigenvalues,
            "loops_to_restore_eigenvector": result.loops_to_restore_eigenvector,
            "accumulated_phase": result.accumulated_phase,
        },
    )
    return EXIT_OK


def _add_common(parser):
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument(
        "--set",
        "-s",
        action="append",
        metavar="KEY=VALUE",
        help="override one configuration key",
    )
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    top = argparse.ArgumentParser(prog="epkit", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    two = sub.add_parser("twolevel", help="2x2 closed-form model")
    two_sub = two.add_subparsers(dest="subcommand", required=True)
    p = two_sub.add_parser("sweep", help="eigenvalues over a lambda interval")
    _add_common(p)
    p.set_defaults(func=cmd_twolevel_sweep)
    p = two_sub.add_parser("ep", help="EP locations and diagnostics")
    _add_common(p)
    p.set_defaults(func=cmd_twolevel_ep, format="json")

    osc = sub.add_parser("osc", help="coupled damped oscillators")
    osc_sub = osc.add_subparsers(dest="subcommand", required=True)
    p = osc_sub.add_parser("sweep", help="branch-tracked levels vs f or g")
    _add_common(p)
    p.set_defaults(func=cmd_osc_sweep)
    p = osc_sub.add_parser("response", help="driven response vs frequency")
    _add_common(p)
    p.set_defaults(func=cmd_osc_response)
    p = osc_sub.add_parser("find-ep", help="combined EP search")
    _add_common(p)
    p.set_defaults(func=cmd_osc_find_ep, format="json")

    p = sub.add_parser("loop", help="monodromy loop around a parameter point")
    _add_common(p)
    p.set_defaults(func=cmd_loop, format="json")
    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"epkit: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoConvergence as exc:
        print(f"epkit: no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except ConvergedToDegenerate as exc:
        print(f"epkit: genuine degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except TrackingAmbiguous as exc:
        print(f"epkit: tracking failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (EpkitError, ValueError, ZeroDivisionError) as exc:
        print(f"epkit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"epkit: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
