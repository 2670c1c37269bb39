"""Command line interface.

Subcommands:
    simulate   run a scenario config, write CSV (+ PNG figure)
    figure     run a bundled preset (fig2, fig3_g1, fig3_g2, fig5, figv)
    stationary evaluate the stationarity report for a named state
    prepare    run a preparation protocol and verify its output
    entangle   report entanglement measures with analytic references

Exit codes: 0 success, 1 validation/config error, 2 numerical failure.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .circuits import (
    prepare_dark_method1,
    prepare_dark_method2,
    prepare_dark_recursive,
    prepare_superradiant_recursive,
)
from .couplings import dicke_couplings
from .dynamics import check_pure_stationary, liouvillian_apply
from .entanglement import geometric_measure, persistence_under_loss, witness_expectation
from .errors import ConfigError, UnsupportedRegimeError
from .scenarios import ScenarioConfig, preset_config, run_scenario, write_csv
from .states import PureState, antisymmetric_dark_state, symmetric_superradiant_state

_VALIDATION_ERRORS = (ConfigError, ValueError, KeyError, FileNotFoundError, json.JSONDecodeError)


def _simulate_common(config: ScenarioConfig, out: str, plot: bool, label: str) -> int:
    trajectory = run_scenario(config)
    out_path = Path(out)
    write_csv(trajectory, out_path)
    print(f"wrote {out_path} ({len(trajectory.times)} rows)")
    if plot:
        from .plotting import render_trajectory

        png = out_path.with_suffix(".png")
        render_trajectory(trajectory, png, title=label)
        print(f"wrote {png}")
    return 0


def _cmd_simulate(args) -> int:
    config = ScenarioConfig.from_file(args.config)
    return _simulate_common(config, args.out, not args.no_plot, Path(args.config).stem)


def _cmd_figure(args) -> int:
    config = preset_config(args.name)
    return _simulate_common(config, args.out, not args.no_plot, args.name)


def _load_state_file(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    if arr.ndim == 1:
        return arr.astype(complex)
    raise ConfigError("state file must hold a list of numbers or [re, im] pairs")


def _named_state(args) -> PureState:
    base = {
        "atoms": args.atoms,
        "scheme": args.scheme,
        "levels": args.levels if args.levels else args.atoms,
        "coupling": {"model": "dicke", "gamma": 1.0},
        "initial_state": args.state,
        "t_max": 1.0,
        "samples": 2,
        "tol": 1e-8,
    }
    config = ScenarioConfig(base)
    return config.build_initial_state(config.build_scheme())


def _cmd_stationary(args) -> int:
    if args.state_file:
        vec = _load_state_file(args.state_file)
        d = args.levels if args.levels else args.atoms
        psi = PureState.from_amplitudes(args.atoms, d, vec, normalize=True)
        scheme_cfg = {
            "atoms": args.atoms, "scheme": args.scheme, "levels": d,
            "coupling": {"model": "dicke", "gamma": 1.0},
            "initial_state": "ground", "t_max": 1.0, "samples": 2, "tol": 1e-8,
        }
        scheme = ScenarioConfig(scheme_cfg).build_scheme()
    else:
        psi = _named_state(args)
        scheme = ScenarioConfig(
            {
                "atoms": args.atoms, "scheme": args.scheme,
                "levels": args.levels if args.levels else args.atoms,
                "coupling": {"model": "dicke", "gamma": 1.0},
                "initial_state": args.state, "t_max": 1.0, "samples": 2, "tol": 1e-8,
            }
        ).build_scheme()

    if args.model == "dicke":
        couplings = dicke_couplings(args.atoms, scheme, gamma=args.gamma, omega=args.omega)
    else:
        raise ConfigError("stationary supports --model dicke; use --coupling-config for others")
    if args.coupling_config:
        cc = ScenarioConfig.from_file(args.coupling_config)
        couplings = cc.build_couplings(scheme)

    try:
        report = check_pure_stationary(psi, couplings, scheme, tol=args.tol)
        print(f"stationary: {report.is_stationary}")
        print(f"lambda: {report.lam:.6g}")
        for j, res in sorted(report.jump_residuals.items()):
            print(f"jump residual S_{j}^-: {res:.3e}")
        print(f"eigenvector residual: {report.eigenvector_residual:.3e}")
        print(f"liouvillian residual: {report.liouvillian_residual:.3e}")
        return 0 if report.is_stationary else 1
    except UnsupportedRegimeError:
        residual = float(np.linalg.norm(liouvillian_apply(psi.density_matrix(), couplings, scheme)))
        stationary = residual < args.tol
        print("non-uniform couplings: jump-operator criterion unavailable")
        print(f"liouvillian residual: {residual:.3e}")
        print(f"stationary: {stationary}")
        return 0 if stationary else 1


def _cmd_prepare(args) -> int:
    if args.method == "1":
        state, fit = prepare_dark_method1()
        target = antisymmetric_dark_state(3)
        corrected = state.amplitudes.copy()
        from ._tensor import apply_site_vec

        for m, phase in enumerate(fit.site_phases):
            corrected = apply_site_vec(np.diag(phase), corrected, m, 3, 3)
        overlap = abs(np.vdot(target.amplitudes, corrected))
        print("method 1 (three-qutrit exponential gate)")
        print(f"overlap modulus after local-phase recovery: {overlap:.12f}")
        print(f"fit residual: {fit.residual:.3e}")
        for m, phase in enumerate(fit.site_phases, start=1):
            angles = ", ".join(f"{a:+.4f}" for a in np.angle(phase))
            print(f"recovered phase gate atom {m}: diag angles [{angles}]")
        ok = overlap >= 1.0 - 1e-9
    elif args.method == "2":
        state = prepare_dark_method2()
        overlap = abs(antisymmetric_dark_state(3).overlap(state))
        print("method 2 (two-qutrit controlled shift)")
        print(f"overlap modulus: {overlap:.12f}")
        ok = overlap >= 1.0 - 1e-9
    else:
        N = args.n
        if args.superradiant:
            state, phase = prepare_superradiant_recursive(N)
            target = symmetric_superradiant_state(N)
            print(f"recursive superradiant preparation, N = {N}")
        else:
            state, phase = prepare_dark_recursive(N)
            target = antisymmetric_dark_state(N)
            print(f"recursive dark preparation, N = {N}")
        overlap = abs(target.overlap(state))
        print(f"overlap modulus: {overlap:.12f}")
        print(f"global phase: {phase:.6f} (angle {math.degrees(np.angle(phase)):+.2f} deg)")
        ok = overlap >= 1.0 - 1e-9
    print("status:", "ok" if ok else "failed")
    return 0 if ok else 2


def _cmd_entangle(args) -> int:
    N = args.atoms
    measures = [m.strip() for m in args.measures.split(",") if m.strip()]
    if args.state == "dark":
        psi = antisymmetric_dark_state(N)
        geometric_ref = 1.0 - 1.0 / math.factorial(N)
    else:
        psi = symmetric_superradiant_state(N)
        geometric_ref = 1.0 - math.factorial(N) / N**N
    print(f"state: {args.state}, atoms: {N}")
    for measure in measures:
        if measure == "geometric":
            value, ansatz = geometric_measure(psi, restarts=args.restarts, seed=args.seed)
            print(f"geometric measure: {value:.9f} (analytic {geometric_ref:.9f}, "
                  f"converged: {ansatz.converged})")
        elif measure == "witness":
            value = witness_expectation(psi.density_matrix(), N)
            ref = 1.0 / math.factorial(N) - 1.0 if args.state == "dark" else None
            suffix = f" (analytic {ref:.9f})" if ref is not None else ""
            print(f"witness expectation on itself: {value:.9f}{suffix}")
        elif measure == "negativity_loss":
            cert = persistence_under_loss(psi, lost={N})
            values = ", ".join(
                f"{subset}: {v:.9f}" for subset, v in sorted(cert.negativities.items())
            )
            print(f"negativity after losing atom {N}: {values}")
            print(f"entangled after loss: {cert.entangled}")
        else:
            raise ConfigError(
                f"unknown measure {measure!r}; choose from geometric, witness, negativity_loss"
            )
    return 0


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the validation code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="darkstates",
        description="Collective spontaneous emission and multi-atom dark states",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario configuration file")
    p.add_argument("--config", required=True, help="path to the JSON scenario config")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("figure", help="run a bundled preset scenario")
    p.add_argument("name", help="one of fig2, fig3_g1, fig3_g2, fig5, figv")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("stationary", help="stationarity report for a named state")
    p.add_argument("--state", default="dark",
                   help="dark | superradiant | inverted | ground | singlet_g1 | singlet_g2 | v_dark")
    p.add_argument("--state-file", help="JSON amplitude vector instead of a named state")
    p.add_argument("--atoms", type=int, default=3)
    p.add_argument("--scheme", choices=["lambda", "v"], default="lambda")
    p.add_argument("--levels", type=int, default=0, help="levels per atom (default: atoms)")
    p.add_argument("--model", choices=["dicke"], default="dicke")
    p.add_argument("--coupling-config", help="scenario config supplying the coupling block")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_stationary)

    p = sub.add_parser("prepare", help="run and verify a preparation protocol")
    p.add_argument("--method", choices=["1", "2", "recursive"], required=True)
    p.add_argument("--n", type=int, default=3, help="atom count for the recursive scheme")
    p.add_argument("--superradiant", action="store_true",
                   help="prepare the symmetric state instead (recursive only)")
    p.set_defaults(func=_cmd_prepare)

    p = sub.add_parser("entangle", help="entanglement report for a named state")
    p.add_argument("--state", choices=["dark", "superradiant"], default="dark")
    p.add_argument("--atoms", type=int, default=3)
    p.add_argument("--measures", default="geometric,witness,negativity_loss")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=_cmd_entangle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
