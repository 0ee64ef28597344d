"""Command-line front end emitting CSV/JSON artifacts for all constructions.

Outputs are deterministic: identical configuration yields byte-identical
files.  Exit codes: 0 success, 2 configuration errors, 3 numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import godunov, keyfitz_kranzer as kk, triangular, variation
from .errors import ConfigError, NumericsError
from .families import (
    family_profile,
    power_law_family,
    shock_cell_family,
)
from .flux import Decay, power_law_flux
from .source import SourceProfile
from .waves import make_packet, packet_profile, riemann_shock, speed_bound

SCHEMA = 1


@dataclass(frozen=True)
class RunConfig:
    command: str
    options: dict
    out: Optional[str]
    format: str
    threads: int
    seed: int


def parse_alpha(spec: str) -> SourceProfile:
    """Parse 'zero' | 'constant:<a>' | 'pw:<t1>:<v1>,<t2>:<v2>,...'."""
    try:
        if spec == "zero":
            return SourceProfile.zero()
        if spec.startswith("constant:"):
            return SourceProfile.constant(float(spec.split(":", 1)[1]))
        if spec.startswith("pw:"):
            pairs = [item.split(":") for item in spec[3:].split(",")]
            ts = [float(t) for t, _ in pairs]
            vs = [float(v) for _, v in pairs]
            return SourceProfile.piecewise(ts, vs)
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"bad --alpha value {spec!r}: {exc}") from exc
    raise ConfigError(f"bad --alpha value {spec!r}")


def _write_text(out: Optional[str], text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json_text(payload: dict) -> str:
    payload = {"schema": SCHEMA, **payload}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _emit_profile(cfg: RunConfig, sampled) -> None:
    if cfg.format == "csv":
        rows = [(float(x), float(u)) for x, u in zip(sampled.xs, sampled.vs)]
        _write_text(cfg.out, _csv_text(["x", "u"], rows))
    else:
        _write_text(
            cfg.out,
            _json_text({"x": [float(v) for v in sampled.xs], "u": [float(v) for v in sampled.vs]}),
        )


def _cmd_packet(cfg: RunConfig) -> int:
    o = cfg.options
    source = parse_alpha(o["alpha"])
    flux = power_law_flux(o["p"], M=o["delta"])
    packet = make_packet(flux, source, o["center"], o["dx"], o["delta"])
    profile = packet_profile(flux, source, packet, o["t"])
    _emit_profile(cfg, variation.sample_profile(profile, fan_points=o["samples"]))
    return 0


def _cmd_riemann(cfg: RunConfig) -> int:
    o = cfg.options
    source = parse_alpha(o["alpha"])
    flux = power_law_flux(o["p"], M=max(abs(o["wl"]), abs(o["wr"]), 1e-12))
    position, left, right = riemann_shock(flux, source, o["wl"], o["wr"], o["x0"], o["t"])
    _write_text(cfg.out, _json_text({"position": position, "left": left, "right": right}))
    return 0


def _build_family(o: dict):
    source = parse_alpha(o["alpha"])
    if o["kind"] == "powerlaw":
        return power_law_family(o["p"], source, o["N"])
    flux = power_law_flux(o["p"], M=1.0, decay=Decay(q=o["p"], C=1.0, r=1.0))
    return shock_cell_family(flux, source, o["t0"], o["N"])


def _cmd_family(cfg: RunConfig) -> int:
    o = cfg.options
    family = _build_family(o)
    profile = family_profile(family, o["t"])
    _emit_profile(cfg, variation.sample_profile(profile, fan_points=o["samples"]))
    return 0


def _cmd_assp(cfg: RunConfig) -> int:
    o = cfg.options
    family = _build_family({**o, "kind": "assp"})
    cells = [
        {"n": c.index, "A": c.A, "B": c.B, "a": c.a, "b": c.b, "tau": c.tau}
        for c in family.cells
    ]
    _write_text(cfg.out, _json_text({"t0": family.t0, "n0": family.n0, "cells": cells}))
    return 0


def _cmd_variation(cfg: RunConfig) -> int:
    o = cfg.options
    sampled = variation.load_profile_csv(o["input"])
    report = variation.p_variation(sampled, 1.0 / o["s"])
    _write_text(
        cfg.out,
        _json_text(
            {
                "s": o["s"],
                "p": report.p,
                "value": report.value,
                "subdivision": list(report.subdivision),
            }
        ),
    )
    return 0


def _cmd_diverge(cfg: RunConfig) -> int:
    o = cfg.options
    family = _build_family(o)
    rows = variation.family_variation_lower_bounds(family, o["t"], o["s"], o["N"])
    _write_text(cfg.out, _csv_text(["n", "bound", "cumulative"], [(n, float(b), float(c)) for n, b, c in rows]))
    return 0


def _cmd_oracle(cfg: RunConfig) -> int:
    o = cfg.options
    source = parse_alpha(o["alpha"])
    if o["init"] == "riemann":
        flux = power_law_flux(o["p"], M=max(abs(o["wl"]), abs(o["wr"])))
        span = max(abs(o["wl"]), abs(o["wr"])) ** o["p"] * o["t"] * 2.0 + 1.0
        domain = (o["x0"] - span, o["x0"] + span)

        def initial(xs):
            return np.where(xs < o["x0"], o["wl"], o["wr"])

        def exact(xs, t):
            pos, left, right = riemann_shock(flux, source, o["wl"], o["wr"], o["x0"], t)
            return np.where(xs < pos, left, right)

    elif o["init"] == "packet":
        flux = power_law_flux(o["p"], M=o["delta"])
        packet = make_packet(flux, source, o["center"], o["dx"], o["delta"])
        pad = 0.5 * o["dx"]
        domain = (o["center"] - o["dx"] - pad, o["center"] + o["dx"] + pad)

        def initial(xs):
            return np.where(
                (xs >= o["center"] - o["dx"]) & (xs < o["center"]),
                o["delta"],
                np.where((xs >= o["center"]) & (xs <= o["center"] + o["dx"]), -o["delta"], 0.0),
            )

        def exact(xs, t):
            profile = packet_profile(flux, source, packet, t)
            return np.array([profile(float(x)) for x in xs])

    else:  # family
        family = _build_family({**o, "kind": "powerlaw"})
        flux = family.flux
        lo = family.packets[0].support[0]
        hi = family.packets[-1].support[1]
        pad = 0.1 * (hi - lo)
        domain = (lo - pad, hi + pad)

        def initial(xs):
            out = np.zeros_like(xs)
            for pk in family.packets:
                out = np.where((xs >= pk.support[0]) & (xs < pk.x_n), pk.delta, out)
                out = np.where((xs >= pk.x_n) & (xs <= pk.support[1]), -pk.delta, out)
            return out

        def exact(xs, t):
            profile = family_profile(family, t)
            return np.array([profile(float(x)) for x in xs])

    run = godunov.MeshRun(
        domain=domain, cells=o["cells"], cfl=o["cfl"], t_end=o["t"], snapshots=(o["t"],)
    )
    centers = run.centers()
    snaps = godunov.godunov_solve(flux, source, initial(centers), run)
    # Riemann data is nonzero at the boundary, so the zero-exterior ghost
    # state launches waves inward; compare outside their physical cone plus
    # the first-order diffusive tail.  Compact-support inits never touch the
    # boundary, so the whole domain is clean.
    if o["init"] == "riemann":
        top = speed_bound(flux, source, o["t"])
        reach = top * o["t"] + 10.0 * math.sqrt(run.dx * max(top, 1e-12) * o["t"]) + 8.0 * run.dx
    else:
        reach = 0.0
    window = (centers >= domain[0] + reach) & (centers <= domain[1] - reach)
    rows = []
    errors = []
    for t_snap, u in snaps:
        for x, v in zip(centers, u):
            rows.append((float(t_snap), float(x), float(v)))
        err = float(np.sum(np.abs(u - exact(centers, t_snap))[window]) * run.dx)
        errors.append(
            {
                "t": t_snap,
                "l1_error": err,
                "window": [float(domain[0] + reach), float(domain[1] - reach)],
            }
        )
    _write_text(cfg.out, _csv_text(["t", "x", "u"], rows))
    if cfg.out is not None:
        sys.stdout.write(_json_text({"errors": errors}))
    return 0


def _cmd_triangular(cfg: RunConfig) -> int:
    o = cfg.options
    setup = triangular.TriangularSetup(p=o["p"], T=o["T"], N=o["N"])
    sums = {}
    for s_prime in o["sprime"]:
        sums[repr(float(s_prime))] = triangular.transported_variation_sums(
            setup, o["t"], s_prime, o["N"], dt=setup.T / 2 ** o["dt_log2"]
        )
    payload = {
        "t": o["t"],
        "divergence_sums": sums,
        "expected_per_term": {k: 2.0 ** (1.0 / float(k)) for k in sums},
        "continuity_defect": triangular.continuity_defect(setup, max(o["t"], 1e-3)),
        "hyperbolicity_gap": setup.strict_hyperbolicity_gap(),
    }
    _write_text(cfg.out, _json_text(payload))
    return 0


def _cmd_kk(cfg: RunConfig) -> int:
    o = cfg.options
    setup = kk.KKSetup(p=o["p"], delta=o["delta"], n=o["n"], i_max=o["imax"])
    payload = {
        "sup_distance_bound": setup.sup_distance_bound(),
        "jump_sum_10": kk.jump_sum_lower_bound(setup, o["t"], 10),
        "jump_sum_N": kk.jump_sum_lower_bound(setup, o["t"], o["Ni"]),
        "M": setup.M,
    }
    try:
        eta, omega, centers = kk.build_initial_data(setup, o["res"])
        u0 = eta[..., None] * omega
        box = (-2 * setup.M, 2 * setup.M, -2 * setup.M, 2 * setup.M)
        b_vec = np.asarray(setup.b, dtype=float)
        payload["bv_norm_u0_minus_b"] = kk.bv_grid_norm(u0 - b_vec, box)
        payload["sup_distance"] = float(
            np.max(np.sqrt(np.sum((u0 - b_vec) ** 2, axis=-1)))
        )
        if o["grid_out"]:
            rows = []
            for iy, y in enumerate(centers):
                for ix, x in enumerate(centers):
                    rows.append(
                        (float(x), float(y), float(eta[iy, ix]), float(omega[iy, ix, 0]), float(omega[iy, ix, 1]))
                    )
            _write_text(o["grid_out"], _csv_text(["x", "y", "eta", "wx", "wy"], rows))
    except ValueError as exc:
        payload["grid"] = f"unresolved: {exc}"
    _write_text(cfg.out, _json_text(payload))
    return 0


def _cmd_bound(cfg: RunConfig) -> int:
    o = cfg.options
    source = parse_alpha(o["alpha"])
    flux = power_law_flux(o["p"], M=o["M"])
    value = variation.smoothing_upper_bound(flux, source, o["t"], o["a"], o["b"], o["T"])
    _write_text(cfg.out, _json_text({"value": value}))
    return 0


_COMMANDS = {
    "packet": _cmd_packet,
    "riemann": _cmd_riemann,
    "family": _cmd_family,
    "assp": _cmd_assp,
    "variation": _cmd_variation,
    "diverge": _cmd_diverge,
    "oracle": _cmd_oracle,
    "triangular": _cmd_triangular,
    "kk": _cmd_kk,
    "bound": _cmd_bound,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracbv",
        description="Exact balance-law solutions and fractional variation diagnostics",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=1, help="reserved; accepted for compatibility")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("packet", parents=[common], help="single antisymmetric packet profile")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha", default="zero")
    sp.add_argument("--dx", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--samples", type=int, default=64, help="samples per fan region")
    sp.add_argument("--center", type=float, default=0.0)

    sp = sub.add_parser("riemann", parents=[common], help="single shock position and states")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha", default="zero")
    sp.add_argument("--wl", type=float, required=True)
    sp.add_argument("--wr", type=float, required=True)
    sp.add_argument("--x0", type=float, default=0.0)
    sp.add_argument("--t", type=float, required=True)

    sp = sub.add_parser("family", parents=[common], help="truncated counterexample family profile")
    sp.add_argument("--kind", choices=("powerlaw", "assp"), default="powerlaw")
    sp.add_argument("--p", "--q", dest="p", type=float, required=True)
    sp.add_argument("--alpha", default="zero")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--t0", type=float, default=1.0)
    sp.add_argument("--samples", type=int, default=64)

    sp = sub.add_parser("assp", parents=[common], help="two-state cell table (JSON)")
    sp.add_argument("--q", "--p", dest="p", type=float, required=True)
    sp.add_argument("--alpha", default="zero")
    sp.add_argument("--t0", type=float, default=1.0)
    sp.add_argument("--N", type=int, required=True)

    sp = sub.add_parser("variation", parents=[common], help="fractional variation of a CSV profile")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--input", required=True)

    sp = sub.add_parser("diverge", parents=[common], help="per-packet lower bounds and partial sums")
    sp.add_argument("--kind", choices=("powerlaw", "assp"), default="powerlaw", dest="kind")
    sp.add_argument("--p", "--q", dest="p", type=float, required=True)
    sp.add_argument("--alpha", default="zero")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--t0", type=float, default=1.0)

    sp = sub.add_parser("oracle", parents=[common], help="finite-volume run with error table")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha", default="zero")
    sp.add_argument("--init", choices=("riemann", "packet", "family"), required=True)
    sp.add_argument("--cells", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--cfl", type=float, default=0.45)
    sp.add_argument("--wl", type=float, default=1.0)
    sp.add_argument("--wr", type=float, default=-1.0)
    sp.add_argument("--x0", type=float, default=0.0)
    sp.add_argument("--dx", type=float, default=0.1)
    sp.add_argument("--delta", type=float, default=0.5)
    sp.add_argument("--center", type=float, default=0.0)
    sp.add_argument("--N", type=int, default=4)
    sp.add_argument("--t0", type=float, default=1.0)

    sp = sub.add_parser("triangular", parents=[common], help="transport divergence diagnostics")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--sprime", type=float, nargs="+", required=True)
    sp.add_argument("--dt-log2", dest="dt_log2", type=int, default=10, help="RK4 step = T / 2^k")

    sp = sub.add_parser("kk", parents=[common], help="planar direction-oscillation diagnostics")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--res", type=int, required=True)
    sp.add_argument("--imax", type=int, default=None)
    sp.add_argument("--Ni", type=int, default=1000)
    sp.add_argument("--grid-out", dest="grid_out", default=None)

    sp = sub.add_parser("bound", parents=[common], help="analytic variation upper bound")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--alpha", default="zero")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--M", type=float, default=1.0)

    return parser


def dispatch(config: RunConfig) -> int:
    """Run the named command; exit 0 on success, 2 config error, 3 numerics."""
    handler = _COMMANDS.get(config.command)
    if handler is None:
        sys.stderr.write(_json_text({"error": f"unknown command {config.command!r}"}))
        return 2
    try:
        return handler(config)
    except ConfigError as exc:
        sys.stderr.write(_json_text({"error": str(exc), "kind": "config"}))
        return 2
    except (NumericsError, ValueError, OSError) as exc:
        sys.stderr.write(_json_text({"error": str(exc), "kind": "numerical"}))
        return 3


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    options = {k: v for k, v in vars(ns).items() if k not in {"command", "out", "format", "threads", "seed"}}
    if ns.command == "kk" and options.get("imax") is None:
        options["imax"] = max(options["n"], 4)
    if getattr(ns, "threads", 1) < 1:
        sys.stderr.write(_json_text({"error": "--threads must be >= 1", "kind": "config"}))
        return 2
    config = RunConfig(
        command=ns.command,
        options=options,
        out=ns.out,
        format=ns.format,
        threads=ns.threads,
        seed=ns.seed,
    )
    return dispatch(config)


if __name__ == "__main__":
    sys.exit(main())
