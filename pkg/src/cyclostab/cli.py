"""Command line front end: analyze, admissible, nyquist, counterexample.

Configs are JSON with a schema version; polynomial coefficients ascending.
Reports print all numbers at 12 significant digits and include a timing
field that golden comparisons are expected to drop. Exit codes: 0 criterion
satisfied (or artifact produced), 2 input error, 3 criterion fails or no
counterexample exists, 4 marginal.
"""

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .criterion import (admissible_gamma_set, beta_values,
                        destabilizing_subsystems, geometric_mean,
                        inequality_marginal, inequality_values)
from .errors import CycloStabError, Unboundable
from .indexing import min_containing_gamma, nyquist_sample, subsystem_index
from .mobius import MobiusParams, ScaledMobiusDisk, unit_disk_image
from .systems import DelaySystem, poly_degree, poly_eval, poly_roots

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_FAILS = 3
EXIT_MARGINAL = 4

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass(eq=False)
class AnalysisConfig:
    mobius: MobiusParams
    subsystems: tuple
    omega_max: float = None
    n_points: int = 400
    direction: str = "auto"
    allow_unstable: bool = False


def _r12(x):
    """Round to 12 significant digits for stable, readable reports."""
    if x is None or isinstance(x, bool):
        return x
    if math.isinf(x):
        return None
    return float(f"{float(x):.12g}")


def parse_config(data):
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    version = data.get("version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported config version {version!r}")
    try:
        mob = data["mobius"]
        params = MobiusParams(mob["a"], mob["b"], mob["c"], mob["d"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad mobius block: {exc}") from exc
    except CycloStabError as exc:
        raise ConfigError(str(exc)) from exc
    raw_subs = data.get("subsystems")
    if not isinstance(raw_subs, list) or len(raw_subs) < 2:
        raise ConfigError("need at least two subsystems")
    subs = []
    for k, entry in enumerate(raw_subs, start=1):
        try:
            subs.append(_parse_subsystem(entry))
        except (KeyError, TypeError, ValueError, CycloStabError) as exc:
            raise ConfigError(f"subsystem {k}: {exc}") from exc
    opts = data.get("options", {})
    cfg = AnalysisConfig(
        mobius=params,
        subsystems=tuple(subs),
        omega_max=opts.get("omega_max"),
        n_points=int(opts.get("n_points", 400)),
        direction=str(opts.get("direction", "auto")),
        allow_unstable=bool(opts.get("allow_unstable", False)),
    )
    if cfg.direction not in ("auto", "min", "max", "both"):
        raise ConfigError(f"bad direction {cfg.direction!r}")
    return cfg


def _parse_subsystem(entry):
    if "gain" in entry:
        return DelaySystem.gain(float(entry["gain"]))
    num = [float(v) for v in entry["num"]]
    den = [float(v) for v in entry["den"]]
    tau = float(entry.get("delay", 0.0))
    return DelaySystem.from_coeffs(num, den, tau)


def config_to_jsonable(cfg):
    subs = []
    for sub in cfg.subsystems:
        rat = sub.rational
        if poly_degree(rat.num) == 0 and poly_degree(rat.den) == 0 and \
                sub.delay_tau == 0.0:
            subs.append({"gain": rat.num[0] / rat.den[0]})
        else:
            subs.append({"num": list(rat.num), "den": list(rat.den),
                         "delay": sub.delay_tau})
    return {
        "version": SCHEMA_VERSION,
        "mobius": {"a": cfg.mobius.a, "b": cfg.mobius.b,
                   "c": cfg.mobius.c, "d": cfg.mobius.d},
        "subsystems": subs,
        "options": {"omega_max": cfg.omega_max, "n_points": cfg.n_points,
                    "direction": cfg.direction,
                    "allow_unstable": cfg.allow_unstable},
    }


def _auto_directions(admissible):
    if admissible.empty:
        return ["minimize"]
    touches_zero = admissible.intervals[0][0] == 0.0
    reaches_inf = math.isinf(admissible.intervals[-1][1])
    if touches_zero and reaches_inf and len(admissible.intervals) == 1:
        return ["minimize"]
    if touches_zero and reaches_inf:
        return ["minimize", "maximize"]
    if touches_zero:
        return ["minimize"]
    if reaches_inf:
        return ["maximize"]
    return ["minimize", "maximize"]


def _requested_directions(cfg, admissible):
    if cfg.direction == "min":
        return ["minimize"]
    if cfg.direction == "max":
        return ["maximize"]
    if cfg.direction == "both":
        return ["minimize", "maximize"]
    return _auto_directions(admissible)


def run_analysis(cfg):
    """Full pipeline: per-subsystem indices, geometric mean, criterion."""
    t0 = time.perf_counter()
    params = cfg.mobius
    n = len(cfg.subsystems)
    admissible = admissible_gamma_set(params, n)
    betas = beta_values(n)
    candidates = []
    for direction in _requested_directions(cfg, admissible):
        try:
            with ThreadPoolExecutor(max_workers=min(n, 8)) as pool:
                results = list(pool.map(
                    lambda sub: subsystem_index(
                        sub, params, want=direction,
                        omega_max=cfg.omega_max, n_points=cfg.n_points),
                    cfg.subsystems))
        except Unboundable as exc:
            candidates.append({"direction": direction, "error": str(exc)})
            continue
        gammas = [res.gamma_k for res in results]
        gbar = geometric_mean(gammas)
        qvals = inequality_values(params, n, gbar)
        candidates.append({
            "direction": direction,
            "results": results,
            "gamma_bar": gbar,
            "q_values": qvals,
            "holds": all(v > 0.0 for v in qvals),
            "marginal_band": inequality_marginal(params, n, gbar),
            "stability_ok": all(res.stability_check_passed for res in results),
        })
    chosen, verdict = _pick_candidate(candidates)
    report = _assemble_report(cfg, admissible, betas, candidates, chosen,
                              verdict, time.perf_counter() - t0)
    return report


def _pick_candidate(candidates):
    usable = [c for c in candidates if "error" not in c]
    for c in usable:
        if c["holds"] and c["stability_ok"]:
            return c, "robustly-stable"
    for c in usable:
        if c["marginal_band"] and c["stability_ok"]:
            return c, "marginal"
    if usable:
        return usable[0], "criterion-fails"
    return None, "criterion-fails"


def _assemble_report(cfg, admissible, betas, candidates, chosen, verdict,
                     elapsed):
    report = {
        "schema_version": SCHEMA_VERSION,
        "mobius": {"a": _r12(cfg.mobius.a), "b": _r12(cfg.mobius.b),
                   "c": _r12(cfg.mobius.c), "d": _r12(cfg.mobius.d)},
        "n": len(cfg.subsystems),
        "beta": [_r12(betas[0]), _r12(betas[1])],
        "admissible_gamma": [[_r12(lo), _r12(hi)]
                             for lo, hi in admissible.to_jsonable()],
        "verdict": verdict,
    }
    if chosen is not None and "error" not in chosen:
        report["direction"] = chosen["direction"]
        report["subsystems"] = [
            {"index": k + 1,
             "gamma_k": _r12(res.gamma_k),
             "direction": res.direction,
             "stability_check": res.stability_check_passed,
             "marginal": res.marginal}
            for k, res in enumerate(chosen["results"])
        ]
        report["gamma_bar"] = _r12(chosen["gamma_bar"])
        report["inequality"] = {
            "values": [_r12(v) for v in chosen["q_values"]],
            "holds": [bool(v > 0.0) for v in chosen["q_values"]],
            "marginal": chosen["marginal_band"],
        }
    errors = [c for c in candidates if "error" in c]
    if errors:
        report["direction_errors"] = [
            {"direction": c["direction"], "error": c["error"]} for c in errors]
    report["timing_seconds"] = elapsed
    return report


def _verdict_exit(verdict):
    return {"robustly-stable": EXIT_OK, "criterion-fails": EXIT_FAILS,
            "marginal": EXIT_MARGINAL}[verdict]


def _print_report_text(report, out):
    print(f"subsystems:        {report['n']}", file=out)
    print(f"map coefficients:  a={report['mobius']['a']:g} b={report['mobius']['b']:g} "
          f"c={report['mobius']['c']:g} d={report['mobius']['d']:g}", file=out)
    spans = ", ".join(
        f"({lo:g}, {'inf' if hi is None else format(hi, 'g')})"
        for lo, hi in report["admissible_gamma"]) or "(empty)"
    print(f"admissible means:  {spans}", file=out)
    for sub in report.get("subsystems", []):
        flags = []
        if not sub["stability_check"]:
            flags.append("stability check FAILED")
        if sub["marginal"]:
            flags.append("marginal")
        suffix = f"  [{', '.join(flags)}]" if flags else ""
        print(f"  subsystem {sub['index']}: gamma_{sub['index']} = "
              f"{sub['gamma_k']:.12g} ({sub['direction']}){suffix}", file=out)
    if "gamma_bar" in report:
        print(f"geometric mean:    {report['gamma_bar']:.12g}", file=out)
    for entry in report.get("direction_errors", []):
        print(f"  {entry['direction']}: {entry['error']}", file=out)
    print(f"verdict:           {report['verdict']}", file=out)


def cmd_analyze(args):
    cfg = _load_config(args.config)
    if args.omega_max is not None:
        cfg.omega_max = args.omega_max
    if args.direction is not None:
        cfg.direction = args.direction
    if args.allow_unstable:
        cfg.allow_unstable = True
    _gate_unstable(cfg)
    report = run_analysis(cfg)
    if args.text:
        _print_report_text(report, sys.stdout)
    else:
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return _verdict_exit(report["verdict"])


def _gate_unstable(cfg):
    if cfg.allow_unstable:
        return
    for k, sub in enumerate(cfg.subsystems, start=1):
        den = sub.rational.den
        if poly_degree(den) >= 1 and np.any(poly_roots(den).real > 1e-9):
            raise ConfigError(
                f"subsystem {k} is open-loop unstable; rerun with "
                f"--allow-unstable to use the full encirclement accounting")


def _load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(data)


def cmd_admissible(args):
    try:
        params = MobiusParams(args.a, args.b, args.c, args.d)
    except CycloStabError as exc:
        raise ConfigError(str(exc)) from exc
    if args.n < 2:
        raise ConfigError("n must be at least 2")
    intervals = admissible_gamma_set(params, args.n)
    payload = {
        "a": _r12(args.a), "b": _r12(args.b), "c": _r12(args.c),
        "d": _r12(args.d), "n": args.n,
        "intervals": [[_r12(lo), _r12(hi)]
                      for lo, hi in intervals.to_jsonable()],
    }
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_nyquist(args):
    cfg = _load_config(args.config)
    if not (1 <= args.subsystem <= len(cfg.subsystems)):
        raise ConfigError(
            f"subsystem index {args.subsystem} out of range 1..{len(cfg.subsystems)}")
    sub = cfg.subsystems[args.subsystem - 1]
    curve = nyquist_sample(sub, omega_max=cfg.omega_max,
                           n_points=cfg.n_points)
    gamma = min_containing_gamma(curve, cfg.mobius)
    region = unit_disk_image(ScaledMobiusDisk(cfg.mobius, 1.0))
    csv_path = args.out + ".csv"
    svg_path = args.out + ".svg"
    _write_csv(csv_path, curve)
    _write_svg(svg_path, curve, region, gamma, args.subsystem)
    payload = {"subsystem": args.subsystem, "gamma_k": _r12(gamma),
               "csv": csv_path, "svg": svg_path}
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _write_csv(path, curve):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("omega,re,im\n")
        for w, v in zip(curve.omegas, curve.values):
            fh.write(f"{w:.12g},{v.real:.12g},{v.imag:.12g}\n")
        lim = curve.limit_value
        fh.write(f"inf,{lim.real:.12g},{lim.imag:.12g}\n")


def _svg_num(x):
    return f"{x:.6g}"


def _write_svg(path, curve, region, gamma, sub_index):
    pts = curve.all_points()
    xs = [pts.real.min(), pts.real.max()]
    ys = [pts.imag.min(), pts.imag.max()]
    shapes = []
    meta = {"subsystem": sub_index, "gamma_k": _r12(gamma),
            "region_kind": region.kind}
    if region.kind in ("interior", "exterior"):
        for label, scale, fill in (("unit-scale disk", 1.0, "#d9d9d9"),
                                   ("scaled disk", gamma, "#9e9e9e")):
            cx, cy = scale * region.center.real, scale * region.center.imag
            r = scale * region.radius
            xs.extend([cx - r, cx + r])
            ys.extend([cy - r, cy + r])
            shapes.append((label, cx, cy, r, fill))
        meta["unit_disk"] = {"center_re": _r12(region.center.real),
                             "center_im": _r12(region.center.imag),
                             "radius": _r12(region.radius)}
        meta["scaled_disk"] = {"center_re": _r12(gamma * region.center.real),
                               "center_im": _r12(gamma * region.center.imag),
                               "radius": _r12(gamma * region.radius)}
    else:
        meta["halfplane"] = {
            "boundary_re": _r12(region.boundary_point.real),
            "boundary_im": _r12(region.boundary_point.imag),
            "normal_re": _r12(region.inward_normal.real),
            "normal_im": _r12(region.inward_normal.imag)}
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    pad = 0.05 * max(x1 - x0, y1 - y0, 1e-6)
    x0, x1 = x0 - pad, x1 + pad
    y0, y1 = y0 - pad, y1 + pad
    span = max(x1 - x0, y1 - y0)
    lines = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" '
        f'viewBox="{_svg_num(x0)} {_svg_num(-y1)} {_svg_num(span)} {_svg_num(span)}">',
        f"<metadata>{json.dumps(meta, sort_keys=True)}</metadata>",
    ]
    for label, cx, cy, r, fill in shapes:
        lines.append(
            f'<circle cx="{_svg_num(cx)}" cy="{_svg_num(-cy)}" r="{_svg_num(r)}" '
            f'fill="{fill}" fill-opacity="0.6" stroke="none" '
            f'data-label="{label}" data-radius="{_svg_num(r)}"/>')
    if region.kind == "halfplane":
        p0 = region.boundary_point
        d = region.inward_normal * 1j  # line direction
        lines.append(
            f'<line x1="{_svg_num(p0.real - span * d.real)}" '
            f'y1="{_svg_num(-(p0.imag - span * d.imag))}" '
            f'x2="{_svg_num(p0.real + span * d.real)}" '
            f'y2="{_svg_num(-(p0.imag + span * d.imag))}" '
            f'stroke="#9e9e9e" stroke-width="{_svg_num(span / 400)}"/>')
    if curve.values.size > 1:
        coords = " ".join(f"{v.real:.6g},{-v.imag:.6g}" for v in curve.values)
        lines.append(
            f'<polyline points="{coords}" fill="none" stroke="#0072bd" '
            f'stroke-width="{_svg_num(span / 400)}"/>')
    else:
        v = curve.values[0]
        lines.append(
            f'<circle cx="{_svg_num(v.real)}" cy="{_svg_num(-v.imag)}" '
            f'r="{_svg_num(span / 200)}" fill="#0072bd" data-label="response point"/>')
    font = span / 25
    lines.append(
        f'<text x="{_svg_num(x0 + pad)}" y="{_svg_num(-y1 + 1.2 * font + pad)}" '
        f'font-size="{_svg_num(font)}" fill="#0072bd">subsystem {sub_index} '
        f'response</text>')
    lines.append(
        f'<text x="{_svg_num(x0 + pad)}" y="{_svg_num(-y1 + 2.6 * font + pad)}" '
        f'font-size="{_svg_num(font)}" fill="#555555">containment scaling '
        f'{gamma:.6g}</text>')
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_counterexample(args):
    try:
        params = MobiusParams(args.a, args.b, args.c, args.d)
    except CycloStabError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        gammas = [float(v) for v in args.gammas.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad gamma list: {exc}") from exc
    if len(gammas) < 2 or any(g <= 0 for g in gammas):
        raise ConfigError("need at least two positive gammas")
    construction = destabilizing_subsystems(params, gammas)
    if construction is None:
        print("criterion holds; no destabilizing subsystems exist",
              file=sys.stderr)
        return EXIT_FAILS
    residual = abs(poly_eval(np.asarray(construction.char_poly),
                             construction.root_near_i))
    payload = {
        "gammas": [_r12(g) for g in gammas],
        "subsystems": [
            {"alpha": _r12(al), "theta": _r12(th), "phi": _r12(ph),
             "num": [_r12(v) for v in nk], "den": [_r12(v) for v in mk]}
            for al, th, ph, nk, mk in zip(
                construction.alphas, construction.thetas, construction.phis,
                construction.numerators, construction.denominators)
        ],
        "closed_loop_root": {"re": _r12(construction.root_near_i.real),
                             "im": _r12(construction.root_near_i.imag)},
        "root_residual": _r12(residual),
    }
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cyclostab",
        description="Robust stability of cyclic feedback loops via "
                    "Mobius-disk subsystem indices")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", help="run the full analysis pipeline")
    p.add_argument("config", help="path to a JSON config")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True,
                     help="JSON report (default)")
    fmt.add_argument("--text", action="store_true", help="human-readable report")
    p.add_argument("--omega-max", type=float, default=None)
    p.add_argument("--direction", choices=["min", "max", "both"], default=None)
    p.add_argument("--allow-unstable", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("admissible",
                        help="closed-form admissible geometric means")
    for flag in ("a", "b", "c", "d"):
        p.add_argument(f"--{flag}", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_admissible)

    p = subs.add_parser("nyquist", help="emit curve plus disks as SVG and CSV")
    p.add_argument("config")
    p.add_argument("--subsystem", type=int, required=True,
                   help="1-based subsystem index")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_nyquist)

    p = subs.add_parser("counterexample",
                        help="destabilizing subsystems when the criterion fails")
    for flag in ("a", "b", "c", "d"):
        p.add_argument(f"--{flag}", type=float, required=True)
    p.add_argument("--gammas", required=True, help="comma-separated scalings")
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None):
    seed = os.environ.get("CYCLOSTAB_SEED")
    if seed is not None:
        try:
            np.random.seed(int(seed))
        except ValueError:
            print(f"ignoring non-integer CYCLOSTAB_SEED={seed!r}", file=sys.stderr)
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CycloStabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
