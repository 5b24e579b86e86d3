"""Command-line front end.

Subcommands: amplitude, oracle, grating, cloak, figures, selftest.  Every
run is described by a :class:`RunConfig`, validated against a JSON schema;
``--dump-config`` prints it instead of running.  Failures exit nonzero with
a JSON error report on stderr.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import logging
import math
import os
import pathlib
import sys

import numpy as np

from . import cloak, dyson, grating, lowfreq, media
from .errors import Bergmann2DError, ConfigInvalid, NotDerived, RouteMismatch

log = logging.getLogger("bergmann2d")

SUBCOMMANDS = ("amplitude", "oracle", "grating", "cloak", "figures", "selftest")
FIGURES = ("3", "4", "5", "7")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_CPLX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        {"type": "object", "properties": {"re": _NUM, "im": _NUM}, "additionalProperties": False},
    ]
}
_PATH = {"type": ["string", "null"]}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["subcommand"],
    "additionalProperties": False,
    "properties": {
        "subcommand": {"enum": list(SUBCOMMANDS)},
        "medium": _PATH,
        "k": _POS,
        "theta0_deg": _NUM,
        "order": {"enum": [1, 2]},
        "theta_grid": {"type": "integer", "minimum": 1},
        "nodes": {"type": "integer", "minimum": 2},
        "z0": _CPLX,
        "z1": _CPLX,
        "K": _POS,
        "ell": _POS,
        "brewster": {"type": "boolean"},
        "figure": {"enum": [None, *FIGURES[:3]]},
        "slab": {"type": ["object", "string", "null"]},
        "layers": {"type": ["object", "string", "null"]},
        "sigma": {"enum": ["+", "-"]},
        "alpha": _POS,
        "y_samples": {"type": "integer", "minimum": 1},
        "which": {"type": "array", "items": {"enum": list(FIGURES)}, "minItems": 1},
        "out": _PATH,
        "outdir": _PATH,
        "tol_quad": _POS,
        "tol_oracle": _POS,
        "threads": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "trials": {"type": "integer", "minimum": 1},
    },
}


@dataclasses.dataclass
class RunConfig:
    """Everything a run needs; defaults equal the library defaults."""

    subcommand: str
    medium: str | None = None
    k: float = 1.0
    theta0_deg: float = 30.0
    order: int = 2
    theta_grid: int = 37
    nodes: int = 48
    z0: object = grating.PAPER_SPEC.z0
    z1: object = grating.PAPER_SPEC.z1
    K: float = grating.PAPER_SPEC.K
    ell: float = grating.PAPER_SPEC.ell
    brewster: bool = False
    figure: str | None = None
    slab: object = None
    layers: object = "builtin:gaussian_exp"
    sigma: str = "-"
    alpha: float = 1.0
    y_samples: int = 21
    which: list = dataclasses.field(default_factory=lambda: list(FIGURES))
    out: str | None = None
    outdir: str | None = None
    tol_quad: float = lowfreq.F2_TOL
    tol_oracle: float = dyson.ORACLE_TOL
    threads: int = 1
    seed: int = 0
    trials: int = 20

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        import jsonschema

        try:
            jsonschema.validate(data, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise ConfigInvalid(f"configuration invalid: {exc.message}") from exc
        return cls(**data)


# ---------------------------------------------------------------- output helpers


def fmt(v):
    """Twelve significant digits, scientific notation."""
    return f"{float(v) + 0.0:.11e}"


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(x if isinstance(x, str) else fmt(x) for x in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        pathlib.Path(path).write_text(text)
    return text


def write_svg(path, x, series, xlabel="", ylabel="", width=640, height=400):
    """Static line plot of ``series`` (name -> y values) against ``x``."""
    pad = 50
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(v, dtype=float) for v in series.values()]
    lo = min(float(np.min(v)) for v in ys)
    hi = max(float(np.max(v)) for v in ys)
    if hi == lo:
        hi = lo + 1.0
    xlo, xhi = float(x.min()), float(x.max()) if x.max() > x.min() else float(x.min()) + 1.0
    sx = lambda v: pad + (v - xlo) / (xhi - xlo) * (width - 2 * pad)
    sy = lambda v: height - pad - (v - lo) / (hi - lo) * (height - 2 * pad)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle">{xlabel}</text>',
        f'<text x="12" y="{height / 2}" transform="rotate(-90 12 {height / 2})" text-anchor="middle">{ylabel}</text>',
        f'<text x="{pad}" y="{height - pad + 16}" font-size="10">{xlo:.4g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" font-size="10" text-anchor="end">{xhi:.4g}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" font-size="10" text-anchor="end">{lo:.4g}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" font-size="10" text-anchor="end">{hi:.4g}</text>',
    ]
    for i, (name, v) in enumerate(zip(series, ys)):
        c = colors[i % len(colors)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, v))
        parts.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{width - pad - 4}" y="{pad + 14 * (i + 1)}" fill="{c}" font-size="11" text-anchor="end">{name}</text>')
    parts.append("</svg>")
    pathlib.Path(path).write_text("\n".join(parts) + "\n")


def theta_grid(n, floor=lowfreq.ANGLE_FLOOR):
    """``n`` equispaced angles on [-175, 175] degrees, grazing ones dropped."""
    deg = np.linspace(-175.0, 175.0, n) if n > 1 else np.zeros(1)
    keep = np.abs(np.cos(np.radians(deg))) >= floor
    if not keep.all():
        log.warning("dropping %d grazing angle(s) from the theta grid", int((~keep).sum()))
    return deg[keep]


# ---------------------------------------------------------------- subcommands


def _medium(cfg):
    if not cfg.medium:
        raise ConfigInvalid("--medium is required")
    profile, mode = media.load_medium(cfg.medium)
    return media.to_alpha_beta(profile, mode), profile.ell


def run_amplitude(cfg):
    ab, ell = _medium(cfg)
    deg = theta_grid(cfg.theta_grid)
    kin = lowfreq.ScatterKinematics(cfg.k, math.radians(cfg.theta0_deg), np.radians(deg))
    amp = lowfreq.amplitude(kin, ab, cfg.k * ell, N=cfg.order, f2_tol=cfg.tol_quad)
    vals = amp.values if amp.values.size else np.zeros(deg.size, dtype=complex)
    rows = [(t, v.real, v.imag, abs(v) ** 2) for t, v in zip(deg, vals)]
    write_csv(cfg.out, ["theta_deg", "re_f", "im_f", "|f|^2"], rows)
    drows = [(ch.theta_deg, ch.weight.real, ch.weight.imag) for ch in sorted(amp.dirac, key=lambda c: c.theta)]
    dpath = None if cfg.out is None else _sibling(cfg.out, "_dirac")
    if dpath is None:
        sys.stdout.write("\n")
    write_csv(dpath, ["theta_deg", "re_tau", "im_tau"], drows)
    return 0


def _sibling(path, suffix):
    p = pathlib.Path(path)
    return str(p.with_name(p.stem + suffix + (p.suffix or ".csv")))


def run_oracle(cfg):
    ab, ell = _medium(cfg)
    theta0 = math.radians(cfg.theta0_deg)
    kl = cfg.k * ell
    if ab.discrete:
        kin = lowfreq.ScatterKinematics(cfg.k, theta0)
        a = lowfreq.amplitude(kin, ab, kl, N=cfg.order, f2_tol=cfg.tol_quad)
        b = dyson.series_amplitude(theta0, [], cfg.k, ab, kl, cfg.order, cfg.nodes)
        keys = sorted({(ch.shift, ch.side) for ch in a.dirac + b.dirac})
        deg, va, vb = [], [], []
        for shift, side in keys:
            ca, cb = a.channel(shift, side), b.channel(shift, side)
            ch = ca or cb
            deg.append(ch.theta_deg)
            va.append(ca.weight if ca else 0j)
            vb.append(cb.weight if cb else 0j)
        deg, va, vb = np.array(deg), np.array(va), np.array(vb)
    else:
        deg = theta_grid(cfg.theta_grid)
        kin = lowfreq.ScatterKinematics(cfg.k, theta0, np.radians(deg))
        va = lowfreq.amplitude(kin, ab, kl, N=cfg.order, f2_tol=cfg.tol_quad).values
        vb = dyson.series_amplitude(theta0, kin.theta, cfg.k, ab, kl, cfg.order, cfg.nodes).values
    diff = np.abs(va - vb)
    scale = np.max(np.abs(va)) if va.size else 0.0
    disc = float(np.max(diff) / scale) if scale > 0 else float(np.max(diff, initial=0.0))
    rows = [(t, x.real, x.imag, y.real, y.imag, d) for t, x, y, d in zip(deg, va, vb, diff)]
    text = write_csv(None if cfg.out is None else cfg.out,
                     ["theta_deg", "re_lowfreq", "im_lowfreq", "re_oracle", "im_oracle", "abs_diff"], rows)
    summary = f"# max_discrepancy,{fmt(disc)}\n"
    if cfg.out is None:
        sys.stdout.write(summary)
    else:
        pathlib.Path(cfg.out).write_text(text + summary)
        sys.stdout.write(summary)
    if disc > cfg.tol_oracle:
        raise RouteMismatch(f"pipelines differ by {disc:.3e} (tolerance {cfg.tol_oracle:g})", disc)
    return 0


def _grating_spec(cfg):
    return grating.GratingSpec(media._cplx(cfg.z0), media._cplx(cfg.z1), cfg.K, cfg.ell)


def run_grating(cfg):
    spec = _grating_spec(cfg)
    if cfg.figure:
        data = grating.figure_data(cfg.figure, spec)
        write_csv(cfg.out, list(data), zip(*data.values()))
        return 0
    theta0 = grating.brewster_setup(spec).theta0 if cfg.brewster else math.radians(cfg.theta0_deg)
    chans = grating.channels(cfg.k, theta0, spec)
    rows = []
    for j in range(chans.J + 1):
        for sign, th in ((1, chans.theta_plus[j]), (-1, chans.theta_minus[j])):
            t1 = grating.tau(1, j, sign, cfg.k, theta0, spec)
            try:
                t2 = grating.tau(2, j, sign, cfg.k, theta0, spec)
            except NotDerived:
                t2 = complex("nan")
            kl = cfg.k * spec.ell
            tot = t1 * kl + (t2 * kl**2 if cfg.order == 2 else 0)
            rows.append((str(j), str(sign), math.degrees(th), t1.real, t1.imag, t2.real, t2.imag, tot.real, tot.imag))
    write_csv(cfg.out, ["j", "sign", "theta_deg", "re_tau1", "im_tau1", "re_tau2", "im_tau2", "re_tau", "im_tau"], rows)
    return 0


def _load_json_arg(value):
    if value is None or isinstance(value, dict):
        return value
    if value.startswith("builtin:"):
        return value
    path = pathlib.Path(value)
    try:
        return json.loads(path.read_text()) if path.exists() else json.loads(value)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot parse {value!r}: {exc}") from exc


SPEC3 = {"kind": "gaussian_exp", "z": 0.4, "kappa": 3.0, "L": 5.0, "ell_star": 1.0 / 3.0}


def _slab(desc):
    desc = dict(SPEC3 if desc in (None, "builtin:gaussian_exp") else desc)
    kind = desc.pop("kind", "gaussian_exp")
    try:
        if kind == "gaussian_exp":
            return cloak.gaussian_exp_slab(float(desc["z"]), float(desc["kappa"]), float(desc["L"]),
                                           float(desc["ell_star"]), float(desc.get("center", 0.0))), desc
        if kind == "uniform":
            eps = media._cplx(desc["eps"])
            return cloak.SlabSpec(lambda x, y: np.full(np.broadcast(x, y).shape, eps), float(desc["ell_star"]),
                                  media.Decay(media.DecayClass.CONSTANT)), desc
    except KeyError as exc:
        raise ConfigInvalid(f"slab description lacks {exc}") from exc
    raise ConfigInvalid(f"unknown slab kind {kind!r}")


def build_design(cfg):
    slab_desc = _load_json_arg(cfg.slab)
    layers = _load_json_arg(cfg.layers)
    sigma = 1 if cfg.sigma == "+" else -1
    slab, params = _slab(slab_desc)
    y = None
    if slab.decay.decaying:
        h = 4.0 * slab.decay.scale
        y = slab.decay.center + np.linspace(-h, h, cfg.y_samples)
    if layers in (None, "builtin:gaussian_exp"):
        if slab.decay.kind is not media.DecayClass.GAUSSIAN or "z" not in params:
            raise ConfigInvalid("builtin:gaussian_exp layers need a gaussian_exp slab")
        return cloak.gaussian_exp_design(params["z"], params["kappa"], params["L"], cfg.alpha,
                                         slab.ell_star, sigma, y, params.get("center", 0.0))
    if isinstance(layers, str):
        raise ConfigInvalid(f"unknown layer description {layers!r}")
    kind = layers.get("kind", "constant")
    if kind == "constant":
        lm, lp = float(layers["ell_minus"]), float(layers["ell_plus"])
    elif kind == "gaussian":
        c = slab.decay.center
        L = float(layers.get("L", slab.decay.scale))
        am, ap = float(layers["alpha_minus"]), float(layers["alpha_plus"])
        lm = lambda yy: am * slab.ell_star * np.exp(-((yy - c) ** 2) / (2 * L**2))
        lp = lambda yy: ap * slab.ell_star * np.exp(-((yy - c) ** 2) / (2 * L**2))
    else:
        raise ConfigInvalid(f"unknown layer kind {kind!r}")
    if y is None:
        y = np.linspace(-1.0, 1.0, cfg.y_samples)
    return cloak.solve_layers(slab, lm, lp, sigma, y)


def run_cloak(cfg):
    d = build_design(cfg)
    comp = d.composite()
    ab = media.to_alpha_beta(comp, media.ModeKind.TM)
    res = cloak.invisibility_residuals(ab, d.y)
    lm, lp = d.ell_minus(d.y), d.ell_plus(d.y)
    rows = []
    for i, y in enumerate(d.y):
        rows.append((y, lm[i], lp[i], d.eps_minus[i].real, d.eps_minus[i].imag, d.eps_plus[i].real,
                     d.eps_plus[i].imag, abs(res[i, 0]), abs(res[i, 1]), str(int(d.report.feasible[i]))))
    write_csv(cfg.out, ["y", "ell_minus", "ell_plus", "re_eps_minus", "im_eps_minus", "re_eps_plus",
                        "im_eps_plus", "residual_1", "residual_2", "feasible"], rows)
    return 0


def _figure_tables(which):
    if which in ("3", "4", "5"):
        data = grating.figure_data(which)
        return data
    d = cloak.gaussian_exp_design(0.4, 3.0, 5.0, 1.0, 1.0 / 3.0, -1, np.linspace(-20.0, 20.0, 201))
    return {
        "y": d.y,
        "re_eps_minus": d.eps_minus.real,
        "im_eps_minus": d.eps_minus.imag,
        "re_eps_plus": d.eps_plus.real,
        "im_eps_plus": d.eps_plus.imag,
    }


_LABELS = {"3": ("k/K", "theta_1 (deg)"), "4": ("k ell", "tau_0-"), "5": ("k ell", "|tau_1|^2 x 1e4"), "7": ("y / ell", "eps")}


def run_figures(cfg):
    outdir = pathlib.Path(cfg.outdir or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    which = sorted(set(cfg.which))
    with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        tables = dict(zip(which, pool.map(_figure_tables, which)))
    for w in which:
        data = tables[w]
        names = list(data)
        write_csv(outdir / f"fig{w}.csv", names, zip(*data.values()))
        write_svg(outdir / f"fig{w}.svg", data[names[0]], {n: data[n] for n in names[1:]}, *_LABELS[w])
        sys.stdout.write(f"{outdir / f'fig{w}.csv'}\n")
    return 0


def run_selftest(cfg):
    """Randomised consistency checks; ``seed`` fixes the draws."""
    rng = np.random.default_rng(cfg.seed)
    results = {}
    worst = 0.0
    for _ in range(cfg.trials):
        z0 = rng.uniform(0.5, 12.0)
        spec = grating.GratingSpec(z0, rng.uniform(0.01, 0.3) * (1 + z0), math.pi, 0.1)
        k = rng.uniform(0.55, 1.0) * math.pi
        theta0 = math.radians(rng.choice([-1, 1]) * rng.uniform(5, 80) + rng.choice([0, 180]))
        kin = lowfreq.ScatterKinematics(k, theta0)
        amp = lowfreq.amplitude(kin, spec.alpha_beta(), k * spec.ell)
        first, second = amp.coefficients
        chans = grating.channels(k, theta0, spec)
        for j in range(min(chans.J, 1) + 1):
            for sign in (1, -1):
                shift = j * spec.K
                for n, coeffs in ((1, first), (2, second)):
                    ch = next((c for c in coeffs if c.side == sign and abs(c.shift - shift) < 1e-9), None)
                    ref = grating.tau(n, j, sign, k, theta0, spec)
                    got = ch.weight if ch else 0j
                    worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300) if abs(ref) > 1e-12 else abs(got))
    results["grating_duality_max_rel"] = float(worst)
    swap = 0.0
    for _ in range(cfg.trials):
        Dp, Dm = rng.uniform(0, 0.5), -rng.uniform(0, 0.3)
        lm, lp = rng.uniform(0.05, 1.0, 2)
        for s in (1, -1):
            a = cloak.solve_pointwise(Dp, Dm, lm, lp, 1.0, s)
            b = cloak.solve_pointwise(Dp, Dm, lp, lm, 1.0, -s)
            swap = max(swap, abs(a["eps_plus"] - b["eps_minus"]), abs(a["eps_minus"] - b["eps_plus"]))
    results["sigma_swap_max"] = float(swap)
    ok = bool(worst < 1e-9 and swap < 1e-10)
    results["passed"] = ok
    sys.stdout.write(json.dumps(results, indent=2) + "\n")
    return 0 if ok else 1


RUNNERS = {
    "amplitude": run_amplitude,
    "oracle": run_oracle,
    "grating": run_grating,
    "cloak": run_cloak,
    "figures": run_figures,
    "selftest": run_selftest,
}


def run(cfg):
    return RUNNERS[cfg.subcommand](cfg)


# ---------------------------------------------------------------- parsing


def _parser():
    glob = argparse.ArgumentParser(add_help=False)
    glob.add_argument("--tol-quad", type=float, dest="tol_quad")
    glob.add_argument("--tol-oracle", type=float, dest="tol_oracle")
    glob.add_argument("--threads", type=int)
    glob.add_argument("--seed", type=int)
    glob.add_argument("--config", help="JSON RunConfig to start from")
    glob.add_argument("--dump-config", action="store_true", help="print the RunConfig and exit")

    p = argparse.ArgumentParser(prog="bergmann2d", description="Low-frequency scattering by 2D strips.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def kin(sp, grid=True):
        sp.add_argument("--medium")
        sp.add_argument("--k", type=float)
        sp.add_argument("--theta0-deg", type=float, dest="theta0_deg")
        sp.add_argument("--order", type=int, choices=[1, 2])
        if grid:
            sp.add_argument("--theta-grid", type=int, dest="theta_grid")
        sp.add_argument("--out")

    a = sub.add_parser("amplitude", parents=[glob], help="closed-form low-frequency amplitude")
    kin(a)
    o = sub.add_parser("oracle", parents=[glob], help="compare against the operator-series oracle")
    kin(o)
    o.add_argument("--nodes", type=int)

    g = sub.add_parser("grating", parents=[glob], help="single-harmonic grating channel weights")
    for name in ("z0", "z1"):
        g.add_argument(f"--{name}", type=complex)
    g.add_argument("--K", type=float)
    g.add_argument("--ell", type=float)
    g.add_argument("--k", type=float)
    ang = g.add_mutually_exclusive_group()
    ang.add_argument("--theta0-deg", type=float, dest="theta0_deg")
    ang.add_argument("--brewster", action="store_true", default=None)
    g.add_argument("--order", type=int, choices=[1, 2])
    g.add_argument("--figure", choices=list(FIGURES[:3]))
    g.add_argument("--out")

    c = sub.add_parser("cloak", parents=[glob], help="two-layer invisibility coating")
    c.add_argument("--slab")
    c.add_argument("--layers")
    c.add_argument("--sigma", choices=["+", "-"])
    c.add_argument("--alpha", type=float)
    c.add_argument("--y-samples", type=int, dest="y_samples")
    c.add_argument("--out")

    f = sub.add_parser("figures", parents=[glob], help="regenerate figure data as CSV and SVG")
    f.add_argument("--which", nargs="+", choices=[*FIGURES, "all"])
    f.add_argument("--outdir")

    s = sub.add_parser("selftest", parents=[glob], help="randomised consistency checks")
    s.add_argument("--trials", type=int)
    return p


def _complex_json(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def config_from_args(argv=None):
    ns = vars(_parser().parse_args(argv))
    base = {}
    if ns.get("config"):
        try:
            base = json.loads(pathlib.Path(ns["config"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {ns['config']}: {exc}") from exc
    dump = ns.pop("dump_config", False)
    ns.pop("config", None)
    if ns.get("which"):
        ns["which"] = list(FIGURES) if "all" in ns["which"] else ns["which"]
    data = dict(base)
    data.update({k: _complex_json(v) for k, v in ns.items() if v is not None})
    return RunConfig.from_dict(data), dump


def _error_report(exc, code):
    report = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, RouteMismatch):
        report["discrepancy"] = exc.discrepancy
    sys.stderr.write(json.dumps(report) + "\n")
    return code


def main(argv=None):
    level = os.environ.get("BERGMANN2D_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, dump = config_from_args(argv)
        if dump:
            sys.stdout.write(json.dumps(cfg.to_dict(), indent=2) + "\n")
            return 0
        return run(cfg)
    except ConfigInvalid as exc:
        return _error_report(exc, 2)
    except Bergmann2DError as exc:
        return _error_report(exc, 3)
    except OSError as exc:
        return _error_report(exc, 4)
    except (ValueError, KeyError) as exc:
        return _error_report(exc, 5)


if __name__ == "__main__":
    sys.exit(main())
