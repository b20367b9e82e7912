"""Command-line front end: configuration, CSV/SVG outputs, exit codes.

Subcommands: simulate | equilibria | eigen | boundaries | sweep |
scan-refuge | classify.  Runs are driven by an INI-style config file
(flat key=value under section headers); unknown keys are rejected by name.
Tables are comma-separated UTF-8 with LF line endings, a mandatory header
row, floats at 17 significant digits (lossless round-trip), and a
provenance comment block (config hash, toolkit version).  SVG output is
emitted directly as path elements in a fixed 800x600 viewBox.

Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classify import (classify_ic, default_seed_set, portrait_sweep,
                       refuge_alpha_scan)
from .equilibria import all_equilibria, boundary_SB, boundary_SC
from .flow import IntegrationError, integrate
from .model import ModelParams, SystemId
from .spectral import classify as classify_spectrum
from .spectral import eigen_quartic, jacobian_subsystem

__all__ = ["main", "ConfigError", "read_table", "write_table", "config_hash"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration

# every key the config language knows, per section
_SCHEMA = {
    "run": {"system"},
    "params": {"alpha", "gamma", "m", "l", "beta"},
    "tolerances": {"rtol", "atol"},
    "time": {"t_end", "burn_in", "budget", "sample_points"},
    "initial": {"state"},
    "grid": {"alpha_min", "alpha_max", "alpha_steps",
             "m_min", "m_max", "m_steps"},
    "scan": {"alpha_max", "tol"},
    "svg": {"projection"},
    "seeds": {"set"},
    "boundaries": {"samples"},
}

_SYSTEMS = {
    "full": SystemId.FULL,
    "local": SystemId.LOCAL,
    "prey_prey": SystemId.PREY_PREY,
    "refuge_a": SystemId.REFUGE_A,
    "refuge_b": SystemId.REFUGE_B,
}


def load_config(path: str | Path) -> dict[str, dict[str, str]]:
    """Parse and validate a config file; unknown keys are named in the error."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    cfg: dict[str, dict[str, str]] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key '{key}' in [{section}]")
            cfg.setdefault(section, {})[key] = value
    return cfg


def config_hash(cfg: dict[str, dict[str, str]]) -> str:
    """Hash of the semantic content: sorted section.key=value lines."""
    lines = sorted(f"{s}.{k}={v.strip()}"
                   for s, kv in cfg.items() for k, v in kv.items())
    return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()


def _get_float(cfg, section, key, default=None):
    raw = cfg.get(section, {}).get(key)
    if raw is None:
        if default is None:
            raise ConfigError(f"missing required key '{key}' in [{section}]")
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"key '{key}' in [{section}] is not a number: "
                          f"{raw!r}") from exc


def _get_int(cfg, section, key, default=None):
    val = _get_float(cfg, section, key, default)
    if val != int(val):
        raise ConfigError(f"key '{key}' in [{section}] must be an integer")
    return int(val)


def _params(cfg) -> ModelParams:
    alpha = _get_float(cfg, "params", "alpha", 0.1)
    gamma = _get_float(cfg, "params", "gamma", 1.0)
    m = _get_float(cfg, "params", "m", 0.5)
    l = _get_float(cfg, "params", "l", 0.1)
    beta = _get_float(cfg, "params", "beta", 1.0)
    try:
        return ModelParams(alpha, alpha, gamma, gamma, m, m, l, l, beta, beta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _system(cfg) -> SystemId:
    name = cfg.get("run", {}).get("system", "full").strip().lower()
    if name not in _SYSTEMS:
        raise ConfigError(f"unknown system '{name}' "
                          f"(choose from {sorted(_SYSTEMS)})")
    return _SYSTEMS[name]


def _initial_state(cfg) -> np.ndarray:
    raw = cfg.get("initial", {}).get("state")
    if raw is None:
        raise ConfigError("missing required key 'state' in [initial]")
    try:
        vals = [float(v) for v in raw.replace(";", ",").split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad initial state {raw!r}") from exc
    if len(vals) != 4:
        raise ConfigError("initial state needs 4 comma-separated values "
                          "(u1,v1,u2,v2)")
    return np.array(vals)


# ---------------------------------------------------------------------------
# tables


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_table(path: Path, header: list[str], rows, provenance: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# alleepatch-table v1\n")
        for k in sorted(provenance):
            fh.write(f"# {k}={provenance[k]}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def read_table(path: Path):
    """(provenance, header, rows) with floats parsed where possible."""
    provenance, header, rows = {}, None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, _, v = body.partition("=")
                    provenance[k.strip()] = v.strip()
                continue
            cells = line.split(",")
            if header is None:
                header = cells
                continue
            parsed = []
            for c in cells:
                if c == "":
                    parsed.append(None)
                    continue
                try:
                    parsed.append(float(c))
                except ValueError:
                    parsed.append(c)
            rows.append(parsed)
    if header is None:
        raise ValueError(f"{path}: missing header row")
    return provenance, header, rows


# ---------------------------------------------------------------------------
# SVG (direct path elements, 800x600 viewBox)

_SVG_HEAD = ('<svg xmlns="http://www.w3.org/2000/svg" '
             'viewBox="0 0 800 600" width="800" height="600">\n')

_LABEL_COLORS = {
    "I": "#4e79a7", "II": "#59a14f", "III": "#9c755f",
    "IV": "#f28e2b", "V": "#e15759", "boundary": "#bab0ac",
}


def _scale(xs, ys, margin=60.0):
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    dx = (x1 - x0) or 1.0
    dy = (y1 - y0) or 1.0
    px = margin + (xs - x0) / dx * (800 - 2 * margin)
    py = 600 - margin - (ys - y0) / dy * (600 - 2 * margin)
    return px, py


def write_curve_svg(path: Path, xs, ys, title: str):
    px, py = _scale(xs, ys)
    d = "M " + " L ".join(f"{x:.2f} {y:.2f}" for x, y in zip(px, py))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_SVG_HEAD)
        fh.write(f"<title>{title}</title>\n")
        fh.write('<path d="M 60 540 L 740 540 M 60 540 L 60 60" '
                 'stroke="#333" fill="none" stroke-width="1"/>\n')
        fh.write(f'<path d="{d}" stroke="#1f77b4" fill="none" '
                 'stroke-width="1.2"/>\n')
        fh.write("</svg>\n")


def write_heatmap_svg(path: Path, alphas, ms, labels, title: str):
    """Portrait heat map: one filled path per cell, colored by domain label."""
    alphas, ms = np.asarray(alphas, float), np.asarray(ms, float)
    na, nm = len(alphas), len(ms)
    w = (800 - 120) / na
    h = (600 - 120) / nm
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_SVG_HEAD)
        fh.write(f"<title>{title}</title>\n")
        for j in range(nm):
            for i in range(na):
                color = _LABEL_COLORS.get(labels[j][i], "#ffffff")
                x = 60 + i * w
                y = 540 - (j + 1) * h
                fh.write(f'<path d="M {x:.2f} {y:.2f} h {w:.2f} v {h:.2f} '
                         f'h {-w:.2f} Z" fill="{color}" stroke="#fff" '
                         'stroke-width="0.5"/>\n')
        fh.write("</svg>\n")


_PROJECTIONS = {
    "u1_u2": (lambda s: (s[:, 0], s[:, 2]), "u1 vs u2"),
    "sum": (lambda s: (s[:, 0] + s[:, 2], s[:, 1] + s[:, 3]),
            "u1+u2 vs v1+v2"),
    "patch1": (lambda s: (s[:, 0], s[:, 1]), "u1 vs v1"),
    "patch2": (lambda s: (s[:, 2], s[:, 3]), "u2 vs v2"),
}


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(cfg, out: Path, svg: bool) -> int:
    sys_id = _system(cfg)
    p = _params(cfg)
    x0 = _initial_state(cfg)
    t_end = _get_float(cfg, "time", "t_end")
    n = _get_int(cfg, "time", "sample_points", 2001)
    rtol = _get_float(cfg, "tolerances", "rtol", 1e-9)
    atol = _get_float(cfg, "tolerances", "atol", 1e-12)
    prov = {"config_sha256": config_hash(cfg), "version": __version__,
            "schema": "trajectory-v1"}
    header = ["t", "u1", "v1", "u2", "v2"]
    if t_end <= 0.0:
        write_table(out / "trajectory.csv", header, [], prov)
        return EXIT_OK
    grid = np.linspace(0.0, t_end, n)
    traj = integrate(sys_id, x0, p, t_end, rtol=rtol, atol=atol, t_eval=grid)
    rows = [[t, *state] for t, state in zip(traj.t, traj.states)]
    write_table(out / "trajectory.csv", header, rows, prov)
    if svg:
        name = cfg.get("svg", {}).get("projection", "u1_u2").strip()
        if name not in _PROJECTIONS:
            raise ConfigError(f"unknown svg projection '{name}' "
                              f"(choose from {sorted(_PROJECTIONS)})")
        fn, title = _PROJECTIONS[name]
        xs, ys = fn(traj.states)
        write_curve_svg(out / f"trajectory_{name}.svg", xs, ys, title)
    return EXIT_OK


def cmd_equilibria(cfg, out: Path, svg: bool) -> int:
    p = _params(cfg)
    prov = {"config_sha256": config_hash(cfg), "version": __version__,
            "schema": "equilibria-v1"}
    rows = []
    for rec in all_equilibria(p):
        spec = eigen_quartic(jacobian_subsystem(SystemId.FULL, rec.location, p))
        stab = classify_spectrum(spec)
        rows.append([rec.family, *rec.location, rec.residual,
                     stab.tag, stab.unstable_dim])
    write_table(out / "equilibria.csv",
                ["family", "u1", "v1", "u2", "v2", "residual",
                 "stability", "unstable_dim"], rows, prov)
    return EXIT_OK


def cmd_eigen(cfg, out: Path, svg: bool) -> int:
    p = _params(cfg)
    prov = {"config_sha256": config_hash(cfg), "version": __version__,
            "schema": "spectrum-v1"}
    rows = []
    for rec in all_equilibria(p):
        spec = eigen_quartic(jacobian_subsystem(SystemId.FULL, rec.location, p))
        row = [rec.family]
        for lam in spec.eigenvalues:
            row += [lam.real, lam.imag]
        rows.append(row)
    header = ["family"]
    for i in range(1, 5):
        header += [f"re{i}", f"im{i}"]
    write_table(out / "spectrum.csv", header, rows, prov)
    return EXIT_OK


def cmd_boundaries(cfg, out: Path, svg: bool) -> int:
    p = _params(cfg)
    l = p.l
    n = _get_int(cfg, "boundaries", "samples", 25)
    prov = {"config_sha256": config_hash(cfg), "version": __version__,
            "schema": "boundaries-v1"}
    rows = []
    # Hopf of the symmetric coexistence state, in-phase: a single m value
    rows.append(["H1", None, 0.5 * (l + 1.0)])
    # anti-phase Hopf sampled over m
    for m in np.linspace(l + 1e-3, 0.5 * (l + 1.0) - 1e-3, n):
        rows.append(["H2", 0.5 * m * (1.0 + l - 2.0 * m), m])
    a1, a2 = boundary_SC(l)
    rows.append(["SC1", a1, None])
    rows.append(["SC2", a2, None])
    # prey-only fold curves sampled over alpha up to the cusp
    cusp_alpha = (1.0 - l + l * l) / 3.0
    for a in np.linspace(1e-3, cusp_alpha * 0.999, n):
        sb = boundary_SB(l, a)
        rows.append(["SB12", a, sb.m12])
        rows.append(["SB23", a, sb.m23])
    sb = boundary_SB(l, cusp_alpha)
    rows.append(["cusp", sb.cusp_alpha, sb.cusp_m])
    write_table(out / "boundaries.csv", ["curve", "alpha", "m"], rows, prov)
    return EXIT_OK


def _seed_list(cfg, name_from_flag, p: ModelParams):
    name = (name_from_flag or cfg.get("seeds", {}).get("set", "default")).strip()
    if name == "default":
        return default_seed_set(p)
    if name == "coarse4":
        return default_seed_set(p)[:3] + default_seed_set(p)[4:]
    raise ConfigError(f"unknown seed set '{name}' "
                      "(choose from ['default', 'coarse4'])")


def cmd_sweep(cfg, out: Path, svg: bool, jobs: int | None,
              seed_set: str | None) -> int:
    p = _params(cfg)
    a0 = _get_float(cfg, "grid", "alpha_min")
    a1 = _get_float(cfg, "grid", "alpha_max")
    na = _get_int(cfg, "grid", "alpha_steps")
    m0 = _get_float(cfg, "grid", "m_min")
    m1 = _get_float(cfg, "grid", "m_max")
    nm = _get_int(cfg, "grid", "m_steps")
    if na < 2 or nm < 2:
        raise ConfigError("grid needs alpha_steps >= 2 and m_steps >= 2")
    budget = _get_float(cfg, "time", "budget", 20000.0)
    burn = _get_float(cfg, "time", "burn_in", 3000.0)
    alphas = np.linspace(a0, a1, na)
    ms = np.linspace(m0, m1, nm)
    seeds = _seed_list(cfg, seed_set, p)
    cells = portrait_sweep(alphas, ms, gamma=p.gamma, l=p.l, seeds=seeds,
                           jobs=jobs, budget=budget, burn_in=burn)
    prov = {"config_sha256": config_hash(cfg), "version": __version__,
            "schema": "portrait-v1"}
    rows = []
    for cell in cells:
        for i, r in enumerate(cell.reports):
            rows.append([cell.alpha, cell.m, cell.label, i, r.kind, r.tag,
                         r.k, r.period, r.lle])
    write_table(out / "portrait.csv",
                ["alpha", "m", "label", "seed", "kind", "tag", "k",
                 "period", "lle"], rows, prov)
    if svg:
        lookup = {(c.alpha, c.m): c.label for c in cells}
        labels = [[lookup[(a, m)] for a in alphas] for m in ms]
        write_heatmap_svg(out / "portrait.svg", alphas, ms, labels,
                          "domain labels over (alpha, m)")
    return EXIT_OK


def cmd_scan_refuge(cfg, out: Path, svg: bool) -> int:
    p = _params(cfg)
    alpha_max = _get_float(cfg, "scan", "alpha_max", 0.4)
    tol = _get_float(cfg, "scan", "tol", 2e-3)
    th = refuge_alpha_scan(p.l, p.m, p.gamma, alpha_max=alpha_max, tol=tol)
    prov = {"config_sha256": config_hash(cfg), "version": __version__,
            "schema": "refuge-thresholds-v1", "notes": th.notes}
    rows = [
        ["alpha_onset", th.alpha_onset,
         *(th.onset_bracket or (None, None))],
        ["alpha_hopf", th.alpha_hopf, None, None],
        ["alpha_loss", th.alpha_loss, *(th.loss_bracket or (None, None))],
    ]
    write_table(out / "refuge_thresholds.csv",
                ["threshold", "alpha", "bracket_lo", "bracket_hi"],
                rows, prov)
    return EXIT_OK


def cmd_classify(cfg, out: Path, svg: bool, seed_set: str | None) -> int:
    sys_id = _system(cfg)
    p = _params(cfg)
    budget = _get_float(cfg, "time", "budget", 20000.0)
    burn = _get_float(cfg, "time", "burn_in", 3000.0)
    if "initial" in cfg:
        seeds = [_initial_state(cfg)]
    else:
        seeds = _seed_list(cfg, seed_set, p)
    prov = {"config_sha256": config_hash(cfg), "version": __version__,
            "schema": "classification-v1"}
    rows = []
    for s in seeds:
        r = classify_ic(sys_id, s, p, budget=budget, burn_in=burn)
        final = r.final_state if r.final_state is not None else [None] * 4
        rows.append([*s, r.kind, r.tag, r.k, r.period, r.rotation, r.lle,
                     r.time_used, r.detail, *final])
    write_table(out / "classification.csv",
                ["seed_u1", "seed_v1", "seed_u2", "seed_v2", "kind", "tag",
                 "k", "period", "rotation", "lle", "time_used", "detail",
                 "u1", "v1", "u2", "v2"], rows, prov)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="allee-patch",
        description="Two-patch predator-prey toolkit: simulation, "
                    "equilibria, spectra, bifurcation boundaries, and "
                    "attractor portraits.")
    ap.add_argument("command",
                    choices=["simulate", "equilibria", "eigen", "boundaries",
                             "sweep", "scan-refuge", "classify"])
    ap.add_argument("--config", required=True, metavar="PATH",
                    help="INI-style run configuration")
    ap.add_argument("--out", default=".", metavar="DIR",
                    help="output directory (created if absent)")
    ap.add_argument("--jobs", type=int, default=None, metavar="N",
                    help="parallel workers for sweep "
                         "(ALLEE_PATCH_JOBS overrides)")
    ap.add_argument("--seed-set", default=None, metavar="NAME",
                    help="named seed set for sweep/classify")
    ap.add_argument("--svg", action="store_true",
                    help="also write SVG output where supported")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        jobs = args.jobs
        env_jobs = os.environ.get("ALLEE_PATCH_JOBS")
        if env_jobs is not None:
            try:
                jobs = int(env_jobs)
            except ValueError as exc:
                raise ConfigError(
                    f"ALLEE_PATCH_JOBS is not an integer: {env_jobs!r}"
                ) from exc
        if args.command == "simulate":
            return cmd_simulate(cfg, out, args.svg)
        if args.command == "equilibria":
            return cmd_equilibria(cfg, out, args.svg)
        if args.command == "eigen":
            return cmd_eigen(cfg, out, args.svg)
        if args.command == "boundaries":
            return cmd_boundaries(cfg, out, args.svg)
        if args.command == "sweep":
            return cmd_sweep(cfg, out, args.svg, jobs, args.seed_set)
        if args.command == "scan-refuge":
            return cmd_scan_refuge(cfg, out, args.svg)
        if args.command == "classify":
            return cmd_classify(cfg, out, args.svg, args.seed_set)
        raise AssertionError("unreachable")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, np.linalg.LinAlgError, ValueError,
            ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
