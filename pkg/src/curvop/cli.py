"""``curvop`` command-line front end.

Exit codes: 0 ok, 2 configuration or parse error, 3 geometric degeneracy or a
numerical failure, 4 verification failure (the report is still written).
The first line written to stderr on an error is ``curvop: <category>: <message>``.
"""
import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import errors as E
from .dsl import CATALOG_SOURCES, builtin_catalog, parse_surface
from .geometry import QUANTITIES, sample_geometry
from .gridfield import GridField, dumps, fmt
from .operators.assemble import ASSEMBLERS
from .operators.diffop import operator_document
from .spectral import spectrum_table
from .spin import _checked_inverse, dresselhaus_from_jacobian, rashba_from_jacobian, sigma_from_jacobian
from .verify import run_verify

EXIT_OK, EXIT_CONFIG, EXIT_GEOMETRY, EXIT_VERIFY = 0, 2, 3, 4

GEOMETRY_FIELDS = ("M", "K", "V_g", "f1", "f2", "g11", "g12", "g22", "g1_11", "g1_12", "g1_22")
OPERATOR_NAMES = tuple(ASSEMBLERS)

DEFAULTS = {
    "surface": None, "surface_file": None, "surface_expr": None, "set": {},
    "grid": None, "hbar": 1.0, "mass": 0.5, "alpha": 1.0, "beta": 1.0,
    "format": "csv", "out": ".", "tol": 1e-9, "modes": "0..0", "levels": 3,
    "nodes": 2000, "with_and_without_vg": False, "operators": None,
}
SOURCE_KEYS = ("surface", "surface_file", "surface_expr")
DEFAULT_GRID = {"verify": (20, 20)}
FALLBACK_GRID = (32, 32)


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _parse_set(text):
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, val = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects k=v pairs, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"--set value for {key.strip()!r} is not a number: {val!r}") from None
    return out


def _parse_grid(spec):
    if isinstance(spec, (list, tuple)) and len(spec) == 2:
        nu, nv = spec
    else:
        nu, sep, nv = str(spec).lower().partition("x")
        if not sep:
            raise ConfigError(f"--grid expects NxM, got {spec!r}")
    try:
        nu, nv = int(nu), int(nv)
    except (TypeError, ValueError):
        raise ConfigError(f"--grid expects integer sizes, got {spec!r}") from None
    if nu <= 0 or nv <= 0:
        raise ConfigError("grid sizes must be positive")
    return nu, nv


def _parse_modes(spec):
    a, sep, b = str(spec).partition("..")
    try:
        lo = int(a)
        hi = int(b) if sep else lo
    except ValueError:
        raise ConfigError(f"--modes expects a..b, got {spec!r}") from None
    if hi < lo:
        raise ConfigError(f"--modes range is empty: {spec!r}")
    return list(range(lo, hi + 1))


def build_parser():
    common = _Parser(add_help=False)
    src = common.add_argument_group("surface")
    src.add_argument("--surface", help=f"built-in surface ({', '.join(CATALOG_SOURCES)})")
    src.add_argument("--surface-file", help="file with a surface definition")
    src.add_argument("--surface-expr", help="inline surface definition")
    common.add_argument("--set", action="append", metavar="K=V[,...]", help="parameter overrides")
    common.add_argument("--config", help="JSON file with defaults for any flag")
    common.add_argument("--grid", metavar="NxM")
    common.add_argument("--hbar", type=float)
    common.add_argument("--mass", type=float)
    common.add_argument("--alpha", type=float, help="Rashba coupling")
    common.add_argument("--beta", type=float, help="Dresselhaus coupling")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output directory")

    parser = _Parser(prog="curvop", description="Curvature-induced operators on parametrized surfaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("geometry", parents=[common], help="sample M, K, V_g, metric data")
    p = sub.add_parser("operators", parents=[common], help="dump normal-ordered operators")
    p.add_argument("--operators", metavar="NAME[,...]", help=f"subset of {','.join(OPERATOR_NAMES)}")
    sub.add_parser("tensors", parents=[common], help="reduced Pauli matrices and SOC tensors")
    p = sub.add_parser("spectrum", parents=[common], help="radial eigenvalues on surfaces of revolution")
    p.add_argument("--modes", metavar="A..B")
    p.add_argument("--levels", type=int)
    p.add_argument("--nodes", type=int)
    p.add_argument("--with-and-without-vg", action="store_true", default=None)
    p = sub.add_parser("verify", parents=[common], help="compare the cone pipeline against closed forms")
    p.add_argument("--tol", type=float)
    return parser


def resolve_config(args):
    """Merge CLI flags over the config file over the defaults."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                filecfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(filecfg, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(filecfg) - set(DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(filecfg)
        if isinstance(cfg["set"], str):
            cfg["set"] = _parse_set(cfg["set"])
    if any(getattr(args, k) is not None for k in SOURCE_KEYS):
        for k in SOURCE_KEYS:
            cfg[k] = None  # a source on the command line replaces the config-file one
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is None:
            continue
        if key == "set":
            merged = dict(cfg["set"])
            for chunk in val:
                merged.update(_parse_set(chunk))
            val = merged
        cfg[key] = val

    sources = [k for k in SOURCE_KEYS if cfg[k] is not None]
    if len(sources) > 1:
        raise ConfigError("give exactly one of --surface, --surface-file, --surface-expr")
    if not sources:
        cfg["surface"] = "cone"
    cfg["grid"] = _parse_grid(cfg["grid"]) if cfg["grid"] is not None else DEFAULT_GRID.get(args.command, FALLBACK_GRID)
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"unknown format {cfg['format']!r}")
    for key in ("hbar", "mass", "tol"):
        if not float(cfg[key]) > 0:
            raise ConfigError(f"--{key} must be positive")
    cfg["command"] = args.command
    return cfg


def load_surface(cfg):
    if cfg["surface_file"] is not None:
        try:
            with open(cfg["surface_file"]) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read surface file: {exc}") from None
        sdef = parse_surface(text, name=os.path.splitext(os.path.basename(cfg["surface_file"]))[0])
    elif cfg["surface_expr"] is not None:
        sdef = parse_surface(cfg["surface_expr"], name="inline")
    else:
        sdef = builtin_catalog(cfg["surface"])
    return sdef.with_params(cfg["set"]) if cfg["set"] else sdef


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------

def _write(cfg, filename, text):
    os.makedirs(cfg["out"], exist_ok=True)
    path = os.path.join(cfg["out"], filename)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _fields_output(cfg, stem, fields, header):
    written = []
    if cfg["format"] == "json":
        doc = dict(header, fields={f.name: f.to_dict() for f in fields})
        written.append(_write(cfg, f"{stem}.json", dumps(doc)))
    else:
        for f in fields:
            written.append(_write(cfg, f"{f.name}.csv", f.to_csv()))
    return written


def _header(cfg, sdef):
    return {
        "surface": sdef.name,
        "params": {k: float(v) for k, v in sdef.params},
        "grid": list(cfg["grid"]),
        "units": {"hbar": cfg["hbar"], "mass": cfg["mass"]},
    }


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_geometry(cfg):
    sdef = load_surface(cfg)
    nu, nv = cfg["grid"]
    u, v, geo = sample_geometry(sdef, nu, nv)
    kw = {"hbar": cfg["hbar"], "mass": cfg["mass"]}
    fields = []
    for name in GEOMETRY_FIELDS:
        vals = np.broadcast_to(QUANTITIES[name](geo, kw if name == "V_g" else {}), (geo.npoints,))
        fields.append(GridField(u, v, geo.reshape(vals), name=name))
    return _fields_output(cfg, "geometry", fields, _header(cfg, sdef))


def cmd_tensors(cfg):
    sdef = load_surface(cfg)
    nu, nv = cfg["grid"]
    u, v, geo = sample_geometry(sdef, nu, nv)
    J = geo.jacobian
    _checked_inverse(J, geo)
    sig = sigma_from_jacobian(J)
    SR = rashba_from_jacobian(J, cfg["alpha"], cfg["hbar"])
    SD = dresselhaus_from_jacobian(J, cfg["beta"], cfg["hbar"])
    idx = [f"{i + 1}{j + 1}" for i in range(3) for j in range(3)]
    fields = [GridField(u, v, sig[:, i].reshape(nu, nv, 2, 2), name=f"sigma{i + 1}") for i in range(3)]
    fields.append(GridField(u, v, SR.reshape(nu, nv, 9), name="S_R", labels=tuple(f"S_R{k}" for k in idx)))
    fields.append(GridField(u, v, SD.reshape(nu, nv, 9), name="S_D", labels=tuple(f"S_D{k}" for k in idx)))
    header = dict(_header(cfg, sdef), couplings={"alpha_R": cfg["alpha"], "beta_D": cfg["beta"]})
    return _fields_output(cfg, "tensors", fields, header)


def _assemble(name, sdef, cfg):
    h = cfg["hbar"]
    if name == "H":
        return ASSEMBLERS[name](sdef, hbar=h, mass=cfg["mass"])
    if name == "Rashba":
        return ASSEMBLERS[name](sdef, alpha_R=cfg["alpha"], hbar=h)
    if name == "Dresselhaus":
        return ASSEMBLERS[name](sdef, beta_D=cfg["beta"], hbar=h)
    return ASSEMBLERS[name](sdef, hbar=h)


def cmd_operators(cfg):
    sdef = load_surface(cfg)
    explicit = cfg["operators"] is not None
    names = [s.strip() for s in cfg["operators"].split(",") if s.strip()] if explicit else list(OPERATOR_NAMES)
    bad = [n for n in names if n not in ASSEMBLERS]
    if bad:
        raise ConfigError(f"unknown operator(s) {', '.join(bad)}; choose from {', '.join(OPERATOR_NAMES)}")
    written = []
    for name in names:
        try:
            op = _assemble(name, sdef, cfg)
        except E.NonOrthogonalChart as exc:
            if explicit:
                raise
            print(f"curvop: warning: skipping {name}: {exc}", file=sys.stderr)
            continue
        doc = dict(_header(cfg, sdef), **operator_document(op, name, cfg["grid"]))
        written.append(_write(cfg, f"{name}.json", dumps(doc)))
    return written


SPECTRUM_COLUMNS = ("m", "n", "eigenvalue_without_Vg", "eigenvalue_with_Vg", "shift")


def cmd_spectrum(cfg):
    sdef = load_surface(cfg)
    modes = _parse_modes(cfg["modes"])
    levels, nodes = int(cfg["levels"]), int(cfg["nodes"])
    if levels < 1 or levels >= nodes:
        raise ConfigError("--levels must be between 1 and nodes - 1")
    rows = spectrum_table(sdef, modes, levels, nodes, cfg["hbar"], cfg["mass"])
    both = bool(cfg["with_and_without_vg"])
    cols = SPECTRUM_COLUMNS if both else ("m", "n", "eigenvalue")
    table = [r if both else (r[0], r[1], r[3]) for r in rows]
    if cfg["format"] == "json":
        doc = dict(_header(cfg, sdef), nodes=nodes, columns=list(cols),
                   rows=[[c if isinstance(c, int) else float(fmt(c)) for c in r] for r in table])
        doc.pop("grid")
        return [_write(cfg, "spectrum.json", dumps(doc))]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in table:
        w.writerow([c if isinstance(c, int) else fmt(c) for c in r])
    return [_write(cfg, "spectrum.csv", buf.getvalue())]


VERIFY_PARAMS = ("R", "phi", "l")


def cmd_verify(cfg):
    if cfg["surface"] != "cone" or cfg["surface_file"] or cfg["surface_expr"]:
        raise ConfigError("verify only runs on the built-in cone")
    bad = sorted(set(cfg["set"]) - set(VERIFY_PARAMS))
    if bad:
        raise ConfigError(f"unknown cone parameter(s): {', '.join(bad)}")
    p = dict(builtin_catalog("cone").param_map, **cfg["set"])
    nu, nv = cfg["grid"]
    report = run_verify(p["R"], p["phi"], p["l"], nu, nv, tol=float(cfg["tol"]), hbar=cfg["hbar"],
                        mass=cfg["mass"], alpha_R=cfg["alpha"], beta_D=cfg["beta"])
    path = _write(cfg, "verify.json", dumps(report))
    s = report["summary"]
    print(f"verify: {s['total']} checks, {s['passed']} passed, {len(s['flagged'])} flagged, "
          f"{len(s['failed'])} failed -> {path}")
    for line in s["flagged"]:
        print(f"  flagged {line}")
    for line in s["failed"]:
        print(f"  FAILED {line}")
    return EXIT_OK if report["ok"] else EXIT_VERIFY


COMMANDS = {
    "geometry": cmd_geometry,
    "operators": cmd_operators,
    "tensors": cmd_tensors,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
}

GEOMETRY_ERRORS = (E.DegenerateMetric, E.SingularJacobian, E.InvalidOffset, E.ConvergenceFailure)


def _fail(category, exc_or_msg, extra=""):
    first, *rest = str(exc_or_msg).splitlines() or [""]
    print(f"curvop: {category}: {first}", file=sys.stderr)
    for line in rest:
        print(line, file=sys.stderr)
    if extra:
        print(extra, file=sys.stderr)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
        result = COMMANDS[cfg["command"]](cfg)
    except ConfigError as exc:
        _fail("config", exc)
        return EXIT_CONFIG
    except E.SurfaceSyntaxError as exc:
        _fail("parse", exc, exc.caret())
        return EXIT_CONFIG
    except GEOMETRY_ERRORS as exc:
        _fail("geometry", exc)
        return EXIT_GEOMETRY
    except E.CurvopError as exc:
        _fail("config", exc)
        return EXIT_CONFIG
    except (ValueError, KeyError) as exc:
        _fail("config", exc.args[0] if exc.args else exc)
        return EXIT_CONFIG
    if isinstance(result, int):
        return result
    for path in result:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
