"""Pipeline-versus-closed-form comparison on the truncated cone.

Each check compares one quantity (or one labelled oracle row) on a grid and
reports the worst point.  Errors are sup-norm relative to the largest oracle
magnitude; an oracle that vanishes identically is compared in absolute terms.

A failing spin-orbit row is reported as ``flagged`` (a suspected error in
that single row) when it is the only failing row of its operator and every
cylinder-limit check passes; anything else that fails is a hard failure.
"""
import numpy as np

from . import cone_oracle as oracle
from .dsl import builtin_catalog
from .geometry import Geometry, grid_axes, values
from .gridfield import dumps, fmt
from .jets import INDEX
from .operators.assemble import (assemble_dresselhaus, assemble_dresselhaus_parts, assemble_hamiltonian, assemble_momentum,
                                 assemble_oam, assemble_rashba)
from .spin import dresselhaus_from_jacobian, rashba_from_jacobian, sigma_from_jacobian

ZERO_FLOOR = 1e-12
Q3_PROBE = 0.05


def _num(x):
    return float(fmt(x))


def compare(name, source, pipeline, reference, points, tol, group=None):
    """One check record; arrays are ``(N, ...)`` over the flattened grid."""
    p = np.asarray(pipeline)
    o = np.broadcast_to(np.asarray(reference), p.shape) if np.ndim(reference) else np.full(p.shape, reference)
    n = p.shape[0]
    diff = np.abs(p - o).reshape(n, -1)
    scale = float(np.max(np.abs(o))) if o.size else 0.0
    abs_err = float(np.max(diff)) if diff.size else 0.0
    rel = abs_err / scale if scale > ZERO_FLOOR else abs_err
    k, comp = np.unravel_index(int(np.argmax(diff)), diff.shape) if diff.size else (0, 0)
    pv = p.reshape(n, -1)[k, comp] if diff.size else 0.0
    ov = o.reshape(n, -1)[k, comp] if diff.size else 0.0
    return {
        "quantity": name,
        "source": source,
        "group": group or name,
        "point": {"u": _num(points[0][k]), "v": _num(points[1][k])},
        "oracle": [_num(np.real(ov)), _num(np.imag(ov))],
        "pipeline": [_num(np.real(pv)), _num(np.imag(pv))],
        "abs_err": _num(abs_err),
        "rel_err": _num(rel),
        "metric": "relative" if scale > ZERO_FLOOR else "absolute",
        "tol": tol,
        "pass": bool(rel <= tol),
    }


def _grid(p, nu, nv):
    sdef = builtin_catalog("cone").with_params({"R": p.R, "phi": p.phi, "l": p.l})
    u, v = grid_axes(sdef, nu, nv)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    return sdef, uu.ravel(), vv.ravel()


def _mat(nested):
    """Nested lists of jets -> array (N, rows, cols)."""
    arr = values(nested)
    return np.moveaxis(arr, -1, 0)


def geometry_checks(p, nu, nv, tol, hbar=1.0, mass=0.5, alpha_R=1.0, beta_D=1.0):
    sdef, u, v = _grid(p, nu, nv)
    geo = Geometry(sdef, u, v)
    pts = (u, v)
    q = Q3_PROBE
    ref = lambda which, **kw: oracle.quantity(p, which, u, v, hbar=hbar, mass=mass,
                                              alpha_R=alpha_R, beta_D=beta_D, **kw)
    g = _mat(geo.g)
    alpha = _mat(geo.alpha)
    lin = alpha @ g + np.swapaxes(alpha @ g, 1, 2)
    Gab = g + q * lin + q * q * (alpha @ g @ np.swapaxes(alpha, 1, 2))
    G = np.zeros((len(u), 3, 3))
    G[:, :2, :2] = Gab
    G[:, 2, 2] = 1.0
    fj = geo.f_metric.c
    f_q = sum(fj[oracle_index(k)] * q ** k for k in range(4))
    M = geo.M.value
    en = _mat(geo.en)
    J = geo.jacobian
    out = [
        compare("g_ab", "C6", g, ref("g"), pts, tol),
        compare("G_ij(q3=0.05)", "C5", G, ref("G", q3=q), pts, tol),
        compare("f(q3=0.05)", "C9", f_q, ref("f", q3=q), pts, tol),
        compare("M", "C10", M, ref("M"), pts, tol),
        compare("K", "C10", geo.K.value, ref("K"), pts, tol),
        compare("g^ab", "C11", _mat(geo.g_inv), ref("g_inv"), pts, tol),
        compare("G^ab(q3=0.05)", "C12", np.linalg.inv(Gab), ref("G_inv", q3=q), pts, tol),
        compare("g1^ab", "C13", _mat(geo.g1), ref("g1"), pts, tol),
        compare("V_g", "C14", geo.V_g(hbar, mass).value, ref("V_g"), pts, tol),
        compare("P_g", "C15", 1j * hbar * M[:, None] * en, ref("P_g"), pts, tol),
        compare("L_g", "C16", 1j * hbar * M[:, None] * _mat(geo.r_cross_en), ref("L_g"), pts, tol),
        compare("e_theta", "C1", _mat(geo.e[0]), ref("e_theta"), pts, tol),
        compare("e_r", "C1", _mat(geo.e[1]), ref("e_r"), pts, tol),
        compare("e_n", "C2", en, ref("en"), pts, tol),
        compare("sigma_0", "C20", sigma_from_jacobian(J), ref("sigma"), pts, tol),
        compare("S0 Rashba", "C22", rashba_from_jacobian(J, alpha_R, hbar), ref("rashba"), pts, tol),
        compare("S0 Dresselhaus", "C24", dresselhaus_from_jacobian(J, beta_D, hbar), ref("dresselhaus"), pts, tol),
    ]
    return out


def oracle_index(k):
    return INDEX[(0, 0, k)]


def _term_checks(op_name, rows, pipeline_terms, pts, tol, group):
    """Row-by-row checks; pipeline terms not claimed by any row must vanish."""
    out = []
    claimed = set()
    for label, terms in rows:
        for m, ref in terms.items():
            claimed.add(m)
        got = np.concatenate([_flat(pipeline_terms.get(m), ref) for m, ref in terms.items()], axis=1)
        exp = np.concatenate([_flat(ref, ref) for m, ref in terms.items()], axis=1)
        out.append(compare(op_name, label, got, exp, pts, tol, group))
    extra = [m for m in pipeline_terms if m not in claimed]
    if extra:
        got = np.concatenate([_flat(pipeline_terms[m], pipeline_terms[m]) for m in extra], axis=1)
        out.append(compare(op_name, "unclaimed terms " + ",".join(f"D{m[0]}{m[1]}" for m in extra),
                           got, 0.0 * got, pts, tol, group))
    return out


def _flat(x, like):
    like = np.asarray(like)
    n = like.shape[0]
    if x is None:
        return np.zeros((n, int(np.prod(like.shape[1:], dtype=int))), dtype=complex)
    return np.asarray(x, dtype=complex).reshape(n, -1)


def _split_dresselhaus(parts, u, v):
    """Pipeline Dresselhaus pieces regrouped to match the oracle rows."""
    ev = {k: op.evaluate(u, v) for k, op in parts.items()}
    rows = {f"ConeDSOC row {i}": {} for i in range(1, 7)}

    def put(row, m, val):
        d = rows[row]
        d[m] = d[m] + val if m in d else val

    for m, val in ev["surface"].items():
        put("ConeDSOC row 1" if sum(m) == 3 else "ConeDSOC row 2", m, val)
    for m, val in ev["g1"].items():
        put("ConeDSOC row 2", m, val)
    by_order = {(1, 0): "ConeDSOC row 4", (0, 1): "ConeDSOC row 5", (0, 0): "ConeDSOC row 6"}
    for key in ("mcoupled", "gradient"):
        for m, val in ev[key].items():
            put("ConeDSOC row 3" if sum(m) == 2 else by_order[m], m, val)
    return rows


def operator_checks(p, nu, nv, tol, hbar=1.0, mass=0.5, alpha_R=1.0, beta_D=1.0):
    sdef, u, v = _grid(p, nu, nv)
    pts = (u, v)
    kw = dict(hbar=hbar, mass=mass, alpha_R=alpha_R, beta_D=beta_D)
    out = []
    ops = {
        "H": assemble_hamiltonian(sdef, hbar, mass),
        "P": assemble_momentum(sdef, hbar),
        "L": assemble_oam(sdef, hbar),
        "Rashba": assemble_rashba(sdef, alpha_R, hbar),
    }
    for name, op in ops.items():
        rows = oracle.operator_rows(p, name, u, v, **kw)
        out += _term_checks(name, rows, op.evaluate(u, v), pts, tol, group=f"cone {name}")

    parts = assemble_dresselhaus_parts(sdef, beta_D, hbar)
    split = _split_dresselhaus(parts, u, v)
    for label, terms in oracle.operator_rows(p, "Dresselhaus", u, v, **kw):
        mine = split.pop(label)
        out += _term_checks("Dresselhaus", [(label, terms)], {m: mine.get(m) for m in terms}, pts, tol,
                            group="cone Dresselhaus")
        leftovers = {m: val for m, val in mine.items() if m not in terms}
        if leftovers:
            out += _term_checks("Dresselhaus", [], leftovers, pts, tol, group="cone Dresselhaus")
    return out


def cylinder_checks(p, nu, nv, tol, hbar=1.0, mass=0.5, alpha_R=1.0, beta_D=1.0):
    cyl = oracle.ConeParams(p.R, np.pi / 2, p.l)
    sdef, u, v = _grid(cyl, nu, nv)
    pts = (u, v)
    kw = dict(hbar=hbar, mass=mass, alpha_R=alpha_R, beta_D=beta_D)
    out = []
    H = assemble_hamiltonian(sdef, hbar, mass)
    out += _term_checks("H", oracle.operator_rows(cyl, "H", u, v, **kw), H.evaluate(u, v), pts, tol,
                        group="cylinder H")
    for name, op in (("CylRashba", assemble_rashba(sdef, alpha_R, hbar)),
                     ("CylDresselhaus", assemble_dresselhaus(sdef, beta_D, hbar))):
        out += _term_checks(name, oracle.operator_rows(cyl, name, u, v, **kw), op.evaluate(u, v), pts, tol,
                            group=f"cylinder {name[3:]}")
    return out


def classify(checks):
    """Attach ``status`` (pass / fail / flagged) to every check in place."""
    cylinder_ok = all(c["pass"] for c in checks if c["group"].startswith("cylinder"))
    for c in checks:
        c["status"] = "pass" if c["pass"] else "fail"
    for group in ("cone Rashba", "cone Dresselhaus"):
        failing = [c for c in checks if c["group"] == group and not c["pass"]]
        if len(failing) == 1 and cylinder_ok and not failing[0]["source"].startswith("unclaimed"):
            failing[0]["status"] = "flagged"
            failing[0]["note"] = "mismatch confined to this oracle row; cylinder limit agrees"
    return checks


def run_verify(R=1.0, phi=np.pi / 6, l=2.0, nu=20, nv=20, tol=1e-9, hbar=1.0, mass=0.5, alpha_R=1.0, beta_D=1.0):
    """Full verification report as a JSON-ready dict."""
    p = oracle.ConeParams(R, phi, l)
    kw = dict(hbar=hbar, mass=mass, alpha_R=alpha_R, beta_D=beta_D)
    checks = (geometry_checks(p, nu, nv, tol, **kw) + operator_checks(p, nu, nv, tol, **kw)
              + cylinder_checks(p, nu, nv, tol, **kw))
    classify(checks)
    failed = [c for c in checks if c["status"] == "fail"]
    flagged = [c for c in checks if c["status"] == "flagged"]
    return {
        "surface": "cone",
        "params": {"R": _num(R), "phi": _num(phi), "l": _num(l)},
        "units": {"hbar": _num(hbar), "mass": _num(mass), "alpha_R": _num(alpha_R), "beta_D": _num(beta_D)},
        "grid": [nu, nv],
        "tol": tol,
        "checks": checks,
        "summary": {
            "total": len(checks),
            "passed": len(checks) - len(failed) - len(flagged),
            "failed": [f"{c['quantity']}: {c['source']}" for c in failed],
            "flagged": [f"{c['quantity']}: {c['source']}" for c in flagged],
        },
        "ok": not failed,
    }


def report_json(report):
    return dumps(report)
