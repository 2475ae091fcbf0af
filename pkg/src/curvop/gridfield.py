"""Values sampled on a rectangular (u, v) grid, with CSV/JSON export."""
from dataclasses import dataclass, field
import io
import json

import numpy as np

FLOAT_FMT = "%.12e"


def fmt(x):
    """Fixed 12-digit formatting used by every exporter."""
    return FLOAT_FMT % float(x)


def _round(x):
    # re-parse the fixed-width text so JSON output is stable byte for byte
    return float(fmt(x))


def channel_names(kind, vshape):
    """Column names for a value kind; complex entries split into re/im."""
    if kind == "real":
        return ["value"] if not vshape else [f"c{i}" for i in range(int(np.prod(vshape)))]
    if kind == "scalar":
        return ["re", "im"]
    if kind == "vector3":
        return [f"{p}_{ax}" for ax in "xyz" for p in ("re", "im")]
    if kind == "spin":
        return [f"{p}{i}{j}" for i in range(2) for j in range(2) for p in ("re", "im")]
    if kind == "spinor":
        return [f"{p}{i}" for i in range(2) for p in ("re", "im")]
    if kind == "vector3_spinor":
        return [f"{p}_{ax}{i}" for ax in "xyz" for i in range(2) for p in ("re", "im")]
    raise ValueError(f"unknown value kind {kind!r}")


def _kind_of(values, grid_ndim=2):
    vshape = values.shape[grid_ndim:]
    if not np.iscomplexobj(values):
        return "real"
    if vshape == ():
        return "scalar"
    if vshape == (3,):
        return "vector3"
    if vshape == (2, 2):
        return "spin"
    if vshape == (2,):
        return "spinor"
    if vshape == (3, 2):
        return "vector3_spinor"
    raise ValueError(f"cannot infer a value kind for shape {vshape}")


@dataclass
class GridField:
    """``values[i, j, ...]`` sampled at ``(u[i], v[j])``.

    ``kind`` is ``real`` for plain real data, otherwise the operator value
    kind (``scalar``, ``vector3`` or ``spin``) of complex data.
    """

    u: np.ndarray
    v: np.ndarray
    values: np.ndarray
    name: str = "value"
    kind: str = ""
    meta: dict = field(default_factory=dict)
    labels: tuple = ()  # optional explicit channel names

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.values = np.asarray(self.values)
        if self.values.shape[:2] != (self.u.size, self.v.size):
            raise ValueError(f"values shape {self.values.shape} does not match grid {self.u.size}x{self.v.size}")
        if not self.kind:
            self.kind = _kind_of(self.values)

    @property
    def shape(self):
        return (self.u.size, self.v.size)

    @property
    def channels(self):
        if self.labels:
            return list(self.labels)
        return channel_names(self.kind, self.values.shape[2:])

    def flat_channels(self):
        """Real array ``(nu*nv, nchannels)`` in row-major (u outer) order."""
        n = self.u.size * self.v.size
        vals = self.values.reshape(n, -1)
        if self.kind == "real":
            return vals.astype(float)
        out = np.empty((n, 2 * vals.shape[1]))
        out[:, 0::2] = vals.real
        out[:, 1::2] = vals.imag
        return out

    def to_csv(self):
        buf = io.StringIO()
        buf.write(",".join(["u", "v"] + self.channels) + "\n")
        uu, vv = np.meshgrid(self.u, self.v, indexing="ij")
        data = self.flat_channels()
        for uval, vval, row in zip(uu.ravel(), vv.ravel(), data):
            buf.write(",".join([fmt(uval), fmt(vval)] + [fmt(x) for x in row]) + "\n")
        return buf.getvalue()

    def to_dict(self):
        data = self.flat_channels()
        return {
            "name": self.name,
            "kind": self.kind,
            "shape": [int(self.u.size), int(self.v.size)],
            "channels": self.channels,
            "u": [_round(x) for x in self.u],
            "v": [_round(x) for x in self.v],
            "values": [[_round(x) for x in row] for row in data],
            **({"meta": self.meta} if self.meta else {}),
        }

    def to_json(self):
        return dumps(self.to_dict())


def dumps(obj):
    """Deterministic JSON text (sorted keys off, fixed indentation)."""
    return json.dumps(obj, indent=1, allow_nan=True) + "\n"
