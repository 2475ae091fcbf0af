import json
import os
import subprocess
import sys

import numpy as np
import pytest

from curvop import jets
from curvop.dsl import builtin_catalog
from curvop.geometry import sample_geometry

PROBE = """
import json
from curvop import jets
from curvop.verify import run_verify
rep = run_verify(nu=6, nv=6)
print(json.dumps({"backend": jets.backend(), "have": jets.HAVE_NUMBA, "ok": rep["ok"],
                  "flagged": rep["summary"]["flagged"]}))
"""


def _probe(flag):
    env = dict(os.environ, CURVOP_NUMBA=flag)
    proc = subprocess.run([sys.executable, "-c", PROBE], capture_output=True, text=True, env=env, timeout=300)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout.strip().splitlines()[-1])


def test_env_flag_disables_numba():
    out = _probe("0")
    assert out == {"backend": "numpy", "have": False, "ok": True, "flagged": out["flagged"]}
    assert len(out["flagged"]) == 2


@pytest.mark.skipif(not jets.HAVE_NUMBA, reason="numba not available")
def test_default_uses_numba():
    assert _probe("1")["backend"] == "numba"


@pytest.mark.skipif(not jets.HAVE_NUMBA, reason="numba not available")
def test_backends_agree_on_geometry():
    s = builtin_catalog("torus")
    original = jets.backend()
    res = {}
    try:
        for name in ("numpy", "numba"):
            jets.set_backend(name)
            res[name] = sample_geometry(s, 16, 12)[2].V_g().value
    finally:
        jets.set_backend(original)
    np.testing.assert_allclose(res["numpy"], res["numba"], rtol=1e-13, atol=1e-15)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        jets.set_backend("cuda")
