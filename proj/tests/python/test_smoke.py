# SPDX-License-Identifier: Apache-2.0
import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import pcct

DATA = Path(os.environ.get("PCCT_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def test_distribution_properties():
    g = pcct.Distribution.gaussian(2.0, 0.5)
    assert g.family == "gaussian"
    assert g.mean == pytest.approx(2.0)
    assert g.variance == pytest.approx(0.25)
    b = pcct.Distribution.beta(2.0, 3.0)
    assert b.mean == pytest.approx(0.4)
    assert "beta" in repr(b)


@pytest.mark.parametrize(
    "dist",
    [
        pcct.Distribution.gaussian(0.0, 1.0),
        pcct.Distribution.uniform(-1.0, 1.0),
        pcct.Distribution.gamma(3.0, 1.0),
        pcct.Distribution.beta(2.0, 4.0),
    ],
)
def test_gauss_rule_orthonormality(dist):
    nodes, weights = pcct.gauss_rule(dist, 8)
    assert sum(weights) == pytest.approx(1.0, abs=1e-12)
    for m in range(6):
        for n in range(6):
            ip = sum(w * pcct.orthonormal(dist, m, x) * pcct.orthonormal(dist, n, x) for x, w in zip(nodes, weights))
            assert ip == pytest.approx(1.0 if m == n else 0.0, abs=1e-10)


def test_lhs_strata():
    u = np.asarray(pcct.lhs_unit(50, 3, 42))
    assert u.shape == (50, 3)
    for j in range(3):
        strata = np.sort(np.floor(u[:, j] * 50).astype(int))
        assert list(strata) == list(range(50))
    assert np.array_equal(u, np.asarray(pcct.lhs_unit(50, 3, 42)))


def test_materialize_gaussian_median():
    x = pcct.materialize(np.full((1, 1), 0.5), [pcct.Distribution.gaussian(3.0, 2.0)])
    assert x[0, 0] == pytest.approx(3.0)


def test_truncated_basis_counts():
    assert len(pcct.truncated_basis(3, 4)) == math.comb(7, 4)
    assert len(pcct.truncated_basis(2, 2, 0.5)) == 5
    assert pcct.truncated_basis(3, 0) == [[0, 0, 0]]


def test_fits_recover_polynomial():
    dists = [pcct.Distribution.uniform(-1.0, 1.0)] * 2
    x = pcct.materialize(np.asarray(pcct.lhs_unit(40, 2, 7)), dists)
    y = 1.0 + 2.0 * x[:, 0] - 0.5 * x[:, 0] * x[:, 1]

    fixed = pcct.fit_fixed(x, y, dists, 3)
    assert fixed.active_terms == 3
    assert np.allclose(fixed.predict(x), y, atol=1e-10)

    model = pcct.adaptive_fit(x, y, dists, p_max=4)
    assert model.mean == pytest.approx(1.0, abs=1e-10)
    assert model.mloo < 1e-12
    s = model.sobol()
    assert sum(s["first"]) <= 1.0 + 1e-12
    restored = pcct.PceModel.from_json(model.to_json())
    assert np.allclose(restored.predict(x), model.predict(x))


def test_power_flow_wscc():
    pf = pcct.power_flow(DATA / "wscc9.json")
    v = dict(zip(pf["bus"], pf["voltage"]))
    assert abs(v[1]) == pytest.approx(1.04, abs=1e-9)
    assert abs(v[5]) == pytest.approx(0.9956, abs=1e-3)
    assert pf["mismatch"] < 1e-8


def test_compute_cct_bracket():
    r = pcct.compute_cct(DATA / "wscc9.json", DATA / "wscc9_bus7.json")
    assert 0.05 < r["cct"] < 0.3
    assert r["t_hi"] - r["t_lo"] <= 2e-4
    assert r["t_lo"] <= r["cct"] <= r["t_hi"]


def test_run_study_cct_mode(tmp_path):
    summary = pcct.run_study(DATA / "wscc9_study.json", mode="cct", out=tmp_path)
    assert summary["mode"] == "cct"
    assert 0.05 < summary["cct"]["cct"] < 0.3
    on_disk = json.loads((tmp_path / "summary.json").read_text())
    assert on_disk["cct"]["cct"] == summary["cct"]["cct"]


def test_error_kind(tmp_path):
    with pytest.raises(pcct.PcctError) as info:
        pcct.power_flow(tmp_path / "missing.json")
    assert info.value.kind == "io"
    with pytest.raises(pcct.PcctError) as info:
        pcct.Distribution.gaussian(0.0, -1.0)
    assert info.value.kind == "argument"
