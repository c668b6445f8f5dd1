"""Acceptance gate.

Each test carries a ``criterion`` marker; the conftest hook prints one
PASS/FAIL line per criterion at the end of the session. Run alone with
``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

import json
import time

import numpy as np
import pytest

from latticeqc.cli import main
from latticeqc.experiments import crosstalk_bench, dj_run, is_non_increasing, scaling_study
from latticeqc.fileio import read_matrix, write_matrix, write_vector
from latticeqc.gates import (
    BooleanFunction,
    all_balanced,
    all_constant,
    hadamard_matrix,
    random_state,
    random_unitary,
)
from latticeqc.lattice import LatticeLayout, cell_powers, gaussian_cell_mode
from latticeqc.optics import (
    PipelineConfig,
    beam_radius,
    gaussian_beam,
    gaussian_waist,
    pipeline_planes,
    propagate,
    rayleigh_range,
    run_pipeline,
)

DIMS = (2, 4, 8, 16)
WAVELENGTH = 633e-9


@pytest.mark.criterion(1, "ideal matvec equivalence")
def test_matvec_equivalence(record_property):
    rng = np.random.default_rng(20241014)
    start = time.perf_counter()
    worst = 0.0
    for n in DIMS:
        cfg = PipelineConfig.create(n)
        for _ in range(100):
            m, u = random_unitary(n, rng), random_state(n, rng)
            v = np.abs(m @ u) ** 2
            p = run_pipeline(u, m, cfg).probabilities
            worst = max(worst, float(np.max(np.abs(p - v / v.sum()))))
    elapsed = time.perf_counter() - start
    record_property("detail", f"max deviation {worst:.2e}, {elapsed:.1f} s")
    assert worst < 1e-6
    assert elapsed < 60


@pytest.mark.criterion(2, "Hadamard suite")
def test_hadamard_suite(record_property):
    worst_hh, worst_cm, fids = 0.0, 0.0, []
    for q, n in enumerate(DIMS, start=1):
        h = hadamard_matrix(q)
        worst_hh = max(worst_hh, float(np.max(np.abs(h @ h - np.eye(n)))))
        cm = crosstalk_bench(q, PipelineConfig.create(n))
        worst_cm = max(worst_cm, float(np.max(np.abs(cm.entries - np.eye(n)))))
        fids.append(cm.fidelity)
    record_property("detail", f"|HH-I| {worst_hh:.1e}, |C-I| {worst_cm:.1e}, min F {min(fids):.12f}")
    assert worst_hh < 1e-10
    assert worst_cm < 1e-6
    assert all(f == pytest.approx(1.0, abs=1e-6) for f in fids)


@pytest.mark.criterion(3, "diffraction trend and beam waist")
def test_diffraction_trend(record_property):
    rows = scaling_study(DIMS, PipelineConfig.create(2, mode="physical"))
    fid = [r.fidelity for r in rows]
    w0 = 100e-6
    beam = gaussian_beam(512, 5e-6, w0)
    errs = []
    for z in np.linspace(0, rayleigh_range(w0, WAVELENGTH), 9):
        measured = beam_radius(propagate(beam, z, WAVELENGTH), axis=1)
        errs.append(abs(measured / gaussian_waist(w0, z, WAVELENGTH) - 1))
    record_property("detail", "F = " + ", ".join(f"{f:.4f}" for f in fid) + f"; waist err {max(errs):.1e}")
    assert is_non_increasing(fid)
    assert fid[-1] < fid[0]
    assert max(errs) < 1e-2


@pytest.mark.criterion(4, "Deutsch-Jozsa correctness")
def test_deutsch_jozsa(record_property):
    rng = np.random.default_rng(4)
    functions = all_constant(4) + all_balanced(4) + all_constant(8)
    functions += [BooleanFunction.random_balanced(8, rng) for _ in range(50)]
    assert len(functions) == 2 + 6 + 2 + 50
    cfgs = {n: PipelineConfig.create(n) for n in (4, 8)}
    verdicts = [dj_run(f, cfgs[f.n]) for f in functions]
    p_const = [v.zero_row_probability for v in verdicts if v.function_label == "constant"]
    p_bal = [v.zero_row_probability for v in verdicts if v.function_label == "balanced"]
    correct = sum(v.correct for v in verdicts)
    record_property("detail", f"{correct}/{len(verdicts)} correct, min p0 const {min(p_const):.9f}, max p0 bal {max(p_bal):.1e}")
    assert correct == len(verdicts)
    assert min(p_const) > 0.999
    assert max(p_bal) < 1e-6


@pytest.mark.criterion(5, "worked example diag(-1,1,1,-1)")
def test_worked_example(record_property):
    f = BooleanFunction.from_bits("1001")
    v = dj_run(f, PipelineConfig.create(4))
    record_property("detail", f"row 3 probability {v.measured_probabilities[3]:.12f}")
    assert v.verdict == "balanced"
    np.testing.assert_allclose(v.measured_probabilities, [0, 0, 0, 1], atol=1e-6)


def _cli(argv):
    try:
        return main([str(a) for a in argv])
    except SystemExit as exc:
        return exc.code


@pytest.mark.criterion(6, "property suite")
def test_property_suite(record_property, tmp_path, monkeypatch, capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    n = 4
    m, u = random_unitary(n, rng), random_state(n, rng)

    # power through the unitary stages (the SLM product itself is not unitary)
    ideal = pipeline_planes(u, m, PipelineConfig.create(n))
    assert ideal["encoded"].power() == pytest.approx(1, rel=1e-9)
    assert ideal["transformed"].power() == pytest.approx(ideal["modulated"].power(), rel=1e-9)
    phys = pipeline_planes(u, m, PipelineConfig.create(n, mode="physical", relay_distance=0.02))
    assert phys["detected"].power() == pytest.approx(phys["transformed"].power(), rel=1e-6)
    assert phys["encoded"].power() == pytest.approx(1, rel=1e-6)

    # orthogonality of cell modes, exact up to rounding
    lay = LatticeLayout.create(n, px_per_cell=16)
    a = gaussian_cell_mode(lay, 1, 2)
    for j in range(n):
        for k in range(n):
            if (j, k) != (1, 2):
                assert a.inner(gaussian_cell_mode(lay, j, k)) == 0
    np.testing.assert_allclose(cell_powers(a, lay)[1, 2], a.power(), rtol=1e-15)

    # global phase
    for cfg in (PipelineConfig.create(n), PipelineConfig.create(n, mode="physical")):
        p0 = run_pipeline(u, m, cfg).probabilities
        p1 = run_pipeline(np.exp(2.1j) * u, m, cfg).probabilities
        np.testing.assert_allclose(p0, p1, atol=1e-14)

    # CLI determinism and round trip
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    write_matrix(tmp_path / "m.csv", m)
    write_vector(tmp_path / "u.csv", u)
    for run in ("a", "b"):
        assert _cli(["multiply", tmp_path / "m.csv", tmp_path / "u.csv", "--compare-oracle", "--out", tmp_path / run]) == 0
        assert _cli(["crosstalk", "--n", 2, "--physical", "--out", tmp_path / run / "ct"]) == 0
        assert _cli(["export-field", "--matrix", tmp_path / "m.csv", "--vector", tmp_path / "u.csv", "--out", tmp_path / run / "ex"]) == 0
    capsys.readouterr()
    compared = 0
    for path in sorted((tmp_path / "a").rglob("*")):
        if path.suffix in (".csv", ".json", ".pgm"):
            twin = tmp_path / "b" / path.relative_to(tmp_path / "a")
            if path.name == "manifest.json":
                da, db = json.loads(path.read_text()), json.loads(twin.read_text())
                da.pop("argv"), db.pop("argv")
                assert da == db
            else:
                assert path.read_bytes() == twin.read_bytes(), path.name
            compared += 1
    np.testing.assert_array_equal(read_matrix(tmp_path / "a" / "ex" / "matrix.csv"), m)

    elapsed = time.perf_counter() - start
    record_property("detail", f"{compared} files byte-compared, {elapsed:.1f} s")
    assert elapsed < 300


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
