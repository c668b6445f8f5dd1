import numpy as np
import pytest

from latticeqc.errors import DimensionError, FunctionClassError
from latticeqc.experiments import (
    CrosstalkMatrix,
    classical_fidelity,
    crosstalk_bench,
    dj_run,
    is_non_increasing,
    scaling_study,
)
from latticeqc.gates import BooleanFunction, all_balanced, all_constant, dj_expected_output
from latticeqc.optics import PipelineConfig


@pytest.fixture(scope="module")
def physical_sweep():
    return scaling_study([2, 4, 8, 16], PipelineConfig.create(2, mode="physical"))


def test_crosstalk_matrix_from_rows():
    cm = CrosstalkMatrix.from_rows([[2, 2], [1, 3]])
    np.testing.assert_allclose(cm.entries.sum(axis=1), 1)
    assert cm.fidelity == pytest.approx((0.5 + 0.75) / 2)
    assert cm.fidelity_std == pytest.approx(0.125)
    assert cm.summary() == {"N": 2, "fidelity": cm.fidelity, "fidelity_std": cm.fidelity_std}


def test_crosstalk_ideal_n2_identity():
    cm = crosstalk_bench(1, PipelineConfig.create(2))
    np.testing.assert_allclose(cm.entries, np.eye(2), atol=1e-12)
    assert cm.fidelity == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("n_qubits", [2, 3, 4])
def test_crosstalk_ideal_identity(n_qubits):
    n = 2**n_qubits
    cm = crosstalk_bench(n_qubits, PipelineConfig.create(n, px_per_cell=16))
    np.testing.assert_allclose(cm.entries.sum(axis=1), 1, atol=1e-9)
    assert np.max(np.abs(cm.entries - np.eye(n))) < 1e-6
    assert cm.fidelity == pytest.approx(1, abs=1e-6)


def test_crosstalk_readouts_collected():
    readouts = []
    crosstalk_bench(1, PipelineConfig.create(2, px_per_cell=8), readouts)
    assert len(readouts) == 2


def test_crosstalk_dimension_check():
    with pytest.raises(DimensionError):
        crosstalk_bench(2, PipelineConfig.create(2))


def test_physical_fidelity_non_increasing(physical_sweep):
    fid = [r.fidelity for r in physical_sweep]
    assert all(b < a for a, b in zip(fid, fid[1:]))
    assert fid[0] > fid[-1]
    assert all(0 <= f <= 1 for f in fid)


def test_physical_overlap_increasing(physical_sweep):
    ov = [r.overlap for r in physical_sweep]
    assert all(b > a for a, b in zip(ov, ov[1:]))


def test_scaling_geometry(physical_sweep):
    for r in physical_sweep:
        assert r.cell_pitch * r.n == pytest.approx(6.4e-3)
        assert r.waist == pytest.approx(r.cell_pitch / 4)
        assert r.spread_waist > r.waist


def test_scaling_ideal_exact():
    rows = scaling_study([2, 4, 8, 16], PipelineConfig.create(2, px_per_cell=8))
    for r in rows:
        assert r.fidelity == pytest.approx(1, abs=1e-6)
        assert r.overlap == 0


def test_dj_constant_zero_n2():
    v = dj_run(BooleanFunction.constant(2, 0), PipelineConfig.create(2))
    assert v.zero_row_probability == pytest.approx(1, abs=1e-12)
    assert v.verdict == "constant" and v.correct


def test_dj_worked_example():
    v = dj_run(BooleanFunction.from_bits("1001"), PipelineConfig.create(4))
    np.testing.assert_allclose(v.measured_probabilities, [0, 0, 0, 1], atol=1e-12)
    assert v.verdict == "balanced" and v.correct
    assert v.fidelity == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_dj_exhaustive(n):
    cfg = PipelineConfig.create(n, px_per_cell=8)
    functions = all_constant(n) + all_balanced(n)
    verdicts = [dj_run(f, cfg) for f in functions]
    assert all(v.correct for v in verdicts)
    for f, v in zip(functions, verdicts):
        expected = np.abs(dj_expected_output(f, n.bit_length() - 1)) ** 2
        np.testing.assert_allclose(v.measured_probabilities, expected, atol=1e-9)


def test_dj_sampled_balanced_n8():
    rng = np.random.default_rng(2024)
    cfg = PipelineConfig.create(8, px_per_cell=8)
    for _ in range(50):
        v = dj_run(BooleanFunction.random_balanced(8, rng), cfg)
        assert v.correct and v.zero_row_probability < 1e-6


def test_dj_bit_flip_invariance():
    cfg = PipelineConfig.create(4, px_per_cell=8)
    for f in all_constant(4) + all_balanced(4):
        a = dj_run(f, cfg).measured_probabilities
        b = dj_run(f.flipped(), cfg).measured_probabilities
        np.testing.assert_allclose(a, b, atol=1e-14)


def test_dj_rejects_neither():
    with pytest.raises(FunctionClassError):
        dj_run(BooleanFunction.from_bits("1110"), PipelineConfig.create(4, px_per_cell=8))


def test_dj_threshold():
    cfg = PipelineConfig.create(2, px_per_cell=8)
    v = dj_run(BooleanFunction.constant(2, 1), cfg, threshold=1.5)
    assert v.verdict == "balanced" and not v.correct


def test_dj_physical_still_correct():
    cfg = PipelineConfig.create(4, mode="physical")
    for f in all_constant(4) + all_balanced(4):
        assert dj_run(f, cfg).correct


def test_classical_fidelity():
    assert classical_fidelity([1, 0], [1, 0]) == pytest.approx(1)
    assert classical_fidelity([1, 0], [0, 1]) == 0
    assert classical_fidelity([0.5, 0.5], [1, 0]) == pytest.approx(0.5)


def test_is_non_increasing():
    assert is_non_increasing([1, 1, 0.5])
    assert not is_non_increasing([0.5, 1])
