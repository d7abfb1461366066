import csv
import io

import numpy as np
import pytest

from graphmp.bench import BenchCell, cell_seeds, records_to_csv, run_bench, COLUMNS
from graphmp.errors import ValidationError
from graphmp.graph import gamma
from graphmp.objectives import EMS
from graphmp.synth import SynthSpec, metrics, synth_instance


def test_binary_without_flips_is_indicator():
    g, d, truth = synth_instance(SynthSpec(6, 6, 7, flip_rate=0, seed=3, mode="binary_sensor"))
    ind = np.zeros(36)
    ind[list(truth)] = 1.0
    assert np.array_equal(d.feature, ind) and np.array_equal(d.observed, ind)
    assert len(truth) == 7 and gamma(g, truth) == 1


def test_same_seed_same_instance():
    for mode in ("gaussian_mean", "binary_sensor"):
        spec = SynthSpec(8, 8, 10, flip_rate=6, seed=42, mode=mode)
        a, b = synth_instance(spec), synth_instance(spec)
        assert a[2] == b[2] and a[0].edges == b[0].edges
        assert a[1].feature.tobytes() == b[1].feature.tobytes()


def test_saturated_cluster():
    _, _, truth = synth_instance(SynthSpec(4, 4, 16))
    assert truth == tuple(range(16))


def test_flip_count_exact():
    spec = SynthSpec(10, 10, 12, flip_rate=8, seed=1, mode="binary_sensor")
    _, d, truth = synth_instance(spec)
    ind = np.zeros(100)
    ind[list(truth)] = 1.0
    assert int(np.sum(d.feature != ind)) == 8


def test_gaussian_features_normalized_and_elevated():
    _, d, truth = synth_instance(SynthSpec(16, 16, 12, signal_mu=3.0, seed=5))
    assert d.feature.min() == 0.0 and d.feature.max() == pytest.approx(0.999)
    inside = d.feature[list(truth)].mean()
    assert inside > np.delete(d.feature, list(truth)).mean()


def test_spec_validation():
    with pytest.raises(ValidationError):
        SynthSpec(3, 3, 10)
    with pytest.raises(ValidationError):
        SynthSpec(3, 3, 2, flip_rate=101)
    with pytest.raises(ValidationError):
        SynthSpec(3, 3, 2, mode="other")


def test_metrics_examples():
    assert metrics({1, 2}, {1, 2}) == (1.0, 1.0, 1.0)
    assert metrics({1}, {2}) == (0.0, 0.0, 0.0)
    assert metrics({1, 2}, {2, 3}) == (0.5, 0.5, 0.5)
    assert metrics(set(), {1}) == (0.0, 0.0, 0.0)
    assert metrics(set(), set()) == (1.0, 1.0, 1.0)


def test_empty_grid_header_only():
    assert records_to_csv(run_bench([], 3)) == ",".join(COLUMNS) + "\n"


def test_one_cell_three_repeats():
    cell = BenchCell(SynthSpec(6, 6, 5), "ems", 5)
    recs = run_bench([cell], 3, master_seed=9)
    assert len(recs) == 3 and len({r.seed for r in recs}) == 3
    assert all(r.status == "ok" for r in recs)


def test_csv_f1_consistency_and_score_recompute():
    cells = [BenchCell(SynthSpec(6, 6, 5, flip_rate=4, mode=m), "ems", 5)
             for m in ("gaussian_mean", "binary_sensor")]
    recs = run_bench(cells, 2)
    rows = list(csv.DictReader(io.StringIO(records_to_csv(recs))))
    for row, rec in zip(rows, recs):
        p, r, f1 = float(row["precision"]), float(row["recall"]), float(row["f1"])
        assert abs(f1 - (2 * p * r / (p + r) if p + r else 0.0)) <= 1e-12
        spec = SynthSpec(6, 6, 5, flip_rate=4, seed=rec.seed, mode=rec.mode)
        _, data, _ = synth_instance(spec)
        support = [int(v) for v in row["support"].split()]
        assert float(row["score"]) == EMS(data).set_score(support)


def test_failing_cell_is_recorded():
    cell = BenchCell(SynthSpec(4, 4, 3), "kulldorff", 3)  # gaussian mode has no counts
    recs = run_bench([cell], 2)
    assert all(r.status.startswith("error:validation") for r in recs)


def test_parallel_output_identical():
    cells = [BenchCell(SynthSpec(6, 6, 4, seed=0), "ems", 4),
             BenchCell(SynthSpec(6, 6, 4, flip_rate=4, mode="binary_sensor"), "ebp", 4)]
    one = records_to_csv(run_bench(cells, 2, workers=1, timing=False))
    two = records_to_csv(run_bench(cells, 2, workers=2, timing=False))
    assert one == two


def test_cell_seeds_distinct_and_stable():
    a = cell_seeds(1, 0, 50)
    assert a == cell_seeds(1, 0, 50) and len(set(a)) == 50
    assert a != cell_seeds(1, 1, 50)
