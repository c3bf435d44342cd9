"""End-to-end pipeline runs, the CLI surface and the output document."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from bdrkit import BlockSpec, CorruptionSpec  # noqa: F401
from bdrkit.cli import main as cli_main
from bdrkit.pipeline import RunConfig, gen_synthetic, render_document, run_pipeline

FIXTURES = Path(__file__).resolve().parent.parent / "data" / "fixtures"


@pytest.fixture()
def synthetic_files(tmp_path):
    spec = BlockSpec(n=(10, 8, 12), w=(0.6, 0.3, 0.9), jitter=0.01)
    corruption = CorruptionSpec(
        group_sim=((0.0, 0.2, 0.2), (0.2, 0.0, 0.1), (0.2, 0.1, 0.0))
    )
    return gen_synthetic(spec, corruption, seed=11, out_prefix=str(tmp_path / "draw"))


class TestRunPipeline:
    def test_recovers_generated_spec(self, synthetic_files):
        cfg = RunConfig(
            input=synthetic_files["affinity"],
            kind="affinity",
            truth=synthetic_files["labels"],
            sparsify="none",
        )
        result = run_pipeline(cfg)
        assert result.k_hat == 3
        assert sorted(result.n_hat) == [8, 10, 12]
        assert result.metrics["acc"] == 1.0

    def test_fixture_with_outliers(self):
        # block coefficients (0.6, 0.3, 0.9) sit well below the cosine-style
        # default threshold start, so the sweep begins lower
        cfg = RunConfig(
            input=str(FIXTURES / "outliers_affinity.csv"),
            kind="affinity",
            truth=str(FIXTURES / "outliers_labels.csv"),
            sparsify="threshold",
            t_ini=0.05,
        )
        result = run_pipeline(cfg)
        assert result.type1_indices == (31,)
        assert result.k_hat == 3
        # the connected outlier is absorbed into one block's run
        assert sorted(result.n_hat) == [8, 11, 12]
        assert result.metrics["acc"] >= 0.96

    def test_byte_identical_documents(self, synthetic_files, tmp_path):
        cfg = RunConfig(
            input=synthetic_files["affinity"],
            kind="affinity",
            sparsify="none",
            seed=3,
            output=str(tmp_path / "out.json"),
        )
        docs = []
        for _ in range(2):
            run_pipeline(cfg)
            docs.append((tmp_path / "out.json").read_bytes())
        assert docs[0] == docs[1]

    def test_data_affinity_round_trip(self, tmp_path):
        # a data matrix whose Gram matrix is the affinity gives the same result
        rng = np.random.default_rng(4)
        M, blocks = 40, (12, 10)
        cols = []
        for b, n_b in enumerate(blocks):
            center = rng.normal(size=M)
            center /= np.linalg.norm(center)
            for _ in range(n_b):
                x = center + 0.12 * rng.normal(size=M)
                cols.append(x / np.linalg.norm(x))
        X = np.array(cols)  # samples as rows, unit norm
        W = X @ X.T
        np.fill_diagonal(W, 0.0)
        data_path = tmp_path / "data.csv"
        aff_path = tmp_path / "aff.csv"
        np.savetxt(data_path, X, delimiter=",", fmt="%.17g")
        np.savetxt(aff_path, W, delimiter=",", fmt="%.17g")
        res_data = run_pipeline(RunConfig(input=str(data_path), kind="data", sparsify="none"))
        res_aff = run_pipeline(RunConfig(input=str(aff_path), kind="affinity", sparsify="none"))
        assert res_data.n_hat == res_aff.n_hat
        np.testing.assert_allclose(res_data.v, res_aff.v, atol=1e-9)
        np.testing.assert_array_equal(res_data.labels, res_aff.labels)

    def test_document_keys(self, synthetic_files):
        cfg = RunConfig(input=synthetic_files["affinity"], kind="affinity", sparsify="none")
        doc = run_pipeline(cfg).document()
        for key in (
            "config", "type1_indices", "ordering", "K_hat", "n_hat", "W_sim",
            "feasible", "labels", "residual", "gamma_used", "tau", "metrics",
            "v", "v_hat",
        ):
            assert key in doc
        text = render_document(doc)
        parsed = json.loads(text)
        assert parsed["K_hat"] == doc["K_hat"]

    def test_seventeen_digit_floats(self):
        text = render_document({"x": 1.0 / 3.0})
        assert text.strip() == '{"x": 0.33333333333333331}'


class TestCli:
    def test_run_and_gen(self, tmp_path, capsys):
        rc = cli_main([
            "gen",
            "--sizes", "6,8",
            "--weights", "0.7,0.9",
            "--group", "1,2:0.15",
            "--seed", "5",
            "--out", str(tmp_path / "fix"),
        ])
        assert rc == 0
        out_json = tmp_path / "res.json"
        rc = cli_main([
            "--input", str(tmp_path / "fix_affinity.csv"),
            "--kind", "affinity",
            "--truth", str(tmp_path / "fix_labels.csv"),
            "--sparsify", "none",
            "--output", str(out_json),
        ])
        assert rc == 0
        doc = json.loads(out_json.read_text())
        assert doc["K_hat"] == 2
        assert sorted(doc["n_hat"]) == [6, 8]
        assert doc["metrics"]["acc"] == 1.0

    def test_gen_deterministic(self, tmp_path):
        for sub in ("one", "two"):
            cli_main([
                "gen", "--sizes", "5,5", "--weights", "0.5,0.8",
                "--jitter", "0.01", "--seed", "9",
                "--out", str(tmp_path / sub),
            ])
        a = (tmp_path / "one_affinity.csv").read_bytes()
        b = (tmp_path / "two_affinity.csv").read_bytes()
        assert a == b

    def test_parse_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("not,numbers\nat,all\n")
        rc = cli_main(["--input", str(bad), "--kind", "affinity"])
        assert rc == 3

    def test_no_sparse_candidate_exit_code(self, tmp_path):
        # every coefficient sits below the default threshold start, so every
        # sweep candidate isolates vertices and no fallback exists
        W = np.full((5, 5), 0.4)
        np.fill_diagonal(W, 0.0)
        path = tmp_path / "clique.csv"
        np.savetxt(path, W, delimiter=",")
        rc = cli_main([
            "--input", str(path), "--kind", "affinity",
            "--sparsify", "threshold",
        ])
        assert rc == 2

    def test_console_entry_point(self, synthetic_files):
        proc = subprocess.run(
            [sys.executable, "-m", "bdrkit.cli",
             "--input", synthetic_files["affinity"], "--kind", "affinity",
             "--sparsify", "none"],
            capture_output=True, text=True,
            env={"PATH": "/usr/bin:/bin", "BDRKIT_THREADS": "1"},
        )
        assert proc.returncode == 0
        assert "K_hat=3" in proc.stdout

    def test_trials_flag(self, synthetic_files, capsys):
        rc = cli_main([
            "--input", synthetic_files["affinity"], "--kind", "affinity",
            "--truth", synthetic_files["labels"], "--sparsify", "none",
            "--trials", "3",
        ])
        assert rc == 0
        out = capsys.readouterr().out
        assert "p_det=1.0000" in out


class TestInputVariants:
    def test_transpose_and_delimiter(self, tmp_path):
        # the same data fed samples-as-rows (default) and samples-as-columns
        # with a different delimiter must give identical results
        rng = np.random.default_rng(13)
        M = 25
        cols = []
        for n_b in (8, 6):
            c = rng.normal(size=M)
            c /= np.linalg.norm(c)
            for _ in range(n_b):
                x = c + 0.1 * rng.normal(size=M)
                cols.append(x / np.linalg.norm(x))
        X = np.array(cols).T  # features x samples
        rows_file = tmp_path / "rows.csv"
        cols_file = tmp_path / "cols.csv"
        np.savetxt(rows_file, X.T, delimiter=",", fmt="%.17g")
        np.savetxt(cols_file, X, delimiter=";", fmt="%.17g")
        res_rows = run_pipeline(RunConfig(input=str(rows_file), sparsify="none"))
        res_cols = run_pipeline(RunConfig(
            input=str(cols_file), delimiter=";", transpose=True, sparsify="none",
        ))
        assert res_rows.n_hat == res_cols.n_hat
        np.testing.assert_array_equal(res_rows.labels, res_cols.labels)
        np.testing.assert_allclose(res_rows.v, res_cols.v, atol=1e-12)

    def test_standard_mode_end_to_end(self, synthetic_files):
        res = run_pipeline(RunConfig(
            input=synthetic_files["affinity"], kind="affinity",
            truth=synthetic_files["labels"], eig="standard", sparsify="none",
        ))
        assert res.k_hat == 3
        assert res.metrics["acc"] == 1.0

    def test_bad_gen_args_exit_code(self, tmp_path):
        rc = cli_main(["gen", "--sizes", "5,x", "--weights", "0.5,0.5",
                       "--out", str(tmp_path / "f")])
        assert rc == 3
        rc = cli_main(["gen", "--sizes", "5,5", "--weights", "0.5,0.5",
                       "--type2", "nonsense", "--out", str(tmp_path / "f")])
        assert rc == 3

    def test_ncmax_guard(self, synthetic_files):
        with pytest.raises(Exception):
            run_pipeline(RunConfig(
                input=synthetic_files["affinity"], kind="affinity",
                kmax=4, ncmax=1, sparsify="none",
            ))

    def test_render_non_finite(self):
        assert render_document({"x": float("nan")}).strip() == '{"x": null}'
