import struct

import pandas as pd
import pytest

from coldstart_kode.app.main import main
from coldstart_kode.app.utilities import constants

QUIET = ["--log-dir", "", "--log-level", "WARNING"]
FAST = ["--epochs", "2", "--latent-dim", "3"]


def run(*argv):
    return main([*argv, *QUIET])


def test_split_is_reproducible(tmp_path, synthetic_file):
    first, second = tmp_path / "a.tsv", tmp_path / "b.tsv"
    assert run("split", "--dataset", str(synthetic_file), "--seed", "7", "--out", str(first)) == 0
    assert run("split", "--dataset", str(synthetic_file), "--seed", "7", "--out", str(second)) == 0
    assert first.read_bytes() == second.read_bytes()


def test_unknown_flag_is_usage_error(synthetic_file):
    assert main(["split", "--dataset", str(synthetic_file), "--out", "x", "--bogus"]) == constants.EXIT_USAGE


def test_invalid_hyperparameter_is_usage_error(tmp_path, synthetic_file):
    code = run("train", "--dataset", str(synthetic_file), "--model", "iam-warm",
               "--latent-dim", "0", "--out", str(tmp_path / "m.bin"))
    assert code == constants.EXIT_USAGE


def test_missing_dataset(tmp_path):
    code = run("evaluate", "--dataset", str(tmp_path / "missing.tsv"), "--method", "majority")
    assert code == constants.EXIT_MISSING_FILE


def test_missing_config_file(synthetic_file, tmp_path):
    code = run("split", "--dataset", str(synthetic_file), "--out", str(tmp_path / "s.tsv"),
               "--config", str(tmp_path / "nada.env"))
    assert code == constants.EXIT_MISSING_FILE


def test_huge_penalty_gives_empty_interview(tmp_path, synthetic_file):
    out = tmp_path / "cold.bin"
    code = run("train", "--dataset", str(synthetic_file), "--model", "iam-cold",
               "--lambda2", "1e9", *FAST, "--out", str(out))
    assert code == 0
    interview = pd.read_csv(tmp_path / "cold.interview.tsv", sep="\t")
    assert list(interview.columns) == ["rank", "itemId", "alpha", "name"]
    assert len(interview) == 0


def test_model_version_mismatch(tmp_path, synthetic_file):
    out = tmp_path / "warm.bin"
    assert run("train", "--dataset", str(synthetic_file), "--model", "iam-warm", *FAST, "--out", str(out)) == 0
    blob = bytearray(out.read_bytes())
    blob[8:12] = struct.pack("<I", constants.MODEL_VERSION + 1)
    out.write_bytes(bytes(blob))

    code = run("evaluate", "--dataset", str(synthetic_file), "--model-file", str(out))
    assert code == constants.EXIT_VERSION


def test_evaluate_majority_writes_metrics(tmp_path, synthetic_file, capsys):
    metrics = tmp_path / "metrics.tsv"
    code = run("evaluate", "--dataset", str(synthetic_file), "--method", "majority", "--out", str(metrics))
    assert code == 0
    frame = pd.read_csv(metrics, sep="\t")
    assert len(frame) == 1
    assert frame.loc[0, "method"] == "majority"
    assert 0.0 <= frame.loc[0, "accuracy"] <= 1.0
    assert "majority" in capsys.readouterr().out


def test_evaluate_saved_cold_model_curve(tmp_path, synthetic_file):
    out = tmp_path / "cold.bin"
    assert run("train", "--dataset", str(synthetic_file), "--model", "iam-cold", *FAST,
               "--lambda2", "0", "--out", str(out)) == 0
    metrics = tmp_path / "curve.tsv"
    code = run("evaluate", "--dataset", str(synthetic_file), "--model-file", str(out),
               "--questions", "0,2,4", "--out", str(metrics))
    assert code == 0
    assert pd.read_csv(metrics, sep="\t")["target_size"].tolist() == [0, 2, 4]


def test_add_fractions_requires_learned_interview(synthetic_file):
    code = run("evaluate", "--dataset", str(synthetic_file), "--method", "iam", *FAST, "--add-fractions", "0,0.5")
    assert code == constants.EXIT_CAPABILITY


def test_export_pca_rejects_warm_model(tmp_path, synthetic_file):
    out = tmp_path / "warm.bin"
    assert run("train", "--dataset", str(synthetic_file), "--model", "iam-warm", *FAST, "--out", str(out)) == 0
    code = run("export-pca", "--model-file", str(out), "--out", str(tmp_path / "pca.tsv"))
    assert code == constants.EXIT_CAPABILITY


def test_select_pop(tmp_path, synthetic_file):
    out = tmp_path / "pop.tsv"
    assert run("select", "--dataset", str(synthetic_file), "--questions", "3", "--out", str(out)) == 0
    assert pd.read_csv(out, sep="\t")["rank"].tolist() == [1, 2, 3]


def test_evaluate_with_interview_file(tmp_path, synthetic_file):
    interview = tmp_path / "pop.tsv"
    assert run("select", "--dataset", str(synthetic_file), "--questions", "3", "--out", str(interview)) == 0
    metrics = tmp_path / "metrics.tsv"
    code = run("evaluate", "--dataset", str(synthetic_file), "--method", "iam", *FAST,
               "--interview", str(interview), "--out", str(metrics))
    assert code == 0
    frame = pd.read_csv(metrics, sep="\t")
    assert frame["interview_size"].tolist() == [3]
    assert frame["target_size"].tolist() == [3]


def test_learned_interview_methods_reject_interview_file(tmp_path, synthetic_file):
    interview = tmp_path / "pop.tsv"
    assert run("select", "--dataset", str(synthetic_file), "--questions", "3", "--out", str(interview)) == 0
    code = run("evaluate", "--dataset", str(synthetic_file), "--method", "csiam", *FAST,
               "--interview", str(interview))
    assert code == constants.EXIT_CAPABILITY


def test_missing_interview_file(tmp_path, synthetic_file):
    code = run("evaluate", "--dataset", str(synthetic_file), "--method", "majority",
               "--interview", str(tmp_path / "nada.tsv"))
    assert code == constants.EXIT_MISSING_FILE


def test_bare_flags_use_protocol_defaults(tmp_path, synthetic_file):
    out = tmp_path / "csw.bin"
    assert run("train", "--dataset", str(synthetic_file), "--model", "iam-csw", *FAST,
               "--lambda2", "0", "--out", str(out)) == 0

    curve = tmp_path / "curve.tsv"
    assert run("evaluate", "--dataset", str(synthetic_file), "--model-file", str(out),
               "--questions", "--out", str(curve)) == 0
    assert pd.read_csv(curve, sep="\t")["target_size"].tolist() == list(constants.INTERVIEW_SIZES)

    sweep = tmp_path / "sweep.tsv"
    assert run("evaluate", "--dataset", str(synthetic_file), "--model-file", str(out),
               "--add-fractions", "--out", str(sweep)) == 0
    assert pd.read_csv(sweep, sep="\t")["added_fraction"].tolist() == list(constants.CSW_ADD_FRACTIONS)


def test_synth_then_ingest(tmp_path, capsys):
    path = tmp_path / "planted.tsv"
    assert run("synth", "--users", "30", "--items", "10", "--per-user", "5", "--out", str(path)) == 0
    capsys.readouterr()

    assert run("ingest", "--dataset", str(path), "--out", str(tmp_path / "norm")) == 0
    lines = dict(line.split("\t") for line in capsys.readouterr().out.splitlines())
    assert lines["users"] == "30"
    assert lines["ratings"] == "150"
    assert (tmp_path / "norm" / "ratings.tsv").is_file()


@pytest.mark.slow
def test_sweep_writes_one_row_per_cell(tmp_path, synthetic_file):
    out = tmp_path / "sweep.tsv"
    code = run("sweep", "--dataset", str(synthetic_file), "--method", "iam",
               "--latent-dims", "2,3", "--lrs", "0.05", "--lambda1s", "0.0001",
               "--epochs", "2", "--seeds", "1,2", "--out", str(out))
    assert code == 0
    assert len(pd.read_csv(out, sep="\t")) == 2 * 2 + 1
