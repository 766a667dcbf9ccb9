"""End-to-end command-line behavior: every subcommand, manifests, replay."""

import json

import numpy as np
import pytest

from ambnet.cli import main
from ambnet.classifier import load_model
from ambnet.dataset import load_dataset
from ambnet.generators import FAMILIES
from ambnet.graph import apply_order, read_edge_list
from ambnet.image import decode_pgm
from ambnet.manifest import RunManifest, sha256_file
from ambnet.mim import format_tree, smim_decompose

P3_LABELINGS = {
    "center0.edges": "n 3\n0 1\n0 2\n",
    "center1.edges": "n 3\n0 1\n1 2\n",
    "center2.edges": "n 3\n0 2\n1 2\n",
}


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A dataset and a (briefly trained) model shared by the slow tests."""
    root = tmp_path_factory.mktemp("cli")
    assert main(["--out-dir", str(root), "dataset", "--n", "24", "--side", "28",
                 "--train-per-class", "3", "--test-per-class", "2",
                 "--seed", "11", "--out", "ds.npz"]) == 0
    assert main(["--out-dir", str(root), "train", "--dataset", str(root / "ds.npz"),
                 "--epochs", "2", "--batch-size", "8", "--seed", "11",
                 "--out", "model.bin"]) == 0
    return root


def test_generate_ncn_writes_exact_ring(tmp_path):
    assert main(["--out-dir", str(tmp_path), "generate", "--family", "ncn",
                 "--n", "6", "--k", "2", "--out", "c6.edges"]) == 0
    assert (tmp_path / "c6.edges").read_text() == "n 6\n0 1\n0 5\n1 2\n2 3\n3 4\n4 5\n"
    manifest = RunManifest.load(tmp_path / "c6.edges.manifest.json")
    assert manifest.command == "generate"
    assert manifest.outputs == {"c6.edges": sha256_file(tmp_path / "c6.edges")}


def test_generate_seeded_families_are_deterministic(tmp_path):
    for name in ("a.edges", "b.edges"):
        assert main(["--out-dir", str(tmp_path), "generate", "--family", "ws",
                     "--n", "30", "--k", "4", "--p", "0.1", "--seed", "7",
                     "--out", name]) == 0
    assert (tmp_path / "a.edges").read_bytes() == (tmp_path / "b.edges").read_bytes()
    g = read_edge_list((tmp_path / "a.edges").read_text())
    assert g.n == 30 and np.count_nonzero(g.adj) // 2 == 60


def test_generate_rejects_bad_params(tmp_path, capsys):
    assert main(["--out-dir", str(tmp_path), "generate", "--family", "er",
                 "--n", "10"]) == 1
    assert "error:" in capsys.readouterr().err
    assert main(["--out-dir", str(tmp_path), "generate", "--n", "10"]) == 1
    assert "family" in capsys.readouterr().err


def test_reorder_canonicalizes_all_path_labelings(tmp_path):
    outputs = []
    for name, text in P3_LABELINGS.items():
        (tmp_path / name).write_text(text)
        out = f"r_{name}"
        assert main(["--out-dir", str(tmp_path), "reorder", str(tmp_path / name),
                     "--seed", "0", "--out", out]) == 0
        outputs.append((tmp_path / out).read_bytes())
    assert outputs[0] == outputs[1] == outputs[2] == b"n 3\n0 1\n1 2\n"


def test_reorder_is_identity_on_edgeless_graph(tmp_path):
    (tmp_path / "empty.edges").write_text("n 4\n")
    assert main(["--out-dir", str(tmp_path), "reorder", str(tmp_path / "empty.edges"),
                 "--out", "out.edges"]) == 0
    assert (tmp_path / "out.edges").read_text() == "n 4\n"


def test_reorder_trace_is_consistent_with_output(tmp_path):
    (tmp_path / "in.edges").write_text("n 5\n0 1\n1 2\n2 3\n3 4\n1 3\n")
    assert main(["--out-dir", str(tmp_path), "reorder", str(tmp_path / "in.edges"),
                 "--seed", "3", "--trace", "trace.json", "--out", "out.edges"]) == 0
    trace = json.loads((tmp_path / "trace.json").read_text())
    assert set(trace) == {"degree_classes", "omega_snapshots", "placement", "final"}
    g = read_edge_list((tmp_path / "in.edges").read_text())
    reordered = apply_order(g, np.array(trace["final"], dtype=np.intp))
    assert reordered == read_edge_list((tmp_path / "out.edges").read_text())


def test_render_triangle_has_exact_payload(tmp_path):
    (tmp_path / "k3.edges").write_text("n 3\n0 1\n0 2\n1 2\n")
    assert main(["--out-dir", str(tmp_path), "render", str(tmp_path / "k3.edges"),
                 "--out", "k3.pgm"]) == 0
    assert (tmp_path / "k3.pgm").read_bytes() == (
        b"P5\n3 3\n255\n" + bytes([0, 255, 255, 255, 0, 255, 255, 255, 0]))


def test_render_pads_and_round_trips(tmp_path):
    (tmp_path / "k3.edges").write_text("n 3\n0 1\n0 2\n1 2\n")
    assert main(["--out-dir", str(tmp_path), "render", str(tmp_path / "k3.edges"),
                 "--pad", "9", "--out", "k3pad.pgm"]) == 0
    img = decode_pgm((tmp_path / "k3pad.pgm").read_bytes())
    assert img.side == 9
    assert img.white_count == 6
    assert img.pixels[3, 4] == 1  # triangle block sits centered at offset 3


def test_mim_prints_tree_and_optionally_writes_it(tmp_path, capsys):
    assert main(["--out-dir", str(tmp_path), "mim", "13"]) == 0
    printed = capsys.readouterr().out.strip()
    assert printed == format_tree(smim_decompose(13))
    assert main(["--out-dir", str(tmp_path), "--json", "mim", "9", "--out",
                 "m9.txt"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["k"] == 9 and payload["leaves"] == 9
    assert (tmp_path / "m9.txt").read_text().strip() == payload["tree"]
    assert (tmp_path / "m9.txt.manifest.json").exists()


def test_dataset_command_writes_loadable_archive(workspace):
    ds = load_dataset(workspace / "ds.npz")
    assert len(ds.train) == 12 and len(ds.test) == 8
    assert ds.config.n == 24 and ds.config.side == 28
    x, y = ds.arrays("train")
    assert x.shape == (12, 28, 28) and sorted(set(y)) == sorted(FAMILIES)


def test_train_command_writes_loadable_model(workspace):
    clf = load_model(str(workspace / "model.bin"))
    x, _ = load_dataset(workspace / "ds.npz").arrays("test")
    labels = clf.predict(x)
    assert set(labels) <= set(FAMILIES)


def test_eval_command_writes_report_and_prints_table(workspace, capsys):
    assert main(["--out-dir", str(workspace), "eval", "--model",
                 str(workspace / "model.bin"), "--dataset", str(workspace / "ds.npz"),
                 "--out", "report.json"]) == 0
    out = capsys.readouterr().out
    assert "Precision" in out and "Recall" in out
    report = json.loads((workspace / "report.json").read_text())
    assert report["labels"] == list(FAMILIES)
    assert np.asarray(report["confusion"]).sum() == 8
    assert 0.0 <= report["accuracy"] <= 1.0
    assert report["split"] == "test"


def test_describe_command_emits_mixture_line(workspace, tmp_path, capsys):
    assert main(["--out-dir", str(tmp_path), "generate", "--family", "ncn",
                 "--n", "12", "--k", "4", "--out", "ring.edges"]) == 0
    capsys.readouterr()
    assert main(["--out-dir", str(tmp_path), "describe", str(tmp_path / "ring.edges"),
                 "--model", str(workspace / "model.bin"), "--seed", "2",
                 "--out", "desc.json"]) == 0
    line = capsys.readouterr().out.strip()
    obj = json.loads((tmp_path / "desc.json").read_text())
    assert obj["text"] == line
    assert abs(sum(obj["weights"].values()) - 1.0) < 1e-9
    for term in line.split(" + "):
        weight, label = term.split()
        assert label in FAMILIES and 0 < float(weight) <= 1


def test_replay_reproduces_dataset_byte_for_byte(workspace, tmp_path, capsys):
    assert main(["--out-dir", str(tmp_path), "replay",
                 str(workspace / "ds.npz.manifest.json")]) == 0
    assert "byte-for-byte" in capsys.readouterr().out
    assert (tmp_path / "ds.npz").read_bytes() == (workspace / "ds.npz").read_bytes()


def test_replay_reproduces_model_byte_for_byte(workspace, tmp_path):
    assert main(["--out-dir", str(tmp_path), "replay",
                 str(workspace / "model.bin.manifest.json")]) == 0
    assert (tmp_path / "model.bin").read_bytes() == (workspace / "model.bin").read_bytes()


def test_replay_flags_digest_mismatch(workspace, tmp_path, capsys):
    manifest = RunManifest.load(workspace / "ds.npz.manifest.json")
    tampered = manifest.to_json()
    tampered["outputs"] = {"ds.npz": "0" * 64}
    (tmp_path / "bad.manifest.json").write_text(json.dumps(tampered))
    assert main(["--out-dir", str(tmp_path / "replayed"), "replay",
                 str(tmp_path / "bad.manifest.json")]) == 1
    assert "MISMATCH" in capsys.readouterr().out


def test_replay_refuses_changed_input(tmp_path, capsys):
    (tmp_path / "in.edges").write_text("n 3\n0 1\n1 2\n")
    assert main(["--out-dir", str(tmp_path), "reorder", str(tmp_path / "in.edges"),
                 "--out", "out.edges"]) == 0
    (tmp_path / "in.edges").write_text("n 3\n0 1\n0 2\n")
    assert main(["--out-dir", str(tmp_path), "replay",
                 str(tmp_path / "out.edges.manifest.json")]) == 1
    assert "changed" in capsys.readouterr().err


def test_config_file_fills_params_and_flags_override(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps(
        {"generate": {"family": "NCN", "n": 8, "k": 2, "out": "cfg.edges"}}))
    assert main(["--config", str(config), "--out-dir", str(tmp_path),
                 "generate"]) == 0
    assert (tmp_path / "cfg.edges").read_text().startswith("n 8\n")
    assert main(["--config", str(config), "--out-dir", str(tmp_path),
                 "generate", "--n", "10", "--out", "big.edges"]) == 0
    assert (tmp_path / "big.edges").read_text().startswith("n 10\n")


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"generate": {"vertices": 8}}))
    assert main(["--config", str(config), "--out-dir", str(tmp_path),
                 "generate", "--family", "ncn", "--n", "6", "--k", "2"]) == 1
    assert "vertices" in capsys.readouterr().err
    config.write_text(json.dumps({"generat": {}}))
    assert main(["--config", str(config), "--out-dir", str(tmp_path),
                 "generate", "--family", "ncn", "--n", "6", "--k", "2"]) == 1
    assert "generat" in capsys.readouterr().err


def test_env_var_sets_default_output_directory(tmp_path, monkeypatch):
    monkeypatch.setenv("AMBNET_OUT", str(tmp_path / "fromenv"))
    assert main(["generate", "--family", "ncn", "--n", "6", "--k", "2"]) == 0
    assert (tmp_path / "fromenv" / "graph.edges").exists()
    assert main(["--out-dir", str(tmp_path / "flagged"), "generate", "--family",
                 "ncn", "--n", "6", "--k", "2"]) == 0
    assert (tmp_path / "flagged" / "graph.edges").exists()


def test_absolute_output_names_are_rejected(tmp_path, capsys):
    assert main(["--out-dir", str(tmp_path), "generate", "--family", "ncn",
                 "--n", "6", "--k", "2", "--out", str(tmp_path / "abs.edges")]) == 1
    assert "relative" in capsys.readouterr().err


def test_manifest_records_resolved_params(tmp_path):
    assert main(["--out-dir", str(tmp_path), "generate", "--family", "ws",
                 "--n", "20", "--k", "4", "--p", "0.2", "--seed", "5"]) == 0
    manifest = RunManifest.load(tmp_path / "graph.edges.manifest.json")
    assert manifest.params["family"] == "ws"
    assert manifest.params["n"] == 20 and manifest.params["seed"] == 5
    assert manifest.params["out"] == "graph.edges"
    assert manifest.seed == 5 and manifest.version
