"""Command-line pipeline over the library: generate, reorder, render,
dataset, train, eval, describe, mim, replay.

Parameters resolve as flags > config file > built-in defaults. Outputs land
under one directory (``--out-dir``, else ``$AMBNET_OUT``, else the working
directory) and every file-producing run records a replayable manifest next
to its primary output as ``<name>.manifest.json``. All randomness flows from
the command's ``--seed``; ``train`` forks it into a dataset seed and a model
seed as the first word of ``SeedSequence([seed, stage])`` with stage 0 and 1
respectively.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classifier import AmbImageClassifier, load_model, save_model
from .cnn import DEFAULT_ARCHITECTURE
from .dataset import DatasetConfig, build_dataset, load_dataset, save_dataset
from .evaluation import evaluate
from .generators import GenParams
from .graph import apply_order, read_edge_list, write_edge_list
from .image import encode_pgm, pad_center, render
from .manifest import ManifestError, RunManifest, sha256_file
from .mim import format_tree, leaf_count, smim_decompose
from .mixture import describe
from .validation import validate_seed
from .vra import vra_order

_SEED_STAGES = {"dataset": 0, "model": 1}

_DATASET_FIELDS = ("n", "side", "train_per_class", "test_per_class", "vra",
                   "relabel", "er_edge_range", "ncn_k_choices", "ws_k_choices",
                   "ws_p_range", "ba_m_choices")

_DATASET_DEFAULTS = {
    "n": 100, "side": 100, "train_per_class": 200, "test_per_class": 100,
    "vra": True, "relabel": True, "er_edge_range": None, "ncn_k_choices": None,
    "ws_k_choices": None, "ws_p_range": [0.05, 0.3], "ba_m_choices": None,
}

_DEFAULTS = {
    "generate": {"family": None, "n": None, "m": None, "k": None, "p": None,
                 "seed": None, "out": "graph.edges"},
    "reorder": {"input": None, "seed": 0, "trace": None,
                "out": "reordered.edges"},
    "render": {"input": None, "pad": None, "out": "graph.pgm"},
    "dataset": {**_DATASET_DEFAULTS, "seed": 0, "jobs": 1, "out": "dataset.npz"},
    "train": {**_DATASET_DEFAULTS, "dataset": None,
              "architecture": [list(layer) for layer in DEFAULT_ARCHITECTURE],
              "epochs": 30, "batch_size": 32, "learning_rate": 0.01,
              "momentum": 0.9, "decay_every": 10, "decay_factor": 0.5,
              "target_loss": None, "seed": 0, "jobs": 1, "out": "model.bin"},
    "eval": {"model": None, "dataset": None, "split": "test",
             "out": "report.json"},
    "describe": {"graph": None, "model": None, "seed": 0,
                 "out": "description.json"},
    "mim": {"k": None, "out": None},
}


def _require(params: dict, *names: str) -> None:
    missing = [name for name in names if params.get(name) is None]
    if missing:
        raise ValueError(f"missing required parameter(s): {', '.join(missing)}")


def _out_path(out_dir: Path, name: str) -> Path:
    rel = Path(name)
    if rel.is_absolute():
        raise ValueError(f"output name {name!r} must be relative to the output directory")
    full = out_dir / rel
    full.parent.mkdir(parents=True, exist_ok=True)
    return full


def _read_input(name: str, inputs: dict) -> str:
    data = Path(name).read_bytes()
    inputs[name] = sha256_file(name)
    return data.decode()


def _write_output(out_dir: Path, name: str, data, outputs: dict) -> None:
    path = _out_path(out_dir, name)
    if isinstance(data, bytes):
        path.write_bytes(data)
    else:
        path.write_text(data)
    outputs[name] = sha256_file(path)


def _fork_seed(seed, stage: str) -> int:
    entropy = [validate_seed(seed), _SEED_STAGES[stage]]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def _dataset_config(params: dict) -> DatasetConfig:
    return DatasetConfig.from_json({name: params[name] for name in _DATASET_FIELDS})


def _run_generate(params: dict, out_dir: Path):
    _require(params, "family", "n")
    family = str(params["family"]).upper()
    kwargs = {key: params[key] for key in ("m", "k", "p") if params.get(key) is not None}
    seed = params.get("seed") if family != "NCN" else None
    gen = GenParams(family, n=int(params["n"]), seed=seed, **kwargs)
    g = gen.generate()
    outputs: dict = {}
    _write_output(out_dir, params["out"], write_edge_list(g), outputs)
    payload = {"out": params["out"], "params": gen.to_json(), "vertices": g.n,
               "edges": int(np.count_nonzero(g.adj) // 2)}
    payload["text"] = (f"wrote {params['out']}: {family} graph, "
                       f"{payload['vertices']} vertices, {payload['edges']} edges")
    return {}, outputs, payload


def _run_reorder(params: dict, out_dir: Path):
    _require(params, "input")
    inputs: dict = {}
    g = read_edge_list(_read_input(params["input"], inputs))
    trace = vra_order(g, validate_seed(params["seed"]))
    reordered = apply_order(g, np.array(trace.final, dtype=np.intp))
    outputs: dict = {}
    _write_output(out_dir, params["out"], write_edge_list(reordered), outputs)
    if params.get("trace"):
        _write_output(out_dir, params["trace"],
                      json.dumps(trace.to_json(), indent=2) + "\n", outputs)
    payload = {"out": params["out"], "order": list(trace.final),
               "text": f"wrote {params['out']}: reordered {g.n}-vertex graph"}
    return inputs, outputs, payload


def _run_render(params: dict, out_dir: Path):
    _require(params, "input")
    inputs: dict = {}
    g = read_edge_list(_read_input(params["input"], inputs))
    img = render(g)
    if params.get("pad") is not None:
        img = pad_center(img, int(params["pad"]))
    outputs: dict = {}
    _write_output(out_dir, params["out"], encode_pgm(img), outputs)
    payload = {"out": params["out"], "side": img.side,
               "text": f"wrote {params['out']}: {img.side}x{img.side} image"}
    return inputs, outputs, payload


def _run_dataset(params: dict, out_dir: Path):
    ds = build_dataset(_dataset_config(params), validate_seed(params["seed"]),
                       jobs=int(params["jobs"]))
    path = _out_path(out_dir, params["out"])
    save_dataset(ds, path)
    outputs = {params["out"]: sha256_file(path)}
    payload = {"out": params["out"], "train_items": len(ds.train),
               "test_items": len(ds.test)}
    payload["text"] = (f"wrote {params['out']}: {payload['train_items']} train / "
                       f"{payload['test_items']} test items")
    return {}, outputs, payload


def _run_train(params: dict, out_dir: Path):
    inputs: dict = {}
    if params.get("dataset"):
        inputs[params["dataset"]] = sha256_file(params["dataset"])
        ds = load_dataset(params["dataset"])
    else:
        ds = build_dataset(_dataset_config(params),
                           _fork_seed(params["seed"], "dataset"),
                           jobs=int(params["jobs"]))
    x, y = ds.arrays("train")
    clf = AmbImageClassifier(
        input_side=ds.config.side,
        architecture=[tuple(layer) for layer in params["architecture"]],
        epochs=int(params["epochs"]), batch_size=int(params["batch_size"]),
        learning_rate=float(params["learning_rate"]),
        momentum=float(params["momentum"]), decay_every=int(params["decay_every"]),
        decay_factor=float(params["decay_factor"]),
        target_loss=params.get("target_loss"),
        seed=_fork_seed(params["seed"], "model"))
    clf.fit(x, y)
    path = _out_path(out_dir, params["out"])
    save_model(clf, path)
    outputs = {params["out"]: sha256_file(path)}
    payload = {"out": params["out"], "train_items": len(x),
               "epochs_run": len(clf.loss_curve_),
               "final_loss": float(clf.loss_curve_[-1])}
    payload["text"] = (f"wrote {params['out']}: trained on {len(x)} images, "
                       f"final loss {payload['final_loss']:.4f}")
    return inputs, outputs, payload


def _run_eval(params: dict, out_dir: Path):
    _require(params, "model", "dataset")
    if params["split"] not in ("train", "test"):
        raise ValueError(f"split must be 'train' or 'test', got {params['split']!r}")
    inputs = {params["model"]: sha256_file(params["model"]),
              params["dataset"]: sha256_file(params["dataset"])}
    clf = load_model(params["model"])
    ds = load_dataset(params["dataset"])
    x, y = ds.arrays(params["split"])
    report = evaluate(clf, x, y)
    obj = report.to_json()
    obj["split"] = params["split"]
    obj["text"] = report.to_text()
    outputs: dict = {}
    _write_output(out_dir, params["out"], json.dumps(obj, indent=2) + "\n", outputs)
    payload = dict(obj)
    payload["out"] = params["out"]
    return inputs, outputs, payload


def _run_describe(params: dict, out_dir: Path):
    _require(params, "graph", "model")
    inputs: dict = {}
    g = read_edge_list(_read_input(params["graph"], inputs))
    inputs[params["model"]] = sha256_file(params["model"])
    clf = load_model(params["model"])
    desc = describe(clf, g, seed=validate_seed(params["seed"]))
    obj = desc.to_json()
    outputs: dict = {}
    _write_output(out_dir, params["out"], json.dumps(obj, indent=2) + "\n", outputs)
    payload = dict(obj)
    payload["out"] = params["out"]
    return inputs, outputs, payload


def _run_mim(params: dict, out_dir: Path):
    _require(params, "k")
    tree = smim_decompose(int(params["k"]))
    text = format_tree(tree)
    outputs: dict = {}
    if params.get("out"):
        _write_output(out_dir, params["out"], text + "\n", outputs)
    payload = {"k": int(params["k"]), "tree": text, "leaves": leaf_count(tree),
               "text": text}
    return {}, outputs, payload


_RUNNERS = {
    "generate": _run_generate,
    "reorder": _run_reorder,
    "render": _run_render,
    "dataset": _run_dataset,
    "train": _run_train,
    "eval": _run_eval,
    "describe": _run_describe,
    "mim": _run_mim,
}


def replay_manifest(manifest: RunManifest, out_dir: Path) -> dict:
    """Rerun a recorded command into *out_dir*; return fresh output digests.

    Recorded input files must still exist with their recorded digests,
    otherwise the replay is meaningless and a :class:`ManifestError` is
    raised.
    """
    runner = _RUNNERS.get(manifest.command)
    if runner is None:
        raise ManifestError(f"manifest command {manifest.command!r} is not replayable")
    for name, digest in manifest.inputs.items():
        if not Path(name).exists():
            raise ManifestError(f"recorded input {name} is missing")
        if sha256_file(name) != digest:
            raise ManifestError(f"recorded input {name} has changed since the run")
    _, outputs, _ = runner(manifest.params, out_dir)
    return outputs


def _run_replay(params: dict, out_dir: Path) -> dict:
    manifest = RunManifest.load(params["manifest"])
    outputs = replay_manifest(manifest, out_dir)
    matches = {name: outputs.get(name) == digest
               for name, digest in manifest.outputs.items()}
    extra = sorted(set(outputs) - set(manifest.outputs))
    ok = all(matches.values()) and not extra
    lines = [f"{name}: {'ok' if good else 'MISMATCH'}"
             for name, good in sorted(matches.items())]
    lines.extend(f"{name}: UNEXPECTED" for name in extra)
    lines.append("replay reproduced every output byte-for-byte" if ok
                 else "replay did NOT reproduce the recorded outputs")
    return {"manifest": params["manifest"], "command": manifest.command,
            "ok": ok, "expected": dict(manifest.outputs), "actual": outputs,
            "text": "\n".join(lines)}


def _add_out(parser, default_hint: str) -> None:
    parser.add_argument("--out", default=argparse.SUPPRESS,
                        help=f"output name, relative to the output directory "
                             f"(default: {default_hint})")


def _add_dataset_flags(parser) -> None:
    sup = argparse.SUPPRESS
    parser.add_argument("--n", type=int, default=sup, help="vertices per graph")
    parser.add_argument("--side", type=int, default=sup, help="image side after padding")
    parser.add_argument("--train-per-class", dest="train_per_class", type=int, default=sup)
    parser.add_argument("--test-per-class", dest="test_per_class", type=int, default=sup)
    parser.add_argument("--no-vra", dest="vra", action="store_false", default=sup,
                        help="skip the canonical reordering pass")
    parser.add_argument("--no-relabel", dest="relabel", action="store_false", default=sup,
                        help="skip the random relabeling pass")
    parser.add_argument("--jobs", type=int, default=sup,
                        help="worker processes for item generation")


def build_parser() -> argparse.ArgumentParser:
    sup = argparse.SUPPRESS
    parser = argparse.ArgumentParser(
        prog="ambnet",
        description="Network-family toolkit: graph generation, canonical "
                    "reordering, binary-image rendering, and classification.")
    parser.add_argument("--config", default=None, metavar="FILE",
                        help="JSON file with per-command parameter defaults")
    parser.add_argument("--out-dir", dest="out_dir", default=None, metavar="DIR",
                        help="output directory (default: $AMBNET_OUT or '.')")
    parser.add_argument("--json", action="store_true",
                        help="print machine-readable JSON instead of text")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("generate", help="write a seeded family graph as an edge list")
    p.add_argument("--family", default=sup, help="ER, NCN, WS or BA (case-insensitive)")
    p.add_argument("--n", type=int, default=sup, help="vertex count")
    p.add_argument("--m", type=int, default=sup,
                   help="edge count (ER) or edges per new vertex (BA)")
    p.add_argument("--k", type=int, default=sup, help="ring neighbor count (NCN, WS)")
    p.add_argument("--p", type=float, default=sup, help="rewiring probability (WS)")
    p.add_argument("--seed", type=int, default=sup)
    _add_out(p, "graph.edges")

    p = sub.add_parser("reorder", help="apply the canonical vertex reordering")
    p.add_argument("input", help="edge-list file to reorder")
    p.add_argument("--seed", type=int, default=sup)
    p.add_argument("--trace", default=sup, metavar="NAME",
                   help="also write the placement trace as JSON")
    _add_out(p, "reordered.edges")

    p = sub.add_parser("render", help="render an edge list as a binary PGM image")
    p.add_argument("input", help="edge-list file to render")
    p.add_argument("--pad", type=int, default=sup,
                   help="pad the image to this side length")
    _add_out(p, "graph.pgm")

    p = sub.add_parser("dataset", help="build a labeled image dataset (.npz)")
    _add_dataset_flags(p)
    p.add_argument("--seed", type=int, default=sup)
    _add_out(p, "dataset.npz")

    p = sub.add_parser("train", help="train the family classifier")
    p.add_argument("--dataset", default=sup, metavar="FILE",
                   help="train on a prebuilt .npz instead of building one")
    _add_dataset_flags(p)
    p.add_argument("--epochs", type=int, default=sup)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=sup)
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=sup)
    p.add_argument("--momentum", type=float, default=sup)
    p.add_argument("--decay-every", dest="decay_every", type=int, default=sup)
    p.add_argument("--decay-factor", dest="decay_factor", type=float, default=sup)
    p.add_argument("--target-loss", dest="target_loss", type=float, default=sup,
                   help="stop once the epoch loss falls below this value")
    p.add_argument("--seed", type=int, default=sup)
    _add_out(p, "model.bin")

    p = sub.add_parser("eval", help="evaluate a model on a dataset split")
    p.add_argument("--model", default=sup, metavar="FILE")
    p.add_argument("--dataset", default=sup, metavar="FILE")
    p.add_argument("--split", choices=("train", "test"), default=sup)
    _add_out(p, "report.json")

    p = sub.add_parser("describe", help="describe a network as a family mixture")
    p.add_argument("graph", help="edge-list file to describe")
    p.add_argument("--model", default=sup, metavar="FILE")
    p.add_argument("--seed", type=int, default=sup)
    _add_out(p, "description.json")

    p = sub.add_parser("mim", help="print the motif decomposition tree for k vertices")
    p.add_argument("k", type=int)
    _add_out(p, "none; print only")

    p = sub.add_parser("replay", help="rerun a manifest and verify byte-identical outputs")
    p.add_argument("manifest", help="manifest file recorded by a previous run")

    return parser


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"cannot parse config file {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValueError("config file must hold a JSON object")
    unknown = sorted(set(obj) - (set(_DEFAULTS) | {"out_dir"}))
    if unknown:
        raise ValueError(f"unknown config sections {unknown}")
    for command, section in obj.items():
        if command == "out_dir":
            continue
        if not isinstance(section, dict):
            raise ValueError(f"config section {command!r} must be a JSON object")
        bad = sorted(set(section) - set(_DEFAULTS[command]))
        if bad:
            raise ValueError(f"unknown {command} config keys {bad}")
    return obj


def resolve_params(command: str, given: dict, config: dict) -> dict:
    """Merge one command's parameters: flags > config file > defaults."""
    params = dict(_DEFAULTS[command])
    params.update(config.get(command, {}))
    params.update(given)
    return params


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args.config)
        out_dir = Path(args.out_dir or config.get("out_dir")
                       or os.environ.get("AMBNET_OUT") or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "replay":
            payload = _run_replay({"manifest": args.manifest}, out_dir)
            print(json.dumps(payload, indent=2) if args.json else payload["text"])
            return 0 if payload["ok"] else 1
        given = {key: value for key, value in vars(args).items()
                 if key not in ("config", "out_dir", "json", "command")}
        params = resolve_params(args.command, given, config)
        inputs, outputs, payload = _RUNNERS[args.command](params, out_dir)
        if outputs:
            manifest = RunManifest(command=args.command, params=params,
                                   seed=params.get("seed"), inputs=inputs,
                                   outputs=outputs, version=__version__)
            manifest_path = out_dir / f"{params['out']}.manifest.json"
            manifest.save(manifest_path)
            payload["manifest"] = str(manifest_path)
        print(json.dumps(payload, indent=2) if args.json else payload["text"])
        return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
