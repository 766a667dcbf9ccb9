"""Seeded dataset builds for the family-classification experiment.

Each item follows the same pipeline: sample family parameters, generate the
graph, relabel its vertices with a seeded random permutation (real inputs
carry arbitrary indices; the relabeling keeps the no-canonicalization
baseline honest), optionally canonicalize with the vertex reordering pass,
render, and pad. Every stage draws from seeds derived per item with
``SeedSequence([master, split, family, index, stage])``, so the generated
graphs are identical across canonicalized and raw builds of the same master
seed, and builds parallelize without changing results.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict

import numpy as np

from .generators import FAMILIES, GenParams
from .graph import apply_order
from .image import AmbImage, pad_center, render
from .validation import validate_seed
from .vra import vra_apply

_SPLITS = ("train", "test")
_STAGES = {"params": 0, "generate": 1, "relabel": 2, "canonicalize": 3}


@dataclass(frozen=True)
class DatasetConfig:
    """Sizes and per-family parameter ranges for one dataset build."""

    n: int = 100
    side: int = 100
    train_per_class: int = 200
    test_per_class: int = 100
    vra: bool = True
    relabel: bool = True
    er_edge_range: tuple[int, int] | None = None  # defaults to (n, 5n)
    ncn_k_choices: tuple[int, ...] | None = None  # defaults to 4, 6, ..., 20
    ws_k_choices: tuple[int, ...] | None = None
    ws_p_range: tuple[float, float] = (0.05, 0.3)
    ba_m_choices: tuple[int, ...] | None = None  # defaults to 2..8

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"n must be at least 3, got {self.n}")
        if self.side < self.n:
            raise ValueError(f"side {self.side} cannot be smaller than n {self.n}")
        if self.train_per_class < 0 or self.test_per_class < 0:
            raise ValueError("per-class counts must be non-negative")
        defaults = {
            "er_edge_range": (self.n, 5 * self.n),
            "ncn_k_choices": tuple(range(4, 21, 2)),
            "ws_k_choices": tuple(range(4, 21, 2)),
            "ba_m_choices": tuple(range(2, 9)),
        }
        for name, default in defaults.items():
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)
            else:
                object.__setattr__(self, name, tuple(getattr(self, name)))
        if not 0 <= self.er_edge_range[0] <= self.er_edge_range[1] <= self.n * (self.n - 1) // 2:
            raise ValueError(f"infeasible ER edge range {self.er_edge_range} for n={self.n}")
        for name in ("ncn_k_choices", "ws_k_choices"):
            ks = getattr(self, name)
            if not ks or any(k % 2 != 0 or not 0 < k < self.n for k in ks):
                raise ValueError(f"infeasible {name} {ks} for n={self.n}")
        if not 0.0 <= self.ws_p_range[0] <= self.ws_p_range[1] <= 1.0:
            raise ValueError(f"infeasible WS p range {self.ws_p_range}")
        if not self.ba_m_choices or any(not 1 <= m < self.n for m in self.ba_m_choices):
            raise ValueError(f"infeasible BA m choices {self.ba_m_choices} for n={self.n}")

    def to_json(self) -> dict:
        obj = asdict(self)
        obj["ws_p_range"] = list(self.ws_p_range)
        for name in ("er_edge_range", "ncn_k_choices", "ws_k_choices", "ba_m_choices"):
            obj[name] = list(obj[name])
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "DatasetConfig":
        fields = dict(obj)
        for name in ("er_edge_range", "ncn_k_choices", "ws_k_choices", "ba_m_choices",
                     "ws_p_range"):
            if fields.get(name) is not None:
                fields[name] = tuple(fields[name])
        return cls(**fields)


@dataclass(frozen=True)
class LabeledItem:
    image: AmbImage
    label: str
    params: GenParams
    vra_applied: bool


@dataclass(frozen=True)
class LabeledDataset:
    config: DatasetConfig
    master_seed: int
    train: tuple[LabeledItem, ...]
    test: tuple[LabeledItem, ...]

    def arrays(self, split: str) -> tuple[np.ndarray, np.ndarray]:
        """Stacked pixel batch (float64 in {0,1}) and label array for a split."""
        items = getattr(self, split)
        side = self.config.side
        if not items:
            return np.zeros((0, side, side)), np.zeros(0, dtype="U3")
        x = np.stack([item.image.pixels for item in items]).astype(np.float64)
        y = np.array([item.label for item in items])
        return x, y


def _stage_seed(master: int, split: str, family: str, index: int, stage: str) -> int:
    entropy = [master, _SPLITS.index(split), FAMILIES.index(family), index,
               _STAGES[stage]]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def sample_params(family: str, config: DatasetConfig, rng: np.random.Generator,
                  seed: int) -> GenParams:
    """Draw one parameter tuple from the configured per-family ranges."""
    n = config.n
    if family == "ER":
        lo, hi = config.er_edge_range
        return GenParams("ER", n=n, m=int(rng.integers(lo, hi + 1)), seed=seed)
    if family == "NCN":
        k = int(rng.choice(np.array(config.ncn_k_choices)))
        return GenParams("NCN", n=n, k=k)
    if family == "WS":
        k = int(rng.choice(np.array(config.ws_k_choices)))
        p = float(rng.uniform(*config.ws_p_range))
        return GenParams("WS", n=n, k=k, p=p, seed=seed)
    return GenParams("BA", n=n, m=int(rng.choice(np.array(config.ba_m_choices))), seed=seed)


def build_item(config: DatasetConfig, master_seed: int, split: str, family: str,
               index: int) -> LabeledItem:
    """Build one dataset item; pure function of its coordinates."""
    rng_params = np.random.default_rng(_stage_seed(master_seed, split, family, index, "params"))
    params = sample_params(family, config, rng_params,
                           _stage_seed(master_seed, split, family, index, "generate"))
    g = params.generate()
    if config.relabel:
        relabel_rng = np.random.default_rng(
            _stage_seed(master_seed, split, family, index, "relabel"))
        g = apply_order(g, relabel_rng.permutation(g.n))
    if config.vra:
        g = vra_apply(g, _stage_seed(master_seed, split, family, index, "canonicalize"))
    image = pad_center(render(g), config.side)
    return LabeledItem(image=image, label=family, params=params, vra_applied=config.vra)


def _build_item_task(args) -> LabeledItem:
    return build_item(*args)


def build_dataset(config: DatasetConfig, seed: int, jobs: int = 1) -> LabeledDataset:
    """Build the full class-balanced dataset; deterministic given (config, seed).

    ``jobs > 1`` fans item generation out to worker processes; results are
    reduced in task order so parallelism never changes the dataset.
    """
    master = validate_seed(seed)
    tasks = []
    for split in _SPLITS:
        count = config.train_per_class if split == "train" else config.test_per_class
        for family in FAMILIES:
            tasks.extend((config, master, split, family, i) for i in range(count))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            items = list(pool.map(_build_item_task, tasks, chunksize=16))
    else:
        items = [_build_item_task(task) for task in tasks]
    n_train = 4 * config.train_per_class
    return LabeledDataset(config=config, master_seed=master,
                          train=tuple(items[:n_train]), test=tuple(items[n_train:]))


def save_dataset(ds: LabeledDataset, path) -> None:
    """Write a dataset as an ``.npz`` archive; byte-identical for equal inputs.

    Images are stored as uint8 in {0, 1}; per-item generator parameters ride
    along as JSON strings so :func:`load_dataset` restores the full dataset.
    """
    arrays: dict[str, np.ndarray] = {}
    for split in _SPLITS:
        items = getattr(ds, split)
        x, y = ds.arrays(split)
        arrays[f"{split}_images"] = x.astype(np.uint8)
        arrays[f"{split}_labels"] = y.astype("U3")
        arrays[f"{split}_params"] = np.array(
            [json.dumps(item.params.to_json(), sort_keys=True) for item in items],
            dtype="U")
    arrays["config"] = np.array(json.dumps(ds.config.to_json(), sort_keys=True))
    arrays["master_seed"] = np.array(ds.master_seed, dtype=np.uint64)
    if hasattr(path, "write"):  # keep numpy from appending ".npz" to plain paths
        np.savez_compressed(path, **arrays)
    else:
        with open(path, "wb") as handle:
            np.savez_compressed(handle, **arrays)


def load_dataset(path) -> LabeledDataset:
    """Inverse of :func:`save_dataset`."""
    with np.load(path) as data:
        config = DatasetConfig.from_json(json.loads(str(data["config"][()])))
        master = int(data["master_seed"][()])
        splits = {}
        for split in _SPLITS:
            splits[split] = tuple(
                LabeledItem(image=AmbImage(image), label=str(label),
                            params=GenParams.from_json(json.loads(str(raw))),
                            vra_applied=config.vra)
                for image, label, raw in zip(data[f"{split}_images"],
                                             data[f"{split}_labels"],
                                             data[f"{split}_params"]))
    return LabeledDataset(config=config, master_seed=master,
                          train=splits["train"], test=splits["test"])
