import numpy as np
import pytest

from ambnet.dataset import DatasetConfig, build_dataset, build_item
from ambnet.generators import FAMILIES, gen_ncn
from ambnet.image import render

SMALL = dict(n=24, side=28, train_per_class=3, test_per_class=2)


def test_config_defaults_follow_vertex_count():
    cfg = DatasetConfig(n=50)
    assert cfg.er_edge_range == (50, 250)
    assert cfg.ncn_k_choices == tuple(range(4, 21, 2))
    assert cfg.ws_k_choices == tuple(range(4, 21, 2))
    assert cfg.ba_m_choices == tuple(range(2, 9))
    assert cfg.side == 50 or cfg.side >= cfg.n


def test_config_validation():
    with pytest.raises(ValueError):
        DatasetConfig(n=30, side=20)
    with pytest.raises(ValueError):
        DatasetConfig(n=10, er_edge_range=(0, 100))  # beyond complete graph
    with pytest.raises(ValueError):
        DatasetConfig(n=10, ncn_k_choices=(3,))
    with pytest.raises(ValueError):
        DatasetConfig(n=10, ws_k_choices=(10,))
    with pytest.raises(ValueError):
        DatasetConfig(n=10, ws_p_range=(0.5, 0.2))
    with pytest.raises(ValueError):
        DatasetConfig(n=10, ba_m_choices=(0,))
    with pytest.raises(ValueError):
        DatasetConfig(n=100, train_per_class=-1)


def test_config_json_round_trip():
    cfg = DatasetConfig(n=40, side=44, vra=False, ws_p_range=(0.1, 0.2))
    assert DatasetConfig.from_json(cfg.to_json()) == cfg


def test_build_dataset_counts_and_balance():
    cfg = DatasetConfig(**SMALL)
    ds = build_dataset(cfg, seed=1)
    assert len(ds.train) == 12 and len(ds.test) == 8
    x, y = ds.arrays("train")
    assert x.shape == (12, 28, 28)
    assert x.dtype == np.float64
    assert sorted(set(y)) == sorted(FAMILIES)
    counts = {f: int((y == f).sum()) for f in FAMILIES}
    assert counts == {f: 3 for f in FAMILIES}
    assert all(item.vra_applied for item in ds.train)


def test_build_dataset_is_deterministic_and_parallel_safe():
    cfg = DatasetConfig(**SMALL)
    a = build_dataset(cfg, seed=7)
    b = build_dataset(cfg, seed=7)
    c = build_dataset(cfg, seed=7, jobs=2)
    for one, two in ((a, b), (a, c)):
        for i1, i2 in zip(one.train + one.test, two.train + two.test):
            assert i1.params == i2.params
            assert i1.image == i2.image
    other = build_dataset(cfg, seed=8)
    assert any(i1.image != i2.image for i1, i2 in zip(a.train, other.train))


def test_arms_share_identical_graphs():
    base = dict(SMALL)
    with_vra = build_dataset(DatasetConfig(**base, vra=True), seed=3)
    without = build_dataset(DatasetConfig(**base, vra=False), seed=3)
    for a, b in zip(with_vra.train + with_vra.test, without.train + without.test):
        assert a.params == b.params
        assert a.label == b.label
    assert not any(item.vra_applied for item in without.train)


def test_parameters_respect_configured_ranges():
    cfg = DatasetConfig(**SMALL)
    ds = build_dataset(cfg, seed=5)
    for item in ds.train + ds.test:
        p = item.params
        assert p.n == cfg.n
        if p.family == "ER":
            assert cfg.er_edge_range[0] <= p.m <= cfg.er_edge_range[1]
        elif p.family == "NCN":
            assert p.k in cfg.ncn_k_choices
        elif p.family == "WS":
            assert p.k in cfg.ws_k_choices
            assert cfg.ws_p_range[0] <= p.p <= cfg.ws_p_range[1]
        else:
            assert p.m in cfg.ba_m_choices


def test_raw_item_without_relabel_matches_generator_output():
    cfg = DatasetConfig(n=24, side=24, vra=False, relabel=False,
                        train_per_class=1, test_per_class=0)
    item = build_item(cfg, master_seed=2, split="train", family="NCN", index=0)
    assert item.image == render(gen_ncn(24, item.params.k))


def test_relabeling_scrambles_generator_output():
    cfg = DatasetConfig(n=24, side=24, vra=False, relabel=True,
                        train_per_class=1, test_per_class=0)
    item = build_item(cfg, master_seed=2, split="train", family="NCN", index=0)
    assert item.image != render(gen_ncn(24, item.params.k))
    assert item.image.white_count == render(gen_ncn(24, item.params.k)).white_count


def test_items_vary_within_a_class():
    cfg = DatasetConfig(**SMALL)
    ds = build_dataset(cfg, seed=0)
    er_items = [item for item in ds.train if item.label == "ER"]
    assert len({item.params.m for item in er_items}) > 1 or \
        len({item.params.seed for item in er_items}) > 1
