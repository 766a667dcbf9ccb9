"""ambnet: adjacency-matrix images of networks, canonical vertex ordering,
seeded family generators, motif decomposition trees, and a small from-scratch
convolutional classifier with reproducible dataset builds."""

from .classifier import AmbImageClassifier, ModelFormatError, load_model, save_model
from .dataset import (DatasetConfig, LabeledDataset, LabeledItem, build_dataset,
                      load_dataset, save_dataset)
from .evaluation import EvalReport, confusion_counts, evaluate
from .generators import FAMILIES, GenParams, gen_ba, gen_er, gen_ncn, gen_ws
from .graph import (EdgeListParseError, Graph, apply_order, degrees, inverse_order,
                    load_bundled, read_edge_list, write_edge_list)
from .image import (AmbImage, PgmDecodeError, decode_pgm, encode_pgm, pad_center,
                    render, to_graph)
from .mim import (format_tree, leaf_count, parse_tree, smim_decompose,
                  smim_successor, top_arity_sequence, validate_mim)
from .manifest import ManifestError, RunManifest, sha256_bytes, sha256_file
from .mixture import (MixtureDescription, Partition, classify_subnetwork,
                      describe, detect_communities, mixture_weights, modularity)
from .vra import VraTrace, center_arrange, diag_concentration, vra_apply, vra_order

__version__ = "0.1.0"

__all__ = [
    "AmbImage",
    "AmbImageClassifier",
    "DatasetConfig",
    "EdgeListParseError",
    "EvalReport",
    "FAMILIES",
    "GenParams",
    "Graph",
    "LabeledDataset",
    "LabeledItem",
    "ManifestError",
    "MixtureDescription",
    "ModelFormatError",
    "Partition",
    "PgmDecodeError",
    "RunManifest",
    "VraTrace",
    "apply_order",
    "build_dataset",
    "center_arrange",
    "classify_subnetwork",
    "confusion_counts",
    "decode_pgm",
    "degrees",
    "describe",
    "detect_communities",
    "diag_concentration",
    "encode_pgm",
    "evaluate",
    "format_tree",
    "gen_ba",
    "gen_er",
    "gen_ncn",
    "gen_ws",
    "inverse_order",
    "leaf_count",
    "load_bundled",
    "load_dataset",
    "load_model",
    "mixture_weights",
    "modularity",
    "pad_center",
    "parse_tree",
    "read_edge_list",
    "render",
    "save_dataset",
    "save_model",
    "sha256_bytes",
    "sha256_file",
    "smim_decompose",
    "smim_successor",
    "to_graph",
    "top_arity_sequence",
    "validate_mim",
    "vra_apply",
    "vra_order",
    "write_edge_list",
]
