"""Machine-readable run records sufficient to replay a command byte-for-byte.

A manifest stores the resolved parameter set of one command invocation plus
sha256 digests of its input and output files. Replaying reruns the command
from ``params`` alone and compares fresh output digests against the recorded
ones; the ``created`` timestamp is informational and never compared.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .validation import validate_seed

MANIFEST_VERSION = 1
_HEX = set("0123456789abcdef")


class ManifestError(ValueError):
    """Raised when a manifest cannot be parsed or fails validation."""


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path) -> str:
    return sha256_bytes(Path(path).read_bytes())


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class RunManifest:
    """Record of one command run.

    ``params`` holds every parameter after merging flags, config file and
    defaults; output names are relative to the output directory so a replay
    can land in a fresh directory. Input paths are recorded as given.
    """

    command: str
    params: dict
    seed: int | None
    inputs: dict
    outputs: dict
    version: str
    created: str = field(default_factory=_utc_now)

    def __post_init__(self):
        if not self.command or not isinstance(self.command, str):
            raise ManifestError(f"command must be a non-empty string, got {self.command!r}")
        if not isinstance(self.params, dict):
            raise ManifestError("params must be a JSON object")
        if self.seed is not None:
            validate_seed(self.seed)
        for group_name in ("inputs", "outputs"):
            group = getattr(self, group_name)
            if not isinstance(group, dict):
                raise ManifestError(f"{group_name} must be a JSON object")
            for name, digest in group.items():
                if not (isinstance(digest, str) and len(digest) == 64
                        and set(digest) <= _HEX):
                    raise ManifestError(
                        f"{group_name}[{name!r}] is not a sha256 hex digest: {digest!r}")

    def to_json(self) -> dict:
        return {
            "manifest_version": MANIFEST_VERSION,
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "inputs": dict(self.inputs),
            "outputs": dict(self.outputs),
            "version": self.version,
            "created": self.created,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RunManifest":
        if not isinstance(obj, dict):
            raise ManifestError(f"manifest must be a JSON object, got {type(obj).__name__}")
        if obj.get("manifest_version") != MANIFEST_VERSION:
            raise ManifestError(
                f"unsupported manifest version {obj.get('manifest_version')!r}")
        expected = {"manifest_version", "command", "params", "seed", "inputs",
                    "outputs", "version", "created"}
        unknown = sorted(set(obj) - expected)
        if unknown:
            raise ManifestError(f"unknown manifest keys {unknown}")
        missing = sorted(expected - set(obj))
        if missing:
            raise ManifestError(f"missing manifest keys {missing}")
        return cls(command=obj["command"], params=obj["params"], seed=obj["seed"],
                   inputs=obj["inputs"], outputs=obj["outputs"],
                   version=obj["version"], created=obj["created"])

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "RunManifest":
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ManifestError(f"cannot parse manifest {path}: {exc}") from exc
        return cls.from_json(obj)
