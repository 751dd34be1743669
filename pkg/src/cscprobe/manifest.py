"""Run manifests: digests of exactly what a command consumed and produced.

Every CLI command writes a manifest beside its outputs recording the
command name, the full argument vector, the seeds in play, SHA-256 digests
of all input and output files, the toolkit version, and wall time. Two runs
with identical input digests, seeds, and flags must produce identical
output digests; the manifest is the evidence.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import __version__


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    seeds: list[int] = field(default_factory=list)
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    version: str = __version__
    wall_time_s: float = 0.0

    def add_input(self, path) -> None:
        self.inputs[str(path)] = file_digest(path)

    def add_output(self, path) -> None:
        self.outputs[str(path)] = file_digest(path)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "argv": list(self.argv),
            "seeds": list(self.seeds),
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": dict(sorted(self.outputs.items())),
            "version": self.version,
            "wall_time_s": self.wall_time_s,
        }

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False, indent=2)
            fh.write("\n")
