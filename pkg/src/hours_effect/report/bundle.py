"""Report bundle: gathered results plus provenance, written as stable JSON."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def dumps(data) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps "\n" on every platform so bytes match across runs
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


@dataclass
class ReportBundle:
    meta_results: dict = field(default_factory=dict)
    model_curves: dict = field(default_factory=dict)
    policy: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    version: str = ""

    def record_input(self, role: str, path) -> None:
        """Remember an input file under ``role`` with its SHA-256 digest."""
        self.inputs[role] = {"file": os.path.basename(os.fspath(path)), "sha256": file_digest(path)}

    def provenance(self) -> dict:
        return {"inputs": dict(self.inputs), "tool": "hours-effect", "version": self.version}

    def to_dict(self) -> dict:
        return {
            "meta_results": self.meta_results,
            "model_curves": self.model_curves,
            "policy": self.policy,
            "provenance": self.provenance(),
        }
