"""
Run manifests.

A manifest records what a command was asked to do (resolved config, seed,
input digests, planned outputs) and is written before any artifact. Its digest
is stamped into every artifact so outputs can be traced back to the run.
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from core.config import FORMAT_TAG
from core.utils import digest_json, sha256_file

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def library_version() -> str:
    try:
        return metadata.version("gvnn-kit")
    except metadata.PackageNotFoundError:
        return "dev"


@dataclass
class RunManifest:
    """Provenance record for a single CLI command."""

    command: str
    config: Dict[str, Any]
    seed: Optional[int]
    version: str = field(default_factory=library_version)
    inputs: Dict[str, str] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)

    @classmethod
    def build(
        cls,
        command: str,
        config: Dict[str, Any],
        seed: Optional[int],
        input_paths: Optional[List[str]] = None,
        outputs: Optional[List[str]] = None,
    ) -> "RunManifest":
        inputs = {str(p): sha256_file(p) for p in (input_paths or [])}
        return cls(
            command=command,
            config=config,
            seed=seed,
            inputs=inputs,
            outputs=[str(o) for o in outputs or []],
        )

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["format"] = FORMAT_TAG
        return payload

    @property
    def digest(self) -> str:
        return digest_json(self.to_dict())

    def csv_header(self) -> str:
        return f"#{FORMAT_TAG} manifest={self.digest}"

    def stamp(self, payload: Dict[str, Any]) -> Dict[str, Any]:
        """Return a copy of a JSON payload carrying the format tag and digest."""
        stamped = {"format": FORMAT_TAG, "manifest": self.digest}
        stamped.update(payload)
        return stamped

    def write(self, out_dir: Union[str, Path], name: str = MANIFEST_NAME) -> Path:
        """Write `name` (default manifest.json) into `out_dir`, creating it."""
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        path = out_path / name
        body = self.to_dict()
        body["digest"] = self.digest
        path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        logger.info(f"Wrote run manifest {path} (digest {self.digest})")
        return path
