"""
Unit tests for run manifests.
"""

import json
import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from core.manifest import RunManifest
from core.utils import sha256_file


class TestRunManifest:
    def test_digest_is_stable(self):
        a = RunManifest.build("verify", {"trials": 1}, 7)
        b = RunManifest.build("verify", {"trials": 1}, 7)
        assert a.digest == b.digest
        assert len(a.digest) == 16
        assert RunManifest.build("verify", {"trials": 2}, 7).digest != a.digest

    def test_input_digests(self, tmp_path):
        data = tmp_path / "x.csv"
        data.write_text("1,2\n")
        manifest = RunManifest.build("gvft", {}, None, [str(data)])
        assert manifest.inputs == {str(data): sha256_file(data)}

    def test_write(self, tmp_path):
        manifest = RunManifest.build("bench", {"nodes": 4}, 1, outputs=["bench.csv"])
        path = manifest.write(tmp_path / "out")
        body = json.loads(path.read_text())
        assert path.name == "manifest.json"
        assert body["digest"] == manifest.digest
        assert body["format"] == "gvnn-kit v1"
        assert body["outputs"] == ["bench.csv"]

    def test_named_write(self, tmp_path):
        path = RunManifest.build("eval", {}, None).write(tmp_path, "eval.manifest.json")
        assert path == tmp_path / "eval.manifest.json"

    def test_stamp_and_header(self):
        manifest = RunManifest.build("train", {}, 1)
        assert manifest.csv_header() == f"#gvnn-kit v1 manifest={manifest.digest}"
        stamped = manifest.stamp({"test_mse": 0.5})
        assert stamped == {"format": "gvnn-kit v1", "manifest": manifest.digest, "test_mse": 0.5}
