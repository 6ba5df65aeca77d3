import json
import shutil
import subprocess

import pytest

from chronoline_exporter.cli import run_anchors, run_images


class TestExportAnchorsCli:
    def test_happy_path(self, tiny_checkpoint, tmp_path, capsys):
        out = tmp_path / "A.jsonl"
        code = run_anchors(["--model", tiny_checkpoint, "--template", "P7",
                            "--ymin", "1700", "--ymax", "1704", "--out", str(out)])
        assert code == 0
        assert "wrote 5 anchors" in capsys.readouterr().err
        assert len(out.read_text().splitlines()) == 5

    def test_help_exits_zero(self):
        assert run_anchors(["--help"]) == 0

    def test_unknown_template_is_usage_error(self, tmp_path):
        code = run_anchors(["--model", "x", "--template", "P99",
                            "--out", str(tmp_path / "A.jsonl")])
        assert code == 2

    def test_bad_model_exits_4(self, tmp_path, capsys):
        code = run_anchors(["--model", str(tmp_path / "ghost"),
                            "--out", str(tmp_path / "A.jsonl")])
        assert code == 4
        assert "cannot load model" in capsys.readouterr().err

    def test_console_script_installed(self):
        exe = shutil.which("export-anchors")
        if exe is None:
            pytest.skip("console script not on PATH")
        proc = subprocess.run([exe, "--help"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert "--template" in proc.stdout


class TestExportImagesCli:
    def test_happy_path(self, tiny_checkpoint, image_manifest, tmp_path, capsys):
        out = tmp_path / "Q.jsonl"
        code = run_images(["--model", tiny_checkpoint,
                           "--manifest", str(image_manifest), "--out", str(out)])
        assert code == 0
        assert "wrote 3 queries" in capsys.readouterr().err
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert [r["year"] for r in records] == [1700, 1702, 1704]

    def test_skip_count_reported(self, tiny_checkpoint, image_manifest, tmp_path,
                                 capsys):
        with image_manifest.open("a") as fh:
            fh.write("gone.png,1712,toys\n")
        with pytest.warns(UserWarning):
            code = run_images(["--model", tiny_checkpoint,
                               "--manifest", str(image_manifest),
                               "--out", str(tmp_path / "Q.jsonl")])
        assert code == 0
        assert "(1 unreadable, skipped)" in capsys.readouterr().err

    def test_missing_manifest_is_io_error(self, tiny_checkpoint, tmp_path, capsys):
        code = run_images(["--model", tiny_checkpoint,
                           "--manifest", str(tmp_path / "ghost.csv"),
                           "--out", str(tmp_path / "Q.jsonl")])
        assert code == 3
        assert "i/o error" in capsys.readouterr().err

    def test_empty_manifest_exits_4(self, tiny_checkpoint, tmp_path, capsys):
        manifest = tmp_path / "m.csv"
        manifest.write_text("file,year,label\n")
        code = run_images(["--model", tiny_checkpoint, "--manifest", str(manifest),
                           "--out", str(tmp_path / "Q.jsonl")])
        assert code == 4
        assert "no data rows" in capsys.readouterr().err
