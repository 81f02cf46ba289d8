"""Tests for the revlab command line."""

import json
from pathlib import Path
from typing import Any

import pytest


def _write(path: Path, doc: dict[str, Any]) -> Path:
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


class TestRunCommand:
    """Tests for ``revlab run``."""

    def test_unknown_model_exits_2_without_output(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that a schema error exits 2 and leaves the directory untouched."""
        # Given: A manifest naming an unknown model
        from revlab.cli import EXIT_SCHEMA, main

        config = _write(
            tmp_path / "m.json", {"kind": "reverse", "model": {"name": "heisenberg", "n": 6}, "grid": {"q": [2]}}
        )

        # When: Running it
        code = main(["run", str(config)])

        # Then: Exit 2, the key is named and nothing else was written
        assert code == EXIT_SCHEMA
        assert "model.name" in capsys.readouterr().err
        assert sorted(p.name for p in tmp_path.iterdir()) == ["m.json"]

    @pytest.mark.integration
    def test_run_writes_artifacts(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that a valid run exits 0, honours the results path and prints the summary path."""
        # Given: A two-point sweep with a nested results path
        from revlab.cli import EXIT_OK, main

        config = _write(
            tmp_path / "m.json",
            {
                "kind": "reverse",
                "model": {"name": "tfi", "n": 6, "boundary": "periodic", "params": {"J": 1.0, "h": 2.0}},
                "grid": {"q": [2, 4]},
                "options": {"disturbance": {"sites": [0, 1]}},
                "outputs": {"results": "out/results.csv"},
            },
        )

        # When/Then: The run succeeds and the files are where the manifest says
        assert main(["run", str(config), "--threads", "1"]) == EXIT_OK
        assert (tmp_path / "out" / "results.csv").exists()
        assert str(tmp_path / "summary.json") in capsys.readouterr().out

    def test_runtime_failure_exits_1(self, tmp_path: Path) -> None:
        """Test that a site outside the model exits 1 without a results file."""
        from revlab.cli import EXIT_FAILED, main

        config = _write(
            tmp_path / "m.json",
            {
                "kind": "reverse",
                "model": {"name": "tfi", "n": 6, "params": {"J": 1.0, "h": 2.0}},
                "grid": {"q": [2]},
                "options": {"disturbance": {"sites": [0, 7]}},
            },
        )
        assert main(["run", str(config)]) == EXIT_FAILED
        assert not (tmp_path / "results.csv").exists()

    @pytest.mark.integration
    def test_write_failure_exits_1(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that an artifact that cannot be written is a run failure, not a traceback."""
        # Given: A summary path occupied by a directory
        from revlab.cli import EXIT_FAILED, main

        (tmp_path / "summary.json").mkdir()
        config = _write(
            tmp_path / "m.json",
            {
                "kind": "reverse",
                "model": {"name": "tfi", "n": 6, "params": {"J": 1.0, "h": 2.0}},
                "grid": {"q": [2]},
                "options": {"disturbance": {"sites": [0, 1]}},
            },
        )

        # When: Running it
        code = main(["run", str(config), "--threads", "1"])

        # Then: Exit 1 with the reason and no results file
        assert code == EXIT_FAILED
        assert "writing artifacts failed" in capsys.readouterr().err
        assert not (tmp_path / "results.csv").exists()

    def test_zero_threads_is_a_usage_error(self, tmp_path: Path) -> None:
        """Test that argparse rejects --threads 0 with exit code 2."""
        from revlab.cli import main

        with pytest.raises(SystemExit) as excinfo:
            main(["run", str(tmp_path / "m.json"), "--threads", "0"])
        assert excinfo.value.code == 2


class TestSpectrumCommand:
    """Tests for ``revlab model spectrum``."""

    def test_bare_model_to_stdout(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that a bare model document prints the 16-level spectrum as CSV."""
        from revlab.cli import EXIT_OK, main

        config = _write(tmp_path / "model.json", {"name": "graph_ring", "n": 4})
        assert main(["model", "spectrum", str(config)]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "index,energy,weight"
        assert len(lines) == 17

    def test_manifest_model_to_file(self, tmp_path: Path) -> None:
        """Test that the model inside a manifest is used and --output receives the CSV."""
        from revlab.cli import EXIT_OK, main

        config = _write(
            tmp_path / "m.json",
            {"kind": "reverse", "model": {"name": "tfi", "n": 4, "params": {"J": 1.0, "h": 1.0}}, "grid": {"q": [2]}},
        )
        out = tmp_path / "spectrum.csv"
        assert main(["model", "spectrum", str(config), "--output", str(out)]) == EXIT_OK
        assert len(out.read_text().strip().splitlines()) == 17

    def test_bad_model_document_exits_2(self, tmp_path: Path) -> None:
        """Test that an unknown key in a model document exits 2."""
        from revlab.cli import EXIT_SCHEMA, main

        config = _write(tmp_path / "model.json", {"name": "tfi", "n": 4, "extra": 1})
        assert main(["model", "spectrum", str(config)]) == EXIT_SCHEMA
