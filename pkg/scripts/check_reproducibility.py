#!/usr/bin/env python3
"""Run one manifest several times and confirm the results CSV is byte-identical across runs."""

from __future__ import annotations

import hashlib
import json
import sys
import tempfile
from datetime import UTC, datetime
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from revlab.manifest import load_manifest
from revlab.runner import ExperimentRunner


def run_once(config: Path, workdir: Path, threads: int, run_number: int) -> dict[str, str | float]:
    """Run the manifest with every output redirected into ``workdir``.

    Args:
        config: Path of the JSON manifest
        workdir: Fresh directory for this run's artifacts
        threads: Worker processes
        run_number: Run identifier for logging

    Returns:
        Digest of the results CSV and the run's wall time
    """
    manifest = load_manifest(config)
    outputs = manifest.outputs.model_copy(
        update={name: workdir / path.name for name, path in manifest.outputs}
    )
    manifest = manifest.model_copy(update={"outputs": outputs})

    print(f"[Run {run_number}] threads={threads} started at {datetime.now(UTC).isoformat()}")
    result = ExperimentRunner(threads=threads).run(manifest, run_id=f"repro-{run_number}")
    digest = hashlib.sha256(outputs.results.read_bytes()).hexdigest()
    print(f"[Run {run_number}] {result.rows} row(s), sha256 {digest[:16]}")
    return {"run_number": run_number, "threads": threads, "sha256": digest, "seconds": result.duration_seconds or 0.0}


def check_reproducibility(config: Path, num_runs: int = 3, threads: list[int] | None = None) -> dict:
    """Run ``num_runs`` times, cycling through the thread counts, and compare digests."""
    threads = threads or [1, 2]
    print("=" * 80)
    print("REPRODUCIBILITY CHECK")
    print("=" * 80)
    print(f"Manifest: {config}")
    print(f"Number of runs: {num_runs}")
    print()

    runs = []
    with tempfile.TemporaryDirectory(prefix="revlab-repro-") as tmp:
        for i in range(1, num_runs + 1):
            workdir = Path(tmp) / f"run-{i}"
            runs.append(run_once(config, workdir, threads[(i - 1) % len(threads)], i))

    digests = {str(run["sha256"]) for run in runs}
    return {
        "checked_at": datetime.now(UTC).isoformat(),
        "manifest": str(config),
        "runs": runs,
        "identical": len(digests) == 1,
    }


def main() -> None:
    """Main entry point: ``check_reproducibility.py MANIFEST [NUM_RUNS]``."""
    if len(sys.argv) < 2:
        print("usage: check_reproducibility.py MANIFEST [NUM_RUNS]", file=sys.stderr)
        sys.exit(2)
    config = Path(sys.argv[1])
    num_runs = int(sys.argv[2]) if len(sys.argv) > 2 else 3

    try:
        report = check_reproducibility(config, num_runs)
    except Exception as e:
        print(f"Reproducibility check failed: {e}", file=sys.stderr)
        sys.exit(1)

    print()
    print(json.dumps(report, indent=2))
    if not report["identical"]:
        print("Results differ between runs", file=sys.stderr)
        sys.exit(1)
    print("All runs produced identical results")


if __name__ == "__main__":
    main()
