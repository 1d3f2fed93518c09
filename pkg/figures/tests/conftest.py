import subprocess
import sys

import pytest

GRID = "--grid=-0.8:0.8:-0.8:0.8:41"


def run_dg2(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "dg2", *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


@pytest.fixture(scope="session")
def csv_dir(tmp_path_factory):
    """CSV exports produced through the dg2 command line, once per session."""
    out = tmp_path_factory.mktemp("csv")
    run_dg2("scan", "--epsilon", "1", "--u-range", "0.01:2.0:60",
            "--output", str(out / "scan_plus.csv"))
    run_dg2("scan", "--epsilon", "-1", "--u-range", "0.01:2.0:60",
            "--output", str(out / "scan_minus.csv"))
    for eps, tag in ((1, "plus"), (-1, "minus")):
        run_dg2("functional", "--epsilon", str(eps), "--t", "0.4472135955",
                GRID, "--output", str(out / f"grid_np_{tag}.csv"))
        run_dg2("functional", "--epsilon", str(eps), "--t", "1.0",
                GRID, "--output", str(out / f"grid_ts_{tag}.csv"))
    return out
