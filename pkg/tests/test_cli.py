import shutil
import subprocess

import pytest

from facerec.cli import build_parser, canonical_family, main


@pytest.fixture()
def small_cfg_file(small_tree, tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(f"database={small_tree}\nlevels=3\n"
                    "sfs_iterations=4\nn_train=2\n")
    return path


class TestFamilyShorthand:
    def test_expansions(self):
        assert canonical_family("coif2") == "coiflet-2"
        assert canonical_family("db10") == "daubechies-10"

    def test_passthrough(self):
        assert canonical_family("coiflet-3") == "coiflet-3"
        assert canonical_family("haar") == "haar"


class TestRun:
    def test_run_with_config(self, small_cfg_file, capsys):
        assert main(["run", "--config", str(small_cfg_file)]) == 0
        out = capsys.readouterr().out
        assert "coif-packet" in out and "%" in out

    def test_run_writes_csv(self, small_cfg_file, tmp_path, capsys):
        out_csv = tmp_path / "report.csv"
        assert main(["run", "--config", str(small_cfg_file),
                     "--out", str(out_csv)]) == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0].startswith("database,algorithm,")
        assert len(lines) == 2
        assert "wrote" in capsys.readouterr().out

    def test_flag_overrides_config(self, small_cfg_file, capsys):
        assert main(["run", "--config", str(small_cfg_file),
                     "--algo", "radon", "--metric", "mahalanobis"]) == 0
        out = capsys.readouterr().out
        assert "radon-dft" in out and "mahalanobis" in out

    def test_family_shorthand_accepted(self, small_cfg_file, capsys):
        assert main(["run", "--config", str(small_cfg_file),
                     "--family", "db2"]) == 0
        capsys.readouterr()

    def test_missing_database_exits_2(self, capsys):
        assert main(["run", "--db", "/no/such/tree"]) == 2
        assert "[dataset]" in capsys.readouterr().err

    def test_unknown_config_key_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("wavelet=coif2\n")
        assert main(["run", "--config", str(bad)]) == 2
        assert "unknown key" in capsys.readouterr().err

    def test_bad_flag_value_raises_usage_error(self):
        with pytest.raises(SystemExit):
            main(["run", "--algo", "bogus"])

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit):
            main([])


class TestGrid:
    def _grid_file(self, tmp_path, small_tree, with_failure=False):
        blocks = [f"database={small_tree}\nlevels=3\nsfs_iterations=4\nn_train=2",
                  f"database={small_tree}\nalgorithm=radon-dft\n"
                  "sfs_iterations=4\nn_train=2"]
        if with_failure:
            blocks.insert(1, "database=/missing/tree")
        path = tmp_path / "grid.cfg"
        path.write_text("\n\n".join(blocks) + "\n")
        return path

    def test_grid_to_csv(self, small_tree, tmp_path, capsys):
        grid = self._grid_file(tmp_path, small_tree)
        out = tmp_path / "grid.csv"
        assert main(["grid", "--configs", str(grid), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 3
        assert "wrote" in capsys.readouterr().out

    def test_grid_failure_sets_exit_code(self, small_tree, tmp_path, capsys):
        grid = self._grid_file(tmp_path, small_tree, with_failure=True)
        out = tmp_path / "grid.csv"
        assert main(["grid", "--configs", str(grid), "--out", str(out)]) == 1
        assert len(out.read_text().splitlines()) == 4
        assert "error:" in capsys.readouterr().err

    def test_grid_prints_rows_without_out(self, small_tree, tmp_path, capsys):
        grid = self._grid_file(tmp_path, small_tree)
        assert main(["grid", "--configs", str(grid)]) == 0
        out_lines = capsys.readouterr().out.splitlines()
        assert len(out_lines) == 2
        assert all(str(small_tree) in line for line in out_lines)


class TestConstancy:
    def test_writes_rows(self, small_cfg_file, tmp_path, capsys):
        out = tmp_path / "constancy.csv"
        assert main(["constancy", "--config", str(small_cfg_file),
                     "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "class,image_index,relative_error"
        assert len(lines) == 1 + 5 * 2
        capsys.readouterr()

    def test_out_is_required(self):
        with pytest.raises(SystemExit):
            main(["constancy"])


def test_parser_help_mentions_subcommands():
    usage = build_parser().format_help()
    for word in ("run", "grid", "constancy"):
        assert word in usage


@pytest.mark.skipif(shutil.which("facerec") is None,
                    reason="console script not on PATH")
def test_console_script_entry_point():
    proc = subprocess.run(["facerec", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "facerec" in proc.stdout
