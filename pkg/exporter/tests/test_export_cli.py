import subprocess

from keras import layers as klayers

from bridge_helpers import run_fkb, save_h5, sequential
from fkb_exporter.cli import main


def test_to_fkbx_round_trip(tmp_path, capsys):
    model = sequential(klayers.Dense(3, activation="relu"),
                       klayers.Dense(2), input_dim=4)
    save_h5(model, tmp_path / "m.h5")

    assert main(["to-fkbx", str(tmp_path / "m.h5"),
                 str(tmp_path / "m.fkbx")]) == 0
    assert capsys.readouterr().out.strip() == "converted 2 layers"
    assert run_fkb("validate", tmp_path / "m.fkbx").returncode == 0

    assert main(["from-fkbx", str(tmp_path / "m.fkbx"),
                 str(tmp_path / "back.h5")]) == 0
    first = (tmp_path / "m.fkbx").read_bytes()
    assert main(["to-fkbx", str(tmp_path / "back.h5"),
                 str(tmp_path / "again.fkbx")]) == 0
    assert (tmp_path / "again.fkbx").read_bytes() == first


def test_missing_archive_exits_2(tmp_path, capsys):
    assert main(["to-fkbx", str(tmp_path / "missing.h5"),
                 str(tmp_path / "m.fkbx")]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_domain_error_exits_1(tmp_path, capsys):
    model = sequential(klayers.Dense(2, activation="gelu"), input_dim=3)
    save_h5(model, tmp_path / "m.h5")
    assert main(["to-fkbx", str(tmp_path / "m.h5"),
                 str(tmp_path / "m.fkbx")]) == 1
    assert "gelu" in capsys.readouterr().err


def test_console_script_help():
    proc = subprocess.run(["fkb-export", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "to-fkbx" in proc.stdout and "from-fkbx" in proc.stdout
