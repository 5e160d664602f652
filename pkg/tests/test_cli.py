import numpy as np

from support import IDENTITY_FKBX
from fkb.cli import main
from fkb.model_format import format_float, parse_model


def write_identity(tmp_path, name="model.fkbx"):
    p = tmp_path / name
    p.write_text(IDENTITY_FKBX)
    return p


class TestValidate:
    def test_ok(self, tmp_path, capsys):
        model = write_identity(tmp_path)
        assert main(["validate", str(model)]) == 0
        assert capsys.readouterr().out == "OK 1 2 2\n"

    def test_truncated_file(self, tmp_path, capsys):
        p = tmp_path / "bad.fkbx"
        p.write_text(IDENTITY_FKBX[:40])
        assert main(["validate", str(p)]) == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_missing_path(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "nope.fkbx")]) == 2
        assert capsys.readouterr().err.startswith("error:")


class TestSummary:
    def test_table(self, tmp_path, capsys):
        model = write_identity(tmp_path)
        assert main(["summary", str(model)]) == 0
        out = capsys.readouterr().out
        assert "dense" in out and "2 -> 2" in out


class TestPredict:
    def test_identity_passthrough(self, tmp_path):
        model = write_identity(tmp_path)
        inp = tmp_path / "in.csv"
        out = tmp_path / "out.csv"
        inp.write_text("1,2\n3,4\n")
        assert main(["predict", str(model), "--input", str(inp),
                     "--output", str(out)]) == 0
        rows = [line.split(",") for line in out.read_text().splitlines()]
        assert [[float(v) for v in r] for r in rows] == [[1.0, 2.0], [3.0, 4.0]]

    def test_idempotent_through_identity(self, tmp_path):
        model = write_identity(tmp_path)
        inp = tmp_path / "in.csv"
        mid = tmp_path / "mid.csv"
        out = tmp_path / "out.csv"
        inp.write_text("0.125,-7.5\n")
        main(["predict", str(model), "--input", str(inp), "--output", str(mid)])
        main(["predict", str(model), "--input", str(mid), "--output", str(out)])
        assert mid.read_text() == out.read_text()

    def test_wrong_width(self, tmp_path, capsys):
        model = write_identity(tmp_path)
        inp = tmp_path / "in.csv"
        inp.write_text("1,2,3\n")
        assert main(["predict", str(model), "--input", str(inp),
                     "--output", str(tmp_path / "o.csv")]) == 1
        assert capsys.readouterr().err.startswith("error:")


class TestTrain:
    def test_lr_zero_bit_identical_model(self, tmp_path, capsys):
        model = write_identity(tmp_path)
        data = tmp_path / "d.csv"
        data.write_text("1,2,1,2\n3,4,3,4\n")
        out = tmp_path / "out.fkbx"
        assert main(["train", str(model), "--data", str(data), "--lr", "0",
                     "--epochs", "1", "--out", str(out)]) == 0
        assert out.read_text() == IDENTITY_FKBX
        assert capsys.readouterr().out.startswith("epoch 0 loss ")

    def test_linear_regression_reaches_target(self, tmp_path, capsys):
        model = tmp_path / "m.fkbx"
        model.write_text("FKBX 1\nlayers 1\ninput 1\ndense 1 linear 0\n"
                         "b 0\nW 0\n")
        data = tmp_path / "d.csv"
        xs = np.linspace(-1, 1, 50)
        data.write_text("".join(
            f"{format_float(x)},{format_float(2 * x + 1)}\n" for x in xs))
        out = tmp_path / "out.fkbx"
        assert main(["train", str(model), "--data", str(data), "--lr", "0.05",
                     "--epochs", "200", "--out", str(out)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 200
        final = float(lines[-1].split()[-1])
        assert final < 1e-4
        trained = parse_model(out.read_text())
        assert abs(trained.layers[0].weights[0, 0] - 2.0) < 0.01
        assert abs(trained.layers[0].biases[0] - 1.0) < 0.01

    def test_crossentropy_on_non_softmax_rejected(self, tmp_path, capsys):
        model = write_identity(tmp_path)
        data = tmp_path / "d.csv"
        data.write_text("1,2,1,0\n")
        assert main(["train", str(model), "--data", str(data), "--loss",
                     "crossentropy", "--out", str(tmp_path / "o.fkbx")]) == 1
        assert capsys.readouterr().err.startswith("error:")


class TestEnsemble:
    def _setup(self, tmp_path):
        for name in ("a.fkbx", "b.fkbx", "c.fkbx"):
            write_identity(tmp_path, name)
        inp = tmp_path / "in.csv"
        inp.write_text("1,2\n-0.5,0.25\n")
        return inp

    def test_identity_members_noise_zero(self, tmp_path):
        inp = self._setup(tmp_path)
        out = tmp_path / "out.csv"
        assert main(["ensemble", str(tmp_path), "--input", str(inp),
                     "--output", str(out), "--noise", "0"]) == 0
        rows = [[float(v) for v in line.split(",")]
                for line in out.read_text().splitlines()]
        assert rows == [[1.0, 2.0], [-0.5, 0.25]]

    def test_same_seed_byte_identical(self, tmp_path):
        inp = self._setup(tmp_path)
        out1, out2 = tmp_path / "o1.csv", tmp_path / "o2.csv"
        for out in (out1, out2):
            assert main(["ensemble", str(tmp_path), "--input", str(inp),
                         "--output", str(out), "--noise", "0.1",
                         "--seed", "7"]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_different_seeds_differ(self, tmp_path):
        inp = self._setup(tmp_path)
        out1, out2 = tmp_path / "o1.csv", tmp_path / "o2.csv"
        main(["ensemble", str(tmp_path), "--input", str(inp), "--output",
              str(out1), "--noise", "0.1", "--seed", "1"])
        main(["ensemble", str(tmp_path), "--input", str(inp), "--output",
              str(out2), "--noise", "0.1", "--seed", "2"])
        assert out1.read_bytes() != out2.read_bytes()
