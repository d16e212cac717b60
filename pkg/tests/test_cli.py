"""Command-line interface: exit codes, CSV output, determinism, plotting."""

import math

import pytest

from fracvisco.cli import main

GOOD = ["--a", "0.8", "--b", "0.1", "--alpha", "0.4", "--B", "0.4"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def csv_rows(text: str) -> list[list[str]]:
    return [line.split(",") for line in text.strip().splitlines()]


class TestCheck:
    def test_admissible_params(self, capsys):
        code, out, err = run(capsys, "check", *GOOD)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("thermo: OK (0.8 >= ~0.303")
        assert lines[1].startswith("strong (no zeros): not satisfied")
        assert err == ""

    def test_strongly_admissible_params(self, capsys):
        code, out, _ = run(
            capsys, "check", "--a", "1.2", "--b", "0.1", "--alpha", "0.4", "--B", "0.4"
        )
        assert code == 0
        assert "strong (no zeros): OK" in out

    def test_inadmissible_params_exit_two(self, capsys):
        code, out, _ = run(
            capsys, "check", "--a", "0.1", "--b", "0.1", "--alpha", "0.4", "--B", "0.4"
        )
        assert code == 2
        assert "thermo: FAIL" in out
        assert "violated restriction: a >= 2 b cosh(pi B / 2)" in out
        assert "threshold = 0.30339322648815154" in out

    def test_invalid_params_exit_two(self, capsys):
        code, _, err = run(
            capsys, "check", "--a", "0.8", "--b", "0.1", "--alpha", "1.5", "--B", "0.4"
        )
        assert code == 2
        assert err.startswith("invalid parameters:")

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "report.txt"
        code, out, _ = run(capsys, "check", *GOOD, "--output", str(target))
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("thermo: OK")


class TestModulus:
    def test_csv_structure(self, capsys):
        code, out, _ = run(
            capsys, "modulus", *GOOD,
            "--omega-min", "0.1", "--omega-max", "10", "--steps", "20",
        )
        assert code == 0
        rows = csv_rows(out)
        assert rows[0] == ["omega", "re_E", "im_E"]
        assert len(rows) == 22
        assert float(rows[1][0]) == pytest.approx(0.1)
        assert float(rows[-1][0]) == pytest.approx(10.0)

    def test_loss_positive_for_admissible_params(self, capsys):
        _, out, _ = run(capsys, "modulus", *GOOD, "--steps", "50")
        rows = csv_rows(out)[1:]
        assert all(float(r[2]) > -1e-10 for r in rows)


class TestZeros:
    def test_pair_reported_with_windings(self, capsys):
        code, out, _ = run(
            capsys, "zeros", "--a", "0.8", "--b", "0.1", "--alpha", "0.4", "--B", "0.99"
        )
        assert code == 0
        lines = out.splitlines()
        assert "# winding right: 0" in lines
        assert "# winding left-upper: 1" in lines
        assert "# count verified: yes" in lines
        header_at = lines.index("re,im,psi_prime_re,psi_prime_im")
        data = [l.split(",") for l in lines[header_at + 1 :] if l]
        assert len(data) == 2
        # conjugate rows are adjacent and mirror each other
        assert float(data[0][0]) == pytest.approx(float(data[1][0]))
        assert float(data[0][1]) == pytest.approx(-float(data[1][1]))
        assert float(data[0][0]) == pytest.approx(-19.640973182365951, rel=1e-9)

    def test_zero_free_params(self, capsys):
        code, out, _ = run(capsys, "zeros", *GOOD)
        assert code == 0
        assert "# winding right: 0" in out
        assert "# count verified: yes" in out
        rows = [l for l in out.splitlines() if l and not l.startswith(("#", "re,"))]
        assert rows == []


class TestKernel:
    def test_csv_with_infinite_head(self, capsys):
        code, out, _ = run(
            capsys, "kernel", *GOOD, "--t-max", "1", "--steps", "10"
        )
        assert code == 0
        rows = csv_rows(out)
        assert rows[0] == ["t", "value"]
        assert len(rows) == 12
        assert rows[1][1] == "inf"
        assert all(float(r[1]) > 0.0 for r in rows[2:])


class TestCurves:
    def test_relax_csv(self, capsys):
        code, out, _ = run(
            capsys, "relax", *GOOD, "--t-max", "0.5", "--steps", "20",
            "--method", "direct",
        )
        assert code == 0
        rows = csv_rows(out)
        assert rows[0] == ["t", "sigma"]
        assert len(rows) == 22
        assert float(rows[1][1]) == 0.0

    def test_creep_csv(self, capsys):
        code, out, _ = run(
            capsys, "creep", *GOOD, "--t-max", "10", "--steps", "20",
            "--method", "post",
        )
        assert code == 0
        rows = csv_rows(out)
        assert rows[0] == ["t", "epsilon"]
        assert len(rows) == 22
        values = [float(r[1]) for r in rows[1:]]
        assert values[0] == 0.0
        assert values[-1] > 0.5

    def test_deterministic_output(self, tmp_path, capsys):
        first = tmp_path / "one.csv"
        second = tmp_path / "two.csv"
        for target in (first, second):
            code, _, _ = run(
                capsys, "relax", *GOOD, "--t-max", "0.5", "--steps", "20",
                "--method", "direct", "--output", str(target),
            )
            assert code == 0
        assert first.read_bytes() == second.read_bytes()

    def test_precision_flag_truncates(self, capsys):
        _, full, _ = run(
            capsys, "relax", *GOOD, "--t-max", "0.5", "--steps", "10",
            "--method", "direct",
        )
        _, short, _ = run(
            capsys, "relax", *GOOD, "--t-max", "0.5", "--steps", "10",
            "--method", "direct", "--precision", "3",
        )
        assert short != full
        last = csv_rows(short)[-1][1]
        mantissa = last.replace("-", "").replace(".", "").split("e")[0].lstrip("0")
        assert len(mantissa) <= 3

    def test_precision_out_of_range(self, capsys):
        code, _, err = run(
            capsys, "relax", *GOOD, "--t-max", "0.5", "--steps", "10",
            "--precision", "0",
        )
        assert code == 2
        assert "precision" in err

    def test_unknown_method_rejected_by_parser(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["relax", *GOOD, "--method", "bogus"])
        assert exc.value.code == 2
        capsys.readouterr()


class TestPlot:
    def test_plot_written_next_to_csv(self, tmp_path, capsys):
        target = tmp_path / "curve.csv"
        code, _, _ = run(
            capsys, "relax", *GOOD, "--t-max", "0.5", "--steps", "20",
            "--method", "direct", "--output", str(target), "--plot",
        )
        assert code == 0
        png = tmp_path / "curve.png"
        assert png.exists()
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_plot_without_output_rejected(self, capsys):
        code, _, err = run(
            capsys, "relax", *GOOD, "--t-max", "0.5", "--steps", "20", "--plot"
        )
        assert code == 2
        assert "--plot requires --output" in err

    def test_modulus_plot(self, tmp_path, capsys):
        target = tmp_path / "modulus.csv"
        code, _, _ = run(
            capsys, "modulus", *GOOD, "--steps", "30",
            "--output", str(target), "--plot",
        )
        assert code == 0
        assert (tmp_path / "modulus.png").exists()


class TestCompare:
    def test_reports_max_deviation(self, capsys):
        code, out, _ = run(
            capsys, "compare", *GOOD,
            "--experiment", "relaxation",
            "--method-a", "direct", "--method-b", "expansion",
            "--t-max", "0.5", "--steps", "50", "--t-min", "0.05",
        )
        assert code == 0
        assert out.startswith("max relative deviation: ")
        assert " at t = " in out
        value = float(out.split(":")[1].split("at")[0])
        assert 0.0 < value < 0.05

    def test_bad_method_combination(self, capsys):
        code, _, err = run(
            capsys, "compare", *GOOD,
            "--experiment", "relaxation",
            "--method-a", "direct", "--method-b", "post",
            "--t-max", "0.5", "--steps", "20",
        )
        assert code == 2
        assert err.startswith("invalid parameters:")
