import json
import re

import numpy as np
import pytest

from matched_transforms import (
    cli,
    dft_matrix,
    fp_rm_matrix,
    haar_matrix,
    is_invariant,
    make_cyclic,
    parse_matrix,
    random_psd,
    read_matrix_file,
    render_matrix,
    rm_matrix,
    sample_invariant_cov,
    write_matrix_file,
)


def run(argv):
    """cli.main, with argparse's SystemExit folded into the return code."""
    try:
        return cli.main(argv)
    except SystemExit as exc:
        return int(exc.code)


def write_cov(path, arr):
    write_matrix_file(str(path), np.asarray(arr, dtype=np.complex128))
    return str(path)


class TestMatrixFile:
    def test_round_trip_complex_exact(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
        assert np.array_equal(parse_matrix(render_matrix(x)), x)

    def test_round_trip_real_exact(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(4, 4)) + 0j
        text = render_matrix(x)
        assert text.splitlines()[0] == "# rows=4 cols=4 field=real"
        assert np.array_equal(parse_matrix(text), x)

    def test_file_round_trip(self, tmp_path):
        x = np.array([[1e-300 + 2.5j, -7.0], [0.0, 3.141592653589793]])
        p = tmp_path / "m.mtx"
        write_matrix_file(str(p), x)
        assert np.array_equal(read_matrix_file(str(p)), x)


class TestKernel:
    def test_dft_stdout(self, capsys):
        assert run(["kernel", "dft", "--size", "4"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "# rows=4 cols=4 field=complex"
        assert np.max(np.abs(parse_matrix(out) - dft_matrix(4).matrix)) <= 1e-15

    def test_rm_is_real_integer_file(self, capsys):
        assert run(["kernel", "rm", "--size", "3"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "# rows=8 cols=8 field=real"
        assert np.array_equal(parse_matrix(out).real, rm_matrix(3).matrix)

    def test_haar_scaling_column(self, capsys):
        assert run(["kernel", "haar", "--size", "3"]) == 0
        got = parse_matrix(capsys.readouterr().out)
        assert np.allclose(got[:, 0].real, np.full(8, 2.0**-1.5), atol=1e-15)
        assert np.max(np.abs(got - haar_matrix(3).matrix)) <= 1e-15

    def test_fprm_polarity(self, capsys):
        assert run(["kernel", "fprm", "--polarity", "10"]) == 0
        got = parse_matrix(capsys.readouterr().out)
        assert np.array_equal(got.real, fp_rm_matrix((1, 0)).matrix)

    def test_out_file(self, tmp_path, capsys):
        p = tmp_path / "dct.mtx"
        assert run(["kernel", "dct2", "--size", "8", "--out", str(p)]) == 0
        capsys.readouterr()
        assert read_matrix_file(str(p)).shape == (8, 8)

    def test_missing_size_is_usage_error(self, capsys):
        assert run(["kernel", "dft"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_fprm_needs_polarity(self, capsys):
        assert run(["kernel", "fprm"]) == 2
        assert "polarity" in capsys.readouterr().err

    def test_bad_polarity_string(self, capsys):
        assert run(["kernel", "fprm", "--polarity", "102"]) == 2
        capsys.readouterr()

    def test_unknown_name_is_usage_error(self, capsys):
        assert run(["kernel", "nonexistent", "--size", "4"]) == 2
        capsys.readouterr()

    def test_bad_size(self, capsys):
        assert run(["kernel", "wht", "--size", "0"]) == 2
        capsys.readouterr()


class TestVerify:
    def test_single_case(self, capsys):
        assert run(["verify", "--case", "dft", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        assert "case=dft status=pass group=cyclic:16 min_match=1.000000" in out
        assert out.strip().endswith("verify: PASS")

    def test_haar_pattern(self, capsys):
        assert run(["verify", "--case", "haar"]) == 0
        assert "pattern=1 1 2 4 8 16" in capsys.readouterr().out

    def test_circle64_pattern(self, capsys):
        assert run(["verify", "--case", "circle64"]) == 0
        out = capsys.readouterr().out
        assert "pattern=1 " + "2 " * 31 + "1" in out

    def test_all_cases(self, capsys):
        assert run(["verify", "--case", "all", "--seed", "7"]) == 0
        out = capsys.readouterr().out
        assert len([l for l in out.splitlines() if l.startswith("case=")]) == 5

    def test_json_text_parity(self, capsys):
        assert run(["verify", "--case", "wht", "--seed", "3"]) == 0
        text = capsys.readouterr().out
        assert run(["verify", "--case", "wht", "--seed", "3", "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        text_match = float(re.search(r"min_match=([0-9.]+)", text).group(1))
        row = payload["cases"][0]
        assert row["case"] == "wht"
        assert row["min_match"] == text_match
        assert payload["pass"] is True


class TestDiscover:
    def test_circulant(self, tmp_path, capsys):
        r = sample_invariant_cov(make_cyclic(8), seed=1)
        path = write_cov(tmp_path / "circ.mtx", r)
        assert run(["discover", path]) == 0
        out = capsys.readouterr().out
        assert "order: 8" in out
        assert "alpha: 1.000000" in out
        assert "stop: spectral-bound" in out
        matched = path + ".matched.mtx"
        assert f"matched_transform: {matched}" in out
        u = read_matrix_file(matched)
        assert np.max(np.abs(u.conj().T @ u - np.eye(8))) <= 1e-10
        d = u.conj().T @ r @ u
        off = d - np.diag(np.diag(d))
        assert np.max(np.abs(off)) <= 1e-8 * np.linalg.norm(r)

    def test_cyclic_shift_basis_reports_the_cycle(self, tmp_path, capsys):
        r = sample_invariant_cov(make_cyclic(8), seed=1)
        path = write_cov(tmp_path / "circ.mtx", r)
        assert run(["discover", path, "--basis", "cyclic-shifts"]) == 0
        out = capsys.readouterr().out
        assert "generator_0: (0 1 2 3 4 5 6 7)" in out
        assert "delta_0: 0.000000" in out
        assert "order: 8" in out

    def test_identity_saturates_with_degenerate_spectrum(self, tmp_path, capsys):
        path = write_cov(tmp_path / "eye.mtx", np.eye(8))
        assert run(["discover", path, "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["degenerate_spectrum"] is True
        assert payload["spectrum_clusters"] == 1
        assert payload["alpha"] == 1.0
        assert payload["stop"] == "saturated"
        assert payload["order"] == ">10000"

    def test_asymmetric_psd_finds_nothing_and_writes_no_transform(self, tmp_path, capsys):
        r = random_psd(5, 9)
        path = write_cov(tmp_path / "plain.mtx", r)
        assert run(["discover", path]) == 0
        out = capsys.readouterr().out
        assert "generators: none" in out
        assert "alpha: 1.000000" in out
        assert "matched_transform: -" in out
        import os

        assert not os.path.exists(path + ".matched.mtx")

    def test_non_hermitian_exit_2(self, tmp_path, capsys):
        arr = np.array([[0.0, 1.0], [0.0, 0.0]])
        path = write_cov(tmp_path / "bad.mtx", arr)
        assert run(["discover", path]) == 2
        assert "Hermitian" in capsys.readouterr().err

    def test_missing_file_exit_3(self, capsys):
        assert run(["discover", "/nonexistent/path.mtx"]) == 3
        assert "I/O failure" in capsys.readouterr().err

    def test_json_text_parity(self, tmp_path, capsys):
        r = sample_invariant_cov(make_cyclic(4), seed=2)
        path = write_cov(tmp_path / "c4.mtx", r)
        assert run(["discover", path]) == 0
        text = capsys.readouterr().out
        assert run(["discover", path, "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        text_alpha = float(re.search(r"alpha: ([0-9.]+)", text).group(1))
        assert payload["alpha"] == text_alpha
        assert str(payload["order"]) == re.search(r"order: (\S+)", text).group(1)


class TestResidual:
    def test_hand_value_cycle_notation(self, tmp_path, capsys):
        path = write_cov(tmp_path / "diag12.mtx", np.diag([1.0, 2.0]))
        assert run(["residual", "--perm", "(0 1)", "--in", path]) == 0
        assert "delta: 0.447214" in capsys.readouterr().out

    def test_image_list_form(self, tmp_path, capsys):
        path = write_cov(tmp_path / "diag12.mtx", np.diag([1.0, 2.0]))
        assert run(["residual", "--perm", "1 0", "--in", path]) == 0
        assert "delta: 0.447214" in capsys.readouterr().out

    def test_bad_perm_exit_2(self, tmp_path, capsys):
        path = write_cov(tmp_path / "diag12.mtx", np.diag([1.0, 2.0]))
        assert run(["residual", "--perm", "0 0", "--in", path]) == 2
        capsys.readouterr()


class TestAlpha:
    def test_invariant_input(self, tmp_path, capsys):
        r = sample_invariant_cov(make_cyclic(4), seed=1)
        path = write_cov(tmp_path / "circ4.mtx", r)
        assert run(["alpha", "--group", "cyclic:4", "--in", path]) == 0
        assert "alpha: 1.000000" in capsys.readouterr().out

    def test_unknown_group_lists_valid_forms(self, tmp_path, capsys):
        path = write_cov(tmp_path / "m.mtx", np.eye(4))
        assert run(["alpha", "--group", "icosahedral:4", "--in", path]) == 2
        assert "valid forms" in capsys.readouterr().err

    def test_degree_mismatch_exit_2(self, tmp_path, capsys):
        path = write_cov(tmp_path / "m.mtx", np.eye(4))
        assert run(["alpha", "--group", "cyclic:5", "--in", path]) == 2
        capsys.readouterr()


class TestProject:
    def test_projection_fixed_point(self, tmp_path, capsys):
        src = write_cov(tmp_path / "in.mtx", random_psd(4, 3))
        out1 = str(tmp_path / "p1.mtx")
        out2 = str(tmp_path / "p2.mtx")
        assert run(["project", "--group", "cyclic:4", "--in", src, "--out", out1]) == 0
        assert run(["project", "--group", "cyclic:4", "--in", out1, "--out", out2]) == 0
        capsys.readouterr()
        a = read_matrix_file(out1)
        b = read_matrix_file(out2)
        assert np.max(np.abs(a - b)) <= 1e-12
        assert is_invariant(a, make_cyclic(4), tol=1e-12)


class TestMatchLibrary:
    def test_text_ranking(self, tmp_path, capsys):
        r = sample_invariant_cov(make_cyclic(8), seed=1)
        path = write_cov(tmp_path / "cov.mtx", r)
        lib = "trivial:8,cyclic:8,dihedralM:8,boolean:3"
        assert run(["match-library", "--in", path, "--library", lib]) == 0
        out = capsys.readouterr().out
        first = out.splitlines()[0]
        assert first.startswith("rank=1 group=cyclic:8 score=0.000000")
        assert "order=8" in first

    def test_warning_on_degree_mismatch(self, tmp_path, capsys):
        r = sample_invariant_cov(make_cyclic(4), seed=1)
        path = write_cov(tmp_path / "cov.mtx", r)
        assert run(["match-library", "--in", path, "--library", "cyclic:4,cyclic:5"]) == 0
        captured = capsys.readouterr()
        assert "warning" in captured.err
        assert "cyclic:5" not in captured.out

    def test_json_text_parity(self, tmp_path, capsys):
        r = sample_invariant_cov(make_cyclic(4), seed=5)
        path = write_cov(tmp_path / "cov.mtx", r)
        lib = "trivial:4,cyclic:4"
        assert run(["match-library", "--in", path, "--library", lib]) == 0
        text = capsys.readouterr().out
        assert run(["match-library", "--in", path, "--library", lib, "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        first_text = text.splitlines()[0]
        assert payload["entries"][0]["group"] == re.search(r"group=(\S+)", first_text).group(1)
        assert f"score={payload['entries'][0]['score']:.6f}" in first_text

    def test_empty_library_exit_2(self, tmp_path, capsys):
        path = write_cov(tmp_path / "cov.mtx", np.eye(3))
        assert run(["match-library", "--in", path, "--library", " , "]) == 2
        capsys.readouterr()


class TestSynthesize:
    def test_cyclic8(self, tmp_path, capsys):
        out = str(tmp_path / "basis.mtx")
        assert run(["synthesize", "--group", "cyclic:8", "--out", out]) == 0
        text = capsys.readouterr().out
        assert "data_dependent: false" in text
        u = read_matrix_file(out)
        assert np.max(np.abs(u.conj().T @ u - np.eye(8))) <= 1e-10
        r = sample_invariant_cov(make_cyclic(8), seed=31)
        d = u.conj().T @ r @ u
        off = d - np.diag(np.diag(d))
        assert np.max(np.abs(off)) <= 1e-8 * np.linalg.norm(r)

    def test_non_multiplicity_free_exit_1(self, tmp_path, capsys):
        out = str(tmp_path / "x.mtx")
        code = run(["synthesize", "--group", "product:(trivial:2,cyclic:2)", "--out", out])
        assert code == 1
        capsys.readouterr()


class TestUsage:
    def test_no_subcommand_exit_2(self, capsys):
        assert run([]) == 2
        capsys.readouterr()

    def test_unknown_subcommand_exit_2(self, capsys):
        assert run(["frobnicate"]) == 2
        capsys.readouterr()
