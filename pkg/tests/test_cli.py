"""
Tests for the command-line front end
"""

import json

import pytest

from bicarleman.cli import (
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_VERIFICATION,
    build_parser,
    load_config,
    main,
)


@pytest.fixture
def operator(fixtures_dir):
    def path(name):
        return str(fixtures_dir / f"{name}.json")
    return path


def write_zero_operator(tmp_path, dim, null_indices):
    """Zero operator document of the given dimension."""
    document = {
        "dim": dim,
        "matrix": [[[0.0, 0.0]] * dim for _ in range(dim)],
        "null_indices": list(null_indices),
        "complement_indices": [i for i in range(dim) if i not in set(null_indices)],
    }
    path = tmp_path / f"zero_{dim}.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


class TestParser:
    def test_repeatable_derivatives(self):
        args = build_parser().parse_args(
            ["eval", "--operator", "op.json", "--deriv", "0", "0", "--deriv", "1", "2"]
        )

        assert args.deriv == [[0, 0], [1, 2]]
        assert args.command == "eval"

    def test_operator_is_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["inspect"])

    def test_sizing_flags(self):
        args = build_parser().parse_args([
            "assign", "--operator", "op.json",
            "--ambient-dim", "6", "--enumeration-size", "600", "--required-x", "1",
        ])
        config = load_config(args)

        assert config.ambient_dim == 6
        assert config.enumeration_size == 600
        assert config.required_x == 1


class TestCommands:
    def test_inspect(self, operator, capsys):
        assert main(["inspect", "--operator", operator("geometric")]) == EXIT_OK

        out = capsys.readouterr().out
        assert "member yes" in out
        assert "normalized_null_indices [6, 7, 8, 9, 10, 11, 12]" in out

    def test_split(self, operator, capsys):
        assert main(["split", "--operator", operator("rank_one")]) == EXIT_OK

        out = capsys.readouterr().out
        assert "rank_J 1" in out
        assert "rank_J_tilde 1" in out

    def test_assign(self, operator, capsys):
        assert main(["assign", "--operator", operator("rank_one"), "--imax", "1"]) == EXIT_OK

        out = capsys.readouterr().out
        assert "slots [1, 5, 13, 29]" in out
        assert "map e0 -> u29" in out
        assert "summability OK" in out

    def test_kernel_with_cap(self, operator, capsys):
        assert main(["kernel", "--operator", operator("rank_one"), "--imax", "1", "--cap-terms", "0"]) == EXIT_OK

        out = capsys.readouterr().out
        assert "terms P 1" in out
        assert "term_cap 0" in out

    def test_eval_writes_grid(self, operator, tmp_path, capsys):
        out_path = tmp_path / "grid.csv"
        code = main(["eval", "--operator", operator("rank_one"), "--imax", "1", "--grid", "64", "--out", str(out_path)])

        assert code == EXIT_OK
        lines = out_path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "s,t,deriv_s,deriv_t,re,im"
        assert len(lines) == 64 * 64 + 1
        assert "wrote 4096 rows" in capsys.readouterr().out

    def test_eval_with_derivatives(self, operator, tmp_path):
        out_path = tmp_path / "grid.csv"
        code = main([
            "eval", "--operator", operator("zero_operator"), "--imax", "1", "--grid", "4",
            "--deriv", "0", "0", "--deriv", "1", "1", "--out", str(out_path),
        ])

        assert code == EXIT_OK
        assert len(out_path.read_text(encoding="utf-8").splitlines()) == 4 * 4 * 2 + 1

    def test_verify_zero_operator_passes(self, operator, tmp_path, capsys):
        report_path = tmp_path / "report.txt"
        code = main(["verify", "--operator", operator("zero_operator"), "--imax", "2", "--out", str(report_path)])

        out = capsys.readouterr().out
        assert code == EXIT_OK, out
        assert out.splitlines()[-1].startswith("SUMMARY")
        assert report_path.read_text(encoding="utf-8") == out

    def test_verify_is_deterministic(self, operator, tmp_path):
        paths = [tmp_path / "first.txt", tmp_path / "second.txt"]
        for path in paths:
            main(["verify", "--operator", operator("zero_operator"), "--imax", "1", "--seed", "7", "--out", str(path)])

        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_assign_desk_dimension(self, tmp_path, capsys):
        path = write_zero_operator(tmp_path, 12, [10, 11])

        assert main(["assign", "--operator", path, "--imax", "1"]) == EXIT_OK

        out = capsys.readouterr().out
        assert "map e0 -> u365" in out
        assert "map e9 -> u5" in out
        assert "map e10 -> u1" in out
        assert "summability OK" in out

    def test_assign_with_ambient_dimension(self, operator, capsys):
        code = main(["assign", "--operator", operator("rank_one"), "--imax", "1", "--ambient-dim", "6"])

        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "slots [1, 5, 13, 29, 53, 85]" in out
        assert "map e0 -> u85" in out
        assert "map e4 -> u53" in out
        assert "map e5 -> u29" in out
        assert "map e3 -> u1" in out

    def test_inspect_reports_ambient_dimension(self, operator, capsys):
        assert main(["inspect", "--operator", operator("rank_one"), "--ambient-dim", "9"]) == EXIT_OK

        out = capsys.readouterr().out
        assert "dim 4" in out
        assert "ambient_dim 9" in out

    def test_geometric_assignment_without_x(self, operator, capsys):
        assert main(["assign", "--operator", operator("geometric"), "--imax", "1"]) == EXIT_OK

        out = capsys.readouterr().out
        assert "map e6 -> u5" in out
        assert "map e0 -> u629" in out
        assert "summability OK" in out


class TestExitCodes:
    def test_corrupted_u_fails_verification(self, operator, capsys):
        assert main(["verify", "--operator", operator("corrupted_u"), "--imax", "1"]) == EXIT_VERIFICATION

        out = capsys.readouterr().out
        assert "CHECK assignment_consistency" in out
        assert "FAIL" in out

    def test_malformed_document(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{ not json", encoding="utf-8")

        assert main(["inspect", "--operator", str(path)]) == EXIT_PARSE
        assert capsys.readouterr().err.startswith("error:")

    def test_missing_file(self, tmp_path):
        assert main(["inspect", "--operator", str(tmp_path / "absent.json")]) == EXIT_PARSE

    def test_required_x_is_infeasible(self, operator, capsys):
        assert main(["assign", "--operator", operator("geometric"), "--required-x", "1"]) == EXIT_INFEASIBLE
        assert "admissible" in capsys.readouterr().err

    def test_derivative_above_limit(self, operator, tmp_path):
        code = main([
            "eval", "--operator", operator("rank_one"), "--imax", "1",
            "--deriv", "2", "0", "--out", str(tmp_path / "grid.csv"),
        ])

        assert code == EXIT_PARSE

    def test_eval_requires_out(self, operator):
        assert main(["eval", "--operator", operator("rank_one")]) == EXIT_PARSE

    def test_invalid_override(self, operator):
        assert main(["inspect", "--operator", operator("rank_one"), "--grid", "0"]) == EXIT_PARSE

    def test_ambient_dimension_below_operator_dimension(self, operator, capsys):
        assert main(["assign", "--operator", operator("rank_one"), "--ambient-dim", "2"]) == EXIT_PARSE
        assert "pad" in capsys.readouterr().err
