import json

import pytest

from truthfit.cli import ASYMPTOTICS_HEADER, REGION_HEADER, fmt9, main

FLAGSHIP_IC = [
    "deviation x=1->r=0: truth=3.390625 deviation=2.453125 margin=-0.9375"
    " violated=true trivial=false",
    "deviation x=0->r=1: truth=1.515625 deviation=4.328125 margin=2.8125"
    " violated=false trivial=false",
    "verdict: violated (tolerance 1e-12)",
]

REGION_ARGS = [
    "region",
    "--noise", "bernoulli:p=0.75",
    "--beta1-start", "1", "--beta1-stop", "3", "--beta1-step", "1",
    "--c0-start", "4", "--c0-stop", "8", "--c0-step", "4",
]

REGION_BODY = [
    "1,4,-0.375,1.125,true,true,false",
    "1,8,-0.9375,2.8125,true,true,true",
    "2,4,0,4.5,false,false,false",
    "2,8,0,4.5,false,false,false",
    "3,4,9.1875,9.9375,false,false,false",
    "3,8,1.3125,6.5625,false,false,false",
]


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_fmt9():
    assert fmt9(-0.0) == "0"
    assert fmt9(0.0) == "0"
    assert fmt9(2.0) == "2"
    assert fmt9(0.1875) == "0.1875"
    assert fmt9(1.0 / 3.0) == "0.333333333"
    assert fmt9(1e-12) == "1e-12"


def test_estimate_worked_example(capsys):
    code, out, err = run(
        capsys,
        ["estimate", "--ybar0", "0", "--ybar1", "2", "--c1", "0.5"],
    )
    assert code == 0
    assert out == "b0=0.25\nb1=1.5\nincluded=true\n"
    assert err == ""


def test_estimate_missing_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["estimate", "--ybar0", "0"])
    assert exc.value.code == 2


def test_no_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_ic_flagship_violation(capsys):
    code, out, err = run(
        capsys,
        ["ic", "--noise", "bernoulli:p=0.75", "--beta1", "1", "--c0", "8"],
    )
    assert code == 3
    assert out.splitlines() == FLAGSHIP_IC


def test_ic_gaussian_holds(capsys):
    code, out, _ = run(
        capsys,
        ["ic", "--noise", "gaussian:sigma=1", "--beta1", "1", "--c0", "1", "--c1", "0.5"],
    )
    assert code == 0
    assert out.splitlines()[-1] == "verdict: ic (tolerance 1e-07)"
    assert "margin=0.549297403 " in out


def test_ic_degenerate(capsys):
    code, out, _ = run(
        capsys,
        ["ic", "--noise", "degenerate", "--beta1", "5", "--c0", "2", "--c1", "1"],
    )
    assert code == 0
    assert "truth=0.25 deviation=20.25 margin=20 " in out


def test_ic_needs_beta1_or_prior(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["ic", "--noise", "degenerate"])
    assert exc.value.code == 2


def test_ic_bad_noise_grammar(capsys):
    code, out, err = run(capsys, ["ic", "--noise", "cauchy:gamma=1", "--beta1", "1"])
    assert code == 2
    assert out == ""
    assert err.startswith("error:")


def test_ic_prior_file(capsys, tmp_path):
    prior = tmp_path / "prior.txt"
    prior.write_text("# beta0 beta1 weight\n0 10 0.5\n1 2 0.5\n")
    code, out, _ = run(
        capsys,
        ["ic", "--noise", "bernoulli:p=0.75", "--prior", str(prior), "--c0", "8"],
    )
    assert code == 0
    assert "margin=50 " in out
    assert "margin=52.25 " in out


def test_ic_prior_point_mass_violates(capsys, tmp_path):
    prior = tmp_path / "prior.txt"
    prior.write_text("0 1 1\n")
    code, out, _ = run(
        capsys,
        ["ic", "--noise", "bernoulli:p=0.75", "--prior", str(prior), "--c0", "8"],
    )
    assert code == 3
    assert "margin=-0.9375 " in out


def test_ic_prior_bad_line(capsys, tmp_path):
    prior = tmp_path / "prior.txt"
    prior.write_text("0 1\n")
    code, _, err = run(
        capsys,
        ["ic", "--noise", "bernoulli:p=0.75", "--prior", str(prior)],
    )
    assert code == 5
    assert "bad prior line" in err


def test_ic_prior_file_missing(capsys, tmp_path):
    code, _, err = run(
        capsys,
        ["ic", "--noise", "degenerate", "--prior", str(tmp_path / "nope.txt")],
    )
    assert code == 4
    assert err.startswith("error:")


def test_region_csv(capsys):
    code, out, _ = run(capsys, REGION_ARGS)
    assert code == 0
    assert out.splitlines() == [REGION_HEADER] + REGION_BODY
    assert out.endswith("\n")


def test_region_reruns_byte_identical(capsys):
    _, first, _ = run(capsys, REGION_ARGS)
    _, second, _ = run(capsys, REGION_ARGS)
    assert first == second


def test_region_json_mirrors_csv(capsys):
    code, out, _ = run(capsys, REGION_ARGS + ["--format", "json"])
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == len(REGION_BODY)
    assert list(rows[0]) == REGION_HEADER.split(",")
    assert rows[1]["margin_x1"] == -0.9375
    assert rows[1]["violated"] is True
    assert rows[1]["refined_region"] is True
    assert rows[2]["violated"] is False


def test_region_empty_grid_is_header_only(capsys):
    args = [
        "region", "--noise", "bernoulli:p=0.75",
        "--beta1-start", "2", "--beta1-stop", "1", "--beta1-step", "1",
        "--c0-start", "4", "--c0-stop", "8", "--c0-step", "4",
    ]
    code, out, _ = run(capsys, args)
    assert code == 0
    assert out == REGION_HEADER + "\n"
    code, out, _ = run(capsys, args + ["--format", "json"])
    assert code == 0
    assert out == "[]\n"


def test_region_writes_file(capsys, tmp_path):
    target = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, REGION_ARGS + ["--output", str(target)])
    assert code == 0
    assert out == ""
    assert target.read_text().splitlines()[0] == REGION_HEADER


def test_region_rejects_non_bernoulli(capsys):
    code, _, err = run(
        capsys,
        ["region", "--noise", "gaussian:sigma=1"]
        + ["--beta1-start", "1", "--beta1-stop", "1", "--beta1-step", "1"]
        + ["--c0-start", "1", "--c0-stop", "1", "--c0-step", "1"],
    )
    assert code == 5
    assert "bernoulli" in err


def test_region_rejects_bad_step(capsys):
    with pytest.raises(SystemExit) as exc:
        main(
            ["region", "--noise", "bernoulli:p=0.75"]
            + ["--beta1-start", "1", "--beta1-stop", "2", "--beta1-step", "0"]
            + ["--c0-start", "1", "--c0-stop", "1", "--c0-step", "1"]
        )
    assert exc.value.code == 2


def test_region_unwritable_output(capsys):
    code, _, err = run(
        capsys, REGION_ARGS + ["--output", "/nonexistent-dir/sweep.csv"]
    )
    assert code == 4
    assert err.startswith("error:")


def test_asymptotics_csv(capsys):
    code, out, _ = run(
        capsys,
        ["asymptotics", "--p", "0.75", "--beta1", "1", "--c0", "8", "--n-list", "1,25"],
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ASYMPTOTICS_HEADER
    assert lines[1] == "1,0.1875,-1,3,5,-0.9375"
    assert lines[-1] == "limit,,-0.878679656,2.12132034,0.970562748,"
    assert len(lines) == 4


def test_asymptotics_json_limit_row(capsys):
    code, out, _ = run(
        capsys,
        ["asymptotics", "--p", "0.75", "--beta1", "1", "--c0", "8", "--n-list", "1",
         "--format", "json"],
    )
    assert code == 0
    rows = json.loads(out)
    assert rows[-1]["n"] == "limit"
    assert rows[-1]["pivot_prob"] is None
    assert rows[-1]["loss_gap"] is None
    assert rows[0]["ic_statistic"] == 5


def test_asymptotics_limit_statistic_sign(capsys):
    # beta1 = 1.3 > 8/7: in the limit the statistic must be negative
    code, out, _ = run(
        capsys,
        ["asymptotics", "--p", "0.75", "--beta1", "1.3", "--c0", "8", "--n-list", "1",
         "--format", "json"],
    )
    assert code == 0
    assert json.loads(out)[-1]["ic_statistic"] < 0.0


def test_asymptotics_bad_n_list(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["asymptotics", "--p", "0.75", "--beta1", "1", "--c0", "8",
              "--n-list", "1,foo"])
    assert exc.value.code == 2


def test_asymptotics_out_of_domain(capsys):
    code, _, err = run(
        capsys,
        ["asymptotics", "--p", "0.75", "--beta1", "20", "--c0", "0.5", "--n-list", "1"],
    )
    assert code == 5
    assert "theta_h" in err


def test_asymptotics_bad_p(capsys):
    code, _, err = run(
        capsys,
        ["asymptotics", "--p", "0.4", "--beta1", "1", "--c0", "8", "--n-list", "1"],
    )
    assert code == 5
    assert err.startswith("error:")


def test_config_file_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# fit inputs\nybar0 = 0\nybar1 = 2\nc1 = 0.5\n")
    code, out, _ = run(capsys, ["estimate", "--config", str(cfg)])
    assert code == 0
    assert out == "b0=0.25\nb1=1.5\nincluded=true\n"


def test_flags_override_config(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("ybar0=0\nybar1=2\nc1=0.5\n")
    code, out, _ = run(capsys, ["estimate", "--config", str(cfg), "--c1", "0"])
    assert code == 0
    assert out == "b0=0\nb1=2\nincluded=true\n"


def test_config_accepts_dashed_keys(capsys, tmp_path):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(
        "noise=bernoulli:p=0.75\n"
        "beta1-start=1\nbeta1-stop=1\nbeta1-step=1\n"
        "c0-start=8\nc0-stop=8\nc0-step=1\n"
    )
    code, out, _ = run(capsys, ["region", "--config", str(cfg)])
    assert code == 0
    assert out.splitlines()[1] == "1,8,-0.9375,2.8125,true,true,true"


def test_config_bad_line(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("ybar0: 0\n")
    with pytest.raises(SystemExit) as exc:
        main(["estimate", "--config", str(cfg)])
    assert exc.value.code == 2


def test_config_bad_value(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("ybar0=zero\nybar1=2\n")
    with pytest.raises(SystemExit) as exc:
        main(["estimate", "--config", str(cfg)])
    assert exc.value.code == 2


def test_config_file_missing(capsys, tmp_path):
    code, _, err = run(
        capsys, ["estimate", "--config", str(tmp_path / "absent.cfg")]
    )
    assert code == 4
    assert err.startswith("error:")
