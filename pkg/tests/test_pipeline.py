import csv
import json
import shutil
from dataclasses import replace

import pytest

from ecobench.cli import main
from ecobench.errors import NumericalError, StageError, ValidationError
from ecobench.pipeline import STAGES, load_config, run_pipeline, run_stages

ANALYTICAL = (
    "ranking.csv", "ranking_full.csv", "pairs_similarity.csv", "pairs_similarity_full.csv",
    "pairs_benchmark.csv", "pairs_benchmark_full.csv", "group_stats.json", "group_stats_full.json",
    "improvement.json", "improvement_full.json", "similarity.graphml", "similarity.dot",
    "benchmark.graphml", "benchmark.dot", "drop_report.csv", "similarity_excluded.csv",
    "eci.csv", "lp_stats.csv", "correlation.csv",
)


def _csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def fixture_run(tmp_path_factory, fixture_cfg):
    out = tmp_path_factory.mktemp("run")
    manifest = run_pipeline(load_config(fixture_cfg), out=out)
    return out, manifest


def test_every_file_written(fixture_run):
    out, manifest = fixture_run
    for name in ANALYTICAL + ("manifest.json",):
        assert (out / name).is_file(), name
    assert set(manifest.outputs) == set(ANALYTICAL)


def test_ranking_matches_external_eci(fixture_run, countries_2014):
    out, _ = fixture_run
    rows = {r["country"]: r for r in _csv(out / "ranking.csv")}
    assert len(rows) == 99
    jpn = rows["JPN"]
    assert (jpn["eci"], jpn["co2_pc"], jpn["ef_pc"]) == ("2.3200", "9.5400", "4.7100")
    ranks = sorted(int(r["rank"]) for r in rows.values())
    assert ranks == list(range(1, 100))


def test_countries_in_ranking_or_drop_report(tmp_path, fixture_cfg):
    src = fixture_cfg.parent
    (tmp_path / "eci.csv").write_text(
        "\n".join(l for l in (src / "eci_2014.csv").read_text().splitlines() if not l.startswith("ZWE")) + "\n"
    )
    env = (src / "environment.csv").read_text().replace("ALB,1.98,2.04", "ALB,0,2.04")
    (tmp_path / "env.csv").write_text(env + "XXX,1,1\n")
    cfg = load_config(fixture_cfg, environment=tmp_path / "env.csv", eci_file=tmp_path / "eci.csv")
    run_pipeline(cfg, out=tmp_path / "out")
    ranked = {r["country"] for r in _csv(tmp_path / "out" / "ranking.csv")}
    dropped = {r["country"]: r["reason"] for r in _csv(tmp_path / "out" / "drop_report.csv")}
    assert not ranked & set(dropped)
    assert ranked | set(dropped) == {r.split(",")[0] for r in env.splitlines()[1:]} | {"XXX"}
    assert dropped["ZWE"].startswith("eci:")
    assert dropped["XXX"] == "ingest: no export records"
    assert "non-positive" in dropped["ALB"]


def test_rerun_is_byte_identical(fixture_run, tmp_path, fixture_cfg):
    out, manifest = fixture_run
    again = run_pipeline(load_config(fixture_cfg), out=tmp_path)
    for name in ANALYTICAL:
        assert (out / name).read_bytes() == (tmp_path / name).read_bytes(), name
    assert again.outputs == manifest.outputs
    a, b = manifest.as_dict(), again.as_dict()
    for d in (a, b):
        d.pop("timing")
        d["config"].pop("output")
    assert a == b


def test_manifest_contents(fixture_run):
    out, _ = fixture_run
    m = json.loads((out / "manifest.json").read_text())
    assert m["tool"] == "ecobench"
    assert m["counts"]["panel"] == 99 and m["counts"]["ranked"] == 99
    assert m["counts"]["non_primary_products"] == 432 and m["counts"]["products"] == 774
    assert set(m["inputs"]) == {"exports", "environment", "income_groups", "product_classes", "eci_file"}
    assert all(len(v["sha256"]) == 64 for v in m["inputs"].values())
    assert "total" in m["timing"]


def test_missing_environment_file_names_path(tmp_path, fixture_cfg):
    cfg = load_config(fixture_cfg, validate=False, environment=tmp_path / "nope.csv")
    with pytest.raises(StageError) as err:
        run_pipeline(cfg, out=tmp_path / "o")
    assert "nope.csv" in str(err.value)
    assert err.value.entity == str(tmp_path / "nope.csv")


def test_numerical_stage_error_wrapped(tmp_path, fixture_cfg):
    cfg = load_config(fixture_cfg, target_degree=150.0)
    with pytest.raises(StageError) as err:
        run_pipeline(cfg, out=tmp_path)
    assert err.value.stage == "network"
    assert isinstance(err.value.cause, NumericalError)


def test_config_rules(tmp_path, fixture_cfg):
    assert load_config(fixture_cfg, threshold=0.445).target_degree is None
    assert load_config(fixture_cfg).threshold is None
    with pytest.raises(ValidationError):
        load_config(fixture_cfg, eci_mode="compute")
    p = tmp_path / "c.cfg"
    p.write_text(f"exports = {fixture_cfg.parent / 'exports.csv'}\nenvironment = x.csv\n")
    with pytest.raises(ValidationError, match="environment file not found"):
        load_config(p)
    p.write_text("colour = blue\n")
    with pytest.raises(ValidationError, match="unknown key"):
        load_config(p)


def test_partial_stages_stop_early(fixture_cfg):
    res = run_stages(load_config(fixture_cfg), until="repr")
    assert res.stage == "repr" and res.corr is None and len(res.ranking) == 99


def test_compute_mode_runs(tmp_path, fixture_cfg):
    cfg = replace(load_config(fixture_cfg), eci_mode="compute", eci_file=None).validate()
    run_pipeline(cfg, out=tmp_path)
    ranked = _csv(tmp_path / "ranking.csv")
    dropped = _csv(tmp_path / "drop_report.csv")
    assert len(ranked) + len(dropped) == 99


@pytest.mark.parametrize("stage", STAGES)
def test_cli_subcommands(stage, tmp_path, capsys):
    assert main([stage, "--fixture", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "manifest.json").is_file()
    if stage == "ingest":
        assert (tmp_path / "panel_exports.csv").is_file()
    if stage == "eci":
        assert (tmp_path / "rca.csv").is_file()


def test_cli_overrides_and_exit_codes(tmp_path, fixture_cfg, capsys):
    assert main(["run", "--config", str(fixture_cfg), "--out", str(tmp_path / "a"),
                 "--threshold", "0.5", "--partner-rule", "similarity"]) == 0
    m = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert m["config"]["threshold"] == 0.5 and m["config"]["partner_rule"] == "similarity"
    assert main(["run", "--fixture", "--out", str(tmp_path / "b"), "--environment", "missing.csv"]) == 1
    assert "missing.csv" in capsys.readouterr().err
    assert main(["network", "--fixture", "--out", str(tmp_path / "c"), "--target-degree", "150"]) == 2


def test_cli_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["repr", "--fixture", "--out", str(blocker / "sub")]) == 1


def test_config_paths_relative_to_file(tmp_path, fixture_cfg):
    shutil.copytree(fixture_cfg.parent, tmp_path / "fx")
    (tmp_path / "income_groups.csv").write_bytes((fixture_cfg.parent.parent / "income_groups.csv").read_bytes())
    cfg = load_config(tmp_path / "fx" / "fixture.cfg")
    assert cfg.exports == tmp_path / "fx" / "exports.csv"
