from pathlib import Path

import pytest

from pracfigs.render import DataError, FigureSpec, SchemaError, main, render

DATA = Path(__file__).parent / "data"

SAMPLES = {
    "sweep": DATA / "sweep.csv",
    "overhead_bars": DATA / "overhead.csv",
    "policy_breakdown": DATA / "policy_breakdown.csv",
}


@pytest.mark.parametrize("kind", sorted(SAMPLES))
def test_renders_each_kind(kind, tmp_path):
    out = tmp_path / f"{kind}.png"
    written = render(FigureSpec(str(SAMPLES[kind]), kind, str(out)))
    assert Path(written) == out
    assert out.stat().st_size > 0
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


@pytest.mark.parametrize("kind", sorted(SAMPLES))
def test_rendering_is_deterministic(kind, tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render(FigureSpec(str(SAMPLES[kind]), kind, str(a)))
    render(FigureSpec(str(SAMPLES[kind]), kind, str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_missing_columns_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("trace,policy\nfoo,open\n")
    with pytest.raises(SchemaError, match="oh_frac"):
        render(FigureSpec(str(bad), "overhead_bars", str(tmp_path / "o.png")))
    with pytest.raises(SchemaError, match="rbmpki_default"):
        render(FigureSpec(str(bad), "overhead_bars", str(tmp_path / "o.png")))


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(SchemaError):
        FigureSpec(str(SAMPLES["sweep"]), "pie", str(tmp_path / "o.png"))


def test_stacked_rows_must_sum_to_one(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("policy,hit_ratio,empty_ratio,miss_ratio,total_cycles,cycles_norm_open\n"
                   "open,0.5,0.1,0.1,100,1.0\n")
    with pytest.raises(DataError, match="hit\\+empty\\+miss"):
        render(FigureSpec(str(bad), "policy_breakdown", str(tmp_path / "o.png")))


def test_empty_csv_rejected(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("param,value_ns,period_ns_simulated,period_ns_oracle\n")
    with pytest.raises(DataError, match="no data rows"):
        render(FigureSpec(str(empty), "sweep", str(tmp_path / "o.png")))


class TestCli:
    def test_happy_path(self, tmp_path):
        out = tmp_path / "sweep.png"
        rc = main(["sweep", str(SAMPLES["sweep"]), str(out), "--title", "demo"])
        assert rc == 0
        assert out.exists()

    def test_schema_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        rc = main(["overhead_bars", str(bad), str(tmp_path / "o.png")])
        assert rc == 2
        err = capsys.readouterr().err
        assert "oh_frac" in err and "trace" in err

    def test_sum_violation_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("policy,hit_ratio,empty_ratio,miss_ratio,cycles_norm_open\n"
                       "open,0.9,0.3,0.1,1.0\n")
        rc = main(["policy_breakdown", str(bad), str(tmp_path / "o.png")])
        assert rc == 2

    def test_missing_input_exit_code(self, tmp_path, capsys):
        rc = main(["sweep", str(tmp_path / "nope.csv"), str(tmp_path / "o.png")])
        assert rc == 2
