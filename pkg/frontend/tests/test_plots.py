import subprocess
from pathlib import Path

import pytest

from tentplots._schema import SchemaError, read_density_dump, read_sweep_csv
from tentplots.oseledets import main as oseledets_main, plot_oseledets
from tentplots.sweep import main as sweep_main, plot_lambda2_sweep

FIXTURES = Path(__file__).parent / "fixtures"


def test_read_sweep_fixture():
    table = read_sweep_csv(FIXTURES / "sweep_iid_1e5.csv")
    assert len(table.rows) == 4
    assert table.column("eps") == sorted(table.column("eps"), reverse=True)
    assert "slope" in table.footer
    # prediction column is -eps * E[a+b] with E[a+b] = 1 for this fixture
    for row in table.rows:
        assert row["predicted"] == pytest.approx(-row["eps"], abs=1e-15)


def test_sweep_figure_from_fixture(tmp_path):
    out = tmp_path / "sweep.svg"
    plot_lambda2_sweep(FIXTURES / "sweep_iid_1e5.csv", out)
    body = out.read_text()
    assert out.stat().st_size > 0 and "<svg" in body


def test_sweep_cli_exit_codes(tmp_path):
    out = tmp_path / "fig.svg"
    assert sweep_main([str(FIXTURES / "sweep_iid_1e5.csv"), str(out)]) == 0
    assert out.exists()
    bad = tmp_path / "bad.csv"
    bad.write_text("alpha,beta\n1,2\n")
    assert sweep_main([str(bad), str(tmp_path / "x.svg")]) == 1
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert sweep_main([str(empty), str(tmp_path / "y.svg")]) == 1
    assert sweep_main([str(tmp_path / "missing.csv"), str(tmp_path / "z.svg")]) == 1
    assert sweep_main([str(bad)]) == 2  # wrong arity


def test_sweep_rejects_short_and_nonnumeric_rows(tmp_path):
    p = tmp_path / "short.csv"
    p.write_text("eps,lambda2,err,mc_lambda2,predicted\n0.01,-0.02\n")
    with pytest.raises(SchemaError):
        read_sweep_csv(p)
    p.write_text("eps,lambda2,err,mc_lambda2,predicted\n0.01,x,0,0,0\n")
    with pytest.raises(SchemaError):
        read_sweep_csv(p)
    p.write_text("eps,lambda2,err,mc_lambda2,predicted\n")
    with pytest.raises(SchemaError):
        read_sweep_csv(p)


def test_read_oseledets_fixtures():
    d0 = read_density_dump(FIXTURES / "oseledets_eps0.txt")
    assert float(d0.header["bv_norm"]) == 2.0  # exactly the sign function
    assert set(d0.values) == {-1.0, 1.0}
    d1 = read_density_dump(FIXTURES / "oseledets_eps001.txt")
    assert float(d1.header["bv_norm"]) <= float(d1.header.get("bv_envelope", 15))
    assert abs(float(d1.header["int_jplus"]) - 1.0) < 1e-12


def test_oseledets_figures(tmp_path):
    for name in ("oseledets_eps0.txt", "oseledets_eps001.txt"):
        out = tmp_path / (name + ".svg")
        plot_oseledets(FIXTURES / name, out)
        assert out.stat().st_size > 0 and "<svg" in out.read_text()


def test_oseledets_cli_missing_header_exits_nonzero(tmp_path):
    naked = tmp_path / "naked.txt"
    naked.write_text("-1.0 0.5\n0.0 1.0\n1.0 1.0\n")  # no bv_norm header
    assert oseledets_main([str(naked), str(tmp_path / "o.svg")]) == 1
    garbled = tmp_path / "garbled.txt"
    garbled.write_text("# bv_norm=2.0\n-1.0 1.0 7.0\n")
    assert oseledets_main([str(garbled), str(tmp_path / "p.svg")]) == 1
    assert oseledets_main([str(FIXTURES / "oseledets_eps0.txt"), str(tmp_path / "q.svg")]) == 0


def test_oseledets_rejects_decreasing_breakpoints(tmp_path):
    p = tmp_path / "dec.txt"
    p.write_text("# bv_norm=2.0\n-1.0 1.0\n0.5 1.0\n0.0 1.0\n1.0 1.0\n")
    with pytest.raises(SchemaError):
        read_density_dump(p)


def test_console_scripts_installed():
    for script in ("tentplots-sweep", "tentplots-oseledets"):
        proc = subprocess.run([script], capture_output=True, text=True)
        assert proc.returncode == 2  # usage error without arguments
        assert "usage" in proc.stderr
