import pytest

from plot_acceptance import PlotError, PlotSpec, main, render

GOLDEN = """policy,bucket,runs,passes,acceptance_ratio
gedf_rad,0.500000,40,40,1.000000
gedf_rad,0.600000,35,30,0.857143
gedf_rad,0.700000,30,10,0.333333
rm,0.500000,40,40,1.000000
rm,0.600000,35,20,0.571429
rm,0.700000,30,2,0.066667
wc_fifo,0.500000,40,30,0.750000
wc_fifo,0.600000,35,5,0.142857
wc_fifo,0.700000,30,0,0.000000
"""


@pytest.fixture
def golden_csv(tmp_path):
    path = tmp_path / "summary.csv"
    path.write_text(GOLDEN)
    return path


def test_three_series_and_unit_y_axis(golden_csv, tmp_path):
    out = tmp_path / "fig.svg"
    render(PlotSpec(str(golden_csv), str(out)))
    svg = out.read_text()
    assert svg.count('id="series-') == 3
    for policy in ("gedf_rad", "wc_fifo", "rm"):
        assert f'id="series-{policy}"' in svg
    assert ">0.0<" in svg and ">1.0<" in svg  # y tick labels span [0, 1]


def test_rerun_is_byte_identical(golden_csv, tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render(PlotSpec(str(golden_csv), str(a)))
    render(PlotSpec(str(golden_csv), str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_min_runs_filter(tmp_path):
    csv_path = tmp_path / "summary.csv"
    csv_path.write_text(
        "policy,bucket,runs,passes,acceptance_ratio\n"
        "gedf_rad,0.500000,100,90,0.900000\n"
        "gedf_rad,0.950000,3,0,0.000000\n")
    out = tmp_path / "fig.svg"
    render(PlotSpec(str(csv_path), str(out), min_runs=20))
    # the low-population bucket is dropped: single point, no 0.95 x tick label
    svg = out.read_text()
    assert 'id="series-gedf_rad"' in svg


def test_single_bucket_still_renders(tmp_path):
    csv_path = tmp_path / "summary.csv"
    csv_path.write_text("policy,bucket,runs,passes,acceptance_ratio\n"
                        "gedf_rad,0.500000,100,90,0.900000\n")
    out = tmp_path / "fig.svg"
    render(PlotSpec(str(csv_path), str(out)))
    assert out.exists()


def test_empty_csv_is_error(tmp_path):
    csv_path = tmp_path / "summary.csv"
    csv_path.write_text("")
    with pytest.raises(PlotError):
        render(PlotSpec(str(csv_path), str(tmp_path / "fig.svg")))


def test_header_only_csv_is_error(tmp_path):
    csv_path = tmp_path / "summary.csv"
    csv_path.write_text("policy,bucket,runs,passes,acceptance_ratio\n")
    with pytest.raises(PlotError):
        render(PlotSpec(str(csv_path), str(tmp_path / "fig.svg")))


def test_missing_column_named_in_error(tmp_path, capsys):
    csv_path = tmp_path / "summary.csv"
    csv_path.write_text("policy,bucket,runs\ngedf_rad,0.5,10\n")
    rc = main(["--in", str(csv_path), "--out", str(tmp_path / "fig.svg")])
    assert rc == 1
    assert "passes" in capsys.readouterr().err


def test_cli_smoke(golden_csv, tmp_path):
    out = tmp_path / "fig.svg"
    assert main(["--in", str(golden_csv), "--out", str(out), "--min-runs", "20"]) == 0
    assert out.exists()
