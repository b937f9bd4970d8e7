"""End-to-end tests of the command line driver, run in process."""

import math
import textwrap
import xml.dom.minidom

import pytest

from mnac import cli
from mnac.cli import CAPACITY_COLUMNS, SWEEP_COLUMNS, main

_SWEEP_INI = """\
[network]
devices = 12
active = 2
sampling_prob = 0.3

[channel]
snr_db = 10
threshold = 0.9

[sweep]
n = 8, 15
trials = 30
seed = 7
criteria = exact, partial:50

[decoders]
names = ncomp, bp_st
"""


def _write(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text), encoding="utf-8")
    return str(path)


def _read_rows(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    return lines[0], [tuple(line.split(",")) for line in lines[1:]]


def _sweep(tmp_path, ini_text=_SWEEP_INI, extra=(), name="exp.ini"):
    cfg = _write(tmp_path, ini_text, name=name)
    rc = main(["sweep", "--config", cfg, "--out", str(tmp_path), *extra])
    return rc, tmp_path / "sweep.csv"


class TestSweep:
    def test_schema_and_ordering(self, tmp_path):
        rc, out = _sweep(tmp_path)
        assert rc == 0
        header, rows = _read_rows(out)
        assert header == ",".join(SWEEP_COLUMNS)
        assert header == ("ell,k,n,snr_db,q_sp,gamma,decoder,criterion,"
                          "zeta,trials,successes,success_prob,stderr")
        assert len(rows) == 8
        # canonical sort: snr, then n, decoder, criterion, zeta
        keys = [(float(r[3]), int(r[2]), r[6], r[7], float(r[8]))
                for r in rows]
        assert keys == sorted(keys)
        for r in rows:
            assert (r[0], r[1]) == ("12", "2")
            assert r[4] == "0.3" and r[5] == "0.9"
            assert r[9] == "30"
            assert 0 <= int(r[10]) <= 30
            # CSV reals carry 12 significant digits, so compare to that
            p = float(r[11])
            assert p == pytest.approx(int(r[10]) / 30, rel=1e-11)
            assert float(r[12]) == pytest.approx(
                math.sqrt(p * (1 - p) / 30), rel=1e-10, abs=1e-12)

    def test_rerun_identical_and_cached(self, tmp_path, capsys):
        rc, out = _sweep(tmp_path)
        assert rc == 0
        first = out.read_bytes()
        capsys.readouterr()
        rc2, _ = _sweep(tmp_path)
        assert rc2 == 0
        assert out.read_bytes() == first
        # every cell was cached, so no per-cell work lines appear
        assert "decoder(s)" not in capsys.readouterr().out

    def test_resume_matches_single_shot(self, tmp_path, capsys):
        rc, out = _sweep(tmp_path)
        assert rc == 0
        full = out.read_bytes()
        out.unlink()
        partial_ini = _SWEEP_INI.replace("n = 8, 15", "n = 8")
        rc1, _ = _sweep(tmp_path, partial_ini, name="part.ini")
        assert rc1 == 0
        capsys.readouterr()
        rc2, _ = _sweep(tmp_path)
        assert rc2 == 0
        assert out.read_bytes() == full
        resumed = capsys.readouterr().out
        assert "n=8:" not in resumed
        assert "n=15:" in resumed

    def test_trials_and_seed_overrides(self, tmp_path):
        lean = _SWEEP_INI.replace("names = ncomp, bp_st", "names = ncomp") \
                         .replace("criteria = exact, partial:50",
                                  "criteria = exact")
        rc, out = _sweep(tmp_path, lean, extra=["--trials", "12"])
        assert rc == 0
        _, rows = _read_rows(out)
        assert all(r[9] == "12" for r in rows)
        out.unlink()
        rc, out = _sweep(tmp_path, lean, extra=["--seed", "9"])
        assert rc == 0
        _, rows_seed9 = _read_rows(out)
        out.unlink()
        rc, out = _sweep(tmp_path, lean)
        assert rc == 0
        _, rows_seed7 = _read_rows(out)
        assert [r[10] for r in rows_seed9] != [r[10] for r in rows_seed7]

    def test_thread_env_invariance(self, tmp_path, monkeypatch):
        blobs = []
        for threads in ("1", "4"):
            monkeypatch.setenv("MNAC_THREADS", threads)
            rc, out = _sweep(tmp_path)
            assert rc == 0
            blobs.append(out.read_bytes())
            out.unlink()
        assert blobs[0] == blobs[1]

    def test_two_snr_points_sorted(self, tmp_path):
        ini = _SWEEP_INI.replace("snr_db = 10", "snr_db = 10, 0") \
                        .replace("names = ncomp, bp_st", "names = ncomp") \
                        .replace("criteria = exact, partial:50",
                                 "criteria = exact") \
                        .replace("trials = 30", "trials = 3")
        rc, out = _sweep(tmp_path, ini)
        assert rc == 0
        _, rows = _read_rows(out)
        assert [(r[3], r[2]) for r in rows] == [
            ("0", "8"), ("0", "15"), ("10", "8"), ("10", "15")]

    def test_unknown_k_criterion_encoding(self, tmp_path):
        ini = _SWEEP_INI.replace("criteria = exact, partial:50",
                                 "criteria = unknown_k:90:0.5") \
                        .replace("names = ncomp, bp_st", "names = ncomp") \
                        .replace("trials = 30", "trials = 3")
        rc, out = _sweep(tmp_path, ini)
        assert rc == 0
        _, rows = _read_rows(out)
        assert all(r[7] == "unknown_k@0.5" and r[8] == "90" for r in rows)

    def test_colon_grid_is_inclusive(self, tmp_path):
        ini = _SWEEP_INI.replace("n = 8, 15", "n = 10:20:5") \
                        .replace("names = ncomp, bp_st", "names = ncomp") \
                        .replace("criteria = exact, partial:50",
                                 "criteria = exact") \
                        .replace("trials = 30", "trials = 3")
        rc, out = _sweep(tmp_path, ini)
        assert rc == 0
        _, rows = _read_rows(out)
        assert [r[2] for r in rows] == ["10", "15", "20"]

    def test_auto_threshold_resolved_per_snr(self, tmp_path, capsys):
        ini = _SWEEP_INI.replace("threshold = 0.9", "threshold = auto") \
                        .replace("names = ncomp, bp_st", "names = ncomp") \
                        .replace("criteria = exact, partial:50",
                                 "criteria = exact") \
                        .replace("trials = 30", "trials = 3")
        rc, out = _sweep(tmp_path, ini)
        assert rc == 0
        assert "operating point" in capsys.readouterr().out
        _, rows = _read_rows(out)
        assert all(float(r[5]) > 0.0 for r in rows)

    def test_decoder_knob_section(self, tmp_path):
        ini = _SWEEP_INI.replace("names = ncomp, bp_st", "names = bp_aht") \
                        .replace("criteria = exact, partial:50",
                                 "criteria = exact") \
                        .replace("trials = 30", "trials = 5") \
            + "\n[decoder.bp_aht]\neta = 0.4\n"
        rc, out = _sweep(tmp_path, ini)
        assert rc == 0
        _, rows = _read_rows(out)
        assert [r[6] for r in rows] == ["bp_aht", "bp_aht"]


class TestSweepFailures:
    @pytest.mark.parametrize("mangle", [
        lambda s: s.replace("[decoders]\nnames = ncomp, bp_st\n", ""),
        lambda s: s + "\n[extra]\nfoo = 1\n",
        lambda s: s.replace("devices = 12", "devices = 12\ncolor = blue"),
        lambda s: s.replace("names = ncomp, bp_st", "names = ncomp, ncomp"),
        lambda s: s.replace("names = ncomp, bp_st", "names = turbo"),
        lambda s: s.replace("criteria = exact, partial:50",
                            "criteria = exact, exact"),
        lambda s: s.replace("criteria = exact, partial:50",
                            "criteria = partial"),
        lambda s: s.replace("n = 8, 15", "n = 15:8:1"),
        lambda s: s.replace("n = 8, 15", "n = 8, 8"),
        lambda s: s.replace("threshold = 0.9",
                            "threshold = 0.9\non_power = 1.0"),
        lambda s: s.replace("snr_db = 10\nthreshold = 0.9", "threshold = 0.9"),
        lambda s: s.replace("active = 2", "active = 12"),
        lambda s: s.replace("sampling_prob = 0.3", "sampling_prob = 1.5"),
        lambda s: s.replace("trials = 30", "trials = 0"),
    ])
    def test_bad_config_exits_2(self, tmp_path, capsys, mangle):
        rc, out = _sweep(tmp_path, mangle(_SWEEP_INI))
        assert rc == 2
        assert not out.exists()
        assert capsys.readouterr().err.startswith("error:")

    def test_bad_overrides_exit_2(self, tmp_path):
        rc, out = _sweep(tmp_path, extra=["--trials", "0"])
        assert rc == 2 and not out.exists()
        rc, out = _sweep(tmp_path, extra=["--seed", "-1"])
        assert rc == 2 and not out.exists()

    def test_missing_config_exits_2(self, tmp_path):
        rc = main(["sweep", "--config", str(tmp_path / "nope.ini"),
                   "--out", str(tmp_path)])
        assert rc == 2

    def test_decoder_knob_typos_exit_2(self, tmp_path):
        ini = _SWEEP_INI + "\n[decoder.bp_st]\netah = 0.4\n"
        rc, out = _sweep(tmp_path, ini)
        assert rc == 2 and not out.exists()
        ini = _SWEEP_INI + "\n[decoder.bp_st]\neta = 1.5\n"
        rc, out = _sweep(tmp_path, ini)
        assert rc == 2 and not out.exists()

    def test_enumeration_cap_markers_exit_3(self, tmp_path, capsys):
        # C(12,2) = 66 exceeds the cap, so ml rows become markers
        ini = _SWEEP_INI.replace("names = ncomp, bp_st", "names = ml, ncomp") \
            + "\n[decoder.ml]\nenumeration_cap = 50\n"
        rc, out = _sweep(tmp_path, ini)
        assert rc == 3
        assert "skipped ml" in capsys.readouterr().err
        _, rows = _read_rows(out)
        markers = [r for r in rows if r[6] == "ml"]
        live = [r for r in rows if r[6] == "ncomp"]
        assert len(markers) == 4 and len(live) == 4
        assert all(r[9:] == ("0", "0", "nan", "nan") for r in markers)
        assert all(r[9] == "30" for r in live)
        # a second run keeps the markers and stays infeasible
        assert _sweep(tmp_path, ini)[0] == 3

    def test_population_too_small_for_partition(self, tmp_path):
        # algorithm1 needs ell >= 2k to place the level thresholds
        ini = _SWEEP_INI.replace("devices = 12", "devices = 3") \
                        .replace("names = ncomp, bp_st", "names = algorithm1") \
                        .replace("trials = 30", "trials = 2")
        rc, out = _sweep(tmp_path, ini)
        assert rc == 3
        _, rows = _read_rows(out)
        assert all(r[9] == "0" for r in rows)


_CAPACITY_INI = """\
[network]
devices = 50
active = 3

[channel]
snr_db = 0, 10

[capacity]
alpha = 0.5
"""


class TestCapacity:
    def test_report_csv(self, tmp_path, capsys):
        cfg = _write(tmp_path, _CAPACITY_INI)
        rc = main(["capacity", "--config", cfg, "--out", str(tmp_path)])
        assert rc == 0
        header, rows = _read_rows(tmp_path / "capacity.csv")
        assert header == ",".join(CAPACITY_COLUMNS)
        assert [r[0] for r in rows] == ["0", "10"]
        for r in rows:
            cap, gamma, q, n, n0, lb = map(float, r[1:])
            assert 0.0 < cap <= 1.0
            assert gamma > 0.0 and 0.0 < q < 1.0
            assert n0 < n
            assert lb == pytest.approx(0.5 * n, rel=1e-10)
        out = capsys.readouterr().out
        assert "capacity=" in out and "wrote" in out

    def test_bad_alpha_exits_2(self, tmp_path):
        cfg = _write(tmp_path, _CAPACITY_INI.replace("alpha = 0.5",
                                                     "alpha = 1.0"))
        assert main(["capacity", "--config", cfg,
                     "--out", str(tmp_path)]) == 2


def _fake_sweep_csv(tmp_path, rows, name="sweep.csv"):
    path = tmp_path / name
    lines = [",".join(SWEEP_COLUMNS)]
    lines += [",".join(r) for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _row(ell="12", k="2", n="20", snr="10", q="0.3", g="0.9",
         decoder="bp_st", crit="exact", zeta="100", trials="10",
         successes="7", p="0.7", se="0.1449"):
    return (ell, k, n, snr, q, g, decoder, crit, zeta, trials, successes,
            p, se)


@pytest.fixture(scope="module")
def sweep_csv(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("plotdata")
    rc, out = _sweep(tmp)
    assert rc == 0
    return out


class TestPlot:
    def test_success_plot(self, sweep_csv, tmp_path):
        rc = main(["plot", str(sweep_csv), "--kind", "success",
                   "--out", str(tmp_path)])
        assert rc == 0
        svg = (tmp_path / "success.svg").read_text(encoding="utf-8")
        xml.dom.minidom.parseString(svg)
        assert "Number of channel-uses, n" in svg
        assert "Probability of successful identification" in svg
        assert "ncomp, exact" in svg and "bp_st, partial 50%" in svg

    def test_success_plot_deterministic(self, sweep_csv, tmp_path):
        outs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            assert main(["plot", str(sweep_csv), "--out", str(out)]) == 0
            outs.append((out / "success.svg").read_bytes())
        assert outs[0] == outs[1]

    def test_cost_plot(self, sweep_csv, tmp_path):
        rc = main(["plot", str(sweep_csv), "--kind", "cost",
                   "--out", str(tmp_path), "--decoder", "bp_st",
                   "--criterion", "partial:50"])
        assert rc == 0
        svg = (tmp_path / "cost.svg").read_text(encoding="utf-8")
        xml.dom.minidom.parseString(svg)
        assert "SNR (dB)" in svg
        assert "theory minimum" in svg

    def test_single_point_curve(self, tmp_path):
        csv_path = _fake_sweep_csv(tmp_path, [_row()])
        rc = main(["plot", str(csv_path), "--out", str(tmp_path)])
        assert rc == 0
        svg = (tmp_path / "success.svg").read_text(encoding="utf-8")
        xml.dom.minidom.parseString(svg)

    def test_markers_are_dropped(self, tmp_path, capsys):
        rows = [_row(),
                _row(decoder="ml", trials="0", successes="0", p="nan",
                     se="nan")]
        csv_path = _fake_sweep_csv(tmp_path, rows)
        assert main(["plot", str(csv_path), "--out", str(tmp_path)]) == 0
        svg = (tmp_path / "success.svg").read_text(encoding="utf-8")
        assert "bp_st, exact" in svg
        assert "ml, exact" not in svg

    def test_only_markers_exits_2(self, tmp_path):
        rows = [_row(trials="0", successes="0", p="nan", se="nan")]
        csv_path = _fake_sweep_csv(tmp_path, rows)
        assert main(["plot", str(csv_path), "--out", str(tmp_path)]) == 2

    def test_header_errors_name_columns(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        cols = [c for c in SWEEP_COLUMNS if c != "stderr"] + ["notes"]
        bad.write_text(",".join(cols) + "\n", encoding="utf-8")
        rc = main(["plot", str(bad), "--out", str(tmp_path)])
        assert rc == 2
        err = capsys.readouterr().err
        assert "'stderr'" in err and "'notes'" in err

    def test_missing_file_exits_4(self, tmp_path):
        rc = main(["plot", str(tmp_path / "absent.csv"),
                   "--out", str(tmp_path)])
        assert rc == 4

    def test_mixed_geometry_exits_2(self, tmp_path):
        rows = [_row(), _row(ell="40", k="3")]
        csv_path = _fake_sweep_csv(tmp_path, rows)
        assert main(["plot", str(csv_path), "--out", str(tmp_path)]) == 2

    def test_bad_target_exits_2(self, tmp_path):
        csv_path = _fake_sweep_csv(tmp_path, [_row()])
        rc = main(["plot", str(csv_path), "--out", str(tmp_path),
                   "--target-success", "0"])
        assert rc == 2

    def test_unparsable_row_exits_2(self, tmp_path):
        csv_path = _fake_sweep_csv(tmp_path, [_row(n="many")])
        assert main(["plot", str(csv_path), "--out", str(tmp_path)]) == 2


class TestParserHelpers:
    def test_n_grid_forms(self):
        assert cli._parse_n_grid("5", "x") == [5]
        assert cli._parse_n_grid("30, 10, 20", "x") == [10, 20, 30]
        assert cli._parse_n_grid("2:11:3", "x") == [2, 5, 8, 11]
        with pytest.raises(cli.ConfigError):
            cli._parse_n_grid("1:10", "x")
        with pytest.raises(cli.ConfigError):
            cli._parse_n_grid("0:10:2", "x")

    def test_criterion_forms(self):
        assert cli._parse_criterion("exact", "x").kind == "exact"
        c = cli._parse_criterion("partial:90", "x")
        assert (c.kind, c.zeta) == ("partial", 90.0)
        c = cli._parse_criterion("unknown_k:80:0.2", "x")
        assert (c.kind, c.zeta, c.size_deviation) == \
            ("partial_unknown_k", 80.0, 0.2)
        for bad in ("exact:5", "partial", "unknown_k:90", "partial:0",
                    "mystery"):
            with pytest.raises(cli.ConfigError):
                cli._parse_criterion(bad, "x")

    def test_comments_and_whitespace_tolerated(self, tmp_path):
        ini = _SWEEP_INI.replace("trials = 30", "trials = 5  # keep it quick")
        rc, out = _sweep(tmp_path, ini)
        assert rc == 0
        _, rows = _read_rows(out)
        assert all(r[9] == "5" for r in rows)
