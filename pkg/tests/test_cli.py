"""Command-line surface tests: outputs, envelopes, exit codes, determinism."""
import json
import math

import pytest

from magicbilliards.cli import main

HEADER = "i,x,y,vx,vy,lambda1,lambda2,caustic"
# a generic boundary point, exact to full precision (the on-boundary gate
# rejects coordinates rounded to fewer than ~8 digits)
X0 = "0.2995"
Y0 = repr(2.0 * math.sqrt(1.0 - 0.2995**2 / 9.0))


def _simulate(tmp_path, *extra, name="run.csv"):
    out = tmp_path / name
    rc = main(
        ["simulate", "--x0", "0", "--y0", "2", "--dx", "0", "--dy", "-1",
         "--bounces", "2", "--out", str(out), *extra]
    )
    return rc, out


# ---------------------------------------------------------------------------
# simulate


def test_simulate_golden_vertical_chord(tmp_path):
    rc, out = _simulate(tmp_path)
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == HEADER
    assert lines[1] == "0,0,2,0,-1,0,9,9"
    assert lines[2] == "1,0,-2,0,1,0,9,9"
    assert lines[3] == "2,0,2,0,-1,0,9,9"
    assert len(lines) == 4


def test_simulate_bytes_are_lf_terminated(tmp_path):
    _, out = _simulate(tmp_path)
    data = out.read_bytes()
    assert b"\r" not in data
    assert data.endswith(b"\n")


def test_simulate_caustic_column_constant(tmp_path):
    out = tmp_path / "run.csv"
    rc = main(
        ["simulate", "--system", "flip-long", "--x0", X0, "--y0", Y0,
         "--dx", "1", "--dy", "-0.3", "--bounces", "40", "--out", str(out)]
    )
    assert rc == 0
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    caustics = [float(r[-1]) for r in rows]
    assert len(rows) == 41
    for c in caustics[1:]:
        assert c == pytest.approx(caustics[0], abs=1e-8)
    for r in rows:
        x, y, vx, vy = map(float, r[1:5])
        assert x * x / 9 + y * y / 4 == pytest.approx(1.0, abs=1e-9)
        assert math.hypot(vx, vy) == pytest.approx(1.0, abs=1e-12)


def test_simulate_annulus_row_count(tmp_path):
    out = tmp_path / "run.csv"
    rc = main(
        ["simulate", "--table", "annulus", "--inner-lambda", "3", "--x0", "0",
         "--y0", "2", "--dx", "0.3", "--dy", "-1", "--bounces", "7",
         "--out", str(out)]
    )
    assert rc == 0
    assert len(out.read_text().splitlines()) == 9  # header + initial + 7 impacts


def test_simulate_svg_structure(tmp_path):
    svg = tmp_path / "run.svg"
    out = tmp_path / "run.csv"
    rc = main(
        ["simulate", "--system", "flip-long", "--x0", X0, "--y0", Y0,
         "--dx", "1", "--dy", "-0.3", "--bounces", "5",
         "--out", str(out), "--svg", str(svg)]
    )
    assert rc == 0
    text = svg.read_text()
    assert text.startswith("<svg xmlns=")
    assert text.count("<path ") == 5  # one segment per bounce
    assert text.count("<circle ") == 5  # one numbered marker per impact
    assert text.count("<text ") == 5
    assert "stroke-dasharray" in text  # the caustic is drawn dashed
    assert text.count("<ellipse ") == 2  # boundary + elliptic caustic


def test_simulate_svg_degenerate_caustic(tmp_path):
    # the vertical chord's caustic collapses to the short axis: no dashed
    # curve to draw, but the rendering must still come out whole
    svg = tmp_path / "run.svg"
    rc, _ = _simulate(tmp_path, "--svg", str(svg))
    assert rc == 0
    text = svg.read_text()
    assert text.count("<path ") == 2
    assert text.rstrip().endswith("</svg>")


def test_simulate_svg_annulus_draws_inner_wall(tmp_path):
    svg = tmp_path / "run.svg"
    out = tmp_path / "run.csv"
    rc = main(
        ["simulate", "--table", "annulus", "--inner-lambda", "3", "--x0", "0",
         "--y0", "2", "--dx", "0.3", "--dy", "-1", "--bounces", "4",
         "--out", str(out), "--svg", str(svg)]
    )
    assert rc == 0
    text = svg.read_text()
    assert text.count('<ellipse cx="0" cy="0" rx=') >= 2  # outer and inner walls


@pytest.mark.parametrize(
    "args",
    [
        ["--x0", "1", "--y0", "1", "--dx", "0", "--dy", "-1"],  # off the boundary
        ["--x0", "0", "--y0", "2", "--dx", "0", "--dy", "0"],  # zero direction
        ["--x0", "0", "--y0", "2", "--dx", "0", "--dy", "1"],  # points outward
        ["--x0", "0", "--y0", "2", "--dx", "0", "--dy", "-1", "--bounces", "0"],
    ],
)
def test_simulate_usage_errors(tmp_path, args, capsys):
    out = tmp_path / "run.csv"
    assert main(["simulate", *args, "--out", str(out)]) == 1
    assert "error:" in capsys.readouterr().err
    assert not out.exists()


# ---------------------------------------------------------------------------
# periodic


def test_periodic_envelope_and_roots(tmp_path):
    out = tmp_path / "roots.json"
    rc = main(
        ["periodic", "--system", "flip-long", "--n", "4", "--interval", "2:8",
         "--out", str(out)]
    )
    assert rc == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"system", "n", "interval", "roots", "reason"}
    assert doc["system"] == "flip-long"
    assert doc["n"] == 4
    assert doc["interval"] == [2.0, 8.0]
    assert doc["reason"] is None
    betas = sorted(r["beta"] for r in doc["roots"])
    assert betas == pytest.approx([36 / 13, 7.2], abs=1e-6)
    for r in doc["roots"]:
        assert set(r) == {
            "system", "n", "beta", "cayley_value", "torsion_residual",
            "pell_residual", "closure_residual", "verified",
        }
        assert r["verified"] is True
        assert r["closure_residual"] < 1e-6


def test_periodic_flip_short_odd_reason(tmp_path):
    out = tmp_path / "roots.json"
    rc = main(
        ["periodic", "--system", "flip-short", "--n", "3", "--out", str(out)]
    )
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["roots"] == []
    assert doc["reason"] == "flip-short trajectories close only with an even period"


def test_periodic_two_reason(tmp_path):
    out = tmp_path / "roots.json"
    rc = main(["periodic", "--system", "half-turn", "--n", "2", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["roots"] == []
    assert doc["reason"] == "no nondegenerate 2-periodic caustic exists"


@pytest.mark.parametrize(
    "args",
    [
        ["periodic", "--system", "identity", "--n", "3"],  # no odd identity closure
        ["periodic", "--n", "4", "--table", "annulus", "--inner-lambda", "3"],
        ["periodic", "--n", "4", "--interval", "7:3"],
        ["periodic", "--n", "1"],
        ["periodic", "--n", "4", "--interval", "2:11"],
    ],
)
def test_periodic_usage_errors(tmp_path, args, capsys):
    out = tmp_path / "roots.json"
    assert main([*args, "--out", str(out)]) == 1
    assert "error" in capsys.readouterr().err
    assert not out.exists()


# ---------------------------------------------------------------------------
# topology


def test_topology_level_report(tmp_path):
    out = tmp_path / "topo.json"
    rc = main(
        ["topology", "--system", "half-turn", "--beta", "2.5", "--out", str(out)]
    )
    assert rc == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {
        "system", "beta", "kind", "component_count", "sample_count", "merge_evidence",
    }
    assert doc["system"] == "ellipse:half-turn"
    assert doc["kind"] == "ellipse"
    assert doc["component_count"] == 2
    assert doc["sample_count"] == 64


def test_topology_graph_document(tmp_path):
    out = tmp_path / "topo.json"
    rc = main(["topology", "--system", "flip-long", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"system", "atoms", "edges", "n", "singular_levels", "provenance"}
    assert doc["n"] == -2
    assert sorted(x["type"] for x in doc["atoms"]) == ["A", "A", "A", "B"]


@pytest.mark.parametrize(
    "args",
    [
        ["topology", "--system", "flip-long", "--beta", "4.0"],  # focal level
        ["topology"],  # identity has no graph
        ["topology", "--system", "half-turn", "--table", "annulus"],  # no wall given
        ["topology", "--system", "half-turn", "--inner-lambda", "3"],  # wrong table
    ],
)
def test_topology_usage_errors(tmp_path, args, capsys):
    out = tmp_path / "topo.json"
    assert main([*args, "--out", str(out)]) == 1
    assert "error" in capsys.readouterr().err
    assert not out.exists()


# ---------------------------------------------------------------------------
# shared surface behavior


def test_bad_flags_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--frequency", "11"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1


def test_no_temp_files_left_behind(tmp_path):
    _simulate(tmp_path)
    main(["topology", "--system", "flip-short", "--out", str(tmp_path / "t.json")])
    assert not list(tmp_path.glob("*.tmp"))


def test_outputs_are_byte_deterministic(tmp_path):
    pairs = []
    for tag in ("one", "two"):
        csv = tmp_path / f"{tag}.csv"
        svg = tmp_path / f"{tag}.svg"
        per = tmp_path / f"{tag}-roots.json"
        topo = tmp_path / f"{tag}-topo.json"
        main(["simulate", "--system", "half-turn", "--x0", X0, "--y0", Y0,
              "--dx", "1", "--dy", "-0.3", "--bounces", "25",
              "--out", str(csv), "--svg", str(svg)])
        main(["periodic", "--system", "half-turn", "--n", "3", "--interval",
              "0.1:8.9", "--out", str(per)])
        main(["topology", "--system", "half-turn", "--beta", "6.0", "--out",
              str(topo)])
        pairs.append((csv.read_bytes(), svg.read_bytes(), per.read_bytes(),
                      topo.read_bytes()))
    assert pairs[0] == pairs[1]
