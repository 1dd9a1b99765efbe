import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from ncmatch import adversaries, generators, serial
from ncmatch.cli import main
from ncmatch.errors import InvalidInstance
from ncmatch.geometry import BNM, CIRCLE, CONVEX, GENERAL, MNM


# ---------------------------------------------------------------------------
# generators


def test_random_circle_deterministic_and_valid():
    a = generators.random_circle_instance(6, MNM, 42)
    b = generators.random_circle_instance(6, MNM, 42)
    assert [p.angle for p in a.points] == [p.angle for p in b.points]
    assert a.geometry == CIRCLE and a.n == 6


def test_random_convex_polygon_is_strictly_convex():
    for seed in range(1, 20, 2):
        inst = generators.random_convex_polygon_instance(5, BNM, seed)
        assert inst.geometry == CONVEX
        assert inst.points[0].color == "blue"


def test_random_general_has_distinct_x():
    inst = generators.random_general_instance(8, 3)
    xs = [p.x for p in inst.points]
    assert len(set(xs)) == len(xs)
    assert inst.geometry == GENERAL


# ---------------------------------------------------------------------------
# JSON round trips


def test_instance_roundtrip_is_bit_exact(tmp_path):
    ai = adversaries.markov_instance(10, 3)
    path = tmp_path / "inst.json"
    serial.dump_instance(path, ai)
    back = serial.load_instance(path)
    assert [p.angle for p in back.instance.points] == [
        p.angle for p in ai.instance.points
    ]
    assert [p.x for p in back.instance.points] == [p.x for p in ai.instance.points]
    assert back.parent == ai.parent
    assert back.coins_f == ai.coins_f
    assert back.meta["seed"] == 3


def test_bnm_roundtrip_keeps_sigma(tmp_path):
    ai = adversaries.bnm_red_instance((2, 1, 4, 3))
    path = tmp_path / "perm.json"
    serial.dump_instance(path, ai)
    back = serial.load_instance(path)
    assert back.hidden_perm == (2, 1, 4, 3)
    assert back.instance.kind == BNM


def test_loader_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InvalidInstance):
        serial.load_instance(path)
    path.write_text(json.dumps({"kind": "MNM", "geometry": "circle", "points": [
        {"x": "1/2", "y": "1/2"}
    ]}))
    with pytest.raises(InvalidInstance):
        serial.load_instance(path)


def test_rational_parsing():
    assert serial.parse_rational("3/4") == Fraction(3, 4)
    assert serial.parse_rational(5) == Fraction(5)
    with pytest.raises(InvalidInstance):
        serial.parse_rational("1/0")
    with pytest.raises(InvalidInstance):
        serial.parse_rational("x")


def test_polygon_instance_roundtrip_and_svg(tmp_path):
    from ncmatch import svg

    inst = generators.random_convex_polygon_instance(4, MNM, 5)
    path = tmp_path / "poly.json"
    serial.dump_instance(path, inst)
    back = serial.load_instance(path)
    assert [(p.x, p.y) for p in back.instance.points] == [
        (p.x, p.y) for p in inst.points
    ]
    assert back.instance.geometry == CONVEX
    rendered = svg.render_svg(inst)
    assert rendered.startswith("<svg") and rendered.endswith("</svg>")


# ---------------------------------------------------------------------------
# CLI


def test_cli_generate_run_bt(tmp_path):
    runner = CliRunner()
    out = tmp_path / "fig2.json"
    res = runner.invoke(
        main, ["generate", "bnm-perm", "--sigma", "2,1,4,3", "--out", str(out)]
    )
    assert res.exit_code == 0, res.output
    res = runner.invoke(main, ["run", "bt", str(out)])
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["matched"] == 8
    assert report["perfect"] is True
    assert report["bits_read"] == report["bits_written"] == 4
    assert report["meta"]["family"] == "bnm-perm"


def test_cli_generate_markov_rerun_identical(tmp_path):
    runner = CliRunner()
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        res = runner.invoke(
            main, ["generate", "markov", "--n", "50", "--seed", "7", "--out", str(out)]
        )
        assert res.exit_code == 0, res.output
    assert json.loads(a.read_text())["points"] == json.loads(b.read_text())["points"]


def test_cli_run_greedy_on_markov_reports_unmatched(tmp_path):
    runner = CliRunner()
    out = tmp_path / "m.json"
    runner.invoke(main, ["generate", "markov", "--n", "30", "--seed", "1", "--out", str(out)])
    res = runner.invoke(main, ["run", "greedy", str(out)])
    assert res.exit_code == 0
    report = json.loads(res.output)
    assert report["matched"] + report["unmatched"] == 60
    assert report["bits_read"] == 0


def test_cli_svg_is_presentation_only(tmp_path):
    runner = CliRunner()
    out = tmp_path / "i.json"
    svg_path = tmp_path / "render.svg"
    runner.invoke(
        main,
        ["generate", "random-convex", "--n", "4", "--kind", "MNM", "--seed", "2", "--out", str(out)],
    )
    r1 = runner.invoke(main, ["run", "asap", str(out), "--svg", str(svg_path)])
    assert r1.exit_code == 0
    assert svg_path.exists() and svg_path.read_text().startswith("<svg")
    svg_path.unlink()
    r2 = runner.invoke(main, ["run", "asap", str(out)])
    a = json.loads(r1.output)
    b = json.loads(r2.output)
    a.pop("svg")
    assert a == b


def test_cli_exit_codes(tmp_path):
    runner = CliRunner()
    # bad params -> 2
    res = runner.invoke(main, ["generate", "bnm-perm", "--out", str(tmp_path / "x.json")])
    assert res.exit_code == 2
    res = runner.invoke(
        main, ["generate", "bnm-perm", "--sigma", "2,3,1", "--out", str(tmp_path / "x.json")]
    )
    assert res.exit_code == 2  # non-avoiding sigma rejected
    # precondition mismatch -> 3
    gen = tmp_path / "g.json"
    runner.invoke(main, ["generate", "random-general", "--n", "3", "--out", str(gen)])
    res = runner.invoke(main, ["run", "asap", str(gen)])
    assert res.exit_code == 3
    res = runner.invoke(main, ["run", "bt", str(gen)])
    assert res.exit_code == 3


def test_cli_verify_catalan_and_rate(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["verify", "catalan-bijections", "--n", "6"])
    assert res.exit_code == 0, res.output
    summary = json.loads(res.output)
    assert summary["ok"] is True
    assert all(r["measured"] == 132 for r in summary["results"])
    res = runner.invoke(main, ["verify", "rate-table"])
    assert res.exit_code == 0
    assert json.loads(res.output)["ok"] is True


def test_cli_verify_bnm_lb(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["verify", "bnm-lb", "--n", "2"])
    assert res.exit_code == 0, res.output
    summary = json.loads(res.output)
    assert summary["results"][0]["measured"] == 2


def test_cli_verify_coupling_small():
    runner = CliRunner()
    res = runner.invoke(
        main, ["verify", "coupling", "--n", "40", "--trials", "300", "--seed", "5"]
    )
    assert res.exit_code == 0, res.output
    summary = json.loads(res.output)
    assert summary["ok"] is True
