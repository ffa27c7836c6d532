from __future__ import annotations

import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from crystalhelly.cli import main

SVG = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestPresets:
    def test_list(self, capsys):
        code, out, _ = run(capsys, "presets")
        assert code == 0 and "paper-6crystal" in out and "penrose-debruijn" in out

    def test_json(self, capsys):
        code, out, _ = run(capsys, "presets", "--json")
        assert code == 0 and "z2" in json.loads(out)


class TestGenerate:
    def test_six_cosets(self, capsys, tmp_path):
        code, out, _ = run(capsys, "generate", "--preset", "paper-6crystal", "--region", "-2,-2,3,3",
                           "--out", str(tmp_path / "p"))
        assert code == 0
        rows = (tmp_path / "p.csv").read_text().strip().splitlines()[1:]
        assert {r.split(",")[2] for r in rows} == {str(i) for i in range(6)}
        doc = json.loads((tmp_path / "p.json").read_text())
        assert doc["count"] == len(rows) == 161

    def test_stdout_json(self, capsys):
        code, out, _ = run(capsys, "generate", "--preset", "z2", "--region", "0,0,1,1")
        assert code == 0 and json.loads(out)["count"] == 4

    def test_config(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"kind": "crystal", "basis": [["1", "0"], ["0", "1"]],
                                   "translates": [["0", "0"], ["1/2", "1/2"]]}))
        code, out, _ = run(capsys, "generate", "--config", str(cfg), "--region", "0,0,1,1")
        assert code == 0 and json.loads(out)["count"] == 5

    def test_penrose_strict(self, capsys, tmp_path):
        code, _, _ = run(capsys, "generate", "--preset", "penrose-debruijn", "--region", "-1,-1,1,1",
                         "--out", str(tmp_path / "pen"), "--strict")
        assert code in (0, 3)
        assert (tmp_path / "pen.csv").exists()


class TestSearch:
    def test_z2(self, capsys):
        code, out, _ = run(capsys, "search", "--preset", "z2", "--region", "-5,-5,5,5", "--margin", "1", "--quiet")
        assert code == 0 and "helly_lower_bound = 4" in out

    def test_six_crystal_outputs(self, capsys, tmp_path):
        code, out, _ = run(capsys, "search", "--preset", "paper-6crystal", "--region", "-2,-2,3,3",
                           "--out", str(tmp_path / "s"))
        assert code == 0 and "helly_lower_bound = 12" in out
        doc = json.loads((tmp_path / "s.json").read_text())
        assert doc["status"] == "VERIFIED" and len(doc["vertices"]) == 12
        root = ET.fromstring((tmp_path / "s.svg").read_text())
        assert root.tag == SVG + "svg"
        assert len(root.findall(SVG + "polygon")) == 1
        assert len(root.findall(SVG + "circle")) == doc["search"]["patch_points"]

    def test_four_crystal(self, capsys):
        code, out, _ = run(capsys, "search", "--preset", "paper-4crystal", "--quiet")
        assert code == 0 and "helly_lower_bound = 9" in out

    def test_certificate_feeds_verify(self, capsys, tmp_path):
        run(capsys, "search", "--preset", "paper-4crystal", "--out", str(tmp_path / "c"))
        code, out, _ = run(capsys, "verify", "--preset", "paper-4crystal", "--certificate", str(tmp_path / "c.json"))
        assert code == 0 and json.loads(out)["status"] == "VERIFIED"


class TestVerify:
    TWELVE = ("0,0;3/10,5/10;6/10,8/10;9/10,9/10;11/10,9/10;13/10,8/10;"
              "13/10,5/10;1,0;9/10,-1/10;6/10,-2/10;3/10,-2/10;1/10,-1/10")

    def test_twelve_gon_with_lift(self, capsys):
        code, out, _ = run(capsys, "verify", "--preset", "paper-6crystal", "--vertices", self.TWELVE, "--lift", "1")
        doc = json.loads(out)
        assert code == 0 and doc["status"] == "VERIFIED"
        assert doc["lift"]["status"] == "VERIFIED" and len(doc["lift"]["vertices"]) == 24

    def test_refuted_square(self, capsys):
        code, out, _ = run(capsys, "verify", "--preset", "z2", "--vertices", "0,0;2,0;2,2;0,2")
        doc = json.loads(out)
        assert code == 0 and doc["status"] == "REFUTED" and ["1", "1"] in doc["witnesses"]

    def test_vertex_outside(self, capsys):
        code, out, _ = run(capsys, "verify", "--preset", "z2", "--vertices", "0,0;1/2,0;0,1")
        assert code == 4 and json.loads(out)["status"] == "INVALID"


class TestBounds:
    def test_table(self, capsys, tmp_path):
        code, out, _ = run(capsys, "bounds", "--out", str(tmp_path / "b.json"))
        assert code == 0
        assert "max. n     4   6   7   9  10  12" in out
        reps = json.loads((tmp_path / "b.json").read_text())
        assert [r["upper"] for r in reps] == [4, 6, 7, 9, 10, 12]
        assert [r["lower"] for r in reps] == [4, 6, 7, 9, 10, 12]

    def test_penrose_no_search(self, capsys):
        code, out, _ = run(capsys, "bounds", "--preset", "penrose-debruijn", "--no-search")
        assert code == 0 and " 32  cnp_2dk" in out

    def test_lift(self, capsys, tmp_path):
        code, out, _ = run(capsys, "bounds", "--preset", "paper-6crystal", "--lift", "1", "--quiet",
                           "--out", str(tmp_path / "b.json"))
        reps = json.loads((tmp_path / "b.json").read_text())
        assert code == 0 and (reps[1]["lower"], reps[1]["upper"]) == (24, 48)
        assert reps[1]["upper_from"] == "union_k2d"


class TestFractional:
    def test_seeded(self, capsys):
        code, out, _ = run(capsys, "fractional", "--random", "20")
        doc = json.loads(out)
        assert code == 0
        assert (doc["alpha"], doc["beta_observed"], doc["deep_point"]) == ("169/1140", "2/5", ["4", "4"])

    def test_family_file(self, capsys, tmp_path):
        fam = tmp_path / "f.json"
        sq = [["-2", "-2"], ["2", "-2"], ["2", "2"], ["-2", "2"]]
        fam.write_text(json.dumps({"family": [sq] * 4}))
        code, out, _ = run(capsys, "fractional", "--family", str(fam))
        doc = json.loads(out)
        assert code == 0 and doc["alpha"] == "1" and doc["beta_observed"] == "1"

    def test_disjoint_family(self, capsys, tmp_path):
        fam = tmp_path / "f.json"
        members = [[[str(3 * i), "0"], [str(3 * i + 1), "0"], [str(3 * i), "1"]] for i in range(4)]
        fam.write_text(json.dumps({"family": members}))
        code, out, _ = run(capsys, "fractional", "--family", str(fam))
        assert code == 0 and json.loads(out)["alpha"] == "0"

    def test_malformed(self, capsys, tmp_path):
        fam = tmp_path / "f.json"
        fam.write_text("{\"family\": 3}")
        code, _, err = run(capsys, "fractional", "--family", str(fam))
        assert code == 2 and "malformed" in err


class TestErrors:
    def test_unknown_preset(self, capsys):
        code, _, err = run(capsys, "search", "--preset", "nope")
        assert code == 2 and "unknown preset" in err

    def test_bad_region(self, capsys):
        code, _, _ = run(capsys, "search", "--preset", "z2", "--region", "1,2,3")
        assert code == 2

    def test_negative_margin(self, capsys):
        code, _, _ = run(capsys, "search", "--preset", "z2", "--margin", "-1")
        assert code == 2

    def test_missing_source(self, capsys):
        code, _, _ = run(capsys, "generate", "--region", "0,0,1,1")
        assert code == 2

    def test_missing_config_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "generate", "--config", str(tmp_path / "none.json"), "--region", "0,0,1,1")
        assert code == 2

    def test_argparse_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["search", "--threads", "many"])
        assert exc.value.code == 2


@pytest.mark.parametrize("argv", [
    ["search", "--preset", "paper-6crystal", "--quiet"],
    ["fractional", "--random", "12", "--cluster", "--seed", "5"],
    ["bounds", "--quiet"],
])
def test_byte_identical(tmp_path, argv):
    outs = []
    for i in range(2):
        target = tmp_path / f"run{i}"
        extra = ["--out", str(target)]
        main(argv + extra)
        produced = sorted(tmp_path.glob(f"run{i}*"))
        outs.append([p.read_bytes() for p in produced])
    assert outs[0] == outs[1] and outs[0]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "crystalhelly", "search", "--preset", "z2", "--quiet"],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0 and "helly_lower_bound = 4" in r.stdout
