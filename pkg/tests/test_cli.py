import csv
import io
import json
import math

import numpy as np
import pytest

from wiretapbc import MISOME, SADBC, ConfigError, classify, convex_closure, RegionPointSet
from wiretapbc.cli import main, parse_config, run

from oracles import hausdorff_convex, scalar_grid_rates

REFERENCE = {"command": "region", "channel": {"N1": 1, "N2": 1.5, "N3": 2, "S": 2}}
MISO = {
    "command": "misome",
    "channel": {"H1": [1.0, 0.5], "H2": [0.2, 1.0], "H3": [[0.3, 0.1], [0.0, 0.4]], "N1": 1, "N2": 1, "N3": [[1, 0], [0, 1]], "P": 10},
    "grids": {"alpha": 11},
}


def cfg_of(doc, **changes):
    return parse_config(json.dumps({**doc, **changes}))


def run_text(cfg):
    buf = io.StringIO()
    status = run(cfg, buf)
    return buf.getvalue(), status


class TestParseConfig:
    def test_minimal_scalar(self):
        cfg = cfg_of(REFERENCE)
        assert classify(cfg.channel_instance()).tag == SADBC
        assert cfg.output["format"] == "csv" and cfg.seed == 0

    def test_misome_rows(self):
        cfg = cfg_of(MISO)
        assert classify(cfg.channel_instance()).tag == MISOME

    def test_negative_noise_named(self):
        doc = {"command": "region", "channel": {"N1": [[1, 0], [0, -1]], "N2": 2, "N3": 3, "S": [[1, 0], [0, 1]]}}
        with pytest.raises(ConfigError, match="N1") as err:
            parse_config(json.dumps(doc))
        assert "-1" in str(err.value)
        assert err.value.path == "$.channel.N1"

    @pytest.mark.parametrize(
        "doc, path",
        [
            ({"command": "nope", "channel": {}}, "$.command"),
            ({"command": "region"}, "$.channel"),
            ({"command": "region", "channel": {"N1": 1, "N2": 1, "N3": 1}}, "$.channel"),
            ({"command": "region", "channel": {"N1": 1, "N2": 1, "S": 1}}, "$.channel.N3"),
            ({"command": "region", "channel": {"N1": 1, "N2": 1, "N3": 1, "S": 1, "Q": 1}}, "$.channel.Q"),
            ({**REFERENCE, "grids": {"mu": [1, 0.5]}}, "$.grids.mu[1]"),
            ({**REFERENCE, "solver": {"restarts": 0}}, "$.solver.restarts"),
            ({**REFERENCE, "output": {"format": "xml"}}, "$.output.format"),
            ({**REFERENCE, "extra": 1}, "$.extra"),
            ({**REFERENCE, "command": "misome"}, "$.channel"),
            ({**REFERENCE, "command": "enhance-verify", "output": {"format": "csv"}}, "$.output.format"),
        ],
    )
    def test_schema_errors_name_their_path(self, doc, path):
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps(doc))
        assert err.value.path == path

    def test_invalid_json(self):
        with pytest.raises(ConfigError):
            parse_config("{not json")

    def test_asymmetry_warns_and_symmetrizes(self):
        doc = {"command": "region", "channel": {"N1": [[1, 0.1], [0, 1]], "N2": 2, "N3": 3, "S": [[1, 0], [0, 1]]}}
        with pytest.warns(UserWarning, match="N1"):
            cfg = parse_config(json.dumps(doc))
        N1 = np.array(cfg.channel["N1"])
        assert N1[0, 1] == N1[1, 0] == pytest.approx(0.05)

    @pytest.mark.parametrize("doc", [REFERENCE, MISO, {**REFERENCE, "command": "check", "seed": 9, "grids": {"mu": [1, 2, 5]}}])
    def test_round_trip(self, doc):
        cfg = cfg_of(doc)
        assert parse_config(cfg.to_json()) == cfg


class TestCommands:
    def test_region_csv_matches_grid_oracle(self):
        text, status = run_text(cfg_of(REFERENCE, solver={"restarts": 8}))
        assert status == 0
        rows = list(csv.DictReader(io.StringIO(text)))
        assert list(rows[0]) == ["weight_mu", "permutation", "R1_bits", "R2_bits", "B1_rowmajor", "B2_rowmajor", "converged"]
        assert len(rows) == 32 and {r["permutation"] for r in rows} == {"12"}
        pts = [(float(r["R1_bits"]), float(r["R2_bits"])) for r in rows]
        hull = convex_closure(RegionPointSet.from_pairs(pts)).as_array()
        grid, _ = scalar_grid_rates(1.0, 1.5, 2.0, 2.0, 2e-3)
        assert hausdorff_convex(hull, grid) <= 1e-3

    def test_region_twelve_significant_digits(self):
        text, _ = run_text(cfg_of(REFERENCE, grids={"mu": [1.0]}, solver={"restarts": 2}))
        row = text.splitlines()[1].split(",")
        assert row[0] == "1"
        assert len(row[2].replace(".", "").lstrip("0")) <= 12
        assert float(row[2]) == pytest.approx(0.5 * (math.log2(3) - math.log2(2)), abs=1e-11)

    def test_region_json(self):
        text, _ = run_text(cfg_of(REFERENCE, grids={"mu": [1.0, 10.0]}, output={"format": "json"}, solver={"restarts": 2}))
        doc = json.loads(text)
        assert doc["channel_class"] == SADBC
        assert len(doc["points"]) == 2 and doc["hull"]

    def test_enhance_verify(self):
        text, status = run_text(cfg_of(REFERENCE, command="enhance-verify", grids={"mu": [1.0, 2.8, 100.0]}))
        assert status == 0
        certs = json.loads(text)["certificates"]
        assert [c["mu"] for c in certs] == [1.0, 2.8, 100.0]
        assert all(c["certified"] for c in certs)

    def test_misome_csv(self):
        text, status = run_text(cfg_of(MISO))
        assert status == 0
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["alpha_split", "permutation", "R1_bits", "R2_bits"]
        assert len(rows) == 1 + 22
        assert rows[1][:2] == ["0", "12"] and rows[12][1] == "21"

    def test_misome_highsnr_scalar(self):
        doc = {"command": "misome-highsnr", "channel": {"H1": [1.0], "H2": [2.0], "H3": [[0.5]], "N1": 1, "N2": 1, "N3": 1, "P": 1}}
        out = json.loads(run_text(cfg_of(doc))[0])
        assert out["a"] == pytest.approx(4.0) and out["b"] == pytest.approx(16.0)
        assert out["rectangle_12"]["R1_bits"] == pytest.approx(1.0)
        assert out["rectangle_21"]["R2_bits"] == pytest.approx(2.0)

    def test_check_eavesdropper_dominant(self):
        doc = {"command": "check", "channel": {"N1": 2, "N2": 3, "N3": 1, "S": 1}, "grids": {"mu": [1, 3]}, "solver": {"restarts": 4}}
        text, status = run_text(cfg_of(doc))
        assert status == 0
        assert "origin" in text and "FAIL" not in text

    def test_check_reference(self):
        text, status = run_text(cfg_of(REFERENCE, command="check", grids={"mu": 8}, solver={"restarts": 4}))
        assert status == 0, text
        assert "enhancement certificate" in text

    def test_check_misome(self):
        text, status = run_text(cfg_of(MISO, command="check"))
        assert status == 0, text
        assert "pencil rates" in text


class TestMain:
    def test_output_file_and_overrides(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps(REFERENCE))
        out = tmp_path / "out.json"
        status = main(["--config", str(cfg), "--output", str(out), "--format", "json", "--mu-grid", "3", "--restarts", "2"])
        assert status == 0
        assert len(json.loads(out.read_text())["points"]) == 3

    def test_command_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps(MISO))
        assert main(["misome-highsnr", "--config", str(cfg)]) == 0
        assert "rectangle_12" in capsys.readouterr().out

    def test_error_is_one_json_line(self, tmp_path, capsys):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"command": "region", "channel": {"N1": -1, "N2": 1, "N3": 1, "S": 1}}))
        assert main(["--config", str(cfg)]) == 2
        err = capsys.readouterr().err.strip().splitlines()
        assert len(err) == 1
        diag = json.loads(err[0])
        assert diag["path"] == "$.channel.N1" and "N1" in diag["message"]

    def test_missing_file(self, tmp_path, capsys):
        assert main(["--config", str(tmp_path / "absent.json")]) == 2
        assert json.loads(capsys.readouterr().err)["error"] == "FileNotFoundError"

    def test_same_seed_same_bytes(self, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({**REFERENCE, "grids": {"mu": 4}, "solver": {"restarts": 4}, "seed": 11}))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["--config", str(cfg), "--output", str(a)])
        main(["--config", str(cfg), "--output", str(b)])
        assert a.read_bytes() == b.read_bytes()
