"""Command-line interface: document codec, exit codes, and report round-trips."""
from __future__ import annotations

import json
import os

from homkit.cli import (
    chain_map_from_doc,
    chain_map_to_doc,
    complex_from_doc,
    complex_to_doc,
    main,
)
from homkit.exactalg import Zmod
from homkit.modules import FpModule
from homkit.complexes import ChainMap, disk, sphere

R4 = Zmod(4)
Z2 = FpModule(R4, (2,))
Z4 = FpModule(R4, (4,))

SPHERE_DOC = {"ring": {"mod": 4}, "modules": {"0": [2]}, "diff": {}}
DISK_DOC = {"ring": {"mod": 4}, "modules": {"0": [2], "1": [2]}, "diff": {"0": [[1]]}}
BAD_DOC = {"ring": {"mod": 4}, "modules": {"0": [4], "1": [4], "2": [4]},
           "diff": {"0": [[1]], "1": [[1]]}}


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestCodec:
    def test_round_trip_is_canonical(self):
        c = complex_from_doc(DISK_DOC)
        doc = complex_to_doc(c)
        assert complex_to_doc(complex_from_doc(doc)) == doc
        assert complex_from_doc(doc) == c

    def test_negative_degrees(self):
        doc = {"ring": {"mod": 4}, "modules": {"-1": [4], "0": [4]},
               "diff": {"-1": [[1]]}}
        c = complex_from_doc(doc)
        assert c.support == (-1, 0)
        assert complex_to_doc(c)["modules"]["-1"] == [4]

    def test_integers_ring(self):
        from homkit.exactalg import ZZ
        doc = {"ring": {"integers": True}, "modules": {"0": [2]}, "diff": {}}
        assert complex_from_doc(doc).ring == ZZ

    def test_entries_reduced_on_write(self):
        doc = {"ring": {"mod": 4}, "modules": {"0": [2], "1": [2]}, "diff": {"0": [[3]]}}
        c = complex_from_doc(doc)
        assert complex_to_doc(c)["diff"]["0"] == [[1]]

    def test_chain_map_round_trip(self):
        f = ChainMap.identity(disk(0, Z2))
        doc = chain_map_to_doc(f)
        assert chain_map_from_doc(doc) == f


class TestValidateCommand:
    def test_valid(self, tmp_path, capsys):
        assert main(["validate", write(tmp_path, "c.json", DISK_DOC)]) == 0

    def test_zero_complex_valid(self, tmp_path):
        doc = {"ring": {"mod": 4}, "modules": {}, "diff": {}}
        assert main(["validate", write(tmp_path, "c.json", doc)]) == 0

    def test_invalid_squared_differential(self, tmp_path, capsys):
        assert main(["validate", write(tmp_path, "c.json", BAD_DOC)]) == 1
        assert "degree 1" in capsys.readouterr().out

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["validate", str(path)]) == 2

    def test_schema_error(self, tmp_path):
        assert main(["validate", write(tmp_path, "c.json",
                                       {"ring": {"mod": 4}, "modules": 5})]) == 2


class TestCheckCommand:
    def test_exact_on_disk(self, tmp_path, capsys):
        assert main(["check", "exact", write(tmp_path, "c.json", DISK_DOC)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["verdict"] is True

    def test_x_injective_counterexample(self, tmp_path, capsys):
        code = main(["check", "x-injective", write(tmp_path, "c.json", SPHERE_DOC),
                     "--class", "all", "--bound", "8"])
        assert code == 1
        report = json.loads(capsys.readouterr().out)
        assert report["verdict"] is False
        assert "counterexample" in report
        # the counterexample complexes re-validate through the document codec
        cx = report["counterexample"]
        inner = complex_from_doc(cx["map"]["source"])
        assert inner is not None

    def test_eps1_perp_on_ring_sphere(self, tmp_path, capsys):
        doc = {"ring": {"mod": 4}, "modules": {"0": [4]}, "diff": {}}
        assert main(["check", "eps1-perp", write(tmp_path, "c.json", doc),
                     "--class", "all"]) == 0

    def test_counterexample_feeds_back_through_the_codec(self, tmp_path, capsys):
        main(["check", "x-injective", write(tmp_path, "c.json", SPHERE_DOC),
              "--class", "all", "--bound", "8"])
        report = json.loads(capsys.readouterr().out)
        # the serialized counterexample parses back into a genuine chain map
        # whose source and target validate as complexes
        cx = report["counterexample"]
        witness = chain_map_from_doc(cx["map"])
        assert witness.commutes()
        assert main(["validate", write(tmp_path, "w.json", cx["map"]["source"])]) == 0
        assert main(["validate", write(tmp_path, "w2.json", cx["map"]["target"])]) == 0

    def test_exit_codes_stable_across_runs(self, tmp_path, capsys):
        path = write(tmp_path, "c.json", SPHERE_DOC)
        codes = {main(["check", "x-injective", path, "--class", "all",
                       "--bound", "8"]) for _ in range(3)}
        capsys.readouterr()
        assert codes == {1}

    def test_homotopic_zero(self, tmp_path, capsys):
        f = ChainMap.identity(disk(0, Z2))
        path = write(tmp_path, "f.json", chain_map_to_doc(f))
        assert main(["check", "homotopic-zero", path]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["verdict"] is True
        g = ChainMap.identity(sphere(0, Z2))
        path2 = write(tmp_path, "g.json", chain_map_to_doc(g))
        assert main(["check", "homotopic-zero", path2]) == 1

    def test_bad_input(self, tmp_path):
        assert main(["check", "exact", str(tmp_path / "missing.json")]) == 2


class TestBuildCommand:
    def test_precover_writes_validated_files(self, tmp_path, capsys):
        out = str(tmp_path / "out")
        code = main(["build", "precover", write(tmp_path, "c.json", SPHERE_DOC),
                     "--class", "all", "--output", out])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["verdict"] is True
        result = json.loads(open(os.path.join(out, "result.json")).read())
        assert main(["validate", write(tmp_path, "r.json", result)]) == 0
        built_map = chain_map_from_doc(
            json.loads(open(os.path.join(out, "map.json")).read()))
        for k in built_map.target.degrees():
            assert built_map.component(k).is_epi()
        log = json.loads(open(os.path.join(out, "build_log.json")).read())
        assert log and log[0]["degree"] == 0

    def test_precover_of_zero(self, tmp_path, capsys):
        doc = {"ring": {"mod": 4}, "modules": {}, "diff": {}}
        out = str(tmp_path / "outz")
        assert main(["build", "precover", write(tmp_path, "c.json", doc),
                     "--class", "all", "--output", out]) == 0

    def test_preenvelope(self, tmp_path, capsys):
        out = str(tmp_path / "oute")
        code = main(["build", "preenvelope", write(tmp_path, "c.json", SPHERE_DOC),
                     "--class", "all", "--output", out])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["cokernel_membership"]["0"]["in_class"] is True

    def test_envelope(self, tmp_path, capsys):
        out = str(tmp_path / "outv")
        code = main(["build", "envelope", write(tmp_path, "c.json", SPHERE_DOC),
                     "--class", "all", "--output", out])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["verdict"] is True and report["essential"] is True

    def test_hypothesis_failure_exit_three(self, tmp_path, capsys):
        out = str(tmp_path / "outf")
        code = main(["build", "precover", write(tmp_path, "c.json", SPHERE_DOC),
                     "--class", "free", "--output", out])
        assert code == 3
        report = json.loads(capsys.readouterr().out)
        assert report["error"] == "hypothesis-not-established"


class TestUniverseCommand:
    def test_modules_bound_four(self, capsys):
        assert main(["universe", "modules", "--ring", "4", "--bound", "4"]) == 0
        lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
        assert [tuple(l["factors"]) for l in lines] == [(), (2,), (4,), (2, 2)]

    def test_bound_one(self, capsys):
        assert main(["universe", "modules", "--ring", "4", "--bound", "1"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 1

    def test_eps1_free_excludes_nonfree_disk(self, capsys):
        assert main(["universe", "eps1", "--ring", "4", "--bound", "4",
                     "--class", "free"]) == 0
        docs = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
        disk_doc = complex_to_doc(disk(0, Z2))
        assert disk_doc not in docs
        assert complex_to_doc(disk(0, Z4)) in docs

    def test_listing_deterministic(self, capsys):
        main(["universe", "modules", "--ring", "4", "--bound", "8"])
        first = capsys.readouterr().out
        main(["universe", "modules", "--ring", "4", "--bound", "8"])
        assert capsys.readouterr().out == first
