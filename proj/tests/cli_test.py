"""End-to-end checks of the gbtsvm command-line tool.

Usage: cli_test.py <gbtsvm binary> <repository root>
"""

import json
import pathlib
import subprocess
import sys
import tempfile
import unittest

import jsonschema

BIN = None
ROOT = None


def run(*args, expect=0):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if proc.returncode != expect:
        raise AssertionError(
            f"{' '.join(map(str, args))}: exit {proc.returncode}, wanted {expect}\n{proc.stderr}")
    return proc


def validate(path, schema_name):
    schema = json.loads((ROOT / "schemas" / f"{schema_name}.schema.json").read_text())
    doc = json.loads(pathlib.Path(path).read_text())
    jsonschema.validate(doc, schema)
    return doc


class CliTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = pathlib.Path(self.tmp.name)
        self.data = ROOT / "data"

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name):
        return self.dir / name

    def test_granulate_exit_codes(self):
        out = self.path("balls.json")
        run("granulate", "--in", self.data / "crossplane130.csv", "--out", out)
        validate(out, "balls")
        run("granulate", "--in", self.path("missing.csv"), expect=1)
        single = self.path("single.csv")
        single.write_text("0.1,0.2,1\n0.3,0.4,1\n0.5,0.1,1\n")
        run("granulate", "--in", single, expect=2)
        run("granulate", "--in", self.data / "checkerboard300.csv", "--max-splits", "1", expect=3)

    def test_train_covers_models_and_kernels(self):
        runs = [
            ("gbtsvm", "linear", []),
            ("lsgbtsvm", "gaussian", ["--sigma", "0.5", "--d3", "0.1", "--d4", "0.1"]),
            ("gbtsvm", "gaussian", ["--sigma", "0.5", "--d1", "0.1", "--d2", "0.1"]),
            ("lsgbtsvm", "linear", ["--solver", "sor"]),
        ]
        for model, kernel, extra in runs:
            with self.subTest(model=model, kernel=kernel):
                out = self.path(f"{model}_{kernel}.json")
                meta = self.path(f"{model}_{kernel}.meta.json")
                run("train", "--in", self.data / "checkerboard300.csv", "--normalize",
                    "--model", model, "--kernel", kernel, *extra, "--out", out,
                    "--meta-out", meta)
                validate(out, "model")
                validate(meta, "metadata")
                report = self.path(f"{model}_{kernel}.eval.json")
                run("eval", "--model", out, "--in", self.data / "checkerboard300.csv",
                    "--meta", meta, "--out", report)
                validate(report, "eval")

    def test_outputs_are_byte_identical(self):
        for i in range(2):
            run("train", "--in", self.data / "linear_margin200.csv", "--normalize", "--purity",
                "0.9", "--seed", "3", "--grid", "--grid-d", "0.01,1", "--folds", "3",
                "--out", self.path(f"m{i}.json"), "--balls-out", self.path(f"b{i}.json"))
        self.assertEqual(self.path("m0.json").read_bytes(), self.path("m1.json").read_bytes())
        self.assertEqual(self.path("b0.json").read_bytes(), self.path("b1.json").read_bytes())

    def test_crossplane_round_trip_accuracy(self):
        data = self.path("cross.csv")
        run("synth", "--kind", "crossplane", "--n", "130", "--seed", "1", "--out", data)
        for model, extra in (("gbtsvm", ["--d1", "0.01", "--d2", "0.01"]),
                             ("lsgbtsvm", ["--d1", "1e-4", "--d2", "1e-4", "--d3", "1e-5",
                                           "--d4", "1e-5"])):
            with self.subTest(model=model):
                m = self.path(f"{model}.json")
                meta = self.path(f"{model}.meta.json")
                run("train", "--in", data, "--normalize", "--model", model, *extra,
                    "--out", m, "--meta-out", meta)
                report = self.path(f"{model}.eval.json")
                run("eval", "--model", m, "--in", data, "--meta", meta, "--out", report)
                self.assertGreaterEqual(validate(report, "eval")["accuracy"], 95.0)
                pred = run("predict", "--model", m, "--in", data, "--meta", meta).stdout
                self.assertEqual(len(pred.splitlines()), 131)

    def test_stats_reproduces_published_values(self):
        out = self.path("stats.json")
        run("stats", "--ranks", "3.46,4.79,5.69,1.97,1.94,3.14", "--datasets", "36", "--out", out)
        doc = validate(out, "stats")
        self.assertAlmostEqual(doc["chi2F"], 116.19, delta=0.05)
        self.assertAlmostEqual(doc["FF"], 63.70, delta=0.2)
        self.assertAlmostEqual(doc["CD"], 1.256, delta=0.002)
        table = self.path("table.json")
        run("stats", "--in", ROOT / "tests" / "data" / "uci_keel_linear_accuracy.csv",
            "--out", table)
        self.assertEqual(len(validate(table, "stats")["wtl"]["raw"]), 6)

    def test_benchmark_writes_table_and_stats(self):
        csv = self.path("bench.csv")
        js = self.path("bench.json")
        run("benchmark", "--synth", "crossplane", "linear-margin", "--synth-n", "80",
            "--models", "tsvm", "gbtsvm", "--no-grid", "--d1", "0.1", "--d2", "0.1",
            "--out-csv", csv, "--out-json", js)
        self.assertEqual(len(csv.read_text().splitlines()), 3)
        validate(js, "stats")

    def test_vtub_on_trained_model(self):
        m = self.path("model.json")
        balls = self.path("balls.json")
        run("train", "--in", self.data / "crossplane130.csv", "--purity", "0.95",
            "--out", m, "--balls-out", balls)
        report = self.path("vtub.json")
        proc = run("vtub", "--model", m, "--balls", balls, "--out", report)
        doc = validate(report, "vtub")
        self.assertEqual(doc["violations"], 0)
        self.assertIn("violations 0", proc.stdout)

    def test_noise_flips_labels(self):
        out = self.path("noisy.csv")
        run("noise", "--in", self.data / "linear_margin200.csv", "--rate", "0.1", "--seed", "2",
            "--out", out)
        before = [l.rsplit(",", 1)[1] for l in (self.data / "linear_margin200.csv").read_text().split()]
        after = [l.rsplit(",", 1)[1] for l in out.read_text().split()]
        self.assertEqual(sum(a != b for a, b in zip(before, after)), 20)


if __name__ == "__main__":
    BIN = sys.argv[1]
    ROOT = pathlib.Path(sys.argv[2]).resolve()
    unittest.main(argv=[sys.argv[0]], verbosity=2)
