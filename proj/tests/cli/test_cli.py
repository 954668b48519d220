"""Exit codes, schema conformance and determinism of the flpcheck CLI.

Usage: test_cli.py FLPCHECK REPO_ROOT
"""
import json
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema

FLPCHECK = None
ROOT = None


def run(*args):
    p = subprocess.run([FLPCHECK, *map(str, args)], capture_output=True, text=True, timeout=300)
    return p.returncode, p.stdout, p.stderr


def corpus(name):
    return ROOT / "corpus" / name


class Cli(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        schema = json.loads((ROOT / "schema" / "report.schema.json").read_text())
        cls.validator = jsonschema.Draft202012Validator(schema)

    def report(self, *args):
        code, out, err = run(*args, "--json")
        self.assertIn(code, (0, 1, 2), err)
        doc = json.loads(out)
        errors = sorted(self.validator.iter_errors(doc), key=str)
        self.assertEqual([], [e.message for e in errors], args)
        self.assertEqual(code, doc["exit_code"])
        return code, doc

    def test_check_exit_codes_over_corpus(self):
        expected = {
            "ex1.flp": 1, "examples.flp": 0, "f12.flp": 1, "fac.flp": 0, "g12.flp": 1,
            "h12.flp": 1, "ints12.flp": 1, "mc91.flp": 0, "ndinsert.flp": 1,
            "ndinsert_spec.flp": 1, "perm.flp": 1, "primes.flp": 1, "primes_plain.flp": 1,
            "quicksort.flp": 1, "revrev.flp": 1, "selsort.flp": 0, "selsort_lazy.flp": 1,
            "sortequiv.flp": 1, "sortpermute.flp": 1,
        }
        for path in sorted((ROOT / "corpus").glob("*.flp")):
            with self.subTest(path.name):
                code, doc = self.report("check", path)
                self.assertEqual(expected.get(path.name), code)
                text_code, text, _ = run("check", path)
                self.assertEqual(code, text_code)
                self.assertIn("status: " + doc["status"], text)
                for task in doc["tasks"]:
                    self.assertIn(task["name"] + ": ", text)
                    self.assertIn(task["outcome"], text)
                    if task["counterexample"] and task["counterexample"]["template"]:
                        self.assertIn(task["counterexample"]["template"], text)

    def test_safe_mode_skip_is_inconclusive(self):
        code, doc = self.report("check", corpus("primes_plain.flp"), "--safe")
        self.assertEqual(2, code)
        self.assertEqual("skipped", doc["tasks"][0]["outcome"])

    def test_sortequiv_report(self):
        code, doc = self.report("check", corpus("sortequiv.flp"))
        self.assertEqual(1, code)
        cex = doc["tasks"][0]["counterexample"]
        self.assertEqual("(failed : failed)", cex["template"])
        self.assertRegex(cex["inputs"][0], r"^\(-?\d+ : \(-?\d+ : failed\)\)$")

    def test_eval(self):
        code, out, _ = run("eval", corpus("examples.flp"), "-e", "double coin")
        self.assertEqual(0, code)
        self.assertEqual("{0, 2}", out.splitlines()[0])
        code, doc = self.report("eval", corpus("examples.flp"), "-e", "coin + coin")
        self.assertEqual(["0", "1", "2"], doc["tasks"][0]["values"])
        code, doc = self.report("eval", corpus("examples.flp"), "-e", "loop", "--steps", "1000")
        self.assertEqual(2, code)
        self.assertFalse(doc["tasks"][0]["complete"])

    def test_analyze(self):
        code, doc = self.report("analyze", corpus("examples.flp"))
        self.assertEqual(0, code)
        ops = {t["op"]: t for t in doc["tasks"]}
        self.assertEqual("unknown", ops["loop"]["termination"]["status"])
        self.assertEqual("proven", ops["neg"]["totally_defined"]["status"])

    def test_equiv_modes(self):
        code, doc = self.report("equiv", corpus("ex1.flp"), "f", "g", "--mode", "ground")
        self.assertEqual(0, code)
        self.assertEqual("ground", doc["tasks"][0]["mode"])
        code, doc = self.report("equiv", corpus("ex1.flp"), "f", "g")
        self.assertEqual(1, code)
        code, doc = self.report("equiv", corpus("fac.flp"), "fac", "fac'spec", "--pre", "fac'spec'pre")
        self.assertEqual(0, code)

    def test_diff(self):
        old, new = corpus("semver/m_1.0.0.flp"), corpus("semver/m_1.1.0.flp")
        code, doc = self.report("diff", old, new, "--old-version", "1.0.0", "--new-version", "1.1.0")
        self.assertEqual(1, code)
        task = doc["tasks"][0]
        self.assertEqual("violation", task["judgment"])
        self.assertEqual("C failed", task["behavior"][0]["counterexample"]["template"])
        code, doc = self.report("diff", old, old, "--old-version", "1.0.0", "--new-version", "1.0.1")
        self.assertEqual(0, code)
        code, doc = self.report("diff", old, new, "--old-version", "1.0.0", "--new-version", "1.0.1")
        self.assertEqual(1, code)
        self.assertEqual("h", doc["tasks"][0]["api"]["violations"][0]["entity"])
        code, doc = self.report("diff", old, new, "--old-version", "1.0.0", "--new-version", "2.0.0")
        self.assertEqual(0, code)
        self.assertEqual([], doc["tasks"][0]["behavior"])

    def test_errors_exit_3(self):
        for args in (
            ["check", corpus("missing.flp")],
            ["check"],
            ["frobnicate"],
            ["eval", corpus("examples.flp"), "-e", "undefinedThing"],
            ["check", corpus("ex1.flp"), "--steps", "0"],
            ["check", corpus("ex1.flp"), "--safe", "--unsafe"],
            ["equiv", corpus("ex1.flp"), "f", "nope"],
            ["diff", corpus("ex1.flp"), corpus("ex1.flp"), "--old-version", "1.2", "--new-version", "1.3.0"],
        ):
            with self.subTest(args=args):
                code, out, err = run(*args)
                self.assertEqual(3, code)
                self.assertTrue(err.strip())

    def test_parse_error_exit_3(self):
        with tempfile.TemporaryDirectory() as tmp:
            bad = Path(tmp) / "bad.flp"
            bad.write_text("f :: Int -> Int\nf x = x +\n")
            code, _, err = run("check", bad)
            self.assertEqual(3, code)
            self.assertIn("bad.flp:", err)

    def test_reports_are_deterministic(self):
        for path in sorted((ROOT / "corpus").glob("*.flp")):
            with self.subTest(path.name):
                self.assertEqual(run("check", path, "--json")[1], run("check", path, "--json")[1])


if __name__ == "__main__":
    FLPCHECK = sys.argv[1]
    ROOT = Path(sys.argv[2])
    unittest.main(argv=[sys.argv[0]], verbosity=2)
