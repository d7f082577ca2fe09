"""End-to-end tests of the bvgraded command line.

usage: cli_test.py BINARY CORPUS_DIR GOLDEN_DIR SCHEMA
"""

import collections
import json
import os
import pathlib
import shutil
import subprocess
import sys
import tempfile
import unittest

import jsonschema

BINARY, CORPUS, GOLDEN, SCHEMA = (pathlib.Path(a) for a in sys.argv[1:5])
del sys.argv[1:5]


def run(*args, env=None):
    full = dict(os.environ)
    full.pop("BVGRADED_CORPUS", None)
    full.update(env or {})
    return subprocess.run([str(BINARY), *args], capture_output=True, text=True, env=full, timeout=600)


class Goldens(unittest.TestCase):
    def check_text(self, name, *args):
        expected = (GOLDEN / name).read_text()
        for jobs in ("1", "8"):
            r = run("-j", jobs, *args)
            self.assertEqual(r.stdout, expected, f"{name} with {jobs} workers")

    def test_verify_all(self):
        self.check_text("verify_all.txt", "verify", "all")

    def test_verify_cme(self):
        self.check_text("verify_cme.txt", "verify", "cme")

    def test_verify_pullback_gr(self):
        self.check_text("verify_pullback_gr.txt", "verify", "pullback", "--from", "bf", "--to", "gr")

    def test_json_matches_golden_without_timings(self):
        r = run("--format", "json", "verify", "all")
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads(r.stdout)
        for report in doc["reports"]:
            del report["wallTime"]
        self.assertEqual(doc, json.loads((GOLDEN / "verify_all.json").read_text()))


class JsonReport(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        r = run("--format", "json", "verify", "all")
        cls.code = r.returncode
        cls.doc = json.loads(r.stdout)

    def test_schema(self):
        jsonschema.validate(self.doc, json.loads(SCHEMA.read_text()))

    def test_every_check_once_in_order(self):
        ids = [r["checkId"] for r in self.doc["reports"]]
        duplicates = [i for i, n in collections.Counter(ids).items() if n != 1]
        self.assertEqual(duplicates, [])
        self.assertEqual(ids, sorted(ids))
        suites = {i.split(".")[0] for i in ids}
        for suite in ("cme", "qsq", "qext", "hamilton", "pullback", "compose", "cosmological", "onshell", "identities"):
            self.assertIn(suite, suites)

    def test_summary_counts(self):
        counts = collections.Counter(r["status"] for r in self.doc["reports"])
        self.assertEqual(self.doc["summary"], {s: counts.get(s, 0) for s in ("pass", "fail", "erratum-detected")})
        self.assertEqual(self.doc["summary"]["fail"], 0)

    def test_witness_iff_not_pass(self):
        for r in self.doc["reports"]:
            self.assertEqual(r["witness"] is None, r["status"] == "pass", r["checkId"])

    def test_ledger_hash_shared(self):
        self.assertTrue(all(r["conventionLedgerHash"] == self.doc["conventionLedgerHash"] for r in self.doc["reports"]))


class ExitCodes(unittest.TestCase):
    def test_pass(self):
        self.assertEqual(run("verify", "all").returncode, 0)

    def test_strict_turns_errata_into_failure(self):
        self.assertEqual(run("--strict", "verify", "all").returncode, 1)
        self.assertEqual(run("--strict", "verify", "qsq").returncode, 0)

    def test_usage(self):
        self.assertEqual(run("verify", "nonsense").returncode, 2)
        self.assertEqual(run("verify").returncode, 2)
        self.assertEqual(run("--format", "xml", "verify", "all").returncode, 2)
        self.assertEqual(run("show", "action").returncode, 2)

    def test_missing_corpus(self):
        self.assertEqual(run("--corpus", "/nonexistent/corpus", "verify", "cme").returncode, 2)
        self.assertEqual(run("verify", "cme", env={"BVGRADED_CORPUS": "/nonexistent/corpus"}).returncode, 2)


class CorpusOverride(unittest.TestCase):
    def setUp(self):
        self.tmp = pathlib.Path(tempfile.mkdtemp())
        shutil.copytree(CORPUS, self.tmp / "corpus")

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_env_selects_corpus(self):
        r = run("verify", "qsq", env={"BVGRADED_CORPUS": str(self.tmp / "corpus")})
        self.assertEqual(r.returncode, 0, r.stderr)

    def test_flag_beats_env(self):
        r = run("--corpus", str(self.tmp / "corpus"), "verify", "qsq", env={"BVGRADED_CORPUS": "/nonexistent"})
        self.assertEqual(r.returncode, 0, r.stderr)

    def test_mutated_generating_function_fails(self):
        path = self.tmp / "corpus" / "genfun_G.bvx"
        text = path.read_text()
        self.assertIn("  - Tr[c ^ chi'+];", text)
        path.write_text(text.replace("  - Tr[c ^ chi'+];", "  + Tr[c ^ chi'+];"))
        r = run("verify", "pullback", "--to", "pp", env={"BVGRADED_CORPUS": str(self.tmp / "corpus")})
        self.assertEqual(r.returncode, 1, r.stdout + r.stderr)
        self.assertRegex(r.stdout, r"(?m)^fail +pullback\.bf-pp$")

    def test_malformed_file_reports_position(self):
        path = self.tmp / "corpus" / "bf.bvt"
        path.write_text(path.read_text().replace("pair A A+;", "pair A A+"))
        r = run("verify", "cme", env={"BVGRADED_CORPUS": str(self.tmp / "corpus")})
        self.assertEqual(r.returncode, 2)
        self.assertRegex(r.stderr, r"bf\.bvt:\d+:\d+")


class Show(unittest.TestCase):
    def test_action(self):
        r = run("show", "action", "--theory", "bf")
        self.assertEqual(r.returncode, 0)
        self.assertIn("Tr[B ^ F[A]]", r.stdout)

    def test_q(self):
        r = run("show", "q", "--theory", "gr")
        self.assertEqual(r.returncode, 0)
        self.assertIn("q e =", r.stdout)

    def test_transform(self):
        r = run("show", "transform", "G")
        self.assertEqual(r.returncode, 0)
        self.assertIn("# derived rules", r.stdout)


if __name__ == "__main__":
    unittest.main(verbosity=2)
