"""End-to-end tests of the crnkit executable.

Usage: cli_test.py CRNKIT_BINARY SOURCE_DIR [unittest args]
"""

import csv
import io
import json
import math
import os
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

CLI = None
ROOT = None


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("CRNKIT_SEED", None)
    if env:
        full_env.update(env)
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=full_env)


def net(name):
    return ROOT / "networks" / name


class Examples(unittest.TestCase):
    def test_analyze_enzymatic(self):
        p = run("analyze", net("enzymatic.crn"))
        self.assertEqual(p.returncode, 0, p.stderr)
        out = json.loads(p.stdout)
        self.assertEqual(out["deficiency"], 0)
        self.assertEqual(out["ell"], 1)
        species = out["species"]
        e_plus_i = [1 if s in ("E", "I") else 0 for s in species]
        self.assertIn(e_plus_i, out["moieties"])

    def test_balance_triangle_bad(self):
        p = run("balance", net("triangle_bad.crn"))
        self.assertEqual(p.returncode, 1)
        out = json.loads(p.stdout)
        self.assertFalse(out["balanced"])
        self.assertEqual(out["certificate"]["type"], "wegscheider")
        self.assertEqual(out["certificate"]["sigma"], [1, 1, 1])
        self.assertAlmostEqual(abs(out["certificate"]["violation"]), math.log(2), places=12)

    def test_simulate_final_row_matches_chi(self):
        p = run("simulate", net("ab.crn"), "--x0", "1.5,0.5", "--t", "10")
        self.assertEqual(p.returncode, 0, p.stderr)
        rows = list(csv.reader(io.StringIO(p.stdout)))
        self.assertEqual(rows[0], ["t", "x_1", "x_2", "G", "dGdt", "moiety_1"])
        final = [float(v) for v in rows[-1]]
        self.assertEqual(final[0], 10.0)
        q = run("equilibrium", net("ab.crn"), "--x0", "1.5,0.5")
        self.assertEqual(q.returncode, 0, q.stderr)
        x1 = json.loads(q.stdout)["x1"]
        # A <-> B with unit constants relaxes as exp(-2t): 0.5 e^-20 is far below 1e-6.
        for got, want in zip(final[1:3], x1):
            self.assertLessEqual(abs(got - want), 1e-6)
        self.assertEqual(x1, [1.0, 1.0])

    def test_simulate_named_state_and_points(self):
        p = run("simulate", net("ab.crn"), "--x0", "B=0.5,A=1.5", "--t", "2", "--points", "5")
        self.assertEqual(p.returncode, 0, p.stderr)
        rows = list(csv.reader(io.StringIO(p.stdout)))[1:]
        self.assertEqual([float(r[0]) for r in rows], [0.0, 0.5, 1.0, 1.5, 2.0])
        for r in rows:
            e = 0.5 * math.exp(-2 * float(r[0]))
            self.assertLessEqual(abs(float(r[1]) - (1 + e)), 1e-7)

    def test_simulate_check_open_schedule(self):
        with tempfile.TemporaryDirectory() as d:
            sched = Path(d) / "vb.json"
            sched.write_text(json.dumps({"segments": [{"start": 0, "vb": [0.1, 0.1]},
                                                      {"start": 2, "vb": [0.3, 0.0]}]}))
            p = run("simulate", net("open_example.crn"), "--x0", "2,2,2,2,2,2", "--t", "4",
                    "--vb", sched, "--check")
            self.assertEqual(p.returncode, 0, p.stderr)
            rows = list(csv.reader(io.StringIO(p.stdout)))
            self.assertIn(["2"], [r[:1] for r in rows[1:]])

    def test_simulate_check_closed(self):
        p = run("simulate", net("triangle.crn"), "--x0", "3,0.2,1", "--t", "20", "--check")
        self.assertEqual(p.returncode, 0, p.stderr)
        self.assertIn("G nonincreasing 1", p.stderr)

    def test_compose_chain(self):
        with tempfile.TemporaryDirectory() as d:
            out_path = Path(d) / "composite.crn"
            p = run("compose", net("chain_left.crn"), net("chain_right.crn"), "--share", "Xb=Xb",
                    "--out", out_path)
            self.assertEqual(p.returncode, 0, p.stderr)
            out = json.loads(p.stdout)
            self.assertTrue(out["balanced"])
            self.assertEqual(out["analysis"]["c"], 4)
            self.assertEqual(out["analysis"]["ell"], 2)
            self.assertEqual(out_path.read_text(), out["network"])
            # The written composite parses back.
            q = run("analyze", out_path)
            self.assertEqual(q.returncode, 0, q.stderr)
            ident = json.loads(run("compose", net("chain_left.crn"), net("chain_right.crn"),
                                   "--share", "Xb=Xb", "--identify-complexes").stdout)
            self.assertEqual(ident["analysis"]["c"], 3)

    def test_reduce_enzymatic(self):
        p = run("reduce", net("enzymatic.crn"), "--remove-species", "I")
        self.assertEqual(p.returncode, 0, p.stderr)
        out = json.loads(p.stdout)
        self.assertEqual([c["label"] for c in out["retained"]], ["X + E", "Y + E"])
        self.assertEqual(out["dropped_species"], ["I"])
        b = json.loads(run("balance", net("enzymatic.crn")).stdout)
        kx, ky = b["kappa"]
        self.assertLessEqual(abs(out["edges"][0]["kappa"] - kx * ky / (kx + ky)), 1e-12 * kx)
        self.assertTrue(out["laplacian"]["ok"])
        same = run("reduce", net("enzymatic.crn"), "--remove", "C2")
        self.assertEqual(same.stdout, p.stdout)

    def test_reduce_rejects_whole_class(self):
        p = run("reduce", net("ab.crn"), "--remove", "C1,C2")
        self.assertEqual(p.returncode, 2)
        self.assertEqual(p.stdout, "")

    def test_check_is_reproducible(self):
        a = run("check", net("enzymatic.crn"), "--seed", "5", "--trajectories", "6")
        b = run("check", net("enzymatic.crn"), "--seed", "5", "--trajectories", "6", "--jobs", "3")
        c = run("check", net("enzymatic.crn"), "--seed", "1", "--trajectories", "6",
                env={"CRNKIT_SEED": "5"})
        self.assertEqual(a.returncode, 0, a.stderr)
        self.assertEqual(a.stdout, b.stdout)
        self.assertEqual(a.stdout, c.stdout)
        self.assertTrue(json.loads(a.stdout)["passed"])

    def test_outputs_are_byte_identical(self):
        for args in (("simulate", net("enzymatic.crn"), "--x0", "1,2,0.5,0.3", "--t", "5"),
                     ("analyze", net("open_example.crn")),
                     ("reduce", net("triangle.crn"), "--remove", "C2")):
            self.assertEqual(run(*args).stdout, run(*args).stdout)

    def test_exit_codes(self):
        self.assertEqual(run().returncode, 2)
        self.assertEqual(run("analyze", "missing.crn").returncode, 2)
        self.assertEqual(run("simulate", net("ab.crn"), "--x0", "1,2,3").returncode, 2)
        self.assertEqual(run("simulate", net("ab.crn"), "--x0", "1,-2").returncode, 2)
        self.assertEqual(run("check", net("ab.crn"), "--seed", "x").returncode, 2)
        self.assertEqual(run("check", net("ab.crn"), env={"CRNKIT_SEED": "x"}).returncode, 2)
        with tempfile.TemporaryDirectory() as d:
            bad = Path(d) / "bad.crn"
            bad.write_text("A <-> ; kf=1 kr=1\n")
            p = run("analyze", bad)
            self.assertEqual(p.returncode, 2)
            self.assertIn("line 1", p.stderr)
            self.assertEqual(p.stdout, "")
        self.assertEqual(run("simulate", net("triangle_bad.crn"), "--x0", "1,1,1").returncode, 1)


class Schemas(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.schemas = {}
        resources = []
        for path in sorted((ROOT / "docs" / "schemas").glob("*.json")):
            schema = json.loads(path.read_text())
            jsonschema.Draft202012Validator.check_schema(schema)
            cls.schemas[path.stem] = schema
            resources.append((path.name, Resource.from_contents(schema)))
        cls.registry = Registry().with_resources(resources)

    def validate(self, name, stdout):
        doc = json.loads(stdout)
        jsonschema.Draft202012Validator(self.schemas[name], registry=self.registry).validate(doc)

    def test_analyze(self):
        for f in sorted((ROOT / "networks").glob("*.crn")):
            self.validate("analyze", run("analyze", f).stdout)

    def test_balance(self):
        for f in sorted((ROOT / "networks").glob("*.crn")):
            self.validate("balance", run("balance", f).stdout)

    def test_equilibrium(self):
        self.validate("equilibrium", run("equilibrium", net("enzymatic.crn"), "--x0", "1,2,0.5,0.3").stdout)

    def test_simulate_json(self):
        self.validate("simulate", run("simulate", net("two_reactions.crn"), "--x0", "1,2,3",
                                      "--format", "json", "--points", "4").stdout)

    def test_compose(self):
        self.validate("compose", run("compose", net("chain_left.crn"), net("chain_right.crn"),
                                     "--share", "Xb=Xb").stdout)

    def test_reduce(self):
        self.validate("reduce", run("reduce", net("enzymatic.crn"), "--remove-species", "I").stdout)
        self.validate("reduce", run("reduce", net("triangle.crn"), "--remove", "C3").stdout)

    def test_check(self):
        self.validate("check", run("check", net("deficiency_one.crn"), "--trajectories", "3").stdout)

    def test_schedule(self):
        doc = {"segments": [{"start": 0, "vb": [0.1, 0.1]}, {"start": 2, "vb": [0.3, 0.0]}]}
        jsonschema.Draft202012Validator(self.schemas["schedule"]).validate(doc)


if __name__ == "__main__":
    CLI = sys.argv[1]
    ROOT = Path(sys.argv[2])
    unittest.main(argv=[sys.argv[0], *sys.argv[3:]], verbosity=2)
