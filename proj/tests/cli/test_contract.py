"""End-to-end checks of the volwealth binary: exit codes, output schema,
sweep ordering and an arbitrary-precision reference value."""

import csv
import io
import json
import pathlib
import subprocess
import sys
import tempfile
import unittest

import jsonschema
import mpmath

BINARY = pathlib.Path(sys.argv.pop(1))
SCHEMA = json.loads(pathlib.Path(sys.argv.pop(1)).read_text())


def run(*args):
    p = subprocess.run([str(BINARY), *args], capture_output=True, text=True, timeout=300)
    return p.returncode, p.stdout, p.stderr


def sets(**kv):
    out = []
    for k, v in kv.items():
        out += ["--set", f"{k.replace('__', '.')}={v}"]
    return out


def reference_value(mu, sigma, nu, delta, k0, u, tilt):
    """V as a plain double integral over time and the standard normal.

    u(C) times the normal density peaks near z = tilt * sigma * sqrt(t); the
    z window is centred there. The time integral is cut at 2000, where
    exp(-delta t) is below 1e-26 for the points used here.
    """
    mpmath.mp.dps = 20
    mu, sigma, nu, delta, k0 = map(mpmath.mpf, (mu, sigma, nu, delta, k0))

    def inner(t):
        if t == 0:
            return u(nu * k0)
        drift = (mu - nu - sigma**2 / 2) * t
        vol = sigma * mpmath.sqrt(t)
        m = tilt * vol
        f = lambda z: u(nu * k0 * mpmath.exp(drift + vol * z)) * mpmath.npdf(z)
        return mpmath.quad(f, [m - 14, m, m + 14])

    return mpmath.quad(lambda t: mpmath.exp(-delta * t) * inner(t), [0, 20, 100, 400, 2000])


class ExitCodes(unittest.TestCase):
    def test_report_ok(self):
        code, out, _ = run("report")
        self.assertEqual(code, 0)
        self.assertIn("V", out)

    def test_divergence_names_sigma_c(self):
        code, _, err = run("report", *sets(sigma=0.3))
        self.assertEqual(code, 2)
        self.assertIn("0.24494897", err)

    def test_bad_configuration(self):
        for args in (sets(utility="power_pos", beta=1.5), sets(sigma="x"), sets(colour="red"),
                     ["report", "--backend", "gpu"], ["report", "--config", "/nonexistent"]):
            with self.subTest(args=args):
                argv = args if args and args[0] == "report" else ["report", *args]
                code, _, err = run(*argv)
                self.assertEqual(code, 1)
                self.assertTrue(err.strip())

    def test_verify_ok(self):
        code, out, _ = run("verify", "--paths", "20000", *sets(mc__steps=128))
        self.assertEqual(code, 0, out)
        self.assertNotIn("FAIL", out.upper().replace("FAILED 0", ""))

    def test_out_file(self):
        with tempfile.TemporaryDirectory() as d:
            path = pathlib.Path(d) / "r.json"
            code, out, _ = run("report", "--format", "json", "--out", str(path))
            self.assertEqual(code, 0)
            self.assertEqual(out, "")
            json.loads(path.read_text())


class Schema(unittest.TestCase):
    def check(self, *args):
        code, out, err = run(*args, "--format", "json")
        self.assertIn(code, (0, 3), err)
        doc = json.loads(out)
        jsonschema.validate(doc, SCHEMA)
        return doc

    def test_report_all_backends(self):
        doc = self.check("report", "--backend", "all", "--paths", "2000", *sets(nu_star="true"))
        self.assertEqual([r["backend"] for r in doc["rows"]], ["closed", "quad", "mc"])

    def test_sweep_with_divergent_tail(self):
        doc = self.check("sweep", "--sweep", "sigma:0:0.3:7", "--backend", "quad")
        self.assertTrue(doc["rows"][-1]["convergence"].startswith("divergent"))
        self.assertIsNone(doc["rows"][-1]["V"])

    def test_verify(self):
        doc = self.check("verify", "--paths", "20000", *sets(mc__steps=128))
        self.assertTrue(all(c["status"] == "pass" for c in doc["checks"]))

    def test_schema_rejects_garbage(self):
        with self.assertRaises(jsonschema.ValidationError):
            jsonschema.validate({"scenario": {}, "rows": [{"V": "x"}], "checks": []}, SCHEMA)


class Sweep(unittest.TestCase):
    def rows(self, *args):
        code, out, err = run("sweep", *args, "--format", "csv")
        self.assertEqual(code, 0, err)
        return list(csv.DictReader(io.StringIO(out)))

    def test_comparative_statics(self):
        cases = {"power_neg": (1, -1), "power_pos": (-1, -1)}
        for util, (p_dir, v_dir) in cases.items():
            with self.subTest(util=util):
                rows = self.rows("--sweep", "sigma:0:0.2:6", *sets(utility=util, beta=0.5))
                v = [float(r["V"]) for r in rows]
                p = [float(r["p"]) for r in rows]
                for a, b in zip(v, v[1:]):
                    self.assertGreater(v_dir * (b - a), 0)
                for a, b in zip(p, p[1:]):
                    self.assertGreater(p_dir * (b - a), 0)

    def test_log_price_flat(self):
        rows = self.rows("--sweep", "sigma:0:0.5:5", *sets(utility="log", delta=0.1, k0=10))
        for r in rows:
            self.assertAlmostEqual(float(r["p"]), 1.0, places=13)

    def test_seed_reproducible(self):
        a = self.rows("--sweep", "sigma:0.05:0.1:3", "--backend", "mc", "--paths", "2000", "--seed", "7",
                      *sets(mc__steps=64))
        b = self.rows("--sweep", "sigma:0.05:0.1:3", "--backend", "mc", "--paths", "2000", "--seed", "7",
                      *sets(mc__steps=64))
        self.assertEqual(a, b)


class Reference(unittest.TestCase):
    POINT = dict(mu=0.05, sigma=0.1, nu=0.02, delta=0.03, k0=1.5)

    def value(self, backend, **extra):
        code, out, err = run("report", "--backend", backend, "--format", "json", *sets(**self.POINT, **extra))
        self.assertEqual(code, 0, err)
        return json.loads(out)["rows"][0]["V"]

    def test_against_arbitrary_precision(self):
        utilities = {
            (("utility", "power_neg"), ("gamma", 2)): (lambda c: -c**-2, -2),
            (("utility", "power_pos"), ("beta", 0.5)): (mpmath.sqrt, 0.5),
            (("utility", "log"),): (mpmath.log, 0),
        }
        for key, (u, tilt) in utilities.items():
            extra = dict(key)
            ref = float(reference_value(**self.POINT, u=u, tilt=tilt))
            for backend in ("closed", "quad"):
                with self.subTest(extra=extra, backend=backend):
                    got = self.value(backend, **extra)
                    self.assertLessEqual(abs(got - ref), 1e-8 * abs(ref) + 1e-12, (got, ref))


if __name__ == "__main__":
    unittest.main(verbosity=2)
