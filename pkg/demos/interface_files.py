"""Model files, operator dumps, and the command line front end.

Everything the library computes can be driven from JSON configs and
lands as CSV/JSON next to a reproducible run record.
"""

import json
import os
import subprocess
import sys
import tempfile

workdir = tempfile.mkdtemp(prefix="spinlab_demo_")

# a model document: sites, edges, model kind
model_doc = {
    "sites": [{"id": i, "twice_s": 2} for i in range(2)],
    "edges": [{"x": 0, "y": 1, "J": 1.0}],
    "model": {"kind": "aklt"},
}
config = {"model": model_doc, "params": {"length": 5}, "seed": 0}
config_path = os.path.join(workdir, "gap.json")
with open(config_path, "w") as fh:
    json.dump(config, fh, indent=1)
print("config written to", config_path)

out_dir = os.path.join(workdir, "out")
status = subprocess.run(
    [sys.executable, "-m", "spinlab.cli", "gap-cert",
     "--config", config_path, "--out", out_dir],
).returncode
print("gap-cert exit status:", status)
print("files:", sorted(os.listdir(out_dir)))

with open(os.path.join(out_dir, "certificate.json")) as fh:
    cert = json.load(fh)
print()
print("certificate for L =", cert["L"])
print("  epsilon        ", cert["epsilon"])
print("  basic bound    ", cert["bound73"])
print("  refined bound  ", cert["bound74"])
print("  exact gap      ", cert["exact_lambda1"])

with open(os.path.join(out_dir, "run_record.json")) as fh:
    record = json.load(fh)
print()
print("run record: hash", record["model_hash"][:16], "...,",
      "%.2f s" % record["wall_time_s"])

# rejected configs never leave files behind
bad_path = os.path.join(workdir, "bad.json")
with open(bad_path, "w") as fh:
    fh.write('{"model": {}, "unexpected": 1}')
status = subprocess.run(
    [sys.executable, "-m", "spinlab.cli", "gap-cert",
     "--config", bad_path, "--out", os.path.join(workdir, "never")],
).returncode
print()
print("bad config exit status:", status,
      " output dir created:", os.path.exists(os.path.join(workdir, "never")))
