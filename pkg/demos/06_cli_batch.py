# # Running the batch front end over the JSON corpus
#
# Every job in corpus/jobs.json is run through the command line tool and
# its exit code is compared with the expected one: 0 for success, 1 for a
# failed check (with a witness) and 2 for bad input.

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

corpus = Path(__file__).resolve().parents[1] / "corpus"
jobs = json.loads((corpus / "jobs.json").read_text(encoding="utf-8"))

for job in jobs:
    argv = [sys.executable, "-m", "mvalgebra", job["command"], *job["inputs"], *job["flags"]]
    proc = subprocess.run(argv, cwd=corpus, capture_output=True, text=True)
    report = json.loads(proc.stdout)
    mark = "ok " if proc.returncode == job["exit"] else "BAD"
    extra = report.get("error") or ("pass" if report.get("pass", True) else "fail")
    print(f"{mark} {job['name']:<28} exit {proc.returncode}  {extra}")
