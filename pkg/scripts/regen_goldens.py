"""Rewrite the committed goldens from the current code.

    python scripts/regen_goldens.py

Review the diff before committing: goldens are the regression baseline.
"""

import glob
import json
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(ROOT, "tests"))

from ellres.classifier import classify_grassmann, classify_resonance  # noqa: E402
from ellres.config import load_config  # noqa: E402
from ellres.report import run_verify  # noqa: E402
from test_acceptance import CLASSIFIER_TABLE  # noqa: E402


def main():
    out = os.path.join(ROOT, "goldens")
    os.makedirs(out, exist_ok=True)
    table = [{"descriptor": d.to_json(), "resonance": classify_resonance(d).to_json(),
              "grassmann": classify_grassmann(d).to_json()} for d, *_ in CLASSIFIER_TABLE]
    with open(os.path.join(out, "classifier_table.json"), "w", encoding="utf-8") as fh:
        json.dump(table, fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    for path in sorted(glob.glob(os.path.join(ROOT, "configs", "*.toml"))):
        name = os.path.splitext(os.path.basename(path))[0]
        outcome = run_verify(load_config(path), workers=1)
        with open(os.path.join(out, f"{name}.verify.json"), "w", encoding="utf-8") as fh:
            fh.write(outcome.dumps())
        print(f"{name}: exit {outcome.exit_code}")


if __name__ == "__main__":
    main()
