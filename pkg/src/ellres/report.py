"""Report documents for the classify, enumerate, verify and witness commands.

Documents are plain JSON-ready dicts with ``"schema": 1``; every count is
a decimal string.  Nothing time- or host-dependent enters a document
unless timing is requested, so equal configs give byte-identical output.
"""

from __future__ import annotations

import json
import os
import random
import time
from dataclasses import dataclass
from typing import Optional

from . import __version__
from .bundle import BundleError, build_bundle, determinant_kernel
from .classifier import (NonSplit, classify_grassmann, classify_resonance, classify_strata,
                         counts_to_json, expected_counts)
from .config import RunConfig
from .resonance import (BudgetExceeded, WitnessError, enumerate_plane_section, enumerate_resonance,
                        saturation_degree_oracle, stratum_degree, witness_nonempty_strata)

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_CONFIG = 0, 1, 2, 3


@dataclass
class Outcome:
    document: dict
    exit_code: int

    def dumps(self) -> str:
        return dumps(self.document)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def verdict(check: str, status: str, detail: str = "") -> dict:
    assert status in ("pass", "fail", "skipped")
    out = {"check": check, "status": status}
    if detail:
        out["reason" if status == "skipped" else "detail"] = detail
    return out


def exit_code_for(verdicts) -> int:
    return EXIT_FAIL if any(v["status"] == "fail" for v in verdicts) else EXIT_OK


def _base(command: str, cfg: RunConfig) -> dict:
    return {"schema": SCHEMA, "tool": {"name": "ellres", "version": __version__},
            "command": command, "config": cfg.to_dict()}


def _classification(cfg: RunConfig) -> dict:
    desc = cfg.descriptor()
    out = {"descriptor": desc.to_json(), "resonance": classify_resonance(desc).to_json()}
    out["grassmann"] = classify_grassmann(desc).to_json()
    return out


def _workers(cfg: RunConfig, override: Optional[int]) -> int:
    if override is not None:
        return max(1, override)
    if cfg.verify.workers is not None:
        return max(1, cfg.verify.workers)
    return os.cpu_count() or 1


def run_classify(cfg: RunConfig) -> Outcome:
    doc = _base("classify", cfg)
    doc["classification"] = _classification(cfg)
    if cfg.verify.fields:
        desc = cfg.descriptor()
        doc["expected"] = {str(q): counts_to_json(expected_counts(desc, q)) for q in cfg.verify.fields}
    return Outcome(doc, EXIT_OK)


def _bundle(cfg: RunConfig):
    E = cfg.curve_obj()
    P, Q = cfg.points()
    B = build_bundle(E, cfg.bundle.a, P, cfg.bundle.b, Q)
    return B, determinant_kernel(B)


def run_enumerate(cfg: RunConfig, workers: Optional[int] = None, budget: Optional[int] = None) -> Outcome:
    doc = _base("enumerate", cfg)
    if not cfg.concrete:
        doc["enumeration"] = None
        doc["note"] = "enumeration needs a split bundle on a concrete curve"
        return Outcome(doc, EXIT_CONFIG)
    B, det = _bundle(cfg)
    w = _workers(cfg, workers)
    t0 = time.perf_counter()
    try:
        r = enumerate_resonance(B, det, budget or cfg.verify.projective_budget, w)
    except BudgetExceeded as exc:
        doc["error"] = str(exc)
        return Outcome(doc, EXIT_BUDGET)
    try:
        r = r.merged(enumerate_plane_section(B, det, budget or cfg.verify.plane_budget, w))
    except BudgetExceeded as exc:
        doc["planes_skipped"] = str(exc)
    doc["enumeration"] = r.to_json()
    if cfg.verify.timing:
        doc["timing"] = {"seconds": round(time.perf_counter() - t0, 3)}
    return Outcome(doc, EXIT_OK)


def _compare_counts(label: str, observed: dict, expected: dict) -> list:
    out = []
    for d, want in expected.items():
        got = observed.get(d, 0)
        check = f"{label}_{d} count"
        if isinstance(want, str):
            out.append(verdict(check, "skipped", f"{want}; observed {got}"))
        elif got == want:
            out.append(verdict(check, "pass", f"{got}"))
        else:
            out.append(verdict(check, "fail", f"observed {got}, expected {want}"))
    extra = sorted(set(observed) - set(expected))
    if extra:
        out.append(verdict(f"{label} unexpected strata", "fail", f"degrees {extra}"))
    return out


def run_verify(cfg: RunConfig, workers: Optional[int] = None, budget: Optional[int] = None,
               sample: Optional[int] = None, seed: Optional[int] = None,
               expected: Optional[dict] = None) -> Outcome:
    """Enumerate, witness and cross-check against the classifier.

    ``expected`` replaces the classifier's count table (used to exercise
    the failure path)."""
    doc = _base("verify", cfg)
    doc["classification"] = _classification(cfg)
    verdicts: list = []
    doc["verdicts"] = verdicts
    if isinstance(cfg.descriptor(), NonSplit) or not cfg.concrete:
        verdicts.append(verdict("enumeration", "skipped", "non-split or symbolic bundles are classified only"))
        return Outcome(doc, EXIT_OK)
    t0 = time.perf_counter()
    desc = cfg.descriptor()
    try:
        B, det = _bundle(cfg)
    except BundleError as exc:
        verdicts.append(verdict("enumeration", "skipped", str(exc)))
        return Outcome(doc, EXIT_OK)
    q = B.p
    table = expected if expected is not None else expected_counts(desc, q)
    doc["expected"] = counts_to_json(table)
    w = _workers(cfg, workers)

    bound = det.domain_dim - B.n
    verdicts.append(verdict("kernel bound", "pass" if det.kernel_dim >= bound else "fail",
                            f"dim ker = {det.kernel_dim} >= {bound}"))
    try:
        r = enumerate_resonance(B, det, budget or cfg.verify.projective_budget, w, keep_points=True)
    except BudgetExceeded as exc:
        doc["error"] = str(exc)
        return Outcome(doc, EXIT_BUDGET)
    predicted = {s.degree for s in classify_strata(desc) if s.nonempty}
    observed = r.observed_degrees
    verdicts.append(verdict("strata support", "pass" if observed <= predicted else "fail",
                            f"observed {sorted(observed)} within predicted {sorted(predicted)}"))
    verdicts.extend(_compare_counts("R", r.projective, table["R"]))
    try:
        g = enumerate_plane_section(B, det, budget or cfg.verify.plane_budget, w)
        verdicts.extend(_compare_counts("G", g.planes, table["G"]))
        r = r.merged(g)
    except BudgetExceeded as exc:
        verdicts.append(verdict("G counts", "skipped", str(exc)))

    try:
        wit = witness_nonempty_strata(B, det, sorted(predicted))
        verdicts.append(verdict("witnesses", "pass", f"degrees {sorted(wit)}"))
        doc["witnesses"] = {str(d): p.to_json() for d, p in wit.items()}
    except WitnessError as exc:
        verdicts.append(verdict("witnesses", "fail", str(exc)))

    n_sample = cfg.verify.sample if sample is None else sample
    rng = random.Random(cfg.verify.seed if seed is None else seed)
    pts = r.resonant_points
    idx = sorted(rng.sample(range(len(pts)), min(n_sample, len(pts))))
    bad = []
    for i in idx:
        s = B.section(pts[i])
        if stratum_degree(B, det, s) != saturation_degree_oracle(B, s):
            bad.append(list(map(int, pts[i])))
    verdicts.append(verdict("degree cross-check", "fail" if bad else "pass",
                            f"{len(idx)} sampled" + (f", mismatches {bad[:3]}" if bad else "")))

    doc["enumeration"] = r.to_json()
    if cfg.verify.timing:
        doc["timing"] = {"seconds": round(time.perf_counter() - t0, 3)}
    return Outcome(doc, exit_code_for(verdicts))


def run_witness(cfg: RunConfig) -> Outcome:
    doc = _base("witness", cfg)
    desc = cfg.descriptor()
    strata = classify_strata(desc)
    lines = []
    doc["lines"] = lines
    if not any(s.nonempty for s in strata):
        lines.append("no strata predicted")
        return Outcome(doc, EXIT_OK)
    if not cfg.concrete:
        lines.append("witnesses need a split bundle on a concrete curve")
        return Outcome(doc, EXIT_CONFIG)
    B, det = _bundle(cfg)
    try:
        wit = witness_nonempty_strata(B, det, [s.degree for s in strata if s.nonempty])
    except WitnessError as exc:
        lines.append(str(exc))
        return Outcome(doc, EXIT_FAIL)
    doc["witnesses"] = {str(d): p.to_json() for d, p in wit.items()}
    for s in strata:
        if s.nonempty:
            lines.append(f"d={s.degree} witness {list(wit[s.degree].coords)}")
        elif s.degree <= B.a:
            lines.append(f"d={s.degree} predicted empty")
    return Outcome(doc, EXIT_OK)


def render(doc: dict) -> str:
    """Human-readable table for a stored document."""
    out = [f"{doc.get('command', '?')} report (schema {doc.get('schema')}, {doc['tool']['name']} {doc['tool']['version']})"]
    cls = doc.get("classification")
    if cls:
        res = cls["resonance"]
        params = ", ".join(f"{k}={v}" for k, v in res["params"].items())
        out.append(f"bundle      {json.dumps(cls['descriptor'])}")
        out.append(f"resonance   {res['variant']}({params})  [{res['rule']}]")
        strata = [s["degree"] for s in res["strata"] if s["nonempty"]]
        out.append(f"strata      {', '.join(strata) or 'none'}")
        g = cls["grassmann"]
        out.append(f"G(E)        irreducible={g['irreducible']}  components>={g['component_lower_bound']}")
        if res.get("connectivity"):
            out.append(f"note        {res['connectivity']}")
    enum = doc.get("enumeration")
    if enum:
        for part, key in (("projective", "total_resonant"), ("planes", "total_in_G")):
            block = enum.get(part)
            if block:
                counts = "  ".join(f"d={d}: {c}" for d, c in block["by_degree"].items())
                out.append(f"{part:<11} visited {block['visited']}, {key} {block[key]}   {counts}")
    for v in doc.get("verdicts", []):
        extra = v.get("detail") or v.get("reason") or ""
        out.append(f"  {v['status']:<8} {v['check']:<22} {extra}")
    for line in doc.get("lines", []):
        out.append(f"  {line}")
    return "\n".join(out) + "\n"
