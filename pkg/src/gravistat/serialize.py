"""Deterministic CSV and JSON emission for branches, turning points and
check reports.

Numbers are written with 17 significant digits, enough to round-trip a
double exactly, and the emitters are pure functions of their inputs, so
re-running a command reproduces its files byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .branch import Branch, BranchFailure, BranchSample, SolutionCount, TurningPointSet
from .models import FD, ModelSpec, make_model
from .validation import CheckReport

CSV_COLUMNS = ("rho0", "mass", "m", "sup_density", "lambda",
               "entropy", "potential", "free_energy")


def fmt_number(x) -> str:
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return repr(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    return format(x, ".17g")


def dumps(value, indent: int = 0) -> str:
    """JSON text with .17g floats and insertion-ordered keys."""
    if isinstance(value, np.generic):
        value = value.item()
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = (f'{inner}"{k}": {dumps(v, indent + 2)}' for k, v in value.items())
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = (f"{inner}{dumps(v, indent + 2)}" for v in value)
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, float)):
        return fmt_number(value)
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _sample_row(sample: BranchSample) -> list[str]:
    return [fmt_number(v) for v in
            (sample.rho0, sample.mass, sample.m, sample.sup_density,
             sample.multiplier, sample.entropy, sample.potential,
             sample.free_energy)]


def branch_to_csv(branch: Branch) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)  # RFC-4180: CRLF rows, minimal quoting
    writer.writerow(CSV_COLUMNS)
    for sample in branch.samples:
        writer.writerow(_sample_row(sample))
    return buf.getvalue()


def branch_from_csv(text: str) -> Branch:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_COLUMNS:
        raise ValueError(f"expected header {','.join(CSV_COLUMNS)}")
    samples = []
    for row in reader:
        if not row:
            continue
        vals = [float(v) for v in row]
        samples.append(BranchSample(rho0=vals[0], mass=vals[1], m=vals[2],
                                    sup_density=vals[3], multiplier=vals[4],
                                    entropy=vals[5], potential=vals[6],
                                    free_energy=vals[7]))
    return Branch(model=None, samples=samples)


def model_to_dict(model: ModelSpec | None) -> dict | None:
    if model is None:
        return None
    out = {"kind": model.kind, "eta": model.eta}
    if model.kind == FD:
        out["mu"] = model.mu
    return out


def model_from_dict(d: dict | None) -> ModelSpec | None:
    if d is None:
        return None
    return make_model(d["kind"], d.get("eta", 0.0))


def branch_to_json(branch: Branch) -> str:
    doc = {
        "model": model_to_dict(branch.model),
        "samples": [dict(zip(CSV_COLUMNS, (s.rho0, s.mass, s.m, s.sup_density,
                                           s.multiplier, s.entropy, s.potential,
                                           s.free_energy)))
                    for s in branch.samples],
        "failures": [{"rho0": f.rho0, "reason": f.reason} for f in branch.failures],
    }
    return dumps(doc) + "\n"


def branch_from_json(text: str) -> Branch:
    doc = json.loads(text)
    samples = [BranchSample(rho0=s["rho0"], mass=s["mass"], m=s["m"],
                            sup_density=s["sup_density"], multiplier=s["lambda"],
                            entropy=s["entropy"], potential=s["potential"],
                            free_energy=s["free_energy"])
               for s in doc["samples"]]
    failures = [BranchFailure(rho0=f["rho0"], reason=f["reason"])
                for f in doc.get("failures", [])]
    return Branch(model=model_from_dict(doc.get("model")), samples=samples,
                  failures=failures)


def turning_points_to_json(tps: TurningPointSet, model: ModelSpec | None = None) -> str:
    def encode(seq):
        return [{"n": t.index, "mass": t.mass, "rho0": t.rho0,
                 "rho0_bracket": list(t.rho0_bracket)} for t in seq]

    doc = {"model": model_to_dict(model),
           "lower": encode(tps.lower), "upper": encode(tps.upper)}
    return dumps(doc) + "\n"


def count_to_json(result: SolutionCount, mass_target: float,
                  model: ModelSpec | None = None) -> str:
    doc = {"model": model_to_dict(model), "mass_target": mass_target,
           "count": result.count, "lower_bound_only": result.lower_bound_only,
           "roots": list(result.roots),
           "unresolved_brackets": [list(b) for b in result.unresolved]}
    return dumps(doc) + "\n"


def report_to_dict(report: CheckReport) -> dict:
    margin = report.worst_margin
    return {"name": report.name, "passed": report.passed,
            "worst_margin": None if math.isnan(margin) else margin,
            "location": report.location, "tolerance": report.tolerance,
            "inconclusive": report.inconclusive}


def validation_records_to_json(records: list[dict]) -> str:
    doc = []
    for record in records:
        entry = {k: v for k, v in record.items() if k != "checks"}
        entry["checks"] = [report_to_dict(r) for r in record["checks"]]
        doc.append(entry)
    return dumps(doc) + "\n"
