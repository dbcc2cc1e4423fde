"""Report assembly and serialization (JSON, text, CSV)."""

from __future__ import annotations

import csv
import io
import json
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

from .. import __version__
from .config import RunConfig, config_json
from .suites import Instance, SuiteResult, build_instances, run_instance

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

CSV_COLUMNS = ("z1", "z2", "z3", "z4", "delta", "n_plus", "n_minus")


@dataclass
class Report:
    config_digest: str
    config: dict
    results: list  # SuiteResult
    seeds: list
    instances: dict = field(default_factory=dict)  # label -> {"u", "chart_sign", "notes"}
    instance_discrepancies: list = field(default_factory=list)

    @property
    def failed(self) -> list:
        return [r for r in self.results if r.verdict == "fail"]

    @property
    def exit_code(self) -> int:
        return EXIT_FAIL if self.failed else EXIT_OK

    @property
    def discrepancies(self) -> list:
        seen = list(self.instance_discrepancies)
        for r in self.results:
            seen += r.discrepancies
        return list(dict.fromkeys(seen))

    @property
    def asd_sign(self):
        signs = {r.data["asd_sign"] for r in self.results if r.name == "curvature" and "asd_sign" in r.data}
        nonflat = {s for s in signs if s is not None}
        if len(nonflat) == 1:
            return nonflat.pop()
        if len(nonflat) > 1:
            return "inconsistent"
        return "undetermined (flat)" if signs else None

    @property
    def signature_histogram(self) -> dict:
        hist: dict = {}
        for r in self.results:
            for k, v in r.data.get("histogram", {}).items():
                hist[k] = hist.get(k, 0) + v
        return dict(sorted(hist.items()))

    def signature_rows(self) -> list:
        rows = []
        for r in self.results:
            rows += r.data.get("rows", [])
        return rows

    def as_json(self, timing: bool = True) -> dict:
        out = {
            "config_digest": self.config_digest,
            "config": self.config,
            "instances": self.instances,
            "suites": [r.as_json() for r in self.results],
            "asd_sign": self.asd_sign,
            "signature_histogram": self.signature_histogram,
            "discrepancies": self.discrepancies,
            "seeds": list(self.seeds),
            "exit_code": self.exit_code,
        }
        if timing:
            out["timing"] = {f"{r.name}@{r.instance}": round(r.seconds, 4) for r in self.results}
            out["versions"] = versions()
        return out


def versions() -> dict:
    out = {"artifact": __version__, "python": platform.python_version()}
    for pkg in ("gmpy2", "sympy", "numpy", "mpmath"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


def _run_one(args) -> list:
    inst, cfg = args
    return run_instance(inst, cfg)


def run_suites(cfg: RunConfig, jobs: int = 1, instances: list[Instance] | None = None) -> Report:
    """Run the selected suites on every instance; deterministic given the seeds."""
    insts = build_instances(cfg) if instances is None else instances
    work = [(inst, cfg) for inst in insts]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(_run_one, work))
    else:
        done = [_run_one(w) for w in work]
    results, info, disc = [], {}, []
    for inst, res in zip(insts, done):
        info[inst.label] = {"u": inst.u.to_str(), "chart_sign": inst.sign, "notes": list(inst.notes)}
        disc += inst.discrepancies
        results += res
    return Report(cfg.digest(), config_json(cfg), results, list(cfg.seeds), info, disc)


def render_text(report: Report) -> str:
    lines = [f"config {report.config_digest}  seeds {report.seeds}"]
    for label, info in report.instances.items():
        lines.append(f"instance {label} (chart s={info['chart_sign']}): u = {info['u']}")
        lines += [f"  - {n}" for n in info["notes"]]
    width = max((len(r.name) for r in report.results), default=8)
    for r in report.results:
        line = f"[{r.verdict.upper():7}] {r.name:<{width}}  {r.instance}"
        if r.witness:
            line += f"\n          witness: {r.witness}"
        for n in r.notes:
            line += f"\n          - {n}"
        lines.append(line)
    lines.append(f"ASD sign: {report.asd_sign}")
    if report.signature_histogram:
        lines.append("signature histogram: " + ", ".join(f"{k}: {v}" for k, v in report.signature_histogram.items()))
    if report.discrepancies:
        lines.append("discrepancies:")
        lines += [f"  * {d}" for d in report.discrepancies]
    counts = {v: sum(r.verdict == v for r in report.results) for v in ("pass", "fail", "skipped")}
    lines.append(f"{counts['pass']} passed, {counts['fail']} failed, {counts['skipped']} skipped")
    return "\n".join(lines) + "\n"


def render_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)
    return buf.getvalue()


def emit_report(report: Report, fmt: str = "json", path=None, timing: bool = True) -> int:
    """Write the report (stdout when ``path`` is None) and return the exit code."""
    if fmt == "json":
        text = json.dumps(report.as_json(timing), indent=2) + "\n"
    elif fmt == "text":
        text = render_text(report)
    elif fmt == "csv":
        text = render_csv(report.signature_rows())
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return report.exit_code
