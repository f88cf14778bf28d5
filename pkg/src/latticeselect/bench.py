"""Benchmark/stress harness: run suites of labeled cases and report
solve status, timing, lattice sizes, and program metrics.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .dataset import EditRequest, load_dataset, load_labels
from .dsl import ProgramMetrics, ast_metrics, parse_action, run_program
from .errors import UserError
from .search import Deadline
from .errors import SynthesisTimeout
from .synth import SynthesisMode, synthesize


@dataclass(frozen=True)
class BenchCase:
    name: str
    dataset_path: Path
    labels_path: Path
    action_text: str
    expected: Optional[tuple[str, ...]] = None
    mode: Optional[SynthesisMode] = None
    timeout_s: float = 60.0

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise UserError(f"case {self.name}: timeout must be > 0")
        for path in (self.dataset_path, self.labels_path):
            if not Path(path).is_file():
                raise UserError(f"case {self.name}: missing file {path}")


@dataclass(frozen=True)
class CaseResult:
    name: str
    solved: bool
    matched: Optional[bool]  # vs expected selection; None when no expectation
    time_s: float
    lattice_sizes: tuple[int, ...]
    clause_count: int
    metrics: Optional[ProgramMetrics]
    selected: tuple[str, ...]
    error: Optional[str] = None


@dataclass(frozen=True)
class SuiteResult:
    results: tuple[CaseResult, ...]
    mode: SynthesisMode

    @property
    def total_time_s(self) -> float:
        return sum(r.time_s for r in self.results)

    @property
    def solved_count(self) -> int:
        return sum(1 for r in self.results if r.solved)

    @property
    def matched_count(self) -> int:
        return sum(1 for r in self.results if r.matched)


def load_case(path: Path) -> BenchCase:
    data = json.loads(path.read_text(encoding="utf-8"))
    base = path.parent
    try:
        return BenchCase(
            name=data.get("name", path.stem),
            dataset_path=base / data["dataset"],
            labels_path=base / data["labels"],
            action_text=data.get("action", "Remove"),
            expected=tuple(data["expected"]) if "expected" in data else None,
            mode=SynthesisMode.parse(data["mode"]) if "mode" in data else None,
            timeout_s=float(data.get("timeout", 60.0)),
        )
    except KeyError as exc:
        raise UserError(f"case file {path}: missing key {exc}")


def load_suite(suite_dir) -> list[BenchCase]:
    suite = Path(suite_dir)
    if not suite.is_dir():
        raise UserError(f"suite directory {suite} does not exist")
    cases = []
    for path in sorted(suite.glob("case_*.json")):
        cases.append(load_case(path))
    return cases


def run_case(
    case: BenchCase,
    mode: Optional[SynthesisMode] = None,
    timeout_s: Optional[float] = None,
) -> CaseResult:
    effective_mode = mode or case.mode or SynthesisMode.FULL
    budget = timeout_s if timeout_s is not None else case.timeout_s
    t0 = time.perf_counter()
    try:
        dataset = load_dataset(Path(case.dataset_path).read_text(encoding="utf-8"))
        labels = load_labels(Path(case.labels_path).read_text(encoding="utf-8"))
        action = parse_action(case.action_text)
        report = synthesize(
            dataset,
            EditRequest(action, labels),
            mode=effective_mode,
            deadline=Deadline(budget),
        )
        selected = run_program(report.program, dataset).object_ids
    except (UserError, SynthesisTimeout) as exc:
        return CaseResult(
            name=case.name,
            solved=False,
            matched=False if case.expected is not None else None,
            time_s=time.perf_counter() - t0,
            lattice_sizes=(),
            clause_count=0,
            metrics=None,
            selected=(),
            error=f"{type(exc).__name__}: {exc}",
        )
    matched = None
    if case.expected is not None:
        matched = set(case.expected) == set(selected)
    return CaseResult(
        name=case.name,
        solved=True,
        matched=matched,
        time_s=time.perf_counter() - t0,
        lattice_sizes=tuple(s.lattice_size for s in report.per_class),
        clause_count=sum(s.cover_size for s in report.per_class),
        metrics=ast_metrics(report.program),
        selected=selected,
        error=None,
    )


def run_suite(
    cases,
    mode: Optional[SynthesisMode] = None,
    timeout_s: Optional[float] = None,
) -> SuiteResult:
    results = tuple(run_case(case, mode, timeout_s) for case in cases)
    return SuiteResult(results=results, mode=mode or SynthesisMode.FULL)


def format_table(suite: SuiteResult) -> str:
    header = f"{'case':24} {'status':8} {'time(s)':>8} {'|L|':>12} {'clauses':>7} {'|AST|':>5}"
    lines = [header, "-" * len(header)]
    for r in suite.results:
        if not r.solved:
            status = "error"
        elif r.matched is None:
            status = "solved"
        elif r.matched:
            status = "ok"
        else:
            status = "differs"
        big_l = max(r.lattice_sizes) if r.lattice_sizes else 0
        ast = r.metrics.ast_size if r.metrics else 0
        lines.append(
            f"{r.name:24} {status:8} {r.time_s:8.3f} {big_l:12.3g} {r.clause_count:7d} {ast:5d}"
        )
        if r.error:
            lines.append(f"    {r.error}")
    lines.append(
        f"total: {len(suite.results)} cases, {suite.solved_count} solved, "
        f"{suite.matched_count} matching expectation, {suite.total_time_s:.3f}s"
    )
    return "\n".join(lines)


def suite_json(suite: SuiteResult) -> dict:
    return {
        "mode": suite.mode.value,
        "total_time_s": suite.total_time_s,
        "solved": suite.solved_count,
        "matched": suite.matched_count,
        "cases": [
            {
                "name": r.name,
                "solved": r.solved,
                "matched": r.matched,
                "time_s": r.time_s,
                "lattice_sizes": [int(x) for x in r.lattice_sizes],
                "clause_count": r.clause_count,
                "ast_size": r.metrics.ast_size if r.metrics else None,
                "count_and": r.metrics.count_and if r.metrics else None,
                "count_or": r.metrics.count_or if r.metrics else None,
                "count_in": r.metrics.count_in if r.metrics else None,
                "count_notin": r.metrics.count_notin if r.metrics else None,
                "selected": list(r.selected),
                "error": r.error,
            }
            for r in suite.results
        ],
    }
