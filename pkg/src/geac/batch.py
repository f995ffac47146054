"""Data-parallel execution of many scenarios."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .errors import GeacError
from .scenario import Scenario, load_scenario
from .swing import AssessmentReport, assess_post_fault


@dataclass(frozen=True)
class BatchResult:
    name: str
    report: Optional[AssessmentReport] = None
    error: Optional[str] = None
    error_type: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.report is not None


def _run_one(item: Union[Scenario, str, os.PathLike]) -> BatchResult:
    name = item.name if isinstance(item, Scenario) else Path(item).stem
    try:
        sc = item if isinstance(item, Scenario) else load_scenario(item)
        name = sc.name
        return BatchResult(name, assess_post_fault(sc.model, sc.init, sc.analysis))
    except (GeacError, ValueError, OSError) as exc:
        return BatchResult(name, error=str(exc), error_type=type(exc).__name__)


def run_batch(items: Sequence[Union[Scenario, str, os.PathLike]], parallelism: int = 1) -> list[BatchResult]:
    """Assess every scenario; results come back in input order.

    Items may be loaded scenarios or paths to scenario files. A failing
    item yields a result with ``error`` set and does not stop the batch.
    Scenarios share no state, so ``parallelism > 1`` (worker processes)
    gives the same results as a serial run.
    """
    items = list(items)
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    if not items:
        return []
    if parallelism == 1 or len(items) == 1:
        return [_run_one(it) for it in items]
    with ProcessPoolExecutor(max_workers=min(parallelism, len(items))) as pool:
        return list(pool.map(_run_one, items))
