from dataclasses import dataclass, fields
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

CSV_HEADER = "rep,t,transmissions_cum,M_t,grad_norm_sq,ebar_norm,tau_t,f_avg"
SUMMARY_HEADER = "rep,total_transmissions,final_f_avg,ergodic_grad_mean,bound_rhs"
METRICS = ("transmissions_cum", "M_t", "grad_norm_sq", "ebar_norm", "tau_t", "f_avg")


@dataclass(frozen=True)
class MetricsRow:
    rep: int
    t: int
    transmissions_cum: int
    M_t: float
    grad_norm_sq: float
    ebar_norm: float
    tau_t: float
    f_avg: float

    def values(self) -> Tuple:
        return tuple(getattr(self, f.name) for f in fields(self))


@dataclass(frozen=True)
class RepSummary:
    rep: int
    total_transmissions: int
    final_f_avg: float
    ergodic_grad_mean: float
    bound_rhs: float


@dataclass(frozen=True)
class AggregateRow:
    t: int
    reps: int
    mean: Dict[str, float]
    std: Dict[str, float]


def sort_rows(rows: Iterable[MetricsRow]) -> List[MetricsRow]:
    return sorted(rows, key=lambda r: (r.rep, r.t))


def summarize_rep(rep: int, rows: Sequence[MetricsRow], final_f_avg: float, bound_rhs: float) -> RepSummary:
    ordered = sort_rows(rows)
    return RepSummary(
        rep=rep,
        total_transmissions=ordered[-1].transmissions_cum if ordered else 0,
        final_f_avg=final_f_avg,
        ergodic_grad_mean=float(np.mean([r.grad_norm_sq for r in ordered])) if ordered else float("nan"),
        bound_rhs=bound_rhs,
    )


def monte_carlo_summary(rows: Iterable[MetricsRow]) -> List[AggregateRow]:
    """
    Per-round mean and population standard deviation of every metric across reps.

    Rows are sorted by (rep, t) first, so the order in which repetitions
    finished cannot change a single bit of the result.
    """
    by_round: Dict[int, List[MetricsRow]] = {}
    for row in sort_rows(rows):
        by_round.setdefault(row.t, []).append(row)
    aggregates = []
    for t in sorted(by_round):
        group = by_round[t]
        table = np.array([[float(getattr(r, m)) for m in METRICS] for r in group])
        aggregates.append(
            AggregateRow(
                t=t,
                reps=len(group),
                mean=dict(zip(METRICS, table.mean(axis=0).tolist())),
                std=dict(zip(METRICS, table.std(axis=0).tolist())),
            )
        )
    return aggregates


def summarize_reps(reps: Sequence[RepSummary]) -> Dict[str, Tuple[float, float]]:
    """Mean and population std across reps of each summary column"""
    ordered = sorted(reps, key=lambda r: r.rep)
    out = {}
    for name in ("total_transmissions", "final_f_avg", "ergodic_grad_mean", "bound_rhs"):
        column = np.array([float(getattr(r, name)) for r in ordered])
        out[name] = (float(column.mean()), float(column.std()))
    return out
