from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np


def debug_enabled(flag: bool | None) -> bool:
    """Instrumented mode: explicit argument wins, else EDGEPUSH_DEBUG=1."""
    if flag is not None:
        return flag
    return os.environ.get("EDGEPUSH_DEBUG", "") not in ("", "0")


class InvariantViolation(AssertionError):
    pass


@dataclass
class PprEstimate:
    """Dense estimate of one SSPPR vector plus whatever solver state is left.

    ``residue`` is LocalPush's final node residue; ``income`` and ``expense``
    are EdgePush's node income and per-directed-edge expense.
    """

    source: int
    alpha: float
    values: np.ndarray
    method: str
    isolated: bool = False
    residue: np.ndarray | None = None
    income: np.ndarray | None = None
    expense: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class PushAccounting:
    node_pushes: int = 0
    edge_touches: int = 0
    wall_time: float = 0.0
    per_node: np.ndarray | None = None

    @property
    def edges_touched(self) -> int:
        return self.edge_touches


@dataclass
class EdgePushAccounting:
    edge_pushes: int = 0
    queue_ops: int = 0
    scan_switches: int = 0
    edges_scanned: int = 0
    wall_time: float = 0.0
    per_edge: np.ndarray | None = None

    @property
    def edges_touched(self) -> int:
        # one edge per push, plus every edge visited by sequential scans
        return self.edge_pushes + self.edges_scanned


def indicator(n: int, s: int) -> np.ndarray:
    e = np.zeros(n)
    e[s] = 1.0
    return e
