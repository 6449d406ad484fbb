"""Pulse-plan generation and verification.

All plans are pure sign algebra.  A 2 pi pulse acting on a set of spatial
parts is a mask of -1 entries on those parts; a stored excitation's state is
the elementwise product of every mask applied since its capture.  Write
masks are consecutive-row ratios of the Sylvester-Hadamard matrix, which
pins the four-part case to the canonical BD / BC / BD order, and read masks
are chosen so that exactly one stored row returns to (minus) the all-plus
superradiant row at each read slot.

The passive scheme replaces pulses by bi-phase modulators placed after each
spatial part.  A modulator pattern m (entry -1 = on) acts through its
downstream products s_j = prod_{i >= j} m_i; a pattern is equivalent to the
active scheme's cumulative flip product c when s = c, i.e.
m_j = c_j * c_{j+1} (with c beyond the last part taken as +1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PlanError
from .states import SignPattern

__all__ = [
    "HadamardMatrix",
    "PulseEvent",
    "PulsePlan",
    "PiPairConfig",
    "PlanReport",
    "sylvester",
    "plan_write",
    "plan_read",
    "plan_passive",
    "stored_rows",
    "validate_pi_pair",
    "verify_plan",
]


@dataclass(frozen=True)
class HadamardMatrix:
    order: int
    entries: np.ndarray

    def row(self, i: int) -> np.ndarray:
        return self.entries[i]


def sylvester(order: int) -> HadamardMatrix:
    """Sylvester-Hadamard matrix H_2k by the recursive block doubling."""
    if order < 2 or order & (order - 1):
        raise DomainError(f"order {order} is not a power of two >= 2")
    h = np.array([[1]], dtype=np.int64)
    block = np.array([[1, 1], [1, -1]], dtype=np.int64)
    while h.shape[0] < order:
        h = np.kron(block, h)
    return HadamardMatrix(order, h)


@dataclass(frozen=True)
class PulseEvent:
    time: float
    mask: SignPattern
    kind: str  # two_pi | pi_pair | modulator_set

    _KINDS = ("two_pi", "pi_pair", "modulator_set")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise PlanError(f"unknown event kind {self.kind!r}")


@dataclass(frozen=True)
class PulsePlan:
    """Ordered pulse schedule over a fixed number of spatial parts.

    ``stage`` records what the plan is for ("write", "read",
    "read_reversed", "passive_write", "passive_read", "passive_read_reversed")
    so the checker knows which postconditions apply.
    """

    parts: int
    events: tuple[PulseEvent, ...]
    bin_duration: float
    stage: str = "write"
    bins: int = 0

    def __post_init__(self):
        if self.bin_duration <= 0:
            raise PlanError("bin_duration must be positive")
        times = [e.time for e in self.events]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise PlanError("event times must be strictly increasing")
        for e in self.events:
            if len(e.mask) != self.parts:
                raise PlanError("mask length does not match number of parts")

    @property
    def t_start(self) -> float:
        return self.events[0].time if self.events else 0.0

    @property
    def t_end(self) -> float:
        """End of the last bin covered by the plan."""
        if not self.events:
            return 0.0
        return self.events[-1].time + self.bin_duration

    def to_json(self) -> str:
        doc = {
            "parts": self.parts,
            "bins": self.bins,
            "stage": self.stage,
            "bin_duration_s": self.bin_duration,
            "events": [
                {"time_s": e.time, "kind": e.kind, "mask": e.mask.to_string()}
                for e in self.events
            ],
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PulsePlan":
        doc = json.loads(text)
        events = tuple(
            PulseEvent(e["time_s"], SignPattern.from_string(e["mask"]), e["kind"])
            for e in doc["events"]
        )
        return cls(doc["parts"], events, doc["bin_duration_s"], doc["stage"],
                   doc.get("bins", 0))


def _check_geometry(parts: int, bins: int) -> None:
    if parts < 2 or parts & (parts - 1):
        raise DomainError(f"parts = {parts} must be a power of two >= 2")
    if not 1 <= bins <= parts - 1:
        raise PlanError(f"bins = {bins} must be between 1 and parts - 1 = {parts - 1}")


def plan_write(parts: int, bins: int, bin_duration: float,
               t0: float = 0.0) -> PulsePlan:
    """Write schedule: one 2 pi mask at the end of each capture bin.

    Mask k is the elementwise ratio of Sylvester rows k+1 and k, so the
    excitation captured in bin n ends in row_{bins+1} * row_n: pairwise
    distinct and orthogonal to all-plus.  For parts=4, bins=3 this is the
    canonical BD, BC, BD sequence.
    """
    _check_geometry(parts, bins)
    h = sylvester(parts).entries
    events = []
    for k in range(1, bins + 1):
        mask = SignPattern(tuple(int(v) for v in h[k - 1] * h[k]))
        events.append(PulseEvent(t0 + k * bin_duration, mask, "two_pi"))
    return PulsePlan(parts, tuple(events), bin_duration, "write", bins)


def stored_rows(plan: PulsePlan) -> list[np.ndarray]:
    """Final sign row of each captured bin after all of a write plan's masks.

    Row of bin n is the product of masks n..bins (capture happens on the
    all-plus row just before mask n fires).
    """
    masks = [np.array(e.mask.signs, dtype=np.int64) for e in plan.events]
    rows = []
    for n in range(len(masks)):
        row = np.ones(plan.parts, dtype=np.int64)
        for m in masks[n:]:
            row = row * m
        rows.append(row)
    return rows


def plan_read(parts: int, bins: int, bin_duration: float,
              time_reversed: bool = False, t0: float = 0.0) -> PulsePlan:
    """Read schedule: mask k fires at the start of read bin k.

    After mask k the cumulative flip product equals minus the stored row of
    the bin emitted in that slot (bin k forward, bin bins+1-k reversed); the
    leading minus fixes the emitted phase to match the incoming packet.  For
    parts=4 this gives the canonical AD, BD, BC (forward) and
    AC, BC, BD (time-reversed) sequences.
    """
    _check_geometry(parts, bins)
    h = sylvester(parts).entries
    order = list(range(bins, 0, -1)) if time_reversed else list(range(1, bins + 1))
    targets = [-(h[bins] * h[b - 1]) for b in order]
    events = []
    prev = np.ones(parts, dtype=np.int64)
    for k, target in enumerate(targets):
        mask = SignPattern(tuple(int(v) for v in prev * target))
        events.append(PulseEvent(t0 + k * bin_duration, mask, "two_pi"))
        prev = target
    stage = "read_reversed" if time_reversed else "read"
    return PulsePlan(parts, tuple(events), bin_duration, stage, bins)


def _pattern_for_cumulative(cum: np.ndarray) -> SignPattern:
    """Modulator on/off states whose downstream products equal ``cum``."""
    ext = np.append(cum, 1)
    return SignPattern(tuple(int(a * b) for a, b in zip(ext[:-1], ext[1:])))


def plan_passive(parts: int, bins: int, bin_duration: float,
                 stage: str = "write", time_reversed: bool = False,
                 t0: float = 0.0) -> PulsePlan:
    """Bi-phase modulator schedule equivalent to the active one.

    Events carry the absolute on/off pattern (-1 = modulator on), not a
    flip.  Write: an all-off event at t0, then one pattern per active mask;
    the pattern's downstream product equals the active scheme's cumulative
    flip product.  Read: patterns additionally fold in the write total, so
    the sequence continues seamlessly after a passive write.
    """
    if stage not in ("write", "read"):
        raise PlanError("stage must be 'write' or 'read'")
    _check_geometry(parts, bins)
    if stage == "write":
        active = plan_write(parts, bins, bin_duration, t0)
        cum = np.ones(parts, dtype=np.int64)
        events = [PulseEvent(t0, _pattern_for_cumulative(cum), "modulator_set")]
        base_stage = "passive_write"
    else:
        active = plan_read(parts, bins, bin_duration, time_reversed, t0)
        # total flip product accumulated by the matching write plan
        cum = np.ones(parts, dtype=np.int64)
        for e in plan_write(parts, bins, bin_duration).events:
            cum = cum * np.array(e.mask.signs, dtype=np.int64)
        events = []
        base_stage = "passive_read_reversed" if time_reversed else "passive_read"
    for e in active.events:
        cum = cum * np.array(e.mask.signs, dtype=np.int64)
        events.append(PulseEvent(e.time, _pattern_for_cumulative(cum), "modulator_set"))
    return PulsePlan(parts, tuple(events), bin_duration, base_stage, bins)


@dataclass(frozen=True)
class PiPairConfig:
    """Two non-collinear pi pulses replacing a single 2 pi pulse."""

    k1: tuple[float, float, float]
    k2: tuple[float, float, float]
    sample_length: float
    m_index: int


def validate_pi_pair(cfg: PiPairConfig) -> tuple[bool, float]:
    """Check |k1 - k2| = 2 pi m / L_z and the smallness |k1 - k2| << w0/c.

    Returns (valid, m_residual) where m_residual is the distance of
    |k1 - k2| L_z / 2 pi from the nearest integer (in units of one).
    m = 0 leaves the superradiant mode unchanged and is flagged invalid.
    """
    k1 = np.asarray(cfg.k1, dtype=float)
    k2 = np.asarray(cfg.k2, dtype=float)
    dk = float(np.linalg.norm(k1 - k2))
    m_real = dk * cfg.sample_length / (2.0 * math.pi)
    m_near = round(m_real)
    residual = abs(m_real - m_near)
    k_mag = max(float(np.linalg.norm(k1)), float(np.linalg.norm(k2)))
    on_grid = residual <= 1e-9 * max(m_real, 1.0)
    small = k_mag == 0 or dk < 1e-2 * k_mag
    matches = m_near == cfg.m_index
    valid = on_grid and small and matches and m_near != 0
    return valid, residual


@dataclass(frozen=True)
class PlanReport:
    """Outcome of the symbolic sign-tracking checker."""

    ok: bool
    violations: tuple[str, ...]
    final_rows: tuple[str, ...] = ()
    emission_order: tuple[int, ...] = ()
    emission_signs: tuple[int, ...] = ()
    orthogonality: np.ndarray | None = None


def _is_uniform(row: np.ndarray) -> bool:
    return bool(np.all(row == row[0]))


def verify_plan(plan: PulsePlan, write_plan: PulsePlan | None = None) -> PlanReport:
    """Replay a plan's sign algebra and check its postconditions.

    Write plans: every stored row must be distinct, pairwise orthogonal and
    not (minus) all-plus.  Read plans: each mask must turn exactly one
    not-yet-emitted stored row into (minus) all-plus while the rest stay
    subradiant; the emission order must be the identity or the reversal.
    Passive plans are checked by converting each pattern to its downstream
    products and comparing with the equivalent active plan.
    """
    violations: list[str] = []
    if plan.stage.startswith("passive"):
        stage = plan.stage.removeprefix("passive_")
        reversed_ = stage == "read_reversed"
        if stage == "write":
            active = plan_write(plan.parts, plan.bins, plan.bin_duration,
                                plan.events[0].time)
            cums = [np.ones(plan.parts, dtype=np.int64)]
        else:
            active = plan_read(plan.parts, plan.bins, plan.bin_duration,
                               reversed_, plan.events[0].time)
            cums = []
        cum = np.ones(plan.parts, dtype=np.int64)
        if stage != "write":
            for e in plan_write(plan.parts, plan.bins, plan.bin_duration).events:
                cum = cum * np.array(e.mask.signs, dtype=np.int64)
        for e in active.events:
            cum = cum * np.array(e.mask.signs, dtype=np.int64)
            cums.append(cum)
        if len(plan.events) != len(cums):
            violations.append("wrong number of modulator events")
        for e, expect in zip(plan.events, cums):
            m = np.array(e.mask.signs, dtype=np.int64)
            down = np.multiply.accumulate(m[::-1])[::-1]
            if not np.array_equal(down, expect):
                violations.append(
                    f"pattern {e.mask.to_string()} at t={e.time:g} has downstream "
                    f"products {''.join('+' if s > 0 else '-' for s in down)}, "
                    f"expected {''.join('+' if s > 0 else '-' for s in expect)}"
                )
        return PlanReport(not violations, tuple(violations))

    if plan.stage == "write":
        rows = stored_rows(plan)
        for i, row in enumerate(rows):
            if _is_uniform(row):
                violations.append(f"bin {i + 1} ends on the superradiant row")
        for i in range(len(rows)):
            for j in range(i + 1, len(rows)):
                if np.array_equal(rows[i], rows[j]) or np.array_equal(rows[i], -rows[j]):
                    violations.append(f"bins {i + 1} and {j + 1} share a row")
        gram = np.array([[int(np.dot(a, b)) for b in rows] for a in rows])
        if np.any(gram - np.diag(np.diag(gram))):
            violations.append("stored rows are not pairwise orthogonal")
        final = tuple("".join("+" if s > 0 else "-" for s in r) for r in rows)
        return PlanReport(not violations, tuple(violations), final_rows=final,
                          orthogonality=gram)

    if plan.stage in ("read", "read_reversed"):
        source = write_plan or plan_write(plan.parts, plan.bins, plan.bin_duration)
        rows = {n + 1: r.copy() for n, r in enumerate(stored_rows(source))}
        order: list[int] = []
        signs: list[int] = []
        for k, e in enumerate(plan.events, start=1):
            m = np.array(e.mask.signs, dtype=np.int64)
            for n in rows:
                rows[n] = rows[n] * m
            active = [n for n, r in rows.items() if _is_uniform(r)]
            if len(active) != 1:
                violations.append(f"read slot {k}: {len(active)} rows became "
                                  "superradiant (want exactly 1)")
                continue
            n = active[0]
            order.append(n)
            signs.append(int(rows[n][0]))
            del rows[n]
        expected = (list(range(plan.bins, 0, -1)) if plan.stage == "read_reversed"
                    else list(range(1, plan.bins + 1)))
        if order != expected:
            violations.append(f"emission order {order} != expected {expected}")
        return PlanReport(not violations, tuple(violations),
                          emission_order=tuple(order), emission_signs=tuple(signs))

    violations.append(f"unknown plan stage {plan.stage!r}")
    return PlanReport(False, tuple(violations))
