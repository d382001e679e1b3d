"""Pipeline cutting and cycle-accurate streaming evaluation.

`cut_pipeline` slices a combinational netlist into N stages by leveling
gates along their longest-delay paths: a bisection over the per-stage
delay budget finds the smallest budget for which a greedy assignment
(place each gate in its latest fanin's stage unless the accumulated delay
would exceed the budget, then start the next stage) fits in N stages.
Register cuts then hold every signal that crosses a stage boundary,
including pass-throughs, so no combinational path bypasses a register.

For simulation speed each stage is compiled to a small Python function
over packed register words (one int per boundary, bit k = cut slot k).
An interpreted evaluator with per-gate override hooks provides the path
used while a gate fault is active; the two must agree exactly and are
cross-checked in the test suite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

from .netlist import (CostTable, DEFAULT_COSTS, Netlist, critical_path_delay,
                      logic_depth, pack_bits, unpack_bits)


class TooManyStagesError(ValueError):
    """Asked for more pipeline stages than the circuit has logic depth."""


@dataclass(frozen=True)
class PipelineDesign:
    """A netlist plus an N-stage register assignment.

    stage_of_gate is indexed by gate position (gate id minus input count);
    cuts[s] lists the signal ids latched at the boundary after stage s, in
    ascending order, except the last boundary which is the output register
    and keeps declared output order.
    """

    netlist: Netlist
    n_stages: int
    stage_of_gate: tuple[int, ...]
    cuts: tuple[tuple[int, ...], ...]
    stage_delays: tuple[float, ...]

    @property
    def max_stage_delay(self) -> float:
        return max(self.stage_delays)

    @cached_property
    def output_slots(self) -> tuple[int, ...]:
        last = self.cuts[-1]
        return tuple(last.index(o) for o in self.netlist.outputs)

    def stage_of_signal(self, sig: int) -> int:
        n_in = len(self.netlist.inputs)
        return 0 if sig < n_in else self.stage_of_gate[sig - n_in]

    def output_byte(self, packed_last: int) -> int:
        out = 0
        for i, slot in enumerate(self.output_slots):
            out |= ((packed_last >> slot) & 1) << i
        return out

    def to_json_dict(self) -> dict:
        return {
            "netlist": self.netlist.to_json_dict(),
            "n_stages": self.n_stages,
            "stage_of_gate": list(self.stage_of_gate),
            "cuts": [list(c) for c in self.cuts],
            "stage_delays": list(self.stage_delays),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PipelineDesign":
        return cls(
            netlist=Netlist.from_json_dict(doc["netlist"]),
            n_stages=doc["n_stages"],
            stage_of_gate=tuple(doc["stage_of_gate"]),
            cuts=tuple(tuple(c) for c in doc["cuts"]),
            stage_delays=tuple(doc["stage_delays"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "PipelineDesign":
        return cls.from_json_dict(json.loads(text))


def _greedy_level(netlist: Netlist, delays: list[float], budget: float,
                  n_stages: int):
    """Assign stages under a per-stage delay budget; None if it needs more
    than n_stages."""
    n_in = len(netlist.inputs)
    stage = [0] * netlist.signal_count
    arrive = [0.0] * netlist.signal_count
    for g in netlist.gates:
        s = max(stage[f] for f in g.fanin)
        start = 0.0
        for f in g.fanin:
            if stage[f] == s and arrive[f] > start:
                start = arrive[f]
        a = start + delays[g.id]
        if a > budget + 1e-9:
            s += 1
            a = delays[g.id]
            if a > budget + 1e-9:
                return None
        if s >= n_stages:
            return None
        stage[g.id] = s
        arrive[g.id] = a
    return stage[n_in:], arrive


def _stage_delays_of(netlist: Netlist, delays: list[float],
                     stage_of_gate: list[int], n_stages: int) -> list[float]:
    n_in = len(netlist.inputs)
    arrive = [0.0] * netlist.signal_count
    worst = [0.0] * n_stages
    for g in netlist.gates:
        s = stage_of_gate[g.id - n_in]
        start = 0.0
        for f in g.fanin:
            if f >= n_in and stage_of_gate[f - n_in] == s and arrive[f] > start:
                start = arrive[f]
        arrive[g.id] = start + delays[g.id]
        if arrive[g.id] > worst[s]:
            worst[s] = arrive[g.id]
    return worst


def _reduce_cut_width(netlist: Netlist, delays: list[float],
                      stage_of_gate: list[int], n_stages: int,
                      cap: float) -> None:
    """Move gates across stage boundaries to shrink the register cuts.

    A signal produced in stage p and last consumed in stage u occupies
    u - p register slots, so total width is sum(max(0, last_use - prod)).
    Greedy hill climb: relocate one gate at a time, keeping stage order
    monotone along every path and the max per-stage delay within cap.
    """
    n_in = len(netlist.inputs)
    consumers: list[list[int]] = [[] for _ in range(netlist.signal_count)]
    for g in netlist.gates:
        for f in g.fanin:
            consumers[f].append(g.id)
    out_sigs = set(netlist.outputs)

    def prod(sig: int) -> int:
        return 0 if sig < n_in else stage_of_gate[sig - n_in]

    def last_use(sig: int) -> int:
        u = n_stages if sig in out_sigs else 0
        for c in consumers[sig]:
            sc = stage_of_gate[c - n_in]
            if sc > u:
                u = sc
        return u

    def width_around(gid: int) -> int:
        sigs = {gid}
        sigs.update(netlist.gates[gid - n_in].fanin)
        return sum(max(0, last_use(s) - prod(s)) for s in sigs)

    for _ in range(16):
        changed = False
        for g in netlist.gates:
            pos = g.id - n_in
            s = stage_of_gate[pos]
            lo_bound = max((prod(f) for f in g.fanin), default=0)
            hi_bound = min((stage_of_gate[c - n_in] for c in consumers[g.id]),
                           default=n_stages - 1)
            if g.id in out_sigs:
                hi_bound = min(hi_bound, n_stages - 1)
            for target in (s + 1, s - 1):
                if target < lo_bound or target > hi_bound:
                    continue
                before = width_around(g.id)
                stage_of_gate[pos] = target
                after = width_around(g.id)
                if (after < before and
                        max(_stage_delays_of(netlist, delays, stage_of_gate,
                                             n_stages)) <= cap + 1e-9):
                    changed = True
                    break
                stage_of_gate[pos] = s
        if not changed:
            break


def cut_pipeline(netlist: Netlist, n_stages: int,
                 costs: CostTable = DEFAULT_COSTS) -> PipelineDesign:
    """Cut a validated netlist into n_stages balanced stages.

    Delay leveling first (bisection over the per-stage budget), then a
    register-width reduction pass that must not worsen the achieved
    balance.  Raises TooManyStagesError when n_stages exceeds the
    circuit's gate depth (some stage would have to be empty).
    """
    netlist.validate()
    if n_stages < 1:
        raise ValueError("n_stages must be positive")
    depth = logic_depth(netlist)
    if n_stages > depth:
        raise TooManyStagesError(
            f"{n_stages} stages requested but logic depth is only {depth}")

    delays = [0.0] * netlist.signal_count
    for g in netlist.gates:
        delays[g.id] = costs.delay(g.kind)

    lo = max((delays[g.id] for g in netlist.gates), default=0.0)
    hi = critical_path_delay(netlist, costs)
    best = _greedy_level(netlist, delays, hi, n_stages)
    for _ in range(60):
        mid = (lo + hi) / 2
        attempt = _greedy_level(netlist, delays, mid, n_stages)
        if attempt is None:
            lo = mid
        else:
            hi = mid
            best = attempt
    stage_of_gate = list(best[0])

    # The width pass may spend up to 30% delay slack over the balanced
    # optimum; register bits are the dominant cost of a protected pipeline,
    # so a mildly longer stage is the better trade.
    cap = 1.3 * max(_stage_delays_of(netlist, delays, stage_of_gate, n_stages))
    _reduce_cut_width(netlist, delays, stage_of_gate, n_stages, cap)
    stage_delays = _stage_delays_of(netlist, delays, stage_of_gate, n_stages)

    n_in = len(netlist.inputs)

    # A signal is registered at every boundary between its producer stage
    # and its latest consumer; consumers at stage N are the primary outputs.
    last_use = [0] * netlist.signal_count
    for g in netlist.gates:
        s = stage_of_gate[g.id - n_in]
        for f in g.fanin:
            if s > last_use[f]:
                last_use[f] = s
    for o in netlist.outputs:
        last_use[o] = n_stages

    def prod(sig: int) -> int:
        return 0 if sig < n_in else stage_of_gate[sig - n_in]

    cuts = []
    for s in range(n_stages - 1):
        cuts.append(tuple(sig for sig in range(netlist.signal_count)
                          if prod(sig) <= s < last_use[sig]))
    out_cut = []
    for o in netlist.outputs:
        if o not in out_cut:
            out_cut.append(o)
    cuts.append(tuple(out_cut))

    return PipelineDesign(netlist=netlist, n_stages=n_stages,
                          stage_of_gate=tuple(stage_of_gate),
                          cuts=tuple(cuts), stage_delays=tuple(stage_delays))


# ---------------------------------------------------------------------------
# Per-stage evaluation programs
# ---------------------------------------------------------------------------

_GATE_EXPR = {
    "XOR2": "{0} ^ {1}",
    "XNOR2": "1 ^ {0} ^ {1}",
    "AND2": "{0} & {1}",
    "NAND2": "1 ^ ({0} & {1})",
    "OR2": "{0} | {1}",
    "NOR2": "1 ^ ({0} | {1})",
    "NOT": "1 ^ {0}",
    "BUF": "{0}",
    "MUX2": "({2} if {0} else {1})",
}


class StageProgram:
    """Evaluation of one pipeline stage over packed boundary words.

    fast(prev) is the compiled path; interp(prev, overrides) walks the
    same gate list and lets a fault overlay force individual gate outputs
    (overrides maps gate id to 0, 1, or "flip").
    """

    def __init__(self, design: PipelineDesign, s: int):
        nl = design.netlist
        n_in = len(nl.inputs)
        prev_slot = ({sig: i for i, sig in enumerate(design.cuts[s - 1])}
                     if s > 0 else {sig: sig for sig in nl.inputs})
        self.gates = [g for g in nl.gates
                      if design.stage_of_gate[g.id - n_in] == s]
        self.capture = []            # (from_prev: bool, slot_or_sig)
        for sig in design.cuts[s]:
            if sig in prev_slot:
                self.capture.append((True, prev_slot[sig]))
            else:
                self.capture.append((False, sig))
        self.prev_slot = prev_slot
        self.stage_index = s
        self._local = {g.id for g in self.gates}
        self.fast = self._compile()

    def _compile(self):
        reads = set()
        for g in self.gates:
            for f in g.fanin:
                if f not in self._local:
                    reads.add(f)
        lines = ["def _stage(r):"]
        for sig in sorted(reads):
            lines.append(f"    s{sig} = (r >> {self.prev_slot[sig]}) & 1")
        for g in self.gates:
            args = [f"s{f}" for f in g.fanin]
            lines.append(f"    s{g.id} = " + _GATE_EXPR[g.kind].format(*args))
        parts = []
        for k, (from_prev, ref) in enumerate(self.capture):
            term = f"((r >> {ref}) & 1)" if from_prev else f"s{ref}"
            parts.append(term if k == 0 else f"({term} << {k})")
        lines.append("    return " + (" | ".join(parts) if parts else "0"))
        self.source = "\n".join(lines)
        ns: dict = {}
        exec(self.source, ns)
        return ns["_stage"]

    def interp(self, prev: int, overrides: dict) -> int:
        vals = {}
        for sig, slot in self.prev_slot.items():
            vals[sig] = (prev >> slot) & 1
        for g in self.gates:
            f = g.fanin
            k = g.kind
            if k == "XOR2":
                v = vals[f[0]] ^ vals[f[1]]
            elif k == "AND2":
                v = vals[f[0]] & vals[f[1]]
            elif k == "XNOR2":
                v = 1 ^ vals[f[0]] ^ vals[f[1]]
            elif k == "OR2":
                v = vals[f[0]] | vals[f[1]]
            elif k == "NAND2":
                v = 1 ^ (vals[f[0]] & vals[f[1]])
            elif k == "NOR2":
                v = 1 ^ (vals[f[0]] | vals[f[1]])
            elif k == "NOT":
                v = 1 ^ vals[f[0]]
            elif k == "BUF":
                v = vals[f[0]]
            else:
                v = vals[f[2]] if vals[f[0]] else vals[f[1]]
            ov = overrides.get(g.id)
            if ov is not None:
                v = v ^ 1 if ov == "flip" else ov
            vals[g.id] = v
        word = 0
        for k, (from_prev, ref) in enumerate(self.capture):
            bit = (prev >> ref) & 1 if from_prev else vals[ref]
            word |= bit << k
        return word


def build_stage_programs(design: PipelineDesign) -> list[StageProgram]:
    return [StageProgram(design, s) for s in range(design.n_stages)]


def streaming_eval(design: PipelineDesign, inputs) -> list[int]:
    """Fault-free pipelined evaluation of a byte stream.

    One input enters per cycle; the output for the input of cycle t appears
    at cycle t + n_stages.  Returns the output bytes in order (same length
    as the input stream).
    """
    programs = build_stage_programs(design)
    n = design.n_stages
    regs = [0] * n
    valid = [False] * n
    out = []
    stream = list(inputs)
    for t in range(len(stream) + n):
        if valid[n - 1]:
            out.append(design.output_byte(regs[n - 1]))
        feeding = t < len(stream)
        word = stream[t] if feeding else 0
        new_regs = [programs[0].fast(word)]
        for s in range(1, n):
            new_regs.append(programs[s].fast(regs[s - 1]))
        regs = new_regs
        valid = [feeding] + valid[:-1]
    return out
