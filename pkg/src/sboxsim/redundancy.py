"""Cycle-accurate machines for the fault-tolerance schemes.

Four machines share one pipelined S-box design:

  * PlainPipelineMachine - the unprotected baseline.
  * FcDmrMachine - duplicated stage logic and registers, per-stage
    comparators (detection units), hold-state voters, and a global stall:
    while any stage's register pair disagrees, every voter re-presents the
    last agreed values, the stage logic re-executes the same computation,
    and no input is accepted.  One clean re-execution clears the mismatch,
    so a transient costs stall cycles but never a wrong output.
  * TmrMachine - three independent pipeline replicas with a bitwise
    majority vote on the output register; never stalls.
  * TtrMachine - one pipeline instance computing each input three times in
    a row; the three buffered results are majority-voted (one result per
    three cycles).

All machines expose step(input_byte_or_None) -> StepRecord and the
counters consumed / emitted / stall_cycles, and a canonical_state() tuple
that the campaign runner uses for golden-state convergence checks.
Faults are bound at construction as an ActiveFault (or None) and perturb
reads only; see the faults module.

Clocking convention, one step() per cycle: outputs and error flags are
sampled from current register state, stage logic evaluates, then the
clock edge commits new register values.  With n stages, the output for
the input accepted at cycle t is emitted at cycle t + n (plus any stalls
in between).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .faults import ActiveFault
from .pipeline import PipelineDesign, StageProgram, build_stage_programs


class WidthMismatchError(ValueError):
    """Voter or comparator inputs of unequal width."""


# ---------------------------------------------------------------------------
# Unit primitives: comparator, hold-state voter, error aggregation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DmrVoterState:
    """Hold-state voter storage: the last agreed word, and whether the
    previous comparison mismatched."""

    latch: int
    width: int
    stalled: bool = False


def du_compare(reg_a: int, reg_b: int, width: int) -> bool:
    """Detection unit: true iff any bit of the two register words differs."""
    if reg_a >> width or reg_b >> width:
        raise WidthMismatchError(f"operands wider than {width} bits")
    return reg_a != reg_b


def dmr_voter_step(a: int, b: int, state: DmrVoterState):
    """One voter decision: pass and latch the agreed value, or hold.

    Returns (output_word, new_state).  On mismatch the output is the
    previous latch, unchanged, and the voter reports itself stalled.
    """
    if a >> state.width or b >> state.width:
        raise WidthMismatchError(f"operands wider than {state.width} bits")
    if a == b:
        return a, DmrVoterState(latch=a, width=state.width, stalled=False)
    return state.latch, DmrVoterState(latch=state.latch, width=state.width,
                                      stalled=True)


def cu_aggregate(errs) -> bool:
    """Control unit: the global error is the OR of the per-stage errors."""
    return any(errs)


def majority3(a: int, b: int, c: int) -> int:
    """Bitwise two-out-of-three majority."""
    return (a & b) | (a & c) | (b & c)


# ---------------------------------------------------------------------------
# Machines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepRecord:
    cycle: int
    input: Optional[int]
    accepted: bool
    errs: tuple
    global_err: bool
    output: Optional[int]

    def to_json_dict(self) -> dict:
        return {"cycle": self.cycle, "input": self.input,
                "accepted": self.accepted, "err": list(self.errs),
                "Err": self.global_err, "output": self.output}


class _MachineBase:
    def __init__(self, design: PipelineDesign, fault: ActiveFault = None,
                 programs: list[StageProgram] = None):
        self.design = design
        self.programs = programs if programs is not None else \
            build_stage_programs(design)
        self.fault = fault
        self.n = design.n_stages
        self.cycle = 0
        self.consumed = 0
        self.emitted = 0
        self.stall_cycles = 0

    def _eval_stage(self, cyc: int, s: int, src: int, replica: int,
                    fa: bool) -> int:
        if fa:
            ov = self.fault.gate_overrides(cyc, s, replica)
            if ov:
                return self.programs[s].interp(src, ov)
        return self.programs[s].fast(src)

    def _read_regs(self, cyc: int, regs: list[int], replica: int,
                   fa: bool) -> list[int]:
        if not fa:
            return regs
        return self.fault.transform_regs(cyc, replica, regs)


class PlainPipelineMachine(_MachineBase):
    """The unprotected pipelined S-box: no detection, no stalls."""

    def __init__(self, design, fault=None, programs=None):
        super().__init__(design, fault, programs)
        self.regs = [0] * self.n
        self.valid = [False] * self.n

    def step(self, inp: Optional[int]) -> StepRecord:
        cyc = self.cycle
        fa = self.fault is not None and self.fault.active(cyc)
        reads = self._read_regs(cyc, self.regs, 0, fa)
        out = None
        if self.valid[self.n - 1]:
            out = self.design.output_byte(reads[self.n - 1])
            self.emitted += 1
        accepted = inp is not None
        word = inp if accepted else 0
        new = [self._eval_stage(cyc, 0, word, 0, fa)]
        for s in range(1, self.n):
            new.append(self._eval_stage(cyc, s, reads[s - 1], 0, fa))
        self.regs = new
        self.valid = [accepted] + self.valid[:self.n - 1]
        if accepted:
            self.consumed += 1
        self.cycle += 1
        return StepRecord(cyc, inp, accepted, (), False, out)

    def canonical_state(self):
        return (tuple(self.regs), tuple(self.valid),
                self.consumed, self.emitted)


class FcDmrMachine(_MachineBase):
    """Duplicated pipeline with per-stage detection and hold-state voters.

    Per cycle: the detection units compare the current register pairs and
    the control unit ORs the per-stage errors into the global error.  When
    it is low, voters pass the (agreed) register words, their latches
    take those words at the edge, the input side advances, and the output
    boundary emits.  When it is high, every voter outputs its latch, the
    input side re-presents the last accepted byte, nothing is emitted,
    latches and occupancy freeze; the registers still capture the
    re-executed results, which is what clears a vanished fault's mismatch
    one clean cycle later.
    """

    def __init__(self, design, fault=None, programs=None):
        super().__init__(design, fault, programs)
        self.regs_a = [0] * self.n
        self.regs_b = [0] * self.n
        self.latches = [0] * self.n
        self.valid = [False] * self.n
        self.in_hold = 0

    def step(self, inp: Optional[int]) -> StepRecord:
        cyc = self.cycle
        n = self.n
        fault = self.fault
        fa = fault is not None and fault.active(cyc)

        reads_a = self._read_regs(cyc, self.regs_a, 0, fa)
        reads_b = self._read_regs(cyc, self.regs_b, 1, fa)
        errs = [a != b for a, b in zip(reads_a, reads_b)]
        if fa:
            errs = [fault.du_apply(cyc, s, e) for s, e in enumerate(errs)]
        g_err = True in errs

        if g_err:
            vout = self.latches
            if fa:
                vout = [fault.latch_read(cyc, s, w)
                        for s, w in enumerate(vout)]
            s0 = self.in_hold
            accepted = False
            out = None
        else:
            vout = reads_a
            accepted = inp is not None
            s0 = inp if accepted else self.in_hold
            out = (self.design.output_byte(vout[n - 1])
                   if self.valid[n - 1] else None)

        new_a = [self._eval_stage(cyc, 0, s0, 0, fa)]
        new_b = [self._eval_stage(cyc, 0, s0, 1, fa)]
        for s in range(1, n):
            src = vout[s - 1]
            new_a.append(self._eval_stage(cyc, s, src, 0, fa))
            new_b.append(self._eval_stage(cyc, s, src, 1, fa))

        # Clock edge.  Registers always recapture; everything else is
        # gated by the global error.
        self.regs_a = new_a
        self.regs_b = new_b
        if g_err:
            self.stall_cycles += 1
        else:
            self.latches = list(reads_a)
            self.valid = [accepted] + self.valid[:n - 1]
            self.in_hold = s0
            if accepted:
                self.consumed += 1
            if out is not None:
                self.emitted += 1
        self.cycle += 1
        return StepRecord(cyc, inp, accepted, tuple(errs), g_err, out)

    def canonical_state(self):
        return (tuple(self.regs_a), tuple(self.regs_b), tuple(self.latches),
                tuple(self.valid), self.in_hold, self.consumed, self.emitted)


class TmrMachine(_MachineBase):
    """Three replica pipelines, output-register majority vote, no stalls."""

    REPLICAS = 3

    def __init__(self, design, fault=None, programs=None):
        super().__init__(design, fault, programs)
        self.regs = [[0] * self.n for _ in range(self.REPLICAS)]
        self.valid = [False] * self.n

    def step(self, inp: Optional[int]) -> StepRecord:
        cyc = self.cycle
        n = self.n
        fa = self.fault is not None and self.fault.active(cyc)
        reads = [self._read_regs(cyc, self.regs[r], r, fa)
                 for r in range(self.REPLICAS)]
        out = None
        if self.valid[n - 1]:
            voted = majority3(reads[0][n - 1], reads[1][n - 1],
                              reads[2][n - 1])
            out = self.design.output_byte(voted)
            self.emitted += 1
        accepted = inp is not None
        word = inp if accepted else 0
        for r in range(self.REPLICAS):
            new = [self._eval_stage(cyc, 0, word, r, fa)]
            for s in range(1, n):
                new.append(self._eval_stage(cyc, s, reads[r][s - 1], r, fa))
            self.regs[r] = new
        self.valid = [accepted] + self.valid[:n - 1]
        if accepted:
            self.consumed += 1
        self.cycle += 1
        return StepRecord(cyc, inp, accepted, (), False, out)

    def canonical_state(self):
        return (tuple(tuple(r) for r in self.regs), tuple(self.valid),
                self.consumed, self.emitted)


class TtrMachine(_MachineBase):
    """Time redundancy: each input runs through the single pipeline three
    times in consecutive cycles; the three buffered results are bitwise
    majority-voted.  Throughput is one result per three cycles."""

    def __init__(self, design, fault=None, programs=None):
        super().__init__(design, fault, programs)
        self.regs = [0] * self.n
        self.valid = [False] * self.n
        self.buffer: list[int] = []
        self.phase = 0          # 0 accepts a new input; 1, 2 replay it
        self.held: Optional[int] = None

    def _buffer_read(self, cyc: int, row: int, fa: bool) -> int:
        word = self.buffer[row]
        if fa:
            word = self.fault.reg_read(cyc, 0, self.n + row, word)
        return word

    def step(self, inp: Optional[int]) -> StepRecord:
        cyc = self.cycle
        n = self.n
        fa = self.fault is not None and self.fault.active(cyc)
        reads = self._read_regs(cyc, self.regs, 0, fa)

        out = None
        if self.valid[n - 1]:
            self.buffer.append(reads[n - 1])
            if len(self.buffer) == 3:
                voted = majority3(self._buffer_read(cyc, 0, fa),
                                  self._buffer_read(cyc, 1, fa),
                                  self._buffer_read(cyc, 2, fa))
                out = self.design.output_byte(voted)
                self.emitted += 1
                self.buffer.clear()

        accepted = False
        if self.phase == 0:
            self.held = inp
            if inp is not None:
                accepted = True
                self.consumed += 1
        feeding = self.held is not None
        word = self.held if feeding else 0
        new = [self._eval_stage(cyc, 0, word, 0, fa)]
        for s in range(1, n):
            new.append(self._eval_stage(cyc, s, reads[s - 1], 0, fa))
        self.regs = new
        self.valid = [feeding] + self.valid[:n - 1]
        self.phase = (self.phase + 1) % 3
        self.cycle += 1
        return StepRecord(cyc, inp, accepted, (), False, out)

    def canonical_state(self):
        return (tuple(self.regs), tuple(self.valid), tuple(self.buffer),
                self.phase, self.held, self.consumed, self.emitted)


def ttr_run(machine: TtrMachine, value: int) -> int:
    """Feed one byte into a fresh-phase time-redundant machine and run
    until its voted result emerges (the input is evaluated on three
    successive cycles, then the buffered results are voted)."""
    if machine.phase != 0:
        raise ValueError("machine is mid-way through a triple evaluation")
    target = machine.emitted + 1
    rec = machine.step(value)
    while machine.emitted < target:
        rec = machine.step(None)
    result = rec.output
    while machine.phase != 0:     # realign so the next byte can be accepted
        machine.step(None)
    return result


MACHINE_CLASSES = {
    "original": PlainPipelineMachine,
    "hfs": FcDmrMachine,
    "tmr": TmrMachine,
    "ttr": TtrMachine,
}


def make_machine(scheme: str, design: PipelineDesign, fault=None,
                 programs=None):
    try:
        cls = MACHINE_CLASSES[scheme]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}") from None
    return cls(design, fault, programs)
