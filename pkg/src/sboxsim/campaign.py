"""Fault-injection campaigns: scenario execution, classification, aggregation.

Each scenario runs one faulted simulation against a cached fault-free
(golden) run of the same input stream and classifies the outcome:

  * masked               - no detection, no stall, outputs identical
  * detected_corrected   - detection and/or stalls, outputs identical
  * sdc                  - an output deviated with no detection raised
  * detected_uncorrected - detection raised but the output stream still
    deviated or never completed

Output comparison is value-sequence based for the stalling scheme (stall
cycles are invisible in the value order) and position-based everywhere,
which is the same thing for the fixed-latency machines.

Runs exit early once the faulted machine's state, at matching input
position, equals the golden run's snapshot and the fault window has
closed: from that point both futures are bit-identical, so the remaining
golden outputs are spliced in.  This is an exact check, not a heuristic,
and it is what makes exhaustive campaigns cheap.

Campaigns enumerate site x model x duration x start-cycle grids (or a
seeded random sample), optionally across worker processes; aggregation
is an order-independent merge, and re-running any campaign with the same
seed reproduces its result files byte for byte.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from typing import Optional

from .faults import (PERMANENT, STUCK0, STUCK1, FLIP, ActiveFault, FaultSet,
                     FaultSpec, enumerate_sites)
from .pipeline import PipelineDesign, build_stage_programs
from .redundancy import make_machine

MASKED = "masked"
DETECTED_CORRECTED = "detected_corrected"
SDC = "sdc"
DETECTED_UNCORRECTED = "detected_uncorrected"
CLASS_KINDS = (MASKED, DETECTED_CORRECTED, SDC, DETECTED_UNCORRECTED)


class EmptyCampaignError(ValueError):
    """The campaign configuration selects no scenarios."""


@dataclass(frozen=True)
class Classification:
    kind: str
    stall_cycles: int = 0
    first_bad_cycle: Optional[int] = None


@dataclass
class GoldenRun:
    outputs: list
    states: list           # canonical state after k cycles, k = 0..cycles
    cycles: int


def golden_run(scheme: str, design: PipelineDesign, stream,
               programs=None) -> GoldenRun:
    m = make_machine(scheme, design, None, programs)
    stream = list(stream)
    outputs = []
    states = [m.canonical_state()]
    cap = 4 * len(stream) + 4 * design.n_stages + 64
    while m.emitted < len(stream) and m.cycle < cap:
        inp = stream[m.consumed] if m.consumed < len(stream) else None
        rec = m.step(inp)
        if rec.output is not None:
            outputs.append(rec.output)
        states.append(m.canonical_state())
    if m.emitted != len(stream):
        raise RuntimeError("golden run failed to drain the pipeline")
    return GoldenRun(outputs=outputs, states=states, cycles=m.cycle)


def run_scenario(scheme: str, design: PipelineDesign, stream,
                 spec, golden: GoldenRun = None, programs=None,
                 collect_trace: bool = False, max_extra_cycles: int = 96):
    """Simulate one fault scenario and classify it against the golden run.

    spec is one FaultSpec, or a list of them for a simultaneous multi-fault
    scenario (classification only; no scheme guarantees multi-fault
    correction).  Returns (Classification, trace) where trace is a list of
    StepRecord when requested, else None.
    """
    stream = list(stream)
    if golden is None:
        golden = golden_run(scheme, design, stream, programs)
    specs = list(spec) if isinstance(spec, (list, tuple)) else [spec]
    fault = (FaultSet.bind(specs, design, scheme) if len(specs) > 1
             else ActiveFault(specs[0], design, scheme))
    m = make_machine(scheme, design, fault, programs)
    want = len(stream)

    window = 0
    for s in specs:
        window = max(window, 0 if s.duration is PERMANENT
                     else s.start_cycle + s.duration)
    cap = golden.cycles + window + max_extra_cycles

    outputs = []
    emitted_at = []
    trace = [] if collect_trace else None
    detected = False
    spliced = False
    while m.emitted < want and m.cycle < cap:
        inp = stream[m.consumed] if m.consumed < want else None
        rec = m.step(inp)
        if rec.global_err:
            detected = True
        if rec.output is not None:
            outputs.append(rec.output)
            emitted_at.append(rec.cycle)
        if collect_trace:
            trace.append(rec)
            continue     # a requested trace must cover the whole run
        # Exact convergence check: fault gone, machine unstalled, state
        # identical to the golden run at the same input position.
        if fault.expired(m.cycle) and not rec.global_err:
            idx = m.cycle - m.stall_cycles
            if 0 <= idx < len(golden.states) and \
                    m.canonical_state() == golden.states[idx]:
                spliced = True
                break

    if spliced:
        deviation = _first_mismatch(outputs, golden.outputs[:len(outputs)])
        complete = True
    else:
        deviation = _first_mismatch(outputs, golden.outputs[:len(outputs)])
        complete = len(outputs) == want

    if deviation is not None:
        first_bad = emitted_at[deviation]
        kind = DETECTED_UNCORRECTED if detected else SDC
        return Classification(kind, m.stall_cycles, first_bad), trace
    if not complete:
        kind = DETECTED_UNCORRECTED if detected else SDC
        return Classification(kind, m.stall_cycles, None), trace
    if detected or m.stall_cycles:
        return Classification(DETECTED_CORRECTED, m.stall_cycles), trace
    return Classification(MASKED), trace


def _first_mismatch(got, want) -> Optional[int]:
    for i, (g, w) in enumerate(zip(got, want)):
        if g != w:
            return i
    return None


# ---------------------------------------------------------------------------
# Campaign configuration and aggregation
# ---------------------------------------------------------------------------

DEFAULT_DURATIONS = (1, 2, 5, 10)
DEFAULT_SEED = 0x5B0C


def default_stream(seed: int = DEFAULT_SEED) -> bytes:
    """All 256 byte values in order plus 256 seeded-random bytes."""
    rng = random.Random(seed)
    return bytes(range(256)) + bytes(rng.randrange(256) for _ in range(256))


@dataclass(frozen=True)
class CampaignConfig:
    scheme: str
    fault_class: str = "transient"        # "transient" | "permanent"
    durations: tuple = DEFAULT_DURATIONS  # transient windows, in cycles
    models: tuple = None                  # default: flip / both stuck-ats
    site_kinds: tuple = ("gate", "register")
    start_cycles: tuple = None            # default 0 .. n_stages + 2
    stream: bytes = None                  # default: default_stream(seed)
    sample: Optional[int] = None          # None = exhaustive
    seed: int = DEFAULT_SEED
    workers: int = 1

    def resolved_models(self) -> tuple:
        if self.models is not None:
            return tuple(self.models)
        return (FLIP,) if self.fault_class == "transient" else (STUCK0, STUCK1)

    def resolved_starts(self, design: PipelineDesign) -> tuple:
        if self.start_cycles is not None:
            return tuple(self.start_cycles)
        if self.fault_class == "permanent":
            return (0,)
        return tuple(range(design.n_stages + 3))

    def resolved_stream(self) -> bytes:
        return self.stream if self.stream is not None else default_stream(self.seed)

    def to_json_dict(self) -> dict:
        doc = {
            "scheme": self.scheme,
            "fault_class": self.fault_class,
            "durations": list(self.durations),
            "models": list(self.models) if self.models is not None else None,
            "site_kinds": list(self.site_kinds),
            "start_cycles": (list(self.start_cycles)
                             if self.start_cycles is not None else None),
            "sample": self.sample,
            "seed": self.seed,
        }
        if self.stream is not None:
            doc["stream_hex"] = self.stream.hex()
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CampaignConfig":
        return cls(
            scheme=doc["scheme"],
            fault_class=doc.get("fault_class", "transient"),
            durations=tuple(doc.get("durations", DEFAULT_DURATIONS)),
            models=(tuple(doc["models"])
                    if doc.get("models") is not None else None),
            site_kinds=tuple(doc.get("site_kinds", ("gate", "register"))),
            start_cycles=(tuple(doc["start_cycles"])
                          if doc.get("start_cycles") is not None else None),
            stream=(bytes.fromhex(doc["stream_hex"])
                    if "stream_hex" in doc else None),
            sample=doc.get("sample"),
            seed=doc.get("seed", DEFAULT_SEED),
        )


@dataclass
class CampaignResult:
    scheme: str
    fault_class: str
    total: int
    counts: dict
    coverage: float
    per_site: dict
    seed: int
    rows: list = field(repr=False)        # (site, model, duration, start,
                                          #  classification, stalls)
    config: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        # The embedded config makes any campaign replayable from its
        # result file alone.
        return {
            "scheme": self.scheme,
            "fault_class": self.fault_class,
            "total": self.total,
            "counts": {k: self.counts.get(k, 0) for k in CLASS_KINDS},
            "coverage": self.coverage,
            "per_site": self.per_site,
            "seed": self.seed,
            "config": self.config,
            "meta": self.meta,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["site", "model", "duration", "start",
                        "classification", "stalls"])
            w.writerows(self.rows)

    def guarantee_holds(self) -> bool:
        """Zero silent corruptions and zero uncorrected detections."""
        return (self.counts.get(SDC, 0) == 0
                and self.counts.get(DETECTED_UNCORRECTED, 0) == 0)


def enumerate_scenarios(design: PipelineDesign,
                        config: CampaignConfig) -> list[FaultSpec]:
    sites = [s for s in enumerate_sites(design, config.scheme)
             if s.kind in config.site_kinds]
    models = config.resolved_models()
    starts = config.resolved_starts(design)
    durations = (config.durations if config.fault_class == "transient"
                 else (PERMANENT,))
    specs = []
    for site in sites:
        for model in models:
            for duration in durations:
                if duration is PERMANENT and model == FLIP:
                    continue
                for start in starts:
                    specs.append(FaultSpec(site, model, start, duration))
    if config.sample is not None:
        rng = random.Random(config.seed)
        if config.sample < len(specs):
            specs = rng.sample(specs, config.sample)
    if not specs:
        raise EmptyCampaignError("no fault scenarios selected")
    return specs


def _run_chunk(scheme, design, stream, specs, golden) -> list:
    programs = build_stage_programs(design)
    out = []
    for spec in specs:
        cls, _ = run_scenario(scheme, design, stream, spec, golden, programs)
        out.append(cls)
    return out


def run_campaign(design: PipelineDesign, config: CampaignConfig,
                 meta: dict = None) -> CampaignResult:
    """Execute every scenario of the configured grid and aggregate.

    Scenario order, and therefore the result file contents, depend only
    on the design and the configuration (plus the seed for sampled runs).
    Worker parallelism changes nothing but the wall time.
    """
    specs = enumerate_scenarios(design, config)
    stream = config.resolved_stream()
    programs = build_stage_programs(design)
    golden = golden_run(config.scheme, design, stream, programs)

    classifications: list[Classification]
    if config.workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        nw = config.workers
        chunks = [specs[i::nw] for i in range(nw)]
        with ProcessPoolExecutor(max_workers=nw) as pool:
            futures = [pool.submit(_run_chunk, config.scheme, design, stream,
                                   chunk, golden) for chunk in chunks]
            results = [f.result() for f in futures]
        classifications = [None] * len(specs)
        for i, res in enumerate(results):
            classifications[i::nw] = res
    else:
        classifications = _run_chunk(config.scheme, design, stream, specs,
                                     golden)

    counts: dict = {k: 0 for k in CLASS_KINDS}
    per_site: dict = {}
    rows = []
    for spec, cls in zip(specs, classifications):
        counts[cls.kind] += 1
        site_key = str(spec.site)
        bucket = per_site.setdefault(site_key, {k: 0 for k in CLASS_KINDS})
        bucket[cls.kind] += 1
        rows.append((str(spec.site), spec.model,
                     "perm" if spec.duration is PERMANENT else spec.duration,
                     spec.start_cycle, cls.kind, cls.stall_cycles))
    total = len(specs)
    coverage = (counts[MASKED] + counts[DETECTED_CORRECTED]) / total
    return CampaignResult(
        scheme=config.scheme, fault_class=config.fault_class, total=total,
        counts=counts, coverage=coverage, per_site=per_site,
        seed=config.seed, rows=rows, config=config.to_json_dict(),
        meta=dict(meta or {}))
