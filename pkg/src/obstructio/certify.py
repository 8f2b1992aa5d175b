"""End-to-end analysis of a sampled surface and the obstruction verdict."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .barth import (
    BarthSection,
    DegenerateSection,
    FamilySpec,
    assemble_presentation,
    even_set_ideal,
    extract_quartic,
    family,
    is_symmetric_section,
    sample_section,
)
from .cohomology import ChiSpec, DefectInterval, chi_F, predicted_defect
from .gfp import DEFAULT_PRIME
from .nodal import defect, is_reduced, singular_scheme
from .quadric import QuadricContext, standard_quadric

SCHEMA = "obstructio/1"
CHI_SAMPLES = range(4, 9)

log = logging.getLogger(__name__)

CERTIFIED = "certified_obstruction"
NO_CERTIFICATE = "no_certificate"
INCONSISTENT = "inconsistent"

EXIT_CODES = {CERTIFIED: 0, NO_CERTIFICATE: 10, INCONSISTENT: 20, "sampling_failure": 30}


@dataclass
class SurfaceAnalysis:
    family: str
    prime: int
    seed: int | None
    seeds: list
    status: str  # accepted | sampling_failure
    f: str | None = None
    node_count: int | None = None
    reduced: bool | None = None
    reduced_trials: int | None = None
    defect_groebner: int | None = None
    defect_resolution: list | None = None  # [low, high]
    sing_equals_w: bool | None = None
    hilbert_chi_check: bool | None = None
    section_dims: list | None = None  # h0(F(n)) for n = 1, 2, 3
    attempts: list = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.status == "accepted"

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, **asdict(self)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, record: dict) -> "SurfaceAnalysis":
        record = dict(record)
        if record.pop("schema", None) != SCHEMA:
            raise ValueError("unknown report schema")
        return cls(**record)

    @classmethod
    def from_json(cls, text: str) -> "SurfaceAnalysis":
        return cls.from_dict(json.loads(text))


@dataclass
class ObstructionVerdict:
    status: str
    reasons: list

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def _resolution_range(fam: FamilySpec) -> list:
    pred = predicted_defect(fam)
    if isinstance(pred, DefectInterval):
        return [pred.low, pred.high]
    return [pred, pred]


def analyze_section(section: BarthSection, ctx: QuadricContext, seed: int = 0) -> SurfaceAnalysis:
    """Run every check on one section; raises DegenerateSection on shape failures."""
    fam = section.family
    if not is_symmetric_section(section):
        raise DegenerateSection("section is not symmetric")
    pres = assemble_presentation(section)
    f = extract_quartic(pres, ctx, seed=seed)
    w = even_set_ideal(pres, ctx, seed=seed)
    if w.degree != fam.expected_nodes:
        raise DegenerateSection(f"even set has degree {w.degree}, expected {fam.expected_nodes}")
    sing = singular_scheme(ctx.q, f, ctx, seed=seed)
    if sing.dimension != 0:
        raise DegenerateSection("singular locus is not isolated")
    same = tuple(sing.gb.elements) == tuple(w.gb.elements)
    nodes = is_reduced(w.gb, seed=seed)
    d = defect(w.ideal, w.degree, ctx)
    spec = ChiSpec(fam.delta, w.degree)
    chi_ok = all(pres.hilbert_function(n) == chi_F(n, spec) for n in CHI_SAMPLES)
    return SurfaceAnalysis(
        family=fam.tag,
        prime=ctx.p,
        seed=section.seed,
        seeds=[section.seed],
        status="accepted",
        f=str(f),
        node_count=w.degree,
        reduced=nodes.reduced,
        reduced_trials=nodes.trials,
        defect_groebner=d.d,
        defect_resolution=_resolution_range(fam),
        sing_equals_w=same,
        hilbert_chi_check=chi_ok,
        section_dims=[pres.hilbert_function(n) for n in (1, 2, 3)],
    )


def run_pipeline(fam: FamilySpec | str, p: int = DEFAULT_PRIME, seed: int = 0, max_retries: int = 8,
                 sampler=None, ctx: QuadricContext | None = None) -> SurfaceAnalysis:
    """Sample and analyze, moving to seed + 1 after a failed shape check."""
    fam = family(fam) if isinstance(fam, str) else fam
    ctx = ctx or standard_quadric(p)
    sampler = sampler or sample_section
    attempts = []
    for k in range(max_retries + 1):
        s = seed + k
        try:
            analysis = analyze_section(sampler(fam, ctx, s), ctx, seed=s)
        except DegenerateSection as exc:
            log.info("%s seed %d rejected: %s", fam.tag, s, exc)
            attempts.append({"seed": s, "outcome": "rejected", "reason": str(exc)})
            continue
        attempts.append({"seed": s, "outcome": "accepted", "reason": ""})
        analysis.seeds = [a["seed"] for a in attempts]
        analysis.attempts = attempts
        return analysis
    return SurfaceAnalysis(fam.tag, ctx.p, None, [a["seed"] for a in attempts], "sampling_failure", attempts=attempts)


def verdict(a: SurfaceAnalysis) -> ObstructionVerdict:
    if not a.accepted:
        raise ValueError("verdict needs an accepted analysis")
    fam = family(a.family)
    problems = []
    low, high = a.defect_resolution
    if not low <= a.defect_groebner <= high:
        problems.append(f"defect routes disagree: {a.defect_groebner} vs [{low}, {high}]")
    if not a.sing_equals_w:
        problems.append("singular scheme differs from the even set")
    if a.node_count != fam.expected_nodes:
        problems.append(f"{a.node_count} nodes, family predicts {fam.expected_nodes}")
    if a.defect_groebner != fam.expected_defect:
        problems.append(f"defect {a.defect_groebner}, family predicts {fam.expected_defect}")
    if not a.hilbert_chi_check:
        problems.append("cokernel Hilbert polynomial differs from the Euler characteristic formula")
    if a.defect_groebner < 0:
        problems.append("negative defect")
    if problems:
        return ObstructionVerdict(INCONSISTENT, problems)
    if a.defect_groebner == 0 and a.node_count >= 4:
        return ObstructionVerdict(
            CERTIFIED,
            [
                f"{a.node_count} nodes form an even set, so at least two classes exist",
                "the nodes impose independent conditions on cubics (defect 0), and 2 > 2^0",
            ],
        )
    return ObstructionVerdict(
        NO_CERTIFICATE,
        [
            f"defect {a.defect_groebner} > 0: one even set does not beat 2^d",
            "general members of this family are known to carry no such obstruction; "
            "this verdict is not a proof of that",
        ],
    )


def _run_one(args):
    tag, p, seed, max_retries = args
    return run_pipeline(tag, p, seed, max_retries)


def batch(families, count: int, p: int = DEFAULT_PRIME, base_seed: int = 0, parallelism: int = 1,
          max_retries: int = 8) -> list:
    """count independent runs per family, ordered by (family, seed).

    Run i of a family starts at base_seed + i * (max_retries + 1) so that
    retries of different runs never share a seed.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    stride = max_retries + 1
    jobs = [(family(t).tag, p, base_seed + i * stride, max_retries) for t in sorted(families) for i in range(count)]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    order = sorted(range(len(jobs)), key=lambda i: (jobs[i][0], jobs[i][2]))
    return [results[i] for i in order]


def summarize(analyses) -> dict:
    out: dict = {}
    for a in analyses:
        entry = out.setdefault(a.family, {"runs": 0, "accepted": 0, "verdicts": {}})
        entry["runs"] += 1
        if a.accepted:
            entry["accepted"] += 1
            v = verdict(a).status
            entry["verdicts"][v] = entry["verdicts"].get(v, 0) + 1
    return {"schema": SCHEMA, "families": out}


def write_batch(analyses, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, a in enumerate(analyses):
        name = f"{a.family}-{a.seeds[0] if a.seeds else i}.json"
        (out_dir / name).write_text(a.to_json())
    (out_dir / "summary.json").write_text(json.dumps(summarize(analyses), sort_keys=True, indent=2) + "\n")
