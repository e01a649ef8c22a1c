"""End-to-end round trips: hidden map -> root oracle -> reconstructed Psi.

Each instance draws its own datum X and hidden unimodular A from a generator
seeded by (seed, index), so instances are independent and reproducible one
at a time.  Every fourth instance uses a random smaller rank, so a rank-3 run
also exercises rank 1 and rank 2 cores.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .degeneration import split_lattice
from .generate import random_block_unimodular, random_datum, random_unimodular
from .oracles import InvalidUpsilonError, LinearUpsilon, SwappedUpsilon
from .reconstruct import Report, brute_force_iso, glue_and_extend, validate_upsilon, verify_toric_iso
from .roots import ToricDatum, enumerate_roots

EXIT_OK = 0
EXIT_FAILED = 2


@dataclass
class InstanceResult:
    index: int
    rank: int
    rays: list
    hidden: list
    stages: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    psi: list | None = None
    swapped: list | None = None
    failure: dict | None = None
    skipped: str | None = None
    report: Report = field(default_factory=Report)

    @property
    def passed(self) -> bool:
        return self.failure is None

    def as_dict(self, timings: bool = False) -> dict:
        out = {"index": self.index, "rank": self.rank, "rays": self.rays, "hidden": self.hidden,
               "passed": self.passed, "stages": self.stages, "psi": self.psi,
               "checks": self.report.as_dict()["checks"]}
        if self.skipped is not None:
            out["skipped"] = self.skipped
        if self.swapped is not None:
            out["swapped"] = self.swapped
        if self.failure is not None:
            out["failure"] = self.failure
        if timings:
            out["timings"] = {k: round(v, 4) for k, v in self.timings.items()}
        return out


@dataclass
class SelftestReport:
    seed: int
    rank_max: int
    corrupt: bool
    instances: list[InstanceResult]

    @property
    def exit_code(self) -> int:
        return EXIT_OK if all(r.passed for r in self.instances) else EXIT_FAILED

    def as_dict(self, timings: bool = False) -> dict:
        return {"seed": self.seed, "rank_max": self.rank_max, "corrupt": self.corrupt,
                "exit_code": self.exit_code,
                "instances": [r.as_dict(timings) for r in self.instances]}

    def lines(self, timings: bool = False) -> list[str]:
        out = []
        for r in self.instances:
            head = f"instance {r.index}: rank {r.rank}, rays {r.rays}, hidden {r.hidden}"
            if r.skipped:
                line = f"{head} -> skipped ({r.skipped})"
            elif r.passed:
                line = f"{head} -> ok, psi {r.psi}"
            else:
                f = r.failure
                line = f"{head} -> FAILED at {f['stage']}: {f['message']}; witness {f['witness']}"
            if timings:
                line += "; " + ", ".join(f"{k} {v:.3f}s" for k, v in r.timings.items())
            out.append(line)
        passed = sum(r.passed and not r.skipped for r in self.instances)
        skipped = sum(bool(r.skipped) for r in self.instances)
        out.append(f"{passed}/{len(self.instances)} instances passed, {skipped} skipped; exit {self.exit_code}")
        return out


def draw_instance(seed: int, index: int, rank_max: int) -> tuple[ToricDatum, tuple]:
    rng = random.Random(f"{seed}:{index}")
    n = rank_max if index % 4 != 3 or rank_max == 1 else rng.randint(1, rank_max - 1)
    bound = 3 if n <= 2 else 2
    if rng.random() < 0.75:
        # cones in rank <= 2 have at most n rays
        count = n if n <= 2 else rng.randint(n, n + 1)
        X = random_datum(n, count, bound, rng, full_dimensional=True)
    else:
        X = random_datum(n, rng.randint(0, n - 1), bound, rng)
    split = split_lattice(X)
    A = None
    if split.s and rng.random() < 0.5:
        A = random_block_unimodular(split.complement_basis + split.m_x_basis, split.s, rng)
    if A is None:
        A = random_unimodular(n, rng)
    return X, A


def validation_bound(n: int) -> int:
    return 3 if n <= 2 else 2


def run_instance(X: ToricDatum, A, index: int = 0, corrupt_seed: str | None = None) -> InstanceResult:
    result = InstanceResult(index, X.rank, [list(v) for v in X.rays], [list(r) for r in A])
    clock = time.perf_counter

    def stage(name, fn):
        start = clock()
        try:
            return fn()
        finally:
            result.timings[name] = result.timings.get(name, 0.0) + clock() - start
            result.stages.append(name)

    try:
        U = stage("oracle", lambda: LinearUpsilon(X, A))
        Y = U.target
        bound = validation_bound(X.rank)
        if corrupt_seed is not None:
            pool = enumerate_roots(X, bound)
            if len(pool) < 2:
                result.skipped = "fewer than two roots to swap"
                return result
            first, second = random.Random(corrupt_seed).sample(pool, 2)
            result.swapped = [list(first.weight), list(second.weight)]
            U = SwappedUpsilon(U, first, second)
        validation = stage("validate", lambda: validate_upsilon(U, bound))
        result.report.checks.extend(validation.checks)
        result.report.notes.extend(validation.notes)
        if not validation.passed:
            bad = validation.failures()[0]
            raise InvalidUpsilonError(bad.stage, bad.detail, bad.witness)
        psi = stage("reconstruct", lambda: glue_and_extend(U, result.report))
        result.psi = [list(r) for r in psi.matrix]
        if not stage("verify", lambda: verify_toric_iso(psi, X, Y)):
            raise InvalidUpsilonError("verify", "Psi is not a toric isomorphism", psi.matrix)
        other = stage("brute force", lambda: brute_force_iso(X, Y))
        if other is None:
            raise InvalidUpsilonError("brute force", "brute force finds no isomorphism", psi.matrix)
    except InvalidUpsilonError as exc:
        result.failure = exc.as_dict()
    return result


def run_selftest(seed: int, instances: int, rank_max: int, corrupt: bool = False) -> SelftestReport:
    if rank_max < 1:
        raise ValueError("rank_max must be at least 1")
    results = []
    for i in range(instances):
        X, A = draw_instance(seed, i, rank_max)
        results.append(run_instance(X, A, i, f"{seed}:{i}:swap" if corrupt else None))
    return SelftestReport(seed, rank_max, corrupt, results)
