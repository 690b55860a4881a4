"""Selective partition refinement and certified expansion lower bounds.

The refinement loop repeatedly builds the graph representation, finds the
minimum-mean cycle, splits the partition elements on that cycle at their
representable midpoints, and stops on the size cap, an unsplittable
cycle, or a stalled lambda.  The certificate's lambda is recomputed on
the final partition.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .graph import WeightedDigraph, build_representation, compute_C, min_cycle_mean_full
from .intervals import Interval
from .maps import CriticalNeighbourhood, MapFamily
from .orbit import OrbitCertificate, prove_periodic_orbit
from .partition import AdmissiblePartition, split_elements, uniform_partition

_INF = math.inf

STOP_SIZE_CAP = "size_cap"
STOP_STALL = "stall"
STOP_NO_SPLIT = "no_split"
STOP_NO_CYCLES = "no_cycles"
STOP_STATIC = "static"


@dataclass(frozen=True)
class RefinementConfig:
    """Stopping rules for the refinement loop."""

    K: int = 1000
    stall_epsilon: float = 1e-10
    stall_runs: int = 10
    orbit_width_threshold: float = 1e-4

    def __post_init__(self):
        if self.stall_epsilon <= 0.0:
            raise ValueError("stall_epsilon must be positive")
        if self.stall_runs < 1:
            raise ValueError("stall_runs must be at least 1")
        if self.K < 1:
            raise ValueError("K must be positive")


@dataclass
class RefinementResult:
    trace: list[tuple[int, float]]
    stop_reason: str
    iterations: int
    lambda_max: float | None = None
    orbit: OrbitCertificate | None = None


@dataclass
class ExpansionCertificate:
    """Certified expansion bound; lambda may be +inf when the graph is acyclic."""

    lam: float
    C: float | None
    lambda_max: float | None
    orbit: OrbitCertificate | None
    final_partition_size: int
    iterations: int
    elapsed: float
    trace: list[tuple[int, float]]
    stop_reason: str
    family_name: str
    omega: Interval
    delta_radius: float | None
    K: int
    partition: AdmissiblePartition | None = field(default=None, repr=False)
    graph: WeightedDigraph | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        orbit = self.orbit
        return {
            "family": self.family_name,
            "omega_lo": repr(self.omega.lo),
            "omega_hi": repr(self.omega.hi),
            "delta": self.delta_radius,
            "K": self.K,
            "k_final": self.final_partition_size,
            "lambda": self.lam,
            "C": self.C,
            "lambda_max": self.lambda_max,
            "period": orbit.period if orbit else None,
            "orbit_lo": repr(orbit.seed.lo) if orbit else None,
            "orbit_hi": repr(orbit.seed.hi) if orbit else None,
            "iterations": self.iterations,
            "stop_reason": self.stop_reason,
            "elapsed_s": self.elapsed,
        }


def _resolve_delta(
    family: MapFamily, delta: float | CriticalNeighbourhood
) -> tuple[CriticalNeighbourhood, float | None]:
    if isinstance(delta, CriticalNeighbourhood):
        return delta, None
    return family.make_critical_neighbourhood(float(delta)), float(delta)


def refine_partition(
    p0: AdmissiblePartition,
    family: MapFamily,
    delta: CriticalNeighbourhood,
    cfg: RefinementConfig,
) -> tuple[AdmissiblePartition, RefinementResult]:
    """Selective refinement: split the elements on the minimizing cycle."""
    if len(p0) > cfg.K:
        raise ValueError(f"initial partition size {len(p0)} exceeds K={cfg.K}")
    p = p0
    trace: list[tuple[int, float]] = []
    lam_best = -_INF
    stalled = 0
    iterations = 0
    best_lambda_max: float | None = None
    best_orbit: OrbitCertificate | None = None
    attempted: set[tuple[float, float, int]] = set()
    point_parameter = family.parameter_set.is_point()
    reason = STOP_NO_SPLIT

    while True:
        iterations += 1
        graph = build_representation(p, family, delta)
        lam, cycle = min_cycle_mean_full(graph, want_cycle=True)
        trace.append((len(p), lam))

        if cycle is None:
            reason = STOP_NO_CYCLES
            break

        if point_parameter:
            seed = p[cycle.vertices[0]]
            if seed.width < cfg.orbit_width_threshold:
                key = (seed.lo, seed.hi, cycle.length)
                if key not in attempted:
                    attempted.add(key)
                    proof = prove_periodic_orbit(family, delta, seed, cycle.length)
                    if isinstance(proof, OrbitCertificate):
                        if best_lambda_max is None or proof.lambda_max < best_lambda_max:
                            best_lambda_max = proof.lambda_max
                            best_orbit = proof

        if lam_best > -_INF:
            rel = (lam - lam_best) / max(abs(lam_best), 1e-30)
        else:
            rel = _INF
        if rel < cfg.stall_epsilon:
            stalled += 1
        else:
            stalled = 0
        if lam > lam_best:
            lam_best = lam

        # split the cycle's elements, stopping exactly at the size cap
        chosen: list[int] = []
        card = len(p)
        hit_cap = card >= cfg.K
        if not hit_cap:
            for v in cycle.vertices:
                if card >= cfg.K:
                    hit_cap = True
                    break
                lo = float(p.los[v])
                hi = float(p.his[v])
                mid = 0.5 * (lo + hi)
                splittable = lo < mid < hi or math.nextafter(lo, _INF) < hi
                if splittable:
                    chosen.append(v)
                    card += 1
        if chosen:
            p, num_split = split_elements(p, chosen)
        else:
            num_split = 0

        if hit_cap:
            reason = STOP_SIZE_CAP
            break
        if num_split == 0:
            reason = STOP_NO_SPLIT
            break
        if stalled >= cfg.stall_runs:
            reason = STOP_STALL
            break

    return p, RefinementResult(
        trace=trace,
        stop_reason=reason,
        iterations=iterations,
        lambda_max=best_lambda_max,
        orbit=best_orbit,
    )


def _finalize(
    family: MapFamily,
    delta_nbhd: CriticalNeighbourhood,
    delta_radius: float | None,
    p: AdmissiblePartition,
    refinement: RefinementResult,
    K: int,
    with_C: bool,
    started: float,
) -> ExpansionCertificate:
    graph = build_representation(p, family, delta_nbhd)
    lam, _ = min_cycle_mean_full(graph, want_cycle=False)
    c_value = None
    if with_C and lam < _INF:
        c_value = compute_C(graph, lam)
    reason = refinement.stop_reason
    if lam == _INF:
        reason = STOP_NO_CYCLES
    return ExpansionCertificate(
        lam=lam,
        C=c_value,
        lambda_max=refinement.lambda_max,
        orbit=refinement.orbit,
        final_partition_size=len(p),
        iterations=refinement.iterations,
        elapsed=time.process_time() - started,
        trace=refinement.trace,
        stop_reason=reason,
        family_name=family.name,
        omega=family.parameter_set,
        delta_radius=delta_radius,
        K=K,
        partition=p,
        graph=graph,
    )


def expansion_lower_bound(
    family: MapFamily,
    delta: float | CriticalNeighbourhood,
    K: int = 1000,
    cfg: RefinementConfig | None = None,
    with_C: bool = False,
) -> ExpansionCertificate:
    """Certified lower bound via refinement from a coarse uniform partition.

    The initial size is max(9, number of components of I minus Delta);
    lambda is recomputed on the final partition and is valid for every
    parameter in the family's omega.
    """
    started = time.process_time()
    delta_nbhd, delta_radius = _resolve_delta(family, delta)
    components = delta_nbhd.complement_components(family.domain)
    k0 = max(9, len(components))
    if K < k0:
        raise ValueError(f"K={K} below the initial partition size {k0}")
    if cfg is None:
        cfg = RefinementConfig(K=K)
    elif cfg.K != K:
        cfg = RefinementConfig(
            K=K,
            stall_epsilon=cfg.stall_epsilon,
            stall_runs=cfg.stall_runs,
            orbit_width_threshold=cfg.orbit_width_threshold,
        )
    p0 = uniform_partition(family.domain, delta_nbhd, k0)
    p, refinement = refine_partition(p0, family, delta_nbhd, cfg)
    return _finalize(
        family, delta_nbhd, delta_radius, p, refinement, K, with_C, started
    )


def expansion_static(
    family: MapFamily,
    delta: float | CriticalNeighbourhood,
    partition: AdmissiblePartition,
    with_C: bool = False,
) -> ExpansionCertificate:
    """Certify on a fixed partition (no refinement)."""
    started = time.process_time()
    delta_nbhd, delta_radius = _resolve_delta(family, delta)
    graph = build_representation(partition, family, delta_nbhd)
    lam, _ = min_cycle_mean_full(graph, want_cycle=False)
    refinement = RefinementResult(
        trace=[(len(partition), lam)],
        stop_reason=STOP_STATIC,
        iterations=1,
    )
    cert = _finalize(
        family,
        delta_nbhd,
        delta_radius,
        partition,
        refinement,
        len(partition),
        with_C,
        started,
    )
    return cert


def expansion_uniform_baseline(
    family: MapFamily,
    delta: float | CriticalNeighbourhood,
    k: int,
    with_C: bool = False,
) -> ExpansionCertificate:
    """Uniform-partition baseline of size k, no refinement."""
    delta_nbhd, _ = _resolve_delta(family, delta)
    partition = uniform_partition(family.domain, delta_nbhd, k)
    return expansion_static(family, delta, partition, with_C=with_C)
