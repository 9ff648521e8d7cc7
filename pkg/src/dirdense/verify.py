"""Built-in verification suites, exposed through ``dirdense --verify``.

Each suite returns a JSON-ready dict {"suite", "ok", "details"}.  These are
the fast self-checks meant to run on an installed package without the test
tree: oracle-backed approximation bounds on the seeded corpus, a Monte-Carlo
check of the degree-sampling concentration bound, the adversarial peeling
instance, and determinism of the seeded engines.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .baselines import baseline_grid
from .fixtures import acceptance_corpus, make_peeling_adversary, random_directed_gnp
from .graph import to_bipartite
from .mpc import MpcParams, run_mpc, sampling_rate
from .oracle import exact_densest
from .peel import Thresholds, as_fraction, peel, peel_grid, unguarded_peel
from .streaming import run_stream_grid

__all__ = [
    "SUITES",
    "run_suite",
    "density_meets",
    "small_oracle_suite",
    "sampling_lemma_suite",
    "adversary_suite",
    "determinism_suite",
]


def density_meets(cnt_a, s_a, t_a, cnt_o, s_o, t_o, factor: Fraction) -> bool:
    """Exact check of cnt_a/sqrt(s_a*t_a) >= (cnt_o/sqrt(s_o*t_o)) / factor.

    Integer cross-multiplication only; a float comparison could flip a
    boundary case either way.
    """
    factor = as_fraction(factor)
    if cnt_o <= 0 or s_o <= 0 or t_o <= 0:
        return True
    if cnt_a <= 0 or s_a <= 0 or t_a <= 0:
        return False
    lhs = cnt_a * cnt_a * factor.numerator**2 * s_o * t_o
    rhs = cnt_o * cnt_o * factor.denominator**2 * s_a * t_a
    return lhs >= rhs


def small_oracle_suite(epsilon=0.2) -> dict:
    """peel_grid within 2(1+eps)^3 of the exact optimum on the whole corpus."""
    eps = as_fraction(epsilon)
    factor = 2 * (1 + eps) ** 3
    graphs = acceptance_corpus()
    violations = []
    for idx, el in enumerate(graphs):
        g = to_bipartite(el)
        opt_pair, opt = exact_densest(g)
        res = peel_grid(g, eps)
        ok = density_meets(
            res.density.edge_count, res.density.s_size, res.density.t_size,
            opt.edge_count, opt.s_size, opt.t_size, factor,
        )
        if not ok:
            violations.append(
                {"graph": idx, "got": res.density.value, "opt": opt.value}
            )
    return {
        "suite": "small-oracle",
        "ok": not violations,
        "details": {
            "graphs": len(graphs),
            "factor": str(factor),
            "violations": violations[:5],
            "violation_count": len(violations),
        },
    }


def sampling_lemma_suite(
    *, n: int = 1024, k: int = 64, epsilon=0.5, trials: int = 1000, seed: int = 0
) -> dict:
    """Monte-Carlo misclassification rate of threshold-degree sampling.

    Half the vertices sit just below the low cutoff k/(1+eps), half just
    above the high cutoff (1+eps)k.  A low vertex whose sampled degree
    reaches p*k, or a high vertex whose sampled degree misses it, is a
    misclassification.  The guarantee is a per-vertex failure probability
    of at most 2/n^2, so the observed rate must stay within three standard
    errors of that.
    """
    eps = as_fraction(epsilon)
    p = sampling_rate(n, eps, k)
    low_deg = math.ceil(Fraction(k) / (1 + eps)) - 1
    high_deg = math.ceil(k * (1 + eps)) + 1
    half = n // 2
    cutoff = p * k
    miscls = 0
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence((seed, trial)))
        low = rng.binomial(low_deg, p, size=half)
        high = rng.binomial(high_deg, p, size=n - half)
        miscls += int(np.count_nonzero(low >= cutoff))
        miscls += int(np.count_nonzero(high < cutoff))
    events = trials * n
    rate = miscls / events
    q = 2.0 / (n * n)
    sigma = math.sqrt(q * (1.0 - q) / events)
    bound = q + 3.0 * sigma
    return {
        "suite": "sampling-lemma",
        "ok": rate <= bound,
        "details": {
            "n": n, "k": k, "p": p, "low_degree": low_deg,
            "high_degree": high_deg, "trials": trials,
            "misclassified": miscls, "rate": rate, "bound": bound,
        },
    }


def adversary_suite(
    *, clique_size: int = 5, extra: int = 200, epsilon=0.2, unguarded_floor: int = 150
) -> dict:
    """Stopping rule beats the one-vertex-per-iteration eroding chain."""
    eps = as_fraction(epsilon)
    el = make_peeling_adversary(clique_size, extra)
    g = to_bipartite(el)
    th = Thresholds.of(clique_size - 1, 1, eps)
    guarded = peel(g, th)
    raw = unguarded_peel(g, th)
    log_n = math.ceil(math.log(g.n) / math.log(float(1 + eps)))
    guard_bound = 2 * log_n
    ok = guarded.iterations <= guard_bound and raw.iterations >= unguarded_floor
    return {
        "suite": "adversary",
        "ok": ok,
        "details": {
            "n_bipartite": g.n,
            "guarded_iterations": guarded.iterations,
            "guarded_bound": guard_bound,
            "unguarded_iterations": raw.iterations,
            "unguarded_floor": unguarded_floor,
        },
    }


def determinism_suite(*, seed: int = 7) -> dict:
    """Same seed, same input -> identical structured results, twice over."""
    el = random_directed_gnp(60, 0.1, 11)
    g = to_bipartite(el)
    checks = {}

    s1 = run_stream_grid(el, 0.2)
    s2 = run_stream_grid(el, 0.2)
    checks["stream"] = (
        s1.pair == s2.pair
        and s1.density == s2.density
        and s1.per_z == s2.per_z
        and s1.selected_density_guess == s2.selected_density_guess
    )

    params = MpcParams(0.6, 0.5, seed)
    m1 = run_mpc(g, params)
    m2 = run_mpc(g, params)
    checks["mpc"] = (
        m1.pair == m2.pair
        and m1.density == m2.density
        and m1.rounds_total == m2.rounds_total
        and m1.rows == m2.rows
    )

    b1 = baseline_grid(g, 0.2)
    b2 = baseline_grid(g, 0.2)
    checks["baseline"] = (
        b1.best_pair == b2.best_pair
        and b1.best_density == b2.best_density
        and b1.passes_or_rounds == b2.passes_or_rounds
        and b1.cells == b2.cells
    )

    return {
        "suite": "determinism",
        "ok": all(checks.values()),
        "details": checks,
    }


SUITES = {
    "small-oracle": small_oracle_suite,
    "sampling-lemma": sampling_lemma_suite,
    "adversary": adversary_suite,
    "determinism": determinism_suite,
}


def run_suite(name: str) -> dict:
    if name not in SUITES:
        raise KeyError(f"unknown verify suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name]()
