"""Monte-Carlo prepare-and-measure runs feeding the certifier.

Each trial draws a preparation from the ensemble priors, erases it with a
state-independent loss probability (folded into outcome 0 together with
the measurement's own inconclusive weight), and otherwise samples an
outcome from the Born probabilities. Counts are reproducible bit for bit:
trials are partitioned into fixed-size chunks, each chunk running its own
counter-based stream derived from (seed, chunk index), so the merge result
does not depend on execution order.
"""
from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass

import numpy as np

from .certify import OutcomeRates, WeightVector, certify_general, certify_qubit
from .ensembles import Ensemble, average_state
from .errors import (
    DegenerateEnsembleError,
    DimensionMismatchError,
    InvalidSpecError,
    OutOfRangeError,
    ZeroRateError,
)
from .strategies import Povm

__all__ = [
    "ExperimentSpec",
    "Tally",
    "TallyCertification",
    "run",
    "wilson_interval",
    "certify_from_tally",
    "tally_to_json",
    "tally_from_json",
]

CHUNK = 1 << 16
Z95 = statistics.NormalDist().inv_cdf(0.975)


@dataclass(frozen=True, eq=False)
class ExperimentSpec:
    ensemble: Ensemble
    povm: Povm
    trials: int
    seed: int
    loss: float = 0.0

    def __post_init__(self):
        if self.povm.dim != self.ensemble.dim:
            raise DimensionMismatchError(
                f"POVM dim {self.povm.dim} vs ensemble dim {self.ensemble.dim}"
            )
        if not (0.0 <= self.loss <= 1.0):
            raise OutOfRangeError(f"loss={self.loss} outside [0, 1]")
        if self.trials < 1:
            raise OutOfRangeError(f"trials={self.trials} must be positive")


@dataclass(frozen=True, eq=False)
class Tally:
    """Counts indexed by (preparation, outcome), outcome 0 inconclusive."""

    counts: np.ndarray
    trials: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2:
            raise InvalidSpecError("counts must be a preparations x outcomes table")
        if (counts < 0).any() or int(counts.sum()) != self.trials:
            raise InvalidSpecError("counts must be nonnegative and sum to trials")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n_outcomes(self) -> int:
        return self.counts.shape[1]

    def rates(self) -> np.ndarray:
        """Ensemble-average click rate per outcome 0..n."""
        return self.counts.sum(axis=0) / self.trials

    def wilson(self, z: float = Z95) -> list:
        totals = self.counts.sum(axis=0)
        return [wilson_interval(int(k), self.trials, z) for k in totals]

    def empirical_confidence(self, y: int) -> float:
        """Fraction of outcome-y events whose preparation was state y."""
        if not (1 <= y < self.n_outcomes):
            raise OutOfRangeError(f"detector index {y} outside 1..{self.n_outcomes - 1}")
        column = int(self.counts[:, y].sum())
        if column == 0:
            raise ZeroRateError(f"no clicks on detector {y}")
        return int(self.counts[y - 1, y]) / column


@dataclass(frozen=True, eq=False)
class TallyCertification:
    report: object                      # CertReport or GeneralCertificate
    eta1_interval: tuple
    value_interval: tuple


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple:
    if trials <= 0:
        return (0.0, 1.0)
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def run(spec: ExperimentSpec) -> Tally:
    e, povm = spec.ensemble, spec.povm
    n_prep = len(e)
    outcomes = povm.outcome_elements()
    born = np.empty((n_prep, len(outcomes)))
    for x, state in enumerate(e.states):
        for j, element in enumerate(outcomes):
            born[x, j] = max(float(np.real(np.trace(element @ state.matrix))), 0.0)
    born /= born.sum(axis=1, keepdims=True)

    probs = (1.0 - spec.loss) * born
    probs[:, 0] += spec.loss
    cums = np.cumsum(probs, axis=1)
    cums[:, -1] = 1.0
    prior_cum = np.cumsum(e.priors)

    counts = np.zeros((n_prep, len(outcomes)), dtype=np.int64)
    done, chunk_index = 0, 0
    while done < spec.trials:
        size = min(CHUNK, spec.trials - done)
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence(spec.seed, spawn_key=(chunk_index,)))
        )
        xs = np.searchsorted(prior_cum, rng.random(size), side="right")
        xs = np.minimum(xs, n_prep - 1)
        ys = (rng.random(size)[:, None] >= cums[xs]).sum(axis=1)
        np.add.at(counts, (xs, ys), 1)
        done += size
        chunk_index += 1
    return Tally(counts, spec.trials)


def _noisy_pair_parameters(e: Ensemble):
    """Recover (c, p) when the ensemble is an equal-prior depolarized pair."""
    if e.dim != 2 or len(e) != 2:
        return None
    if abs(e.priors[0] - 0.5) > 1e-9:
        return None
    purities = [s.purity() for s in e.states]
    if abs(purities[0] - purities[1]) > 1e-8:
        return None
    r_sq = 2.0 * purities[0] - 1.0
    if r_sq < 1e-12:
        raise DegenerateEnsembleError("both states maximally mixed; c unrecoverable")
    overlap = float(np.real(np.trace(e.states[0].matrix @ e.states[1].matrix)))
    c = ((2.0 * overlap - 1.0) / r_sq + 1.0) / 2.0
    p = 1.0 - math.sqrt(r_sq)
    if not (0.0 <= p < 1.0):
        return None
    return min(max(c, 0.0), 1.0), p


def certify_from_tally(t: Tally, e: Ensemble) -> TallyCertification:
    """Certify detector 1 from empirical rates, at the point estimate and
    both Wilson 95% endpoints; the value interval spans all three results.
    """
    rates = t.rates()
    eta1_hat = float(rates[1])
    if eta1_hat <= 0.0:
        raise ZeroRateError("detector 1 never clicked; confidence undefined")
    lo, hi = t.wilson()[1]
    lo = max(lo, 1e-12)
    hi = min(hi, 1.0)
    probe = [eta1_hat, lo, hi]

    params = _noisy_pair_parameters(e)
    if params is not None and 0.0 < params[0] < 1.0:
        c, p = params
        reports = [certify_qubit(c, p, eta) for eta in probe]
        values = [r.value for r in reports]
        return TallyCertification(reports[0], (lo, hi), (min(values), max(values)))

    # General route: constrain only detector 1's rate (a sound relaxation).
    alpha = WeightVector((1.0,))
    certs = [
        certify_general(e, alpha, OutcomeRates((eta,), 1.0 - eta)) for eta in probe
    ]
    uppers = [cert.upper for cert in certs]
    return TallyCertification(certs[0], (lo, hi), (min(uppers), max(uppers)))


def tally_to_json(t: Tally) -> str:
    payload = {
        "trials": t.trials,
        "counts": [[int(v) for v in row] for row in t.counts],
        "rates": [float(r) for r in t.rates()],
        "wilson": [[float(a), float(b)] for a, b in t.wilson()],
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def tally_from_json(text: str) -> Tally:
    try:
        payload = json.loads(text)
        return Tally(np.array(payload["counts"], dtype=np.int64), int(payload["trials"]))
    except (KeyError, TypeError, ValueError) as err:
        raise InvalidSpecError(f"malformed tally JSON: {err}") from err
