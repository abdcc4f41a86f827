"""Finite ontic model for preparation-noncontextual two-state statistics.

The ontic space has four regions, ordered (R12, R1, R2, R0): the overlap
region shared by both states, the private regions of states 1 and 2, and
the region shared by the two mirror states. The five epistemic
distributions over these regions are fixed by three requirements: each
state overlaps the other with weight exactly c, each state mixed equally
with its mirror reproduces the maximally mixed distribution, and the
construction is symmetric under swapping the two states. Response
functions are vectors of per-region click weights in [0, 1]; sharp
(outcome-deterministic) responses are indicators of epistemic supports.

nc_certified gives the noncontextual ceiling on the confidence of detector 1
as a function of its observed rate, in three branches split at
(1 -/+ (1-p)c)/2 and (1 + (1-p)c)/2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InfeasibleRateError,
    OutOfRangeError,
    ZeroConfusabilityError,
    ZeroRateError,
)
from .strategies import BoundResult

__all__ = [
    "REGIONS",
    "EPISTEMIC_LABELS",
    "MIRROR",
    "OnticModel",
    "ResponseFunction",
    "build_model",
    "sharp",
    "weighted_sharp",
    "rank2",
    "tilted_sharp",
    "prob",
    "ensemble_weights",
    "noisy_epistemic",
    "nc_confidence",
    "nc_certified",
    "nc_achievability_search",
]

REGIONS = ("R12", "R1", "R2", "R0")
EPISTEMIC_LABELS = ("mu1", "mu2", "mu1_bar", "mu2_bar", "mu_mixed")
MIRROR = {"mu1": "mu1_bar", "mu1_bar": "mu1", "mu2": "mu2_bar", "mu2_bar": "mu2"}

RATE_MATCH_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class OnticModel:
    """Four-region ontic space with its five epistemic weight vectors."""

    c: float
    epistemics: dict

    def weights(self, label: str) -> np.ndarray:
        try:
            return self.epistemics[label]
        except KeyError:
            raise OutOfRangeError(f"unknown epistemic label {label!r}") from None


@dataclass(frozen=True, eq=False)
class ResponseFunction:
    """Per-region click weights in [0, 1] with a human-readable description."""

    weights: np.ndarray
    description: str = ""

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (4,):
            raise OutOfRangeError(f"response function needs 4 region weights, got {w.shape}")
        if np.any(w < -1e-12) or np.any(w > 1.0 + 1e-12):
            raise OutOfRangeError(f"response weights {w} outside [0, 1]")
        w = np.clip(w, 0.0, 1.0)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)


def build_model(c: float) -> OnticModel:
    """Canonical four-region model at confusability c."""
    if not (0.0 <= c <= 1.0):
        raise OutOfRangeError(f"confusability c={c} outside [0, 1]")
    eps = {
        "mu1": np.array([c, 1.0 - c, 0.0, 0.0]),
        "mu2": np.array([c, 0.0, 1.0 - c, 0.0]),
        "mu1_bar": np.array([0.0, 0.0, 1.0 - c, c]),
        "mu2_bar": np.array([0.0, 1.0 - c, 0.0, c]),
        "mu_mixed": np.array([c / 2.0, (1.0 - c) / 2.0, (1.0 - c) / 2.0, c / 2.0]),
    }
    for v in eps.values():
        v.flags.writeable = False
    return OnticModel(c, eps)


def sharp(m: OnticModel, label: str) -> ResponseFunction:
    """Outcome-deterministic response: the indicator of an epistemic support."""
    w = (m.weights(label) > 0.0).astype(float)
    return ResponseFunction(w, f"sharp({label})")


def weighted_sharp(m: OnticModel, q: float, label: str) -> ResponseFunction:
    """A sharp response fired only with probability q."""
    if not (0.0 <= q <= 1.0):
        raise OutOfRangeError(f"weight q={q} outside [0, 1]")
    base = sharp(m, label)
    return ResponseFunction(q * base.weights, f"weighted-sharp(q={q:.12g}, target={label})")


def rank2(m: OnticModel, a: float, label: str) -> ResponseFunction:
    """Sharp response on a target plus weight a on the target's mirror support."""
    if not (0.0 <= a <= 1.0):
        raise OutOfRangeError(f"weight a={a} outside [0, 1]")
    if label not in MIRROR:
        raise OutOfRangeError(f"label {label!r} has no mirror partner")
    w = sharp(m, label).weights + a * sharp(m, MIRROR[label]).weights
    return ResponseFunction(w, f"rank2(a={a:.12g}, target={label})")


def tilted_sharp(m: OnticModel, t: float) -> ResponseFunction:
    """Coarse-grained sharp response of an intermediate preparation.

    Interpolates between sharp(mu2_bar) at t=0 and sharp(mu1) at t=1. In a
    refinement of the four-region model these are genuine deterministic
    responses of preparations lying between the second mirror and the first
    state; they keep the difference of the two click probabilities pinned
    at 1 - c while the outcome rate sweeps the middle region.
    """
    if not (0.0 <= t <= 1.0):
        raise OutOfRangeError(f"interpolation t={t} outside [0, 1]")
    w = (1.0 - t) * sharp(m, "mu2_bar").weights + t * sharp(m, "mu1").weights
    return ResponseFunction(w, f"tilted-sharp(t={t:.12g})")


def prob(m: OnticModel, state: str, xi: ResponseFunction) -> float:
    """Click probability of response xi on the epistemic state with that label."""
    return float(np.dot(m.weights(state), xi.weights))


def noisy_epistemic(m: OnticModel, label: str, p: float) -> np.ndarray:
    """Depolarized epistemic state (1-p) mu + p mu_mixed."""
    return (1.0 - p) * m.weights(label) + p * m.weights("mu_mixed")


def ensemble_weights(m: OnticModel, p: float) -> np.ndarray:
    """Epistemic state of the equal-prior noisy pair ensemble."""
    pair = (m.weights("mu1") + m.weights("mu2")) / 2.0
    return p * m.weights("mu_mixed") + (1.0 - p) * pair


def nc_confidence(m: OnticModel, p: float, xi: ResponseFunction) -> tuple:
    """Confidence for state 1 and outcome rate of a response on the noisy pair.

    Returns (confidence, eta1) where eta1 is the click rate on the ensemble
    distribution and the confidence is the posterior weight of state 1 among
    clicks, both computed by region arithmetic.
    """
    if not (0.0 <= p <= 1.0):
        raise OutOfRangeError(f"noise p={p} outside [0, 1]")
    eta1 = float(np.dot(ensemble_weights(m, p), xi.weights))
    if eta1 <= 1e-15:
        raise ZeroRateError("response never clicks on this ensemble")
    num = float(np.dot(noisy_epistemic(m, "mu1", p), xi.weights))
    return num / (2.0 * eta1), eta1


def _nc_branches(c: float, p: float, eta1: float) -> dict:
    shrink = 1.0 - (1.0 - p) * c
    low = 1.0 - p / (2.0 * shrink)
    mid = 0.5 + (1.0 - p) * (1.0 - c) / (4.0 * eta1)
    high = (1.0 - p * (1.0 - eta1) / shrink) / (2.0 * eta1)
    return {"LowRate": low, "Sharp": mid, "HighRate": high}


def nc_certified(c: float, p: float, eta1: float) -> BoundResult:
    """Noncontextual ceiling on detector-1 confidence at a given outcome rate.

    Piecewise in eta1 with boundaries (1 - (1-p)c)/2 and (1 + (1-p)c)/2:
    constant below (rate deficit costs nothing), a 1/eta1 falloff in the
    middle where sharp responses live, and a steeper falloff above where
    only padded (rank-two) responses reach the rate. Adjacent branch
    formulas agree at the boundaries; ties report the lower-rate branch.
    """
    if c == 0.0:
        raise ZeroConfusabilityError("certified noncontextual bound needs overlapping supports")
    if not (0.0 < c <= 1.0):
        raise OutOfRangeError(f"confusability c={c} outside (0, 1]")
    if not (0.0 <= p <= 1.0):
        raise OutOfRangeError(f"noise p={p} outside [0, 1]")
    if not (0.0 < eta1 <= 1.0):
        raise OutOfRangeError(f"rate eta1={eta1} outside (0, 1]")
    lo = (1.0 - (1.0 - p) * c) / 2.0
    hi = (1.0 + (1.0 - p) * c) / 2.0
    branches = _nc_branches(c, p, eta1)
    if eta1 <= lo:
        branch = "LowRate"
    elif eta1 <= hi:
        branch = "Sharp"
    else:
        branch = "HighRate"
    return BoundResult(branches[branch], "noncontextual", "mcm", branch=branch)


def nc_achievability_search(m: OnticModel, p: float, eta1: float) -> ResponseFunction:
    """Best in-model response matching a target rate.

    Scans the admissible families (weighted-sharp, sharp, rank-two
    completions, tilted sharp), solving each family's rate equation exactly
    for the member hitting eta1 instead of gridding, and returns the one
    with the highest confidence. Raises InfeasibleRateError if no family
    member attains the rate.
    """
    if not (0.0 < eta1 <= 1.0):
        raise OutOfRangeError(f"rate eta1={eta1} outside (0, 1]")
    if not (0.0 <= p <= 1.0):
        raise OutOfRangeError(f"noise p={p} outside [0, 1]")
    mu_p = ensemble_weights(m, p)
    candidates = []

    def rate_of(xi: ResponseFunction) -> float:
        return float(np.dot(mu_p, xi.weights))

    for label in EPISTEMIC_LABELS:
        s = sharp(m, label)
        r = rate_of(s)
        if abs(r - eta1) <= RATE_MATCH_TOL:
            candidates.append(s)
        if r > 0.0 and eta1 < r:
            candidates.append(weighted_sharp(m, eta1 / r, label))
    for label in MIRROR:
        base = rate_of(sharp(m, label))
        pad = rate_of(sharp(m, MIRROR[label]))
        if pad <= 0.0:
            continue
        a = (eta1 - base) / pad
        if -1e-12 <= a <= 1.0 + 1e-12:
            candidates.append(rank2(m, min(max(a, 0.0), 1.0), label))
    span = rate_of(sharp(m, "mu1")) - rate_of(sharp(m, "mu2_bar"))
    if span > 0.0:
        t = (eta1 - rate_of(sharp(m, "mu2_bar"))) / span
        if -1e-12 <= t <= 1.0 + 1e-12:
            candidates.append(tilted_sharp(m, min(max(t, 0.0), 1.0)))

    best = None
    best_conf = -1.0
    for xi in candidates:
        if abs(rate_of(xi) - eta1) > RATE_MATCH_TOL:
            continue
        conf, _ = nc_confidence(m, p, xi)
        if conf > best_conf:
            best, best_conf = xi, conf
    if best is None:
        raise InfeasibleRateError(f"no admissible response attains rate {eta1}")
    return best
