"""Finite mixtures of spherical normals fit by expectation-maximization.

The E-step computes posterior component responsibilities through log-space
densities; responsibilities can stay soft, be hardened to the row argmax,
or be resampled from the row distribution each sweep. The M-step reuses the
single-component estimators with responsibility weights, with either free
per-component concentrations (heterogeneous) or one shared value
(homogeneous).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp

from .distribution import SNParams, log_partition
from .distribution import sample as sn_sample
from .estimation import (
    MAX_DISPERSION,
    ConcentrationConfig,
    FrechetConfig,
    _concentration,
    _frechet,
    _normalized_weights,
)
from .geometry import SpherePoint, geodesic_distance, unitize
from .metrics import kmeans

__all__ = [
    "MixtureModel",
    "EMConfig",
    "EMReport",
    "e_step",
    "harden",
    "stochasticize",
    "m_step",
    "log_likelihood",
    "fit_em",
    "parameter_count",
    "information_criteria",
    "sample_mixture",
]

_EMPTY_COLUMN_FRACTION = 1e-8   # column mass below this * N counts as an empty cluster
_DISPERSION_FLOOR = 1e-10       # keeps collapsed clusters finite instead of raising mid-EM


@dataclass(frozen=True)
class MixtureModel:
    """K spherical normal components with mixing weights."""

    components: tuple
    weights: np.ndarray
    concentration_mode: str = "heterogeneous"

    def __post_init__(self) -> None:
        comps = tuple(self.components)
        if not comps or not all(isinstance(c, SNParams) for c in comps):
            raise ValueError("components must be a non-empty sequence of SNParams")
        dims = {c.p for c in comps}
        if len(dims) != 1:
            raise ValueError("all components must live on the same sphere")
        w = np.asarray(self.weights, dtype=float).copy()
        if w.shape != (len(comps),):
            raise ValueError("weights must match the number of components")
        if np.any(w < 0.0) or abs(float(w.sum()) - 1.0) > 1e-10:
            raise ValueError("weights must be non-negative and sum to 1")
        if self.concentration_mode not in ("heterogeneous", "homogeneous"):
            raise ValueError("concentration_mode must be 'heterogeneous' or 'homogeneous'")
        if self.concentration_mode == "homogeneous":
            lams = np.array([c.lam for c in comps])
            if float(np.ptp(lams)) > 1e-9 * max(1.0, float(lams.max())):
                raise ValueError("homogeneous mode requires equal concentrations")
        w.setflags(write=False)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "weights", w)

    @property
    def K(self) -> int:
        return len(self.components)

    @property
    def p(self) -> int:
        return self.components[0].p

    def locations(self) -> np.ndarray:
        """(K, p+1) array of component locations."""
        return np.stack([c.mu.coords for c in self.components])

    def concentrations(self) -> np.ndarray:
        return np.array([c.lam for c in self.components])

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "K": self.K,
            "mode": self.concentration_mode,
            "components": [
                {"mu": [float(v) for v in c.mu.coords], "lambda": float(c.lam)}
                for c in self.components
            ],
            "weights": [float(w) for w in self.weights],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MixtureModel":
        comps = tuple(
            SNParams(SpherePoint(entry["mu"]), float(entry["lambda"]))
            for entry in doc["components"]
        )
        model = cls(comps, np.asarray(doc["weights"], dtype=float), doc.get("mode", "heterogeneous"))
        if model.p != int(doc["p"]) or model.K != int(doc["K"]):
            raise ValueError("model document is inconsistent with its components")
        return model


@dataclass(frozen=True)
class EMConfig:
    """EM driver settings.

    ``assignment`` selects the soft responsibilities or the hard/stochastic
    one-hot heuristics applied after every E-step. Convergence is judged on
    the Frobenius change of the membership matrix (scaled by sqrt(N*K)), or
    on the log-likelihood change when ``stop_rule`` is "loglik".
    """

    K: int
    assignment: str = "soft"
    concentration_mode: str = "heterogeneous"
    epsilon_gamma: float = 1e-6
    max_iter: int = 200
    seed: int = 0
    stop_rule: str = "gamma"
    epsilon_loglik: float = 1e-8
    frechet: FrechetConfig = FrechetConfig()
    concentration: ConcentrationConfig = ConcentrationConfig()

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if self.assignment not in ("soft", "hard", "stochastic"):
            raise ValueError("assignment must be 'soft', 'hard' or 'stochastic'")
        if self.concentration_mode not in ("heterogeneous", "homogeneous"):
            raise ValueError("concentration_mode must be 'heterogeneous' or 'homogeneous'")
        if self.stop_rule not in ("gamma", "loglik"):
            raise ValueError("stop_rule must be 'gamma' or 'loglik'")
        if self.epsilon_gamma <= 0.0 or self.epsilon_loglik <= 0.0 or self.max_iter < 1:
            raise ValueError("tolerances and max_iter must be positive")


@dataclass(frozen=True)
class EMReport:
    """Outcome of one EM run; ``reseeds`` counts empty-cluster recoveries."""

    model: MixtureModel
    gamma: np.ndarray
    loglik_trace: tuple
    iterations: int
    converged: bool
    reseeds: int = 0


def _as_data(points) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValueError("data must form an (N, p+1) array with p >= 1")
    norms = np.linalg.norm(x, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-6):
        raise ValueError("data rows must be unit vectors")
    return x


def _log_joint(data: np.ndarray, model: MixtureModel) -> np.ndarray:
    """(N, K) matrix of log pi_k + log f_k(x_n)."""
    mus = model.locations()
    lams = model.concentrations()
    d2 = np.square(geodesic_distance(data[:, None, :], mus[None, :, :]))
    log_z = np.array([log_partition(model.p, lam) for lam in lams])
    with np.errstate(divide="ignore"):
        log_pi = np.log(model.weights)
    return log_pi[None, :] - 0.5 * lams[None, :] * d2 - log_z[None, :]


def e_step(data, model: MixtureModel) -> np.ndarray:
    """Posterior responsibilities gamma_nk, row-normalized in log space."""
    x = _as_data(data)
    log_post = _log_joint(x, model)
    log_post = log_post - logsumexp(log_post, axis=1, keepdims=True)
    gamma = np.exp(log_post)
    return gamma / gamma.sum(axis=1, keepdims=True)


def harden(gamma) -> np.ndarray:
    """One-hot rows at the row argmax; ties go to the smallest index."""
    g = np.asarray(gamma, dtype=float)
    out = np.zeros_like(g)
    out[np.arange(g.shape[0]), np.argmax(g, axis=1)] = 1.0
    return out


def stochasticize(gamma, rng) -> np.ndarray:
    """One-hot rows drawn from each row's categorical distribution."""
    g = np.asarray(gamma, dtype=float)
    rng = np.random.default_rng(rng)
    cum = np.cumsum(g, axis=1)
    cum /= cum[:, -1:]
    idx = np.sum(rng.random((g.shape[0], 1)) >= cum, axis=1)
    out = np.zeros_like(g)
    out[np.arange(g.shape[0]), np.clip(idx, 0, g.shape[1] - 1)] = 1.0
    return out


def log_likelihood(data, model: MixtureModel) -> float:
    """Observed-data log-likelihood sum_n log sum_k pi_k f_k(x_n)."""
    x = _as_data(data)
    return float(np.sum(logsumexp(_log_joint(x, model), axis=1)))


def m_step(
    data,
    gamma,
    concentration_mode: str = "heterogeneous",
    frechet_cfg: FrechetConfig | None = None,
    conc_cfg: ConcentrationConfig | None = None,
) -> MixtureModel:
    """One maximization sweep given responsibilities.

    Weights are the column means of gamma; each location is the
    gamma-weighted Frechet mean; concentrations come from per-component
    dispersions, or from the pooled dispersion in homogeneous mode. Every
    column must carry mass; empty clusters are the caller's problem (the EM
    driver reseeds them before calling in here).
    """
    x = _as_data(data)
    g = np.asarray(gamma, dtype=float)
    n, k = g.shape
    if n != x.shape[0]:
        raise ValueError("gamma rows must match the number of observations")
    col = g.sum(axis=0)
    if np.any(col <= _EMPTY_COLUMN_FRACTION * n):
        raise ValueError("empty cluster: responsibilities carry no mass for some component")
    frechet_cfg = frechet_cfg or FrechetConfig()
    conc_cfg = conc_cfg or ConcentrationConfig()

    weights = col / n
    mus = []
    dispersions = np.empty(k)
    for j in range(k):
        w_j = _normalized_weights(n, g[:, j])
        mu, _, _ = _frechet(x, w_j, frechet_cfg)
        mus.append(mu)
        d2 = np.square(geodesic_distance(x, mu))
        dispersions[j] = 0.5 * float(np.sum(w_j * d2))

    # collapsed clusters would otherwise raise as degenerate; cap instead
    dispersions = np.clip(dispersions, _DISPERSION_FLOOR, MAX_DISPERSION - 1e-9)
    if concentration_mode == "homogeneous":
        pooled = float(np.sum(dispersions * col) / n)
        pooled = min(max(pooled, _DISPERSION_FLOOR), MAX_DISPERSION - 1e-9)
        lam, _, _ = _concentration(pooled, x.shape[1] - 1, conc_cfg)
        lams = np.full(k, lam)
    else:
        lams = np.array(
            [_concentration(c, x.shape[1] - 1, conc_cfg)[0] for c in dispersions]
        )
    comps = tuple(SNParams(SpherePoint(m), float(lam)) for m, lam in zip(mus, lams))
    return MixtureModel(comps, weights, concentration_mode)


def _apply_assignment(gamma: np.ndarray, assignment: str, rng) -> np.ndarray:
    if assignment == "hard":
        return harden(gamma)
    if assignment == "stochastic":
        return stochasticize(gamma, rng)
    return gamma


def _init_from_kmeans(x: np.ndarray, cfg: EMConfig, seed) -> MixtureModel:
    """Initial parameters from Lloyd clustering on the ambient coordinates."""
    n = x.shape[0]
    labels = kmeans(x, cfg.K, seed=seed)
    loose_c = replace(cfg.concentration, epsilon=max(cfg.concentration.epsilon, 1e-6))
    mus, dispersions, counts = [], [], []
    for j in range(1, cfg.K + 1):
        members = x[labels == j]
        centroid = members.mean(axis=0)
        if np.linalg.norm(centroid) < 1e-8:
            centroid = members[0]
        mu = unitize(centroid)
        mus.append(mu)
        d2 = np.square(geodesic_distance(members, mu))
        dispersions.append(0.5 * float(d2.mean()))
        counts.append(len(members))
    counts = np.asarray(counts, dtype=float)
    dispersions = np.clip(dispersions, _DISPERSION_FLOOR, MAX_DISPERSION - 1e-9)
    if cfg.concentration_mode == "homogeneous":
        pooled = float(np.sum(dispersions * counts) / n)
        pooled = min(max(pooled, _DISPERSION_FLOOR), MAX_DISPERSION - 1e-9)
        lam = _concentration(pooled, x.shape[1] - 1, loose_c)[0]
        lams = np.full(cfg.K, lam)
    else:
        lams = np.array([_concentration(c, x.shape[1] - 1, loose_c)[0] for c in dispersions])
    comps = tuple(SNParams(SpherePoint(m), float(lam)) for m, lam in zip(mus, lams))
    return MixtureModel(comps, counts / n, cfg.concentration_mode)


def _reseed_empty(x, model, gamma, assignment, rng):
    """Replace components whose responsibility column lost all mass.

    Each dead component is moved onto the observation the current mixture
    explains worst, its concentration reset to the median of the live ones,
    and the membership matrix recomputed under the patched model.
    """
    n = x.shape[0]
    reseeds = 0
    for _ in range(model.K):
        col = gamma.sum(axis=0)
        dead = np.flatnonzero(col <= _EMPTY_COLUMN_FRACTION * n)
        if dead.size == 0:
            break
        j = int(dead[0])
        scores = logsumexp(_log_joint(x, model), axis=1)
        worst = int(np.argmin(scores))
        comps = list(model.components)
        live = [c.lam for i, c in enumerate(comps) if i != j]
        new_lam = float(np.median(live)) if model.concentration_mode == "heterogeneous" else comps[j].lam
        comps[j] = SNParams(SpherePoint(x[worst]), new_lam)
        w = model.weights.copy()
        w[j] = max(w[j], 1.0 / n)
        model = MixtureModel(tuple(comps), w / w.sum(), model.concentration_mode)
        gamma = _apply_assignment(e_step(x, model), assignment, rng)
        reseeds += 1
    return model, gamma, reseeds


def fit_em(data, cfg: EMConfig, init_model: MixtureModel | None = None) -> EMReport:
    """Fit a K-component spherical normal mixture by EM.

    Initialization comes from ambient k-means (10 restarts) unless an
    ``init_model`` is supplied. Each sweep runs E-step, the configured
    assignment heuristic, then M-step; the loop stops once the membership
    matrix stalls (or the log-likelihood, under ``stop_rule="loglik"``).
    Inner solves run at a slightly loosened tolerance during the sweeps and
    a final full-precision M-step polishes the returned model, so a K=1 run
    reproduces :func:`snmix.estimation.fit_sn` exactly.
    """
    x = _as_data(data)
    n = x.shape[0]
    if n < cfg.K:
        raise ValueError("need at least K observations")
    seed_init, seed_assign = np.random.SeedSequence(cfg.seed).spawn(2)
    rng = np.random.default_rng(seed_assign)
    model = init_model if init_model is not None else _init_from_kmeans(x, cfg, seed_init)
    if model.K != cfg.K or model.p != x.shape[1] - 1:
        raise ValueError("init_model shape does not match the configuration")

    loose_f = replace(cfg.frechet, epsilon=max(cfg.frechet.epsilon, 1e-6))
    loose_c = replace(cfg.concentration, epsilon=max(cfg.concentration.epsilon, 1e-6))
    trace = [log_likelihood(x, model)]
    threshold = cfg.epsilon_gamma * math.sqrt(n * cfg.K)
    gamma_prev = None
    gamma = None
    reseeds = 0
    iterations = 0
    converged = False
    for t in range(cfg.max_iter):
        gamma = _apply_assignment(e_step(x, model), cfg.assignment, rng)
        model, gamma, n_new = _reseed_empty(x, model, gamma, cfg.assignment, rng)
        reseeds += n_new
        if (
            cfg.stop_rule == "gamma"
            and gamma_prev is not None
            and float(np.linalg.norm(gamma - gamma_prev)) < threshold
        ):
            converged = True
            break
        iterations = t + 1
        model = m_step(x, gamma, cfg.concentration_mode, loose_f, loose_c)
        trace.append(log_likelihood(x, model))
        if cfg.stop_rule == "loglik" and abs(trace[-1] - trace[-2]) < cfg.epsilon_loglik:
            converged = True
            break
        gamma_prev = gamma

    model = m_step(x, gamma, cfg.concentration_mode, cfg.frechet, cfg.concentration)
    trace.append(log_likelihood(x, model))
    gamma = _apply_assignment(e_step(x, model), cfg.assignment, rng)
    return EMReport(
        model=model,
        gamma=gamma,
        loglik_trace=tuple(trace),
        iterations=iterations,
        converged=converged,
        reseeds=reseeds,
    )


def parameter_count(model: MixtureModel) -> int:
    """Free parameters of the mixture: (p+2)K - 1 heterogeneous, (p+1)K homogeneous."""
    if model.concentration_mode == "heterogeneous":
        return (model.p + 2) * model.K - 1
    return (model.p + 1) * model.K


def information_criteria(report: EMReport, n_obs: int) -> dict:
    """AIC/AICc/BIC/HQIC of a fitted mixture on ``n_obs`` observations.

    AICc is ``None`` when the sample is too small (n_obs <= k* + 1) for its
    correction term to be defined.
    """
    if n_obs < 1:
        raise ValueError("n_obs must be positive")
    k_star = parameter_count(report.model)
    loglik = float(report.loglik_trace[-1])
    aic = -2.0 * loglik + 2.0 * k_star
    aicc = aic + 2.0 * k_star * (k_star + 1) / (n_obs - k_star - 1) if n_obs > k_star + 1 else None
    bic = -2.0 * loglik + k_star * math.log(n_obs)
    hqic = -2.0 * loglik + 2.0 * k_star * math.log(math.log(n_obs))
    return {"aic": aic, "aicc": aicc, "bic": bic, "hqic": hqic}


def sample_mixture(model: MixtureModel, n: int, rng) -> tuple:
    """Draw ``n`` observations from the mixture.

    Returns (points, labels) where labels are the 1-based source components.
    """
    if n < 1:
        raise ValueError("need n >= 1 draws")
    rng = np.random.default_rng(rng)
    comps = rng.choice(model.K, size=int(n), p=model.weights)
    out = np.empty((int(n), model.p + 1))
    for k in range(model.K):
        mask = comps == k
        if np.any(mask):
            out[mask] = sn_sample(model.components[k], int(mask.sum()), rng)
    return out, comps + 1
