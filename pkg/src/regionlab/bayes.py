"""Laplace regression of income on education: four model variants, MCMC, WAIC.

Model for province ``i`` in region ``j``::

    Y_ij ~ Laplace(alpha_j + beta_j * (X_ij - mean_j(X)), sigma_j)

Priors (scale-adapted to the data):

* hierarchical intercepts ``alpha_j ~ N(mu_alpha, tau_alpha)``, with
  ``mu_alpha ~ N(mean(Y), 10 sd(Y))``
* hierarchical slopes ``beta_j ~ N(mu_beta, tau_beta)``, with
  ``mu_beta ~ N(0, 10 sd(Y) / sd(X))``; a shared or unpooled slope takes the
  ``mu_beta`` prior directly, and unpooled intercepts take the ``mu_alpha`` one
* ``tau_alpha, tau_beta, sigma_j ~ HalfCauchy(5 sd(Y))``

Sampling is adaptive random-walk Metropolis-within-Gibbs. Scale parameters
are sampled on the log scale. Components that are conditionally independent
given the rest (e.g. the ``alpha_j`` of different regions) are proposed and
accepted individually but in the same sweep. Chains are stacked in arrays;
each chain draws its randomness from its own generator seeded with
``[seed, chain]``, so a chain's path never depends on the others.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

__all__ = [
    "ModelVariant",
    "RegressionData",
    "FitConfig",
    "PosteriorDraws",
    "WaicResult",
    "laplace_logpdf",
    "fit",
    "credible_interval",
    "pointwise_loglik",
    "waic",
    "split_rhat",
    "ess",
    "RHAT_LIMIT",
]

RHAT_LIMIT = 1.05
TARGET_ACCEPT = 0.44
ADAPT_BATCH = 50
_LOG2 = math.log(2.0)


class ModelVariant(enum.Enum):
    HIER_DIFF_SLOPES = "diff-slopes"
    HIER_COMMON_SLOPE = "common-slope"
    INDEPENDENT = "independent"
    POOLED = "pooled"

    @classmethod
    def parse(cls, value) -> "ModelVariant":
        if isinstance(value, cls):
            return value
        for v in cls:
            if value in (v.value, v.name, v.name.lower()):
                return v
        raise ValueError(f"unknown model variant {value!r}")


def laplace_logpdf(y, location, scale):
    """``log(1 / (2 b)) - |y - mu| / b``."""
    scale = np.asarray(scale, dtype=float)
    if np.any(scale <= 0):
        raise ValueError("Laplace scale must be positive")
    out = -np.log(2.0 * scale) - np.abs(np.asarray(y, dtype=float) - location) / scale
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class RegressionData:
    """Province-level income ``y``, mean education ``x`` and region index."""

    y: np.ndarray
    x: np.ndarray
    region: np.ndarray
    region_names: tuple[str, ...] | None = None
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        region = np.asarray(self.region)
        if not (self.y.shape == self.x.shape == region.shape) or self.y.ndim != 1:
            raise ValueError("y, x and region must be vectors of equal length")
        uniq = np.unique(region)
        self.region = np.searchsorted(uniq, region)
        counts = np.bincount(self.region)
        if np.any(counts < 2):
            small = [str(uniq[j]) for j in np.flatnonzero(counts < 2)]
            raise ValueError(f"every region needs at least 2 provinces (too small: {', '.join(small)})")
        if self.region_names is None:
            self.region_names = tuple(str(u) for u in uniq)
        if not (np.all(np.isfinite(self.y)) and np.all(np.isfinite(self.x))):
            raise ValueError("non-finite income or education values")

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def n_regions(self) -> int:
        return int(self.region.max()) + 1

    @property
    def counts(self) -> np.ndarray:
        return np.bincount(self.region, minlength=self.n_regions)

    @property
    def region_xbar(self) -> np.ndarray:
        return np.bincount(self.region, weights=self.x, minlength=self.n_regions) / self.counts

    @property
    def x_centered(self) -> np.ndarray:
        return self.x - self.region_xbar[self.region]


@dataclass
class FitConfig:
    n_chains: int = 4
    n_warmup: int = 2000
    n_draws: int = 2000
    seed: int = 0

    def __post_init__(self):
        if min(self.n_chains, self.n_warmup, self.n_draws) < 1:
            raise ValueError("n_chains, n_warmup and n_draws must all be >= 1")


@dataclass
class PosteriorDraws:
    """Retained draws, ``samples[name]`` of shape (n_chains, n_draws)."""

    variant: ModelVariant
    samples: dict[str, np.ndarray]
    rhat: dict[str, float]
    ess: dict[str, float]
    acceptance: dict[str, float]
    config: FitConfig
    data: RegressionData = field(repr=False)

    @property
    def names(self) -> list[str]:
        return list(self.samples)

    @property
    def n_chains(self) -> int:
        return next(iter(self.samples.values())).shape[0]

    @property
    def n_draws(self) -> int:
        return next(iter(self.samples.values())).shape[1]

    @property
    def converged(self) -> bool:
        return all(r <= RHAT_LIMIT for r in self.rhat.values())

    @property
    def status(self) -> str:
        return "ok" if self.converged else "warning"

    def flat(self, name: str) -> np.ndarray:
        return self.samples[name].reshape(-1)

    def region_param(self, kind: str) -> np.ndarray:
        """(n_chains * n_draws, n_regions) draws of ``alpha``, ``beta`` or ``sigma``."""
        J = self.data.n_regions
        if f"{kind}[0]" in self.samples:
            return np.column_stack([self.flat(f"{kind}[{j}]") for j in range(J)])
        return np.repeat(self.flat(kind)[:, None], J, axis=1)

    def national(self) -> dict[str, np.ndarray]:
        """Draws of the national mean income and national rate per year of education."""
        s = self.samples
        mu_a = s["mu_alpha"] if "mu_alpha" in s else s.get("alpha")
        mu_b = s["mu_beta"] if "mu_beta" in s else s.get("beta")
        out = {}
        if mu_a is not None:
            out["mu_alpha"] = mu_a.reshape(-1)
        if mu_b is not None:
            out["mu_beta"] = mu_b.reshape(-1)
        return out

    def write_csv(self, path) -> None:
        names = self.names
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(["chain", "draw", *names]) + "\n")
            for c in range(self.n_chains):
                cols = [self.samples[nm][c] for nm in names]
                for d in range(self.n_draws):
                    fh.write(",".join([str(c), str(d), *(f"{col[d]:.12g}" for col in cols)]) + "\n")


# --------------------------------------------------------------------------
# diagnostics


def _autocov(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    xc = x - x.mean(axis=-1, keepdims=True)
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, n=size, axis=-1)
    ac = np.fft.irfft(f * np.conj(f), n=size, axis=-1)[..., :n]
    return ac / n


def split_rhat(chains) -> float:
    """Split-chain potential scale reduction factor for an (n_chains, n_draws) array."""
    x = np.asarray(chains, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    half = x.shape[1] // 2
    if half < 2:
        return float("nan")
    x = np.vstack([x[:, :half], x[:, -half:]])
    n = x.shape[1]
    means = x.mean(axis=1)
    w = x.var(axis=1, ddof=1).mean()
    b = n * means.var(ddof=1)
    if w == 0:
        return 1.0 if b == 0 else float("inf")
    var_plus = (n - 1) / n * w + b / n
    return float(math.sqrt(var_plus / w))


def ess(chains) -> float:
    """Multi-chain effective sample size with Geyer's initial monotone sequence."""
    x = np.asarray(chains, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    m, n = x.shape
    if n < 4:
        return float(m * n)
    acov = _autocov(x)
    chain_var = acov[:, 0] * n / (n - 1)
    w = chain_var.mean()
    if w == 0:
        return float(m * n)
    var_plus = w * (n - 1) / n
    if m > 1:
        var_plus += x.mean(axis=1).var(ddof=1)
    rho = 1.0 - (w - acov.mean(axis=0)) / var_plus
    rho[0] = 1.0
    # sum autocorrelation pairs while positive, enforcing monotonicity
    total = 0.0
    prev = math.inf
    t = 0
    while t + 1 < n:
        pair = rho[t] + rho[t + 1]
        if pair < 0:
            break
        pair = min(pair, prev)
        total += pair
        prev = pair
        t += 2
    tau = -1.0 + 2.0 * total
    return float(m * n / max(tau, 1.0 / math.log10(m * n + 10)))


# --------------------------------------------------------------------------
# sampler


@dataclass
class _Layout:
    hier_alpha: bool
    hier_beta: bool
    shared_beta: bool
    pooled: bool


_LAYOUTS = {
    ModelVariant.HIER_DIFF_SLOPES: _Layout(True, True, False, False),
    ModelVariant.HIER_COMMON_SLOPE: _Layout(True, False, True, False),
    ModelVariant.INDEPENDENT: _Layout(False, False, False, False),
    ModelVariant.POOLED: _Layout(False, False, True, True),
}


def _half_cauchy(log_scale_param, s):
    # log density of the scale plus the log-Jacobian of sampling on log scale
    return -np.log1p(np.exp(2.0 * log_scale_param) / (s * s)) + log_scale_param


def _normal(v, mu, sd):
    return -np.log(sd) - 0.5 * ((v - mu) / sd) ** 2


class _Sampler:
    def __init__(self, variant: ModelVariant, data: RegressionData, cfg: FitConfig):
        self.variant = variant
        self.lay = _LAYOUTS[variant]
        self.cfg = cfg
        self.y = data.y
        if self.lay.pooled:
            self.reg = np.zeros(data.n, dtype=int)
            self.xc = data.x - data.x.mean()
        else:
            self.reg = data.region
            self.xc = data.x_centered
        self.J = int(self.reg.max()) + 1
        self.nj = np.bincount(self.reg, minlength=self.J).astype(float)
        self.onehot = (self.reg[:, None] == np.arange(self.J)[None, :]).astype(float)
        sd_y = float(np.std(self.y, ddof=1)) or 1.0
        sd_x = float(np.std(data.x, ddof=1)) or 1.0
        self.sd_y, self.sd_x = sd_y, sd_x
        self.ybar = float(self.y.mean())
        self.mu_a_sd = 10.0 * sd_y
        self.mu_b_sd = 10.0 * sd_y / sd_x
        self.hc_scale = 5.0 * sd_y

        # component blocks: (name, width)
        J = self.J
        blocks = [("alpha", J), ("beta", 1 if self.lay.shared_beta else J), ("log_sigma", J)]
        if self.lay.hier_alpha:
            blocks += [("mu_alpha", 1), ("log_tau_alpha", 1)]
        if self.lay.hier_beta:
            blocks += [("mu_beta", 1), ("log_tau_beta", 1)]
        self.blocks = blocks
        self.offsets = {}
        off = 0
        for name, width in blocks:
            self.offsets[name] = (off, width)
            off += width
        self.n_comp = off

    # per-region likelihood pieces, arrays of shape (C, J)
    def _abs_sums(self, alpha, beta):
        b = beta if beta.shape[1] == self.J else np.broadcast_to(beta, alpha.shape)
        loc = alpha[:, self.reg] + b[:, self.reg] * self.xc
        return np.abs(self.y - loc) @ self.onehot

    def _ll(self, abs_sums, log_sigma):
        return -self.nj * (_LOG2 + log_sigma) - abs_sums * np.exp(-log_sigma)

    def _init(self, rng_list):
        C, J = len(rng_list), self.J
        med = np.array([np.median(self.y[self.reg == j]) for j in range(J)])
        mad = np.array([np.mean(np.abs(self.y[self.reg == j] - med[j])) for j in range(J)])
        mad = np.where(mad > 0, mad, 0.1 * self.sd_y)
        st = {}
        jit = np.array([r.standard_normal(3 * J + 4) for r in rng_list])
        st["alpha"] = med + 0.2 * mad * jit[:, :J]
        st["beta"] = (0.1 * self.sd_y / self.sd_x) * jit[:, J:J + (1 if self.lay.shared_beta else J)]
        st["log_sigma"] = np.log(mad) + 0.2 * jit[:, 2 * J:3 * J]
        spread = float(np.std(med)) if J > 1 else self.sd_y
        spread = max(spread, 0.1 * self.sd_y)
        if self.lay.hier_alpha:
            st["mu_alpha"] = med.mean() + 0.2 * spread * jit[:, 3 * J:3 * J + 1]
            st["log_tau_alpha"] = math.log(spread) + 0.2 * jit[:, 3 * J + 1:3 * J + 2]
        if self.lay.hier_beta:
            st["mu_beta"] = (0.1 * self.sd_y / self.sd_x) * jit[:, 3 * J + 2:3 * J + 3]
            st["log_tau_beta"] = math.log(0.5 * self.sd_y / self.sd_x) + 0.2 * jit[:, 3 * J + 3:3 * J + 4]
        step = {
            "alpha": np.broadcast_to(mad / np.sqrt(self.nj), (C, J)).copy(),
            "beta": np.full((C, st["beta"].shape[1]), self.sd_y / self.sd_x / math.sqrt(max(self.nj.min(), 1.0))),
            "log_sigma": np.broadcast_to(1.0 / np.sqrt(self.nj), (C, J)).copy(),
            "mu_alpha": np.full((C, 1), spread / math.sqrt(J)),
            "log_tau_alpha": np.full((C, 1), 0.5),
            "mu_beta": np.full((C, 1), 0.5 * self.sd_y / self.sd_x / math.sqrt(J)),
            "log_tau_beta": np.full((C, 1), 0.5),
        }
        step = {k: np.log(v) for k, v in step.items() if k in st}
        return st, step

    def _prior_alpha(self, st, alpha):
        if self.lay.hier_alpha:
            return _normal(alpha, st["mu_alpha"], np.exp(st["log_tau_alpha"]))
        return _normal(alpha, self.ybar, self.mu_a_sd)

    def _prior_beta(self, st, beta):
        if self.lay.hier_beta:
            return _normal(beta, st["mu_beta"], np.exp(st["log_tau_beta"]))
        return _normal(beta, 0.0, self.mu_b_sd)

    def run(self):
        cfg = self.cfg
        C, T = cfg.n_chains, cfg.n_warmup + cfg.n_draws
        rngs = [np.random.default_rng([cfg.seed, c]) for c in range(C)]
        st, log_step = self._init(rngs)
        noise = np.stack([r.standard_normal((T, self.n_comp)) for r in rngs])
        logu = np.log(np.stack([r.random((T, self.n_comp)) for r in rngs]))

        abs_sums = self._abs_sums(st["alpha"], st["beta"])
        ll = self._ll(abs_sums, st["log_sigma"])
        accepts = {k: np.zeros_like(v) for k, v in log_step.items()}
        kept = {k: np.empty((C, cfg.n_draws, v.shape[1])) for k, v in st.items()}
        total_acc = {k: np.zeros_like(v) for k, v in log_step.items()}

        def draw(name, t):
            off, width = self.offsets[name]
            return noise[:, t, off:off + width], logu[:, t, off:off + width]

        for t in range(T):
            # intercepts
            z, lu = draw("alpha", t)
            prop = st["alpha"] + np.exp(log_step["alpha"]) * z
            abs_p = self._abs_sums(prop, st["beta"])
            ll_p = self._ll(abs_p, st["log_sigma"])
            delta = ll_p - ll + self._prior_alpha(st, prop) - self._prior_alpha(st, st["alpha"])
            ok = lu < delta
            st["alpha"] = np.where(ok, prop, st["alpha"])
            abs_sums = np.where(ok, abs_p, abs_sums)
            ll = np.where(ok, ll_p, ll)
            accepts["alpha"] += ok

            # slopes
            z, lu = draw("beta", t)
            prop = st["beta"] + np.exp(log_step["beta"]) * z
            abs_p = self._abs_sums(st["alpha"], prop)
            ll_p = self._ll(abs_p, st["log_sigma"])
            if self.lay.shared_beta:
                delta = (ll_p - ll).sum(axis=1, keepdims=True)
                delta += self._prior_beta(st, prop) - self._prior_beta(st, st["beta"])
                ok = lu < delta
                st["beta"] = np.where(ok, prop, st["beta"])
                abs_sums = np.where(ok, abs_p, abs_sums)
                ll = np.where(ok, ll_p, ll)
            else:
                delta = ll_p - ll + self._prior_beta(st, prop) - self._prior_beta(st, st["beta"])
                ok = lu < delta
                st["beta"] = np.where(ok, prop, st["beta"])
                abs_sums = np.where(ok, abs_p, abs_sums)
                ll = np.where(ok, ll_p, ll)
            accepts["beta"] += ok

            # observation scales
            z, lu = draw("log_sigma", t)
            prop = st["log_sigma"] + np.exp(log_step["log_sigma"]) * z
            ll_p = self._ll(abs_sums, prop)
            delta = ll_p - ll + _half_cauchy(prop, self.hc_scale) - _half_cauchy(st["log_sigma"], self.hc_scale)
            ok = lu < delta
            st["log_sigma"] = np.where(ok, prop, st["log_sigma"])
            ll = np.where(ok, ll_p, ll)
            accepts["log_sigma"] += ok

            if self.lay.hier_alpha:
                self._hyper(st, log_step, accepts, t, draw, "alpha", self.ybar, self.mu_a_sd)
            if self.lay.hier_beta:
                self._hyper(st, log_step, accepts, t, draw, "beta", 0.0, self.mu_b_sd)

            if t < cfg.n_warmup:
                if (t + 1) % ADAPT_BATCH == 0:
                    batch = (t + 1) // ADAPT_BATCH
                    gain = max(0.05, 1.0 / math.sqrt(batch))
                    for k in log_step:
                        rate = accepts[k] / ADAPT_BATCH
                        log_step[k] += 2.0 * gain * (rate - TARGET_ACCEPT)
                        accepts[k][:] = 0
            else:
                d = t - cfg.n_warmup
                for k, v in st.items():
                    kept[k][:, d, :] = v
                for k in accepts:
                    total_acc[k] += accepts[k]
                    accepts[k][:] = 0
            if t == cfg.n_warmup - 1:
                for k in accepts:
                    accepts[k][:] = 0

        rates = {k: float(v.mean() / cfg.n_draws) for k, v in total_acc.items()}
        return self._named(kept), rates

    def _hyper(self, st, log_step, accepts, t, draw, which, prior_mu, prior_sd):
        vals = st[which]
        mu_k, tau_k = f"mu_{which}", f"log_tau_{which}"
        z, lu = draw(mu_k, t)
        prop = st[mu_k] + np.exp(log_step[mu_k]) * z
        tau = np.exp(st[tau_k])
        delta = (_normal(vals, prop, tau) - _normal(vals, st[mu_k], tau)).sum(axis=1, keepdims=True)
        delta += _normal(prop, prior_mu, prior_sd) - _normal(st[mu_k], prior_mu, prior_sd)
        ok = lu < delta
        st[mu_k] = np.where(ok, prop, st[mu_k])
        accepts[mu_k] += ok

        z, lu = draw(tau_k, t)
        prop = st[tau_k] + np.exp(log_step[tau_k]) * z
        delta = (_normal(vals, st[mu_k], np.exp(prop)) - _normal(vals, st[mu_k], np.exp(st[tau_k]))).sum(
            axis=1, keepdims=True
        )
        delta += _half_cauchy(prop, self.hc_scale) - _half_cauchy(st[tau_k], self.hc_scale)
        ok = lu < delta
        st[tau_k] = np.where(ok, prop, st[tau_k])
        accepts[tau_k] += ok

    def _named(self, kept):
        out = {}
        for k, arr in kept.items():
            natural = k.startswith("log_")
            name = k[4:] if natural else k
            vals = np.exp(arr) if natural else arr
            if arr.shape[2] == 1 and (k not in ("alpha", "log_sigma") or self.lay.pooled):
                out[name] = vals[:, :, 0].copy()
            else:
                for j in range(arr.shape[2]):
                    out[f"{name}[{j}]"] = vals[:, :, j].copy()
        return out


def fit(variant, data: RegressionData, config: FitConfig | None = None, **kwargs) -> PosteriorDraws:
    """Sample the posterior of one model variant.

    Keyword arguments override fields of ``config``. Non-convergence
    (split R-hat above 1.05 anywhere) only downgrades ``status`` to
    ``"warning"``; the draws are still returned.
    """
    variant = ModelVariant.parse(variant)
    cfg = config or FitConfig()
    if kwargs:
        cfg = FitConfig(**{**cfg.__dict__, **kwargs})
    samples, rates = _Sampler(variant, data, cfg).run()
    rhat = {k: split_rhat(v) for k, v in samples.items()}
    n_eff = {k: ess(v) for k, v in samples.items()}
    draws = PosteriorDraws(variant, samples, rhat, n_eff, rates, cfg, data)
    if not draws.converged:
        worst = max(rhat, key=lambda k: rhat[k])
        warnings.warn(
            f"{variant.value}: R-hat {rhat[worst]:.3f} for {worst} exceeds {RHAT_LIMIT}",
            RuntimeWarning,
            stacklevel=2,
        )
    return draws


def credible_interval(draws, level: float = 0.95) -> dict[str, tuple[float, float, float]]:
    """Equal-tailed interval and mean, ``{name: (low, mean, high)}``.

    Accepts :class:`PosteriorDraws` or a dict of arrays; a bare array
    returns a single ``(low, mean, high)`` tuple.
    Quantiles interpolate linearly between order statistics.
    """
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    single = not isinstance(draws, (PosteriorDraws, dict))
    if isinstance(draws, PosteriorDraws):
        items = {k: v.reshape(-1) for k, v in draws.samples.items()}
    elif isinstance(draws, dict):
        items = {k: np.asarray(v, dtype=float).reshape(-1) for k, v in draws.items()}
    else:
        items = {"x": np.asarray(draws, dtype=float).reshape(-1)}
    tail = (1.0 - level) / 2.0
    out = {}
    for k, v in items.items():
        if len(v) < 100:
            raise ValueError(f"{k}: need at least 100 draws for an interval, got {len(v)}")
        lo, hi = np.quantile(v, [tail, 1.0 - tail], method="linear")
        out[k] = (float(lo), float(v.mean()), float(hi))
    return out["x"] if single else out


def pointwise_loglik(draws: PosteriorDraws, data: RegressionData | None = None) -> np.ndarray:
    """Log-likelihood of every observation under every draw, shape (n_draws_total, n)."""
    data = data or draws.data
    if draws.variant is ModelVariant.POOLED:
        xc = data.x - draws.data.x.mean()
        loc = draws.flat("alpha")[:, None] + draws.flat("beta")[:, None] * xc
        scale = draws.flat("sigma")[:, None]
    else:
        reg = data.region
        xc = data.x - draws.data.region_xbar[reg]
        a = draws.region_param("alpha")
        b = draws.region_param("beta")
        s = draws.region_param("sigma")
        loc = a[:, reg] + b[:, reg] * xc
        scale = s[:, reg]
    return -np.log(2.0 * scale) - np.abs(data.y - loc) / scale


@dataclass
class WaicResult:
    waic: float
    lppd: float
    p_waic: float
    pointwise_lppd: np.ndarray
    pointwise_p_waic: np.ndarray

    @property
    def pointwise(self) -> np.ndarray:
        return -2.0 * (self.pointwise_lppd - self.pointwise_p_waic)

    @property
    def se(self) -> float:
        pw = self.pointwise
        return float(math.sqrt(len(pw) * pw.var(ddof=1))) if len(pw) > 1 else 0.0

    def to_dict(self) -> dict:
        return {"waic": self.waic, "lppd": self.lppd, "p_waic": self.p_waic, "se": self.se}


def waic(draws, data: RegressionData | None = None) -> WaicResult:
    """WAIC on the deviance scale, ``-2 (lppd - p_waic)``.

    ``draws`` is a :class:`PosteriorDraws` or a precomputed (S, n)
    log-likelihood matrix. ``p_waic`` uses the sample variance (ddof=1) of the
    log-likelihood over draws, and is 0 for a single draw.
    """
    if isinstance(draws, PosteriorDraws):
        ll = pointwise_loglik(draws, data)
    else:
        ll = np.asarray(draws, dtype=float)
        if ll.ndim == 1:
            ll = ll[None, :]
    s = ll.shape[0]
    if s == 0 or ll.size == 0:
        raise ValueError("no draws")
    lppd_i = logsumexp(ll, axis=0) - math.log(s)
    p_i = ll.var(axis=0, ddof=1) if s > 1 else np.zeros(ll.shape[1])
    lppd, p = float(lppd_i.sum()), float(p_i.sum())
    return WaicResult(waic=-2.0 * (lppd - p), lppd=lppd, p_waic=p, pointwise_lppd=lppd_i, pointwise_p_waic=p_i)
