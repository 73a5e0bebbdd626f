"""Self-contained statistics engine.

Correlations with p-values, OLS with AIC and CR1 cluster-robust errors,
Theil-Sen, percentile bootstrap, two-way fixed effects via iterated
demeaning, clustered one-sample tests, and Cohen's d_z. Everything is
deterministic given the data (and the generator, where bootstrap is used).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from .errors import (
    DegenerateInputError,
    NoIdentificationError,
    ParameterError,
    SingularDesignError,
)

__all__ = [
    "CorrelationResult",
    "RegressionResult",
    "PanelObservation",
    "pearson",
    "spearman",
    "kendall",
    "ols",
    "theil_sen",
    "two_way_fe",
    "clustered_mean_test",
    "cohens_dz",
    "bootstrap_ci",
    "quantile_bin_partial",
    "format_p",
]

# Gaussian AIC uses RSS/n inside a log; exact fits are floored here so the
# value stays finite (only AIC differences are meaningful).
_RSS_FLOOR = 1e-300


def format_p(p: float) -> str:
    """Report tiny p-values as a threshold, not an astronomically small float."""
    return "< 1e-15" if p < 1e-15 else f"{p:.3g}"


@dataclass(frozen=True)
class CorrelationResult:
    estimate: float
    p_value: float
    n: int
    method: str

    def to_json(self) -> dict:
        return {
            "estimate": self.estimate,
            "p_value": self.p_value,
            "p_report": format_p(self.p_value),
            "n": self.n,
            "method": self.method,
        }


@dataclass(frozen=True)
class RegressionResult:
    coefficients: tuple
    se: tuple
    ci_low: tuple
    ci_high: tuple
    p_values: tuple
    r_squared: float
    aic: float
    n_obs: int
    n_clusters: int
    estimator: str
    se_type: str  # "plain" or "cluster"
    extra: dict = field(default_factory=dict)

    @property
    def t_stats(self) -> tuple:
        return tuple(
            c / s if s > 0 else (np.inf if c > 0 else -np.inf if c < 0 else 0.0)
            for c, s in zip(self.coefficients, self.se)
        )

    def to_json(self) -> dict:
        return {
            "estimator": self.estimator,
            "coefficients": list(self.coefficients),
            "se": list(self.se),
            "se_type": self.se_type,
            "ci_low": list(self.ci_low),
            "ci_high": list(self.ci_high),
            "p_values": list(self.p_values),
            "p_report": [format_p(p) for p in self.p_values],
            "t_stats": [float(t) for t in self.t_stats],
            "r_squared": self.r_squared,
            "aic": self.aic,
            "n_obs": self.n_obs,
            "n_clusters": self.n_clusters,
            **{k: v for k, v in self.extra.items()},
        }


@dataclass(frozen=True)
class PanelObservation:
    y: float
    x: float
    group_a: int
    group_b: int
    cluster: int


def _as_xy(x, y, min_n=3):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ParameterError("x and y must be 1-d arrays of equal length")
    if len(x) < min_n:
        raise ParameterError(f"need at least {min_n} observations, got {len(x)}")
    return x, y


def pearson(x, y) -> CorrelationResult:
    """Product-moment correlation; p-value via the t-transform."""
    x, y = _as_xy(x, y)
    n = len(x)
    xc = x - x.mean()
    yc = y - y.mean()
    sx = np.sqrt(np.sum(xc**2))
    sy = np.sqrt(np.sum(yc**2))
    if sx == 0 or sy == 0:
        raise DegenerateInputError("zero variance in pearson input")
    r = float(np.clip(np.sum(xc * yc) / (sx * sy), -1.0, 1.0))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * np.sqrt((n - 2) / (1.0 - r * r))
        p = float(2.0 * sps.t.sf(abs(t), n - 2))
    return CorrelationResult(estimate=r, p_value=p, n=n, method="pearson")


def spearman(x, y) -> CorrelationResult:
    """Rank correlation on mid-ranks; large-sample normal p-value."""
    x, y = _as_xy(x, y)
    n = len(x)
    rx = sps.rankdata(x)
    ry = sps.rankdata(y)
    if np.all(rx == rx[0]) or np.all(ry == ry[0]):
        raise DegenerateInputError("all-tied input in spearman")
    rho = pearson(rx, ry).estimate
    z = rho * np.sqrt(n - 1)
    p = float(2.0 * sps.norm.sf(abs(z)))
    return CorrelationResult(estimate=rho, p_value=p, n=n, method="spearman")


def kendall(x, y) -> CorrelationResult:
    """Kendall tau-b with tie correction; normal-approximation p-value."""
    x, y = _as_xy(x, y)
    n = len(x)
    dx = np.sign(np.subtract.outer(x, x))
    dy = np.sign(np.subtract.outer(y, y))
    iu = np.triu_indices(n, k=1)
    s = float(np.sum(dx[iu] * dy[iu]))

    def tie_counts(v):
        _, counts = np.unique(v, return_counts=True)
        return counts[counts > 1].astype(float)

    tx = tie_counts(x)
    ty = tie_counts(y)
    n0 = n * (n - 1) / 2.0
    n1 = np.sum(tx * (tx - 1) / 2.0)
    n2 = np.sum(ty * (ty - 1) / 2.0)
    denom = np.sqrt((n0 - n1) * (n0 - n2))
    if denom == 0:
        raise DegenerateInputError("all-tied input in kendall")
    tau = float(s / denom)
    # tie-corrected variance of S (Kendall 1970), normal approximation
    v0 = n * (n - 1) * (2 * n + 5)
    vt = np.sum(tx * (tx - 1) * (2 * tx + 5))
    vu = np.sum(ty * (ty - 1) * (2 * ty + 5))
    v1 = np.sum(tx * (tx - 1)) * np.sum(ty * (ty - 1)) / (2.0 * n * (n - 1))
    v2 = 0.0
    if n > 2:
        v2 = (
            np.sum(tx * (tx - 1) * (tx - 2))
            * np.sum(ty * (ty - 1) * (ty - 2))
            / (9.0 * n * (n - 1) * (n - 2))
        )
    var_s = (v0 - vt - vu) / 18.0 + v1 + v2
    if var_s <= 0:
        p = 0.0 if s != 0 else 1.0
    else:
        z = s / np.sqrt(var_s)
        p = float(2.0 * sps.norm.sf(abs(z)))
    return CorrelationResult(estimate=tau, p_value=p, n=n, method="kendall")


def _gaussian_aic(n: int, rss: float, param_count: int) -> float:
    return float(n * np.log(max(rss, _RSS_FLOOR) / n) + 2 * (param_count + 1))


def _cr1_cov(X: np.ndarray, resid: np.ndarray, cluster: np.ndarray, xtx_inv: np.ndarray):
    """Liang-Zeger sandwich with the CR1 small-sample factor."""
    n, k = X.shape
    ids = np.unique(cluster)
    g = len(ids)
    meat = np.zeros((k, k))
    xu = X * resid[:, None]
    for cid in ids:
        sg = xu[cluster == cid].sum(axis=0)
        meat += np.outer(sg, sg)
    factor = (g / (g - 1)) * ((n - 1) / (n - k))
    return factor * xtx_inv @ meat @ xtx_inv, g


def ols(y, design, cluster=None, estimator: str = "ols") -> RegressionResult:
    """Least squares with intercept.

    ``design`` is a sequence of feature vectors (the intercept is added
    here). Plain SEs by default; CR1 cluster-robust when cluster ids are
    given. CIs use t(n - params) quantiles.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    cols = [np.ones(n)] + [np.asarray(f, dtype=float) for f in design]
    X = np.column_stack(cols)
    k = X.shape[1]
    if n <= k:
        raise ParameterError(f"need more observations ({n}) than parameters ({k})")
    if np.linalg.matrix_rank(X) < k:
        raise SingularDesignError("design matrix is rank deficient")
    xtx = X.T @ X
    xtx_inv = np.linalg.inv(xtx)
    beta = xtx_inv @ (X.T @ y)
    resid = y - X @ beta
    rss = float(np.sum(resid**2))
    tss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if tss == 0 else 1.0 - rss / tss
    dof = n - k
    if cluster is None:
        sigma2 = rss / dof
        cov = sigma2 * xtx_inv
        g = n
        se_type = "plain"
    else:
        cluster = np.asarray(cluster)
        cov, g = _cr1_cov(X, resid, cluster, xtx_inv)
        se_type = "cluster"
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    tcrit = sps.t.ppf(0.975, dof)
    with np.errstate(divide="ignore", invalid="ignore"):
        degenerate = np.where(beta == 0, 0.0, np.inf * np.sign(beta))
        tvals = np.where(se > 0, beta / se, degenerate)
    pvals = 2.0 * sps.t.sf(np.abs(tvals), dof)
    return RegressionResult(
        coefficients=tuple(beta),
        se=tuple(se),
        ci_low=tuple(beta - tcrit * se),
        ci_high=tuple(beta + tcrit * se),
        p_values=tuple(float(p) for p in pvals),
        r_squared=float(np.clip(r2, 0.0, 1.0)),
        aic=_gaussian_aic(n, rss, k),
        n_obs=n,
        n_clusters=g if cluster is not None else 0,
        estimator=estimator,
        se_type=se_type,
    )


def _ts_slope(x: np.ndarray, y: np.ndarray) -> float:
    dx = np.subtract.outer(x, x)
    dy = np.subtract.outer(y, y)
    iu = np.triu_indices(len(x), k=1)
    dx = dx[iu]
    dy = dy[iu]
    keep = dx != 0
    if not np.any(keep):
        raise DegenerateInputError("all x values identical in theil_sen")
    return float(np.median(dy[keep] / dx[keep]))


def theil_sen(x, y, bootstrap_iters: int = 1000, rng: np.random.Generator | None = None) -> RegressionResult:
    """Median-of-pairwise-slopes line with a percentile-bootstrap CI.

    Slope is the median over all pairs with distinct x; intercept is
    median(y - slope * x). The CI resamples observations with replacement.
    """
    x, y = _as_xy(x, y, min_n=2)
    if rng is None:
        rng = np.random.default_rng(0)
    n = len(x)
    slope = _ts_slope(x, y)
    intercept = float(np.median(y - slope * x))
    boot_slopes = np.empty(bootstrap_iters)
    boot_icepts = np.empty(bootstrap_iters)
    for i in range(bootstrap_iters):
        idx = rng.integers(0, n, size=n)
        xb, yb = x[idx], y[idx]
        try:
            sb = _ts_slope(xb, yb)
        except DegenerateInputError:
            sb = slope
        boot_slopes[i] = sb
        boot_icepts[i] = np.median(yb - sb * xb)
    s_lo, s_hi = np.percentile(boot_slopes, [2.5, 97.5])
    i_lo, i_hi = np.percentile(boot_icepts, [2.5, 97.5])
    resid = y - intercept - slope * x
    rss = float(np.sum(resid**2))
    tss = float(np.sum((y - y.mean()) ** 2))
    return RegressionResult(
        coefficients=(intercept, slope),
        se=(float(np.std(boot_icepts, ddof=1)), float(np.std(boot_slopes, ddof=1))),
        ci_low=(float(i_lo), float(s_lo)),
        ci_high=(float(i_hi), float(s_hi)),
        p_values=(float("nan"), float("nan")),
        r_squared=float(np.clip(1.0 - rss / tss if tss > 0 else 1.0, 0.0, 1.0)),
        aic=_gaussian_aic(n, rss, 2),
        n_obs=n,
        n_clusters=0,
        estimator="theil_sen",
        se_type="plain",
        extra={"bootstrap_iters": bootstrap_iters},
    )


def _dense_ids(values) -> np.ndarray:
    _, inv = np.unique(np.asarray(values), return_inverse=True)
    return inv


def _demean_two_way(v: np.ndarray, ga: np.ndarray, gb: np.ndarray, tol=1e-10, max_sweeps=100):
    """Alternating within-group demeaning over both dimensions."""
    v = v.astype(float).copy()
    na = ga.max() + 1
    nb = gb.max() + 1
    ca = np.bincount(ga, minlength=na).astype(float)
    cb = np.bincount(gb, minlength=nb).astype(float)
    for _ in range(max_sweeps):
        before = v.copy()
        v -= (np.bincount(ga, weights=v, minlength=na) / ca)[ga]
        v -= (np.bincount(gb, weights=v, minlength=nb) / cb)[gb]
        if np.max(np.abs(v - before)) < tol:
            break
    return v


def two_way_fe(observations) -> RegressionResult:
    """Two-way fixed-effects slope by iterated demeaning.

    y and x are residualized over both group dimensions, then the slope comes
    from the univariate OLS on the residualized data. SE is CR1 clustered on
    the observation's cluster field; CI uses t(G-1) quantiles.
    """
    obs = list(observations)
    if not obs:
        raise ParameterError("empty panel")
    y = np.array([o.y for o in obs], dtype=float)
    x = np.array([o.x for o in obs], dtype=float)
    ga = _dense_ids([o.group_a for o in obs])
    gb = _dense_ids([o.group_b for o in obs])
    cl = _dense_ids([o.cluster for o in obs])
    n = len(obs)
    na, nb, g = ga.max() + 1, gb.max() + 1, cl.max() + 1
    if na < 2 or nb < 2:
        raise ParameterError("need at least 2 groups in each fixed-effect dimension")
    yt = _demean_two_way(y, ga, gb)
    xt = _demean_two_way(x, ga, gb)
    sxx = float(np.sum(xt**2))
    if sxx <= 1e-12 * max(1.0, float(np.sum(x**2))):
        raise NoIdentificationError("regressor has no within-group variation")
    beta = float(np.sum(xt * yt) / sxx)
    resid = yt - beta * xt
    rss = float(np.sum(resid**2))
    tss = float(np.sum(yt**2))
    k = 1 + (na - 1) + (nb - 1)
    # CR1 on the residualized univariate regression; the (n-1)/(n-k) part is
    # dropped when the absorbed effects outnumber observations (tiny panels)
    factor = g / (g - 1)
    if n > k:
        factor *= (n - 1) / (n - k)
    meat = 0.0
    xu = xt * resid
    sums = np.bincount(cl, weights=xu, minlength=g)
    meat = float(np.sum(sums**2))
    se = float(np.sqrt(factor * meat) / sxx)
    dfc = max(g - 1, 1)
    tcrit = sps.t.ppf(0.975, dfc)
    if se > 0:
        tval = beta / se
    else:
        tval = 0.0 if beta == 0 else np.inf * np.sign(beta)
    p = float(2.0 * sps.t.sf(abs(tval), dfc))
    return RegressionResult(
        coefficients=(beta,),
        se=(se,),
        ci_low=(beta - tcrit * se,),
        ci_high=(beta + tcrit * se,),
        p_values=(p,),
        r_squared=float(np.clip(1.0 - rss / tss if tss > 0 else 1.0, 0.0, 1.0)),
        aic=_gaussian_aic(n, rss, k),
        n_obs=n,
        n_clusters=int(g),
        estimator="two_way_fe",
        se_type="cluster",
        extra={"dof": int(n - 1 - (na - 1) - (nb - 1)), "groups_a": int(na), "groups_b": int(nb)},
    )


def clustered_mean_test(values, cluster) -> RegressionResult:
    """Intercept-only OLS (= grand mean) with CR1 SEs clustered by source."""
    values = np.asarray(values, dtype=float)
    cl = _dense_ids(cluster)
    n = len(values)
    if len(cl) != n:
        raise ParameterError("values and cluster must align")
    g = int(cl.max() + 1)
    if g < 2:
        raise ParameterError("need at least 2 clusters")
    mean = float(values.mean())
    resid = values - mean
    sums = np.bincount(cl, weights=resid, minlength=g)
    se = float(np.sqrt((g / (g - 1)) * np.sum(sums**2)) / n)
    tcrit = sps.t.ppf(0.975, g - 1)
    tval = mean / se if se > 0 else (np.inf if mean > 0 else -np.inf if mean < 0 else 0.0)
    p = float(2.0 * sps.t.sf(abs(tval), g - 1)) if np.isfinite(tval) else 0.0
    if se == 0 and mean == 0:
        p = 1.0
    rss = float(np.sum(resid**2))
    tss = rss
    return RegressionResult(
        coefficients=(mean,),
        se=(se,),
        ci_low=(mean - tcrit * se,),
        ci_high=(mean + tcrit * se,),
        p_values=(p,),
        r_squared=0.0,
        aic=_gaussian_aic(n, max(rss, _RSS_FLOOR), 1),
        n_obs=n,
        n_clusters=g,
        estimator="clustered_mean",
        se_type="cluster",
        extra={"t_stat": float(tval) if np.isfinite(tval) else None},
    )


def cohens_dz(differences) -> float:
    """Paired effect size: mean over sample SD (ddof 1) of the differences."""
    d = np.asarray(differences, dtype=float)
    if len(d) < 2:
        raise ParameterError("need at least 2 differences")
    sd = float(d.std(ddof=1))
    if sd == 0:
        raise DegenerateInputError("zero standard deviation in cohens_dz")
    return float(d.mean() / sd)


def bootstrap_ci(values, iters: int, rng: np.random.Generator):
    """Percentile 95% CI of the mean under resampling with replacement."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    if n < 2:
        raise ParameterError("need at least 2 values")
    if iters < 100:
        raise ParameterError("need at least 100 bootstrap iterations")
    picks = rng.integers(0, n, size=(iters, n))
    means = values[picks].mean(axis=1)
    lo, hi = np.percentile(means, [2.5, 97.5])
    return float(lo), float(hi)


def quantile_bin_partial(observations, bins: int):
    """Binned partial relationship after two-way residualization.

    Residualizes x and y exactly as two_way_fe, sorts by residual x, splits
    into equal-count bins (earlier bins absorb remainders) and returns
    per-bin (mean residual x, mean residual y) pairs.
    """
    obs = list(observations)
    n = len(obs)
    if bins < 1 or bins > n:
        raise ParameterError(f"bins must be in 1..{n}, got {bins}")
    y = np.array([o.y for o in obs], dtype=float)
    x = np.array([o.x for o in obs], dtype=float)
    ga = _dense_ids([o.group_a for o in obs])
    gb = _dense_ids([o.group_b for o in obs])
    yt = _demean_two_way(y, ga, gb)
    xt = _demean_two_way(x, ga, gb)
    order = np.lexsort((np.arange(n), xt))
    xs, ys = xt[order], yt[order]
    q, r = divmod(n, bins)
    out = []
    start = 0
    for b in range(bins):
        size = q + (1 if b < r else 0)
        sl = slice(start, start + size)
        out.append((float(xs[sl].mean()), float(ys[sl].mean())))
        start += size
    return out
