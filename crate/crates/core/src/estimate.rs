//! Model-agnostic estimators: Monte Carlo simulation of the chain and
//! quadrature propagation of the killed density `f_n`.
//!
//! Monte Carlo work is cut into fixed blocks of paths. Block `b` draws from
//! its own ChaCha stream `(seed, b)` and reports integer tallies, so the merged
//! result does not depend on how many workers ran the blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::innovations::Innovation;
use crate::quad::integrate_split;
use crate::table::{PersistTable, Provenance};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PERSIST_LAB_THREADS";

/// Worker count: the explicit value, else `PERSIST_LAB_THREADS`, else all cores.
pub fn worker_count(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(THREADS_ENV).ok()?.trim().parse().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McConfig {
    pub paths: u64,
    /// Largest `n` reported.
    pub horizon: usize,
    pub seed: u64,
    /// Paths per RNG stream. Part of the reproducibility key together with `seed`.
    pub block_size: u64,
    /// Start state `Z_0`.
    pub x0: f64,
    /// Worker cap; `None` defers to [`worker_count`]. Never changes results.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            paths: 100_000,
            horizon: 20,
            seed: 0,
            block_size: 10_000,
            x0: 0.0,
            threads: None,
        }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::param("paths", self.paths, "need at least one path"));
        }
        if self.horizon == 0 {
            return Err(Error::param("horizon", self.horizon, "horizon must be at least 1"));
        }
        if self.block_size == 0 {
            return Err(Error::param("block_size", self.block_size, "block size must be positive"));
        }
        if !(self.x0 >= 0.0) || !self.x0.is_finite() {
            return Err(Error::param("x0", self.x0, "start state must be finite and non-negative"));
        }
        Ok(())
    }
}

/// `hist[k]` = number of paths whose first `k` steps stayed non-negative and
/// whose step `k+1` went negative; `hist[steps]` collects the survivors.
fn simulate(inn: &Innovation, theta: f64, cfg: &McConfig, steps: usize) -> Result<Vec<u64>> {
    cfg.validate()?;
    let blocks = cfg.paths.div_ceil(cfg.block_size);
    let run_block = |b: u64| -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(b);
        let count = cfg.block_size.min(cfg.paths - b * cfg.block_size);
        let mut hist = vec![0u64; steps + 1];
        for _ in 0..count {
            let mut z = cfg.x0;
            let mut k = 0;
            while k < steps {
                z = theta * z + inn.sample(&mut rng);
                if z < 0.0 {
                    break;
                }
                k += 1;
            }
            hist[k] += 1;
        }
        hist
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(cfg.threads))
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    let per_block: Vec<Vec<u64>> = pool.install(|| (0..blocks).into_par_iter().map(run_block).collect());
    let mut hist = vec![0u64; steps + 1];
    for h in per_block {
        for (acc, v) in hist.iter_mut().zip(h) {
            *acc += v;
        }
    }
    Ok(hist)
}

/// Number of paths that survived at least `n` steps, for `n = 0..=steps`.
fn survivors(hist: &[u64]) -> Vec<u64> {
    let mut s = vec![0u64; hist.len()];
    let mut acc = 0;
    for k in (0..hist.len()).rev() {
        acc += hist[k];
        s[k] = acc;
    }
    s
}

/// `p̂_n` for `n = 0..=horizon` with binomial standard errors.
pub fn mc_persistence(inn: &Innovation, theta: f64, cfg: &McConfig) -> Result<PersistTable<f64>> {
    let hist = simulate(inn, theta, cfg, cfg.horizon + 1)?;
    let total = cfg.paths as f64;
    let p: Vec<f64> = survivors(&hist).iter().map(|s| *s as f64 / total).collect();
    let mut table = PersistTable::from_p(theta, &p, Provenance::Mc, 0.0);
    for row in &mut table.rows {
        row.stderr = Some((row.p * (1.0 - row.p) / total).sqrt());
    }
    Ok(table)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PassageEstimate {
    /// Mean of `min(T, horizon)`.
    pub mean_t: f64,
    pub mean_stderr: f64,
    /// True when some path survived the horizon, so `mean_t` is a lower bound.
    pub censored: bool,
    /// Fraction of paths with `Z_1, …, Z_horizon ≥ 0`; estimates the defect when `θ > 1`.
    pub survival_fraction: f64,
    pub survival_stderr: f64,
    pub horizon: usize,
}

/// Mean passage time and horizon survival. For `θ > 1` the survival fraction
/// decreases in the horizon towards `P[T = ∞]`, so it over-estimates the defect.
pub fn mc_passage_time(inn: &Innovation, theta: f64, cfg: &McConfig) -> Result<PassageEstimate> {
    let hist = simulate(inn, theta, cfg, cfg.horizon)?;
    let n = cfg.paths as f64;
    let (mut sum, mut sum_sq) = (0u128, 0u128);
    for (k, c) in hist.iter().enumerate() {
        sum += k as u128 * u128::from(*c);
        sum_sq += (k * k) as u128 * u128::from(*c);
    }
    let mean = sum as f64 / n;
    let var = (sum_sq as f64 / n - mean * mean).max(0.0);
    let surv = hist[cfg.horizon] as f64 / n;
    Ok(PassageEstimate {
        mean_t: mean,
        mean_stderr: (var / n).sqrt(),
        censored: hist[cfg.horizon] > 0,
        survival_fraction: surv,
        survival_stderr: (surv * (1.0 - surv) / n).sqrt(),
        horizon: cfg.horizon,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Trapezoid,
    Simpson,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadConfig {
    /// Number of grid intervals `M` (even, at least 64).
    pub grid_points: usize,
    /// `Z_max`; `None` picks [`default_domain`].
    pub domain_max: Option<f64>,
    pub rule: Rule,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            grid_points: 2048,
            domain_max: None,
            rule: Rule::Simpson,
        }
    }
}

/// `Z_max` such that the innovation puts mass below 1e-12 beyond `Z_max/(1+|θ|)`.
pub fn default_domain(inn: &Innovation, theta: f64) -> f64 {
    (1.0 + theta.abs()) * inn.upper_quantile_bound(1e-12).max(1.0)
}

/// Values of `f_n` on the uniform grid `0, h, …, M h`.
struct GridFn {
    h: f64,
    node: Vec<f64>,
    /// Cubic interpolant at cell midpoints.
    mid: Vec<f64>,
}

impl GridFn {
    fn new(h: f64, node: Vec<f64>) -> Self {
        let mut g = GridFn { h, node, mid: Vec::new() };
        g.mid = (0..g.node.len() - 1).map(|k| g.interp((k as f64 + 0.5) * h)).collect();
        g
    }

    /// Four-point Lagrange interpolation.
    fn interp(&self, y: f64) -> f64 {
        let m = self.node.len() - 1;
        let t = y / self.h;
        let k = (t.floor() as usize).min(m - 1);
        let s = k.saturating_sub(1).min(m - 3);
        let u = t - s as f64;
        let (u0, u1, u2, u3) = (u, u - 1.0, u - 2.0, u - 3.0);
        let w = [
            -u1 * u2 * u3 / 6.0,
            u0 * u2 * u3 / 2.0,
            -u0 * u1 * u3 / 2.0,
            u0 * u1 * u2 / 6.0,
        ];
        (0..4).map(|i| w[i] * self.node[s + i]).sum()
    }

    fn integral(&self, rule: Rule) -> f64 {
        let h = self.h;
        match rule {
            Rule::Trapezoid => {
                h * (self.node.iter().sum::<f64>() - 0.5 * (self.node[0] + self.node[self.node.len() - 1]))
            }
            Rule::Simpson => {
                let m = self.node.len() - 1;
                let mut s = self.node[0] + self.node[m];
                for k in 1..m {
                    s += if k % 2 == 1 { 4.0 } else { 2.0 } * self.node[k];
                }
                s * h / 3.0
            }
        }
    }
}

/// Integrates `y ↦ f(z − θy) g(y)` over the grid of `g`, splitting cells at the
/// density kinks `y* = (z − κ)/θ` and evaluating `f` inside each piece.
struct Propagator<'a> {
    inn: &'a Innovation,
    theta: f64,
    rule: Rule,
    kinks: Vec<f64>,
    /// `f` is negligible outside `[lo, hi]`.
    support: (f64, f64),
}

impl Propagator<'_> {
    fn piece(&self, z: f64, g: &GridFn, a: f64, b: f64, ga: f64, gb: f64, gm: Option<f64>) -> f64 {
        let f = |y: f64| self.inn.density(z - self.theta * y);
        // nudge inside so jump discontinuities use the correct one-sided value
        let d = 1e-9 * (b - a);
        match self.rule {
            Rule::Trapezoid => 0.5 * (b - a) * (f(a + d) * ga + f(b - d) * gb),
            Rule::Simpson => {
                let m = 0.5 * (a + b);
                let gm = gm.unwrap_or_else(|| g.interp(m));
                (b - a) / 6.0 * (f(a + d) * ga + 4.0 * f(m) * gm + f(b - d) * gb)
            }
        }
    }

    fn eval(&self, z: f64, g: &GridFn) -> f64 {
        let m = g.node.len() - 1;
        let h = g.h;
        let top = m as f64 * h;
        let (lo, hi) = self.support;
        let (y0, y1) = if self.theta > 0.0 {
            ((z - hi) / self.theta, (z - lo) / self.theta)
        } else {
            ((z - lo) / self.theta, (z - hi) / self.theta)
        };
        let y0 = y0.max(0.0);
        let y1 = y1.min(top);
        if y1 <= y0 {
            return 0.0;
        }
        let k0 = ((y0 / h).floor() as usize).min(m - 1);
        let k1 = ((y1 / h).ceil() as usize).clamp(k0 + 1, m);
        let mut cuts: Vec<f64> = self
            .kinks
            .iter()
            .map(|k| (z - k) / self.theta)
            .filter(|y| *y > k0 as f64 * h && *y < k1 as f64 * h)
            .collect();
        cuts.sort_by(f64::total_cmp);
        let mut total = 0.0;
        let mut c = 0;
        for k in k0..k1 {
            let a = k as f64 * h;
            let b = a + h;
            let start = c;
            while c < cuts.len() && cuts[c] < b {
                c += 1;
            }
            let inside: Vec<f64> = cuts[start..c]
                .iter()
                .copied()
                .filter(|y| *y - a > 1e-12 * h && b - *y > 1e-12 * h)
                .collect();
            if inside.is_empty() {
                total += self.piece(z, g, a, b, g.node[k], g.node[k + 1], Some(g.mid[k]));
            } else {
                let mut left = a;
                let mut g_left = g.node[k];
                for y in inside.into_iter().chain(std::iter::once(b)) {
                    let g_right = if y == b { g.node[k + 1] } else { g.interp(y) };
                    total += self.piece(z, g, left, y, g_left, g_right, None);
                    left = y;
                    g_left = g_right;
                }
            }
        }
        total
    }
}

fn negligible_support(inn: &Innovation) -> (f64, f64) {
    let hi = inn.upper_quantile_bound(1e-17);
    // lower tail via bisection on the cdf
    let mut lo = -1.0;
    while inn.cdf(lo) > 1e-17 && lo > -1e12 {
        lo *= 2.0;
    }
    (lo, hi.max(0.0))
}

fn check_quad(inn: &Innovation, theta: f64, cfg: &QuadConfig) -> Result<f64> {
    if theta == 0.0 || !theta.is_finite() {
        return Err(Error::param("theta", theta, "quadrature needs a finite non-zero theta"));
    }
    if cfg.grid_points < 64 || cfg.grid_points % 2 == 1 {
        return Err(Error::param("grid", cfg.grid_points, "grid must be even and at least 64"));
    }
    if !inn.flags().atomless {
        return Err(Error::param("family", inn.name(), "quadrature needs an atomless law with a density"));
    }
    let d = cfg.domain_max.unwrap_or_else(|| default_domain(inn, theta));
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::param("zmax", d, "domain must be positive"));
    }
    Ok(d)
}

/// `p_n = ∫_0^∞ f_n` for `n = 0..=N`, with `f_1 = f` on `[0, ∞)` and
/// `f_n(z) = ∫_0^∞ f(z − θy) f_{n−1}(y) dy`.
///
/// For `θ > 1` the grid domain is multiplied by `θ` at every step.
pub fn quad_persistence(inn: &Innovation, theta: f64, n: usize, cfg: &QuadConfig) -> Result<PersistTable<f64>> {
    let p = quad_p(inn, theta, n + 1, cfg)?;
    Ok(PersistTable::from_p(theta, &p, Provenance::Quadrature, 0.0))
}

fn quad_p(inn: &Innovation, theta: f64, steps: usize, cfg: &QuadConfig) -> Result<Vec<f64>> {
    let mut domain = check_quad(inn, theta, cfg)?;
    let m = cfg.grid_points;
    let prop = Propagator {
        inn,
        theta,
        rule: cfg.rule,
        kinks: inn.kinks(),
        support: negligible_support(inn),
    };
    let density = |x: f64| {
        let v = inn.density(x);
        if v.is_finite() && v >= 0.0 {
            Ok(v)
        } else {
            Err(Error::Density(format!("{} density at {x} is {v}", inn.name())))
        }
    };
    let mut p = vec![1.0];
    if steps == 0 {
        return Ok(p);
    }
    let h = domain / m as f64;
    let mut node = Vec::with_capacity(m + 1);
    for j in 0..=m {
        // right limit at kinks that fall on nodes
        let x = j as f64 * h;
        node.push(density(if j == 0 { x + 1e-12 * h } else { x })?);
    }
    let mut g = GridFn::new(h, node);
    let breaks = inn.kinks();
    p.push(integrate_split(|x| inn.density(x), 0.0, domain, &breaks, (m / 16).max(4)));
    for _ in 2..=steps {
        if theta > 1.0 {
            domain *= theta;
        }
        let h_new = domain / m as f64;
        let node: Vec<f64> = (0..=m).into_par_iter().map(|j| prop.eval(j as f64 * h_new, &g)).collect();
        if let Some(bad) = node.iter().find(|v| !v.is_finite()) {
            return Err(Error::Density(format!("propagated density became {bad}")));
        }
        g = GridFn::new(h_new, node);
        p.push(g.integral(cfg.rule));
    }
    for k in 1..p.len() {
        if p[k] > p[k - 1] {
            if p[k] - p[k - 1] > 1e-9 {
                return Err(Error::Invariant(format!(
                    "quadrature p_{k} = {} exceeds p_{} = {}",
                    p[k],
                    k - 1,
                    p[k - 1]
                )));
            }
            p[k] = p[k - 1];
        }
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RichardsonReport {
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    pub max_diff: f64,
    /// `max_diff / (2^order − 1)`, the extrapolated error of the fine grid.
    pub error_estimate: f64,
}

/// Runs the quadrature at `M` and `2M` intervals.
pub fn quad_richardson(inn: &Innovation, theta: f64, n: usize, cfg: &QuadConfig) -> Result<RichardsonReport> {
    let coarse = quad_p(inn, theta, n + 1, cfg)?;
    let fine_cfg = QuadConfig {
        grid_points: 2 * cfg.grid_points,
        ..*cfg
    };
    let fine = quad_p(inn, theta, n + 1, &fine_cfg)?;
    let max_diff = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let order = match cfg.rule {
        Rule::Trapezoid => 2,
        Rule::Simpson => 4,
    };
    Ok(RichardsonReport {
        coarse,
        fine,
        max_diff,
        error_estimate: max_diff / f64::from((1 << order) - 1),
    })
}

/// `ρ(x) = ∫_{−∞}^0 f(s − θx) ds = P[X < −θx]`.
pub fn eval_rho_fn(inn: &Innovation, theta: f64, x: f64) -> f64 {
    inn.cdf(-theta * x)
}

/// `κ(x) = ∫_0^∞ f(z − θx) ρ(z) dz = P_x[Z_1 ≥ 0, Z_2 < 0]`.
pub fn eval_kappa(inn: &Innovation, theta: f64, x: f64) -> f64 {
    let (lo, hi) = negligible_support(inn);
    let shift = theta * x;
    let a = (shift + lo).max(0.0);
    let b = shift + hi;
    if b <= a {
        return 0.0;
    }
    let mut breaks: Vec<f64> = inn.kinks().iter().map(|k| shift + k).collect();
    // ρ has kinks where −θz hits a density kink
    breaks.extend(inn.kinks().iter().map(|k| -k / theta));
    integrate_split(|z| inn.density(z - shift) * eval_rho_fn(inn, theta, z), a, b, &breaks, 64)
}
