//! Spectral decomposition of the symmetric-Laplace passage time for `θ ∈ (0,1)`.
//!
//! The generating function `ψ_θ = (θz;θ²)_∞ / D_θ(z)` is meromorphic with simple
//! poles at the zeroes `z_0 < z_1 < …` of `D_θ`, one in each bracket
//! `]θ^{−2i}, θ^{−2i−1}[`. Partial fractions give the geometric mixture
//! `q_n(θ) = ½ Σ c_i x_i^n` with `x_i = 1/z_i` and `c_i ≥ 0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::laplace::defect;
use crate::qseries::{d_theta_log, qpoch_inf_log, LogSigned};
use crate::quad::integrate;

pub const DEFAULT_DEPTH: usize = 20;
const MAX_BISECTIONS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub theta: f64,
    pub depth: usize,
    pub zeroes: Vec<f64>,
    pub masses: Vec<f64>,
    /// Empty until [`coefficients`] has run.
    pub coeffs: Vec<f64>,
    /// Atom at 1 of the inverse-drift mixing law, `P[T_{1/θ} = ∞]`.
    pub defect: f64,
    /// Zero and coefficient of the first omitted index, used for truncation bounds.
    pub omitted_zero: f64,
    pub omitted_coeff: f64,
    pub tol: f64,
}

/// A truncated spectral sum and a bound on the omitted part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralValue {
    pub value: f64,
    pub truncation_bound: f64,
}

/// Half-open interval `[lo, hi)`; `hi` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::param("theta", theta, "spectral decomposition needs 0 < theta < 1"))
    }
}

fn bracket(theta: f64, i: usize) -> (f64, f64) {
    let lo = theta.powi(-2 * i as i32);
    (lo, lo / theta)
}

/// Zero of `D_θ` in bracket `i`, after checking the certified endpoint signs.
pub fn zero_in_bracket(theta: f64, i: usize, tol: f64) -> Result<f64> {
    check_theta(theta)?;
    let (mut lo, mut hi) = bracket(theta, i);
    let expect: i8 = if i % 2 == 0 { 1 } else { -1 };
    let s_lo = d_theta_log(lo, theta, tol)?.sign;
    let s_hi = d_theta_log(hi, theta, tol)?.sign;
    if s_lo != expect || s_hi != -expect {
        return Err(Error::BracketSign {
            index: i,
            lo,
            hi,
            sign_lo: s_lo,
            sign_hi: s_hi,
        });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid.max(1.0) || mid <= lo || mid >= hi {
            break;
        }
        let s = d_theta_log(mid, theta, tol)?.sign;
        if s == 0 {
            return Ok(mid);
        }
        if s == expect {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Zeroes `z_0..z_{depth−1}` by bracketed bisection, one bracket per task.
pub fn find_zeroes(theta: f64, depth: usize, tol: f64) -> Result<Spectrum> {
    check_theta(theta)?;
    if depth == 0 {
        return Err(Error::param("depth", depth, "depth must be at least 1"));
    }
    let zeroes = zeroes_range(theta, 0, depth + 1, tol)?;
    let omitted_zero = zeroes[depth];
    let zeroes = zeroes[..depth].to_vec();
    Ok(Spectrum {
        theta,
        depth,
        masses: zeroes.iter().map(|z| 1.0 / z).collect(),
        zeroes,
        coeffs: Vec::new(),
        defect: defect(theta, tol)?,
        omitted_zero,
        omitted_coeff: f64::NAN,
        tol,
    })
}

fn zeroes_range(theta: f64, from: usize, to: usize, tol: f64) -> Result<Vec<f64>> {
    (from..to)
        .into_par_iter()
        .map(|i| zero_in_bracket(theta, i, tol))
        .collect()
}

/// `c_i = (θz_i; θ²)_∞ ∏_{j≠i} 1/(1 − x_j z_i)` in sign/log form.
///
/// The product over `j` runs over further zeroes until `x_j z_i / (1 − θ²)` drops below `tol`.
pub fn coefficients(mut spec: Spectrum, tol: f64) -> Result<Spectrum> {
    let theta = spec.theta;
    let q = theta * theta;
    let largest = spec.omitted_zero;
    // x_j < θ^{2j}, so this many zeroes make every remaining factor negligible.
    let needed = ((largest / (tol * (1.0 - q))).ln() / -q.ln()).ceil() as usize + 1;
    let needed = needed.max(spec.depth + 1);
    let mut all = spec.zeroes.clone();
    all.push(spec.omitted_zero);
    if needed > all.len() {
        all.extend(zeroes_range(theta, all.len(), needed, tol)?);
    }
    let masses: Vec<f64> = all.iter().map(|z| 1.0 / z).collect();
    let coeff = |i: usize| -> Result<f64> {
        let z = all[i];
        let mut acc = qpoch_inf_log(theta * z, q, tol)?;
        for (j, x) in masses.iter().enumerate() {
            if j == i {
                continue;
            }
            let f = 1.0 - x * z;
            if f < 0.0 {
                acc.sign = -acc.sign;
            }
            acc.log_abs -= f.abs().ln();
        }
        Ok(acc.value())
    };
    let c: Vec<f64> = (0..=spec.depth).into_par_iter().map(coeff).collect::<Result<_>>()?;
    for (i, ci) in c.iter().enumerate() {
        if *ci < -tol {
            return Err(Error::Invariant(format!(
                "spectral coefficient c_{i} = {ci:e} is negative"
            )));
        }
    }
    spec.omitted_coeff = c[spec.depth].max(0.0);
    spec.coeffs = c[..spec.depth].iter().map(|v| v.max(0.0)).collect();
    Ok(spec)
}

/// Zeroes and coefficients in one call.
pub fn spectrum(theta: f64, depth: usize, tol: f64) -> Result<Spectrum> {
    coefficients(find_zeroes(theta, depth, tol)?, tol)
}

/// Independent residue route: `c = −2 / (z S(z))` with
/// `S(z) = Σ_n [θ^{2n}/(1 − θ^{2n}z) − θ^{2n+1}/(1 − θ^{2n+1}z)] = D'(z)/(θz;θ²)_∞` at a zero.
pub fn residue_coefficient(theta: f64, z: f64, tol: f64) -> Result<f64> {
    check_theta(theta)?;
    let mut s = 0.0;
    let mut a = 1.0; // θ^{2n}
    let mut n = 0usize;
    loop {
        let b = a * theta;
        let term = a / (1.0 - a * z) - b / (1.0 - b * z);
        s += term;
        // for a·z < 1/2 the remaining terms are bounded by 2a(1−θ)/(1−θ²)
        if a * z < 0.5 && 2.0 * a / (1.0 + theta) < tol * s.abs() {
            break;
        }
        a *= theta * theta;
        n += 1;
        if n > 1_000_000 {
            break;
        }
    }
    Ok(-2.0 / (z * s))
}

/// `1 − θ^{2n+1}`: successive terms `c_i x_i^n` shrink by about `θ · θ^{2n}`
/// (the coefficients themselves only by `θ`, the masses by `θ²`).
fn tail_factor(theta: f64, n: usize) -> f64 {
    1.0 - theta.powi(2 * n as i32 + 1)
}

fn require_coeffs(spec: &Spectrum) {
    assert_eq!(
        spec.coeffs.len(),
        spec.depth,
        "spectral coefficients have not been computed"
    );
}

/// `q_n(θ) = ½ Σ c_i x_i^n`.
pub fn spectral_q(spec: &Spectrum, n: usize) -> SpectralValue {
    require_coeffs(spec);
    let value = 0.5
        * spec
            .coeffs
            .iter()
            .zip(&spec.masses)
            .map(|(c, x)| c * x.powi(n as i32))
            .sum::<f64>();
    let x = 1.0 / spec.omitted_zero;
    SpectralValue {
        value,
        truncation_bound: 0.5 * spec.omitted_coeff * x.powi(n as i32) / tail_factor(spec.theta, n),
    }
}

/// `p_n(θ) = ½ Σ c_i x_i^n/(1 − x_i)`, or with `inverse_drift`
/// `p_n(1/θ) = defect + ½ Σ c_i (θx_i)^n/(1 − θx_i)`.
pub fn spectral_p(spec: &Spectrum, n: usize, inverse_drift: bool) -> SpectralValue {
    require_coeffs(spec);
    let scale = if inverse_drift { spec.theta } else { 1.0 };
    let term = |c: f64, x: f64| {
        let y = scale * x;
        0.5 * c * y.powi(n as i32) / (1.0 - y)
    };
    let mut value: f64 = spec
        .coeffs
        .iter()
        .zip(&spec.masses)
        .map(|(c, x)| term(*c, *x))
        .sum();
    if inverse_drift {
        value += spec.defect;
    }
    SpectralValue {
        value,
        truncation_bound: term(spec.omitted_coeff, 1.0 / spec.omitted_zero)
            / tail_factor(spec.theta, n),
    }
}

/// `(a_n(θ), a_n(1/θ)) = ((1 − θ^n) Σ x_i^n, 1 + (θ^n − 1) Σ x_i^n)`.
pub fn spectral_weights(spec: &Spectrum, n: usize) -> (f64, f64) {
    let s: f64 = spec.masses.iter().map(|x| x.powi(n as i32)).sum();
    let t = spec.theta.powi(n as i32);
    ((1.0 - t) * s, 1.0 + (t - 1.0) * s)
}

/// Support of the step function `q_θ = Σ_i 1_{[z_i, z_i/θ)}`.
pub fn ltz_intervals(spec: &Spectrum) -> Vec<Interval> {
    spec.zeroes
        .iter()
        .map(|z| Interval {
            lo: *z,
            hi: z / spec.theta,
        })
        .collect()
}

/// Support of `q̃_{1/θ} = 1_{[1,∞)} − q_θ`: `[1, z_0)` and the gaps `[z_i/θ, z_{i+1})`.
/// The last gap is open-ended at the omitted zero.
pub fn ltz_complement(spec: &Spectrum) -> Vec<Interval> {
    let mut out = vec![Interval {
        lo: 1.0,
        hi: spec.zeroes[0],
    }];
    for (i, z) in spec.zeroes.iter().enumerate() {
        let next = spec.zeroes.get(i + 1).copied().unwrap_or(spec.omitted_zero);
        out.push(Interval {
            lo: z / spec.theta,
            hi: next,
        });
    }
    out
}

/// `∫_0^1 x^n q_θ(1/x) dx`, by Gauss–Legendre on each piece `[θx_i, x_i]`.
/// Equals `a_{n+1}(θ)/(n+1)`.
pub fn ltz_moment(spec: &Spectrum, n: usize) -> f64 {
    ltz_intervals(spec)
        .iter()
        .map(|iv| integrate(|x| x.powi(n as i32), 1.0 / iv.hi, 1.0 / iv.lo, 2))
        .sum()
}

/// Sign pattern of `D_θ` at both ends of bracket `i`, for diagnostics.
pub fn bracket_signs(theta: f64, i: usize, tol: f64) -> Result<(i8, i8)> {
    let (lo, hi) = bracket(theta, i);
    let s: [LogSigned; 2] = [d_theta_log(lo, theta, tol)?, d_theta_log(hi, theta, tol)?];
    Ok((s[0].sign, s[1].sign))
}
