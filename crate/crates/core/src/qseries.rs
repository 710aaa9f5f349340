//! q-Pochhammer symbols and the entire function
//! `D_θ(z) = (θz; θ²)_∞ + (z; θ²)_∞`.
//!
//! For large `|z|` the leading factors `1 − z q^n` are huge and alternate in
//! sign, so the product route also exists in sign/log-magnitude form
//! ([`LogSigned`]); bracket sign checks and bisection use that form.

use num_traits::Float;

use crate::error::{Error, Result};

/// Default tolerance for q-products.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A truncated infinite product together with its truncation certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QProductValue<F> {
    pub value: F,
    pub factors_used: usize,
    /// Bound on the relative error from the omitted factors.
    pub truncation_bound: F,
}

/// `sign · exp(log_abs)`; `sign == 0` encodes an exact zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSigned {
    pub sign: i8,
    pub log_abs: f64,
}

impl LogSigned {
    pub const ZERO: LogSigned = LogSigned {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn value(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_abs.exp()
        }
    }

    /// Sum of two log-signed numbers, stable when both are astronomically large.
    pub fn add(self, other: LogSigned) -> LogSigned {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_abs >= other.log_abs {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = (small.log_abs - big.log_abs).exp();
        let mantissa = f64::from(big.sign) + f64::from(small.sign) * ratio;
        if mantissa == 0.0 {
            return LogSigned::ZERO;
        }
        LogSigned {
            sign: if mantissa > 0.0 { 1 } else { -1 },
            log_abs: big.log_abs + mantissa.abs().ln(),
        }
    }
}

/// `(z; q)_k = ∏_{n<k} (1 − z q^n)`, with `(z; q)_0 = 1`.
pub fn qpoch_finite<F: Float>(z: F, q: F, k: usize) -> F {
    let mut acc = F::one();
    let mut zq = z;
    for _ in 0..k {
        acc = acc * (F::one() - zq);
        zq = zq * q;
    }
    acc
}

/// Number of leading factors after which the tail `∏_{m≥n}(1 − z q^m)` is within
/// relative `tol` of 1, plus that relative bound.
fn tail_cut<F: Float>(z: F, q: F, tol: F) -> (usize, F) {
    let one = F::one();
    let aq = q.abs();
    let mut zq = z.abs();
    let mut n = 0usize;
    loop {
        if zq < F::from(0.5).unwrap() {
            // |log tail| ≤ Σ_{m≥n} |zq^m|/(1 − |zq^m|) ≤ 2|zq^n|/(1 − |q|)
            let log_bound = (zq + zq) / (one - aq);
            let bound = log_bound.exp() - one;
            if bound <= tol || zq == F::zero() {
                return (n, bound);
            }
        }
        zq = zq * aq;
        n += 1;
        if n > 100_000 {
            return (n, F::infinity());
        }
    }
}

/// `(z; q)_∞` to relative tolerance `tol`.
pub fn qpoch_inf<F: Float>(z: F, q: F, tol: F) -> Result<QProductValue<F>> {
    if !(q.abs() < F::one()) {
        return Err(Error::param(
            "q",
            q.to_f64().unwrap_or(f64::NAN),
            "infinite q-Pochhammer product needs |q| < 1",
        ));
    }
    let (k, bound) = tail_cut(z, q, tol);
    Ok(QProductValue {
        value: qpoch_finite(z, q, k),
        factors_used: k,
        truncation_bound: bound,
    })
}

/// `(z; q)_∞` in sign/log-magnitude form.
pub fn qpoch_inf_log(z: f64, q: f64, tol: f64) -> Result<LogSigned> {
    if !(q.abs() < 1.0) {
        return Err(Error::param("q", q, "infinite q-Pochhammer product needs |q| < 1"));
    }
    let (k, _) = tail_cut(z, q, tol);
    let mut sign = 1i8;
    let mut log_abs = 0.0;
    let mut zq = z;
    for _ in 0..k {
        let factor = 1.0 - zq;
        if factor == 0.0 {
            return Ok(LogSigned::ZERO);
        }
        if factor < 0.0 {
            sign = -sign;
        }
        log_abs += factor.abs().ln();
        zq *= q;
    }
    Ok(LogSigned { sign, log_abs })
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::param("theta", theta, "D_theta is defined for 0 < theta < 1"))
    }
}

/// `D_θ(z)` by the product route, in sign/log-magnitude form.
pub fn d_theta_log(z: f64, theta: f64, tol: f64) -> Result<LogSigned> {
    check_theta(theta)?;
    let q = theta * theta;
    let a = qpoch_inf_log(theta * z, q, tol)?;
    let b = qpoch_inf_log(z, q, tol)?;
    Ok(a.add(b))
}

/// `D_θ(z)` by the product route (authoritative).
pub fn d_theta(z: f64, theta: f64, tol: f64) -> Result<f64> {
    Ok(d_theta_log(z, theta, tol)?.value())
}

/// Series-route evaluation with the cancellation scale of the alternating sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesEvaluation {
    pub value: f64,
    pub terms: usize,
    /// Largest term magnitude; rounding error is of order `max_term · ε`.
    pub max_term: f64,
}

/// `D_θ(z) = Σ_n θ^{n(n−1)} (1 + θ^n) / (θ²; θ²)_n · (−z)^n` (q-binomial theorem).
pub fn d_theta_series(z: f64, theta: f64, tol: f64) -> Result<SeriesEvaluation> {
    check_theta(theta)?;
    let q = theta * theta;
    // base_n = θ^{n(n−1)} (−z)^n / (θ²;θ²)_n
    let mut base = 1.0;
    let mut theta_n = 1.0;
    let mut q_pow = 1.0; // θ^{2(n−1)} for the upcoming step
    let mut sum = 2.0;
    let mut max_term: f64 = 2.0;
    let mut n = 0usize;
    loop {
        n += 1;
        base *= q_pow * (-z) / (1.0 - q_pow * q);
        q_pow *= q;
        theta_n *= theta;
        let term = base * (1.0 + theta_n);
        sum += term;
        max_term = max_term.max(term.abs());
        let shrinking = q_pow * z.abs() < 0.5;
        if (shrinking && term.abs() < tol * (sum.abs() + 1.0)) || n > 10_000 {
            break;
        }
    }
    Ok(SeriesEvaluation {
        value: sum,
        terms: n,
        max_term,
    })
}
