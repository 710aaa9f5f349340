//! Truncated formal power series.
//!
//! A [`Series`] of order `N` stores `c_0, …, c_N`. All operations are
//! coefficient recurrences, so identities between generating functions hold
//! coefficientwise (exactly, in rational mode). Coefficients beyond a
//! series' own order are treated as zero when an operation asks for more.

use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Series<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Series<T> {
    /// Builds a series from `c_0..c_N`. An empty vector gives the zero series of order 0.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Series { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(T::one(), order)
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `Σ r^n z^n`, i.e. `1/(1 − r z)`.
    pub fn geometric(r: T, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut term = T::one();
        for _ in 0..=order {
            coeffs.push(term.clone());
            term = term * r.clone();
        }
        Series { coeffs }
    }

    /// Polynomial `c_0 + c_1 z + …` padded with zeros up to `order`.
    pub fn from_poly(poly: &[T], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (dst, src) in s.coeffs.iter_mut().zip(poly) {
            *dst = src.clone();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `z^n`; zero past the stored order.
    pub fn coeff(&self, n: usize) -> T {
        self.coeffs.get(n).cloned().unwrap_or_else(T::zero)
    }

    pub fn all_finite(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_finite)
    }

    /// Same series re-truncated (or zero-padded) to `order`.
    pub fn truncate(&self, order: usize) -> Self {
        Series {
            coeffs: (0..=order).map(|n| self.coeff(n)).collect(),
        }
    }

    /// Cauchy product to order `n`.
    pub fn mul(&self, other: &Self, n: usize) -> Self {
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let lo = k.saturating_sub(other.order());
            let hi = k.min(self.order());
            let mut acc = T::zero();
            for i in lo..=hi {
                acc = acc + self.coeffs[i].clone() * other.coeffs[k - i].clone();
            }
            out.push(acc);
        }
        Series { coeffs: out }
    }

    /// Multiplicative inverse to order `n`.
    pub fn reciprocal(&self, n: usize) -> Result<Self> {
        let a0 = self.coeffs[0].clone();
        if a0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = T::one() / a0;
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for k in 1..=n {
            let mut acc = T::zero();
            for i in 1..=k.min(self.order()) {
                acc = acc + self.coeffs[i].clone() * out[k - i].clone();
            }
            out.push(-(acc * inv0.clone()));
        }
        Ok(Series { coeffs: out })
    }

    /// `self / other` to order `n`.
    pub fn div(&self, other: &Self, n: usize) -> Result<Self> {
        Ok(self.mul(&other.reciprocal(n)?, n))
    }

    /// Logarithm of a series with constant term 1, via `n L_n = n a_n − Σ_{k<n} k L_k a_{n−k}`.
    pub fn log(&self, n: usize) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::ConstantTermNotOne(self.coeffs[0].to_string()));
        }
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        out.push(T::zero());
        for k in 1..=n {
            let mut acc = T::from_i64(k as i64) * self.coeff(k);
            for j in 1..k {
                acc = acc - T::from_i64(j as i64) * out[j].clone() * self.coeff(k - j);
            }
            out.push(acc / T::from_i64(k as i64));
        }
        Ok(Series { coeffs: out })
    }

    /// Exponential of a series with constant term 0, via `n E_n = Σ_{k≤n} k a_k E_{n−k}`.
    pub fn exp(&self, n: usize) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm(self.coeffs[0].to_string()));
        }
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        out.push(T::one());
        for k in 1..=n {
            let mut acc = T::zero();
            for j in 1..=k.min(self.order()) {
                acc = acc + T::from_i64(j as i64) * self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(acc / T::from_i64(k as i64));
        }
        Ok(Series { coeffs: out })
    }

    /// `a(c z)`: coefficient `n` becomes `a_n c^n`.
    pub fn scale_argument(&self, c: T) -> Self {
        let mut pow = T::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let v = a.clone() * pow.clone();
                pow = pow.clone() * c.clone();
                v
            })
            .collect();
        Series { coeffs }
    }

    /// `a(−z)`.
    pub fn negate_argument(&self) -> Self {
        self.scale_argument(-T::one())
    }

    /// `z · a(z)`, order grows by one.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(T::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Series { coeffs }
    }

    /// `(a(z) − a_0)/z`, order drops by one (order 0 gives the zero series).
    pub fn shift_down(&self) -> Self {
        Series::new(self.coeffs[1..].to_vec())
    }

    pub fn scale(&self, c: T) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Value at `z` in double precision (Horner).
    pub fn eval_f64(&self, z: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * z + c.to_f64())
    }

    /// Largest coefficientwise gap to `other` over `0..=n`, in double precision.
    pub fn max_abs_diff(&self, other: &Self, n: usize) -> f64 {
        (0..=n)
            .map(|k| (self.coeff(k) - other.coeff(k)).to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> Series<f64> {
        Series {
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl<T: Scalar> Add for &Series<T> {
    type Output = Series<T>;

    fn add(self, rhs: Self) -> Series<T> {
        let n = self.order().max(rhs.order());
        Series {
            coeffs: (0..=n).map(|k| self.coeff(k) + rhs.coeff(k)).collect(),
        }
    }
}

impl<T: Scalar> Sub for &Series<T> {
    type Output = Series<T>;

    fn sub(self, rhs: Self) -> Series<T> {
        let n = self.order().max(rhs.order());
        Series {
            coeffs: (0..=n).map(|k| self.coeff(k) - rhs.coeff(k)).collect(),
        }
    }
}

impl<T: Scalar> Neg for &Series<T> {
    type Output = Series<T>;

    fn neg(self) -> Series<T> {
        Series {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

/// `φ(z) = (1 − zψ(z))/(1 − z)`: `p_0 = 1`, `p_n = 1 − Σ_{k<n} q_k`.
pub fn phi_from_psi<T: Scalar>(psi: &Series<T>, n: usize) -> Series<T> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = T::one();
    out.push(p.clone());
    for k in 0..n {
        p = p - psi.coeff(k);
        out.push(p.clone());
    }
    Series::new(out)
}

/// Inverse of [`phi_from_psi`]: `q_n = p_n − p_{n+1}`.
///
/// `q_n` needs `p_{n+1}`, so the result is truncated to `min(n, φ.order() − 1)`.
pub fn psi_from_phi<T: Scalar>(phi: &Series<T>, n: usize) -> Result<Series<T>> {
    if !phi.coeff(0).is_one() {
        return Err(Error::ConstantTermNotOne(phi.coeff(0).to_string()));
    }
    let top = n.min(phi.order().saturating_sub(1));
    Ok(Series::new(
        (0..=top).map(|k| phi.coeff(k) - phi.coeff(k + 1)).collect(),
    ))
}

/// Weights `a_n = n [z^n] log φ`, returned with index `n` (index 0 holds the vanishing
/// constant term).
pub fn weights<T: Scalar>(phi: &Series<T>, n: usize) -> Result<Vec<T>> {
    let log = phi.log(n)?;
    Ok(log
        .into_coeffs()
        .into_iter()
        .enumerate()
        .map(|(k, c)| c * T::from_i64(k as i64))
        .collect())
}
