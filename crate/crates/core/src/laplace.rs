//! Closed forms and recursions for Laplace (bi-exponential) innovations.
//!
//! Negative drift uses the general density `(1−ρ) a e^{ax} 1_{x<0} + ρ b e^{−bx} 1_{x>0}`;
//! the answers depend on `θ` and `ρ` only. Positive drift is the symmetric case
//! `e^{−|x|}/2`, where the Catalan-like recursion for `q_n(θ)` is the ground truth
//! and every q-product formula is checked against it.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::qseries::{qpoch_inf_log, DEFAULT_TOL};
use crate::scalar::{catalan, Scalar};
use crate::series::Series;
use crate::table::{PersistTable, Provenance};
use crate::Rational;

fn check_negative<T: Scalar>(theta: &T, rho: &T) -> Result<()> {
    if !(*theta < T::zero()) {
        return Err(Error::param("theta", theta, "negative-drift formulas need theta < 0"));
    }
    if !(*rho > T::zero() && *rho <= T::one()) {
        return Err(Error::param("rho", rho, "rho must lie in (0, 1]"));
    }
    Ok(())
}

fn check_unit(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::param("theta", theta, "q-product formulas need 0 < theta < 1"))
    }
}

/// `p_n(θ) = ρ^n / (1−θ)^{n−1}` for `n ≥ 1`, `p_0 = 1`.
pub fn neg_drift_p<T: Scalar>(theta: &T, rho: &T, n: usize) -> T {
    if n == 0 {
        return T::one();
    }
    let one_minus = T::one() - theta.clone();
    rho.powi(n) / one_minus.powi(n - 1)
}

/// `q_0 = 1 − ρ`, `q_n = (1 − ρ − θ)(ρ/(1−θ))^n`.
pub fn neg_drift_q<T: Scalar>(theta: &T, rho: &T, n: usize) -> T {
    if n == 0 {
        return T::one() - rho.clone();
    }
    let ratio = rho.clone() / (T::one() - theta.clone());
    (T::one() - rho.clone() - theta.clone()) * ratio.powi(n)
}

/// Exact table `n = 0..=N` for `θ < 0`.
pub fn neg_drift_table<T: Scalar>(theta: T, rho: T, n: usize) -> Result<PersistTable<T>> {
    check_negative(&theta, &rho)?;
    let p: Vec<T> = (0..=n + 1).map(|k| neg_drift_p(&theta, &rho, k)).collect();
    Ok(PersistTable::from_p(theta.to_f64(), &p, Provenance::Exact, T::zero()))
}

/// `φ_θ` as a series, from the closed-form `p_n`.
pub fn neg_drift_phi_series<T: Scalar>(theta: &T, rho: &T, order: usize) -> Result<Series<T>> {
    check_negative(theta, rho)?;
    Ok(Series::new(
        (0..=order).map(|k| neg_drift_p(theta, rho, k)).collect(),
    ))
}

/// `ψ_θ(z) = ((1−ρ)(1−θ) − ρθz) / (1 − θ − ρz)`, expanded by series division.
pub fn neg_drift_psi_series<T: Scalar>(theta: &T, rho: &T, order: usize) -> Result<Series<T>> {
    check_negative(theta, rho)?;
    let one = T::one();
    let num = Series::from_poly(
        &[
            (one.clone() - rho.clone()) * (one.clone() - theta.clone()),
            -(rho.clone() * theta.clone()),
        ],
        order,
    );
    let den = Series::from_poly(&[one - theta.clone(), -rho.clone()], order);
    num.div(&den, order)
}

/// `a_n(θ) = (ρ/(1−θ))^n (1 − θ^n)`.
pub fn neg_drift_weights<T: Scalar>(theta: &T, rho: &T, n: usize) -> T {
    let ratio = rho.clone() / (T::one() - theta.clone());
    ratio.powi(n) * (T::one() - theta.powi(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NegDriftClass {
    /// `T_θ` quasi-infinitely divisible (equivalently `ψ_θ` belongs to a DVD pair).
    pub t_quasi_id: bool,
    pub t_id: bool,
    /// The tail variable `T̂_θ` with masses `p_n/φ_θ(1)` is infinitely divisible.
    pub that_id: bool,
}

/// Verdicts `θρ > (1−θ)(ρ−1)`, `θ ≥ ρ−1` and `θ ≥ −1`.
pub fn neg_drift_classify(theta: f64, rho: f64) -> Result<NegDriftClass> {
    check_negative(&theta, &rho)?;
    let t_quasi_id = theta * rho > (1.0 - theta) * (rho - 1.0);
    Ok(NegDriftClass {
        t_quasi_id,
        t_id: t_quasi_id && theta >= rho - 1.0,
        that_id: theta >= -1.0,
    })
}

/// `q_0 = 1/2`, `q_n = (1+θ^n)^{−1} Σ_{k<n} θ^k q_k q_{n−1−k}` for symmetric Laplace, `θ > 0`.
pub fn pos_drift_q<T: Scalar>(theta: &T, n: usize) -> Result<Vec<T>> {
    if !(*theta > T::zero()) {
        return Err(Error::param("theta", theta, "the recursion needs theta > 0"));
    }
    let mut pows = Vec::with_capacity(n + 1);
    let mut acc = T::one();
    for _ in 0..=n {
        pows.push(acc.clone());
        acc = acc * theta.clone();
    }
    let mut q: Vec<T> = Vec::with_capacity(n + 1);
    q.push(T::from_ratio(1, 2));
    for m in 1..=n {
        let mut s = T::zero();
        for k in 0..m {
            s = s + pows[k].clone() * q[k].clone() * q[m - 1 - k].clone();
        }
        q.push(s / (T::one() + pows[m].clone()));
    }
    Ok(q)
}

/// Recursion table `n = 0..=N`, `p_n = 1 − Σ_{k<n} q_k`.
///
/// For `θ > 1` the defect `P[T = ∞]` comes from the q-product formula (in double
/// precision, converted into `T`).
pub fn pos_drift_table<T: Scalar>(theta: T, n: usize) -> Result<PersistTable<T>> {
    let q = pos_drift_q(&theta, n)?;
    let t = theta.to_f64();
    let defect = if t > 1.0 {
        T::from_f64(defect(1.0 / t, DEFAULT_TOL)?)
    } else {
        T::zero()
    };
    Ok(PersistTable::from_q(t, q, Provenance::Recursion, defect))
}

/// Table for the inverse drift `1/θ` (`θ ∈ (0,1)`), built as
/// `p_n(1/θ) = defect + Σ_{k≥n} θ^k q_k(θ)` with the tail summed until terms drop below 1e-16.
pub fn inverse_drift_table(theta: f64, n: usize) -> Result<PersistTable<f64>> {
    check_unit(theta)?;
    let d = defect(theta, DEFAULT_TOL)?;
    // q_k(θ) decays at least like 1/2 · θ^k... scaled terms θ^k q_k shrink geometrically.
    let mut len = n + 2;
    let scaled = loop {
        let q = pos_drift_q(&theta, len)?;
        let s: Vec<f64> = q.iter().enumerate().map(|(k, v)| theta.powi(k as i32) * v).collect();
        if s[len] < 1e-16 || len > 100_000 {
            break s;
        }
        len *= 2;
    };
    let mut tail = vec![0.0; scaled.len() + 1];
    for k in (0..scaled.len()).rev() {
        tail[k] = tail[k + 1] + scaled[k];
    }
    let mut p: Vec<f64> = (0..=n + 1).map(|k| d + tail[k]).collect();
    p[0] = 1.0;
    Ok(PersistTable::from_p(1.0 / theta, &p, Provenance::Exact, d))
}

/// `q_n(1) = C_n / 2^{2n+1}`.
pub fn catalan_reference(n: usize) -> Rational {
    Rational::new(catalan(n), BigInt::from(2).pow(2 * n as u32 + 1))
}

/// `P[T_{1/θ} = ∞] = (θ; θ²)_∞ / ((θ²; θ²)_∞ + (θ; θ²)_∞)` for `θ ∈ (0,1)`.
pub fn defect(theta: f64, tol: f64) -> Result<f64> {
    check_unit(theta)?;
    let q = theta * theta;
    let a = qpoch_inf_log(theta, q, tol)?;
    let b = qpoch_inf_log(q, q, tol)?;
    // a/(a+b) = 1/(1 + b/a), both positive
    Ok(1.0 / (1.0 + (b.log_abs - a.log_abs).exp()))
}

/// `ψ_θ(z) = (θz; θ²)_∞ / ((θz; θ²)_∞ + (z; θ²)_∞)`.
pub fn larralde_psi(theta: f64, z: f64, tol: f64) -> Result<f64> {
    check_unit(theta)?;
    let q = theta * theta;
    let a = qpoch_inf_log(theta * z, q, tol)?;
    let b = qpoch_inf_log(z, q, tol)?;
    let den = a.add(b);
    if den.sign == 0 {
        return Err(Error::param("z", z, "z is a pole of psi_theta"));
    }
    Ok(f64::from(a.sign * den.sign) * (a.log_abs - den.log_abs).exp())
}

/// `ψ_{1/θ}(z) = (θ²z; θ²)_∞ / ((θ²z; θ²)_∞ + (θz; θ²)_∞)`.
pub fn psi_inverse_drift(theta: f64, z: f64, tol: f64) -> Result<f64> {
    check_unit(theta)?;
    let q = theta * theta;
    let a = qpoch_inf_log(q * z, q, tol)?;
    let b = qpoch_inf_log(theta * z, q, tol)?;
    let den = a.add(b);
    if den.sign == 0 {
        return Err(Error::param("z", z, "z is a pole of psi_{1/theta}"));
    }
    Ok(f64::from(a.sign * den.sign) * (a.log_abs - den.log_abs).exp())
}

/// Euler expansion `(c z; q)_∞ = Σ_k (−c)^k q^{k(k−1)/2} / (q;q)_k · z^k` to `order`.
fn euler_series<T: Scalar>(c: &T, q: &T, order: usize) -> Series<T> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut term = T::one();
    let mut q_pow = T::one(); // q^{k}
    for _ in 0..=order {
        coeffs.push(term.clone());
        // term_{k+1} = term_k · (−c) q^k / (1 − q^{k+1})
        let next_q = q_pow.clone() * q.clone();
        term = term * (-c.clone()) * q_pow.clone() / (T::one() - next_q.clone());
        q_pow = next_q;
    }
    Series::new(coeffs)
}

/// Taylor coefficients of `ψ_θ` by dividing the q-product series.
pub fn psi_series_from_products<T: Scalar>(theta: &T, order: usize) -> Result<Series<T>> {
    check_unit(theta.to_f64())?;
    let q = theta.clone() * theta.clone();
    let num = euler_series(theta, &q, order);
    let other = euler_series(&T::one(), &q, order);
    num.div(&(&num + &other), order)
}

/// `E[T_θ]` by three routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectedT {
    /// `(θ²; θ²)_∞ / (θ; θ²)_∞`.
    pub product: f64,
    /// `exp Σ_{n≥1} θ^n / (n(1+θ^n))`.
    pub log_sum: f64,
    /// Preferred value: the product form, or the log form when `θ > 0.9`.
    pub value: f64,
}

pub fn expected_t(theta: f64, tol: f64) -> Result<ExpectedT> {
    check_unit(theta)?;
    let q = theta * theta;
    let num = qpoch_inf_log(q, q, tol)?;
    let den = qpoch_inf_log(theta, q, tol)?;
    let product = (num.log_abs - den.log_abs).exp();

    let mut sum = 0.0;
    let mut pow = 1.0;
    let mut n = 0usize;
    loop {
        n += 1;
        pow *= theta;
        sum += pow / (n as f64 * (1.0 + pow));
        // tail ≤ θ^{n+1} / ((n+1)(1−θ))
        if pow * theta / ((n + 1) as f64 * (1.0 - theta)) < tol * 1e-2 || n > 50_000_000 {
            break;
        }
    }
    let log_sum = sum.exp();
    Ok(ExpectedT {
        product,
        log_sum,
        value: if theta > 0.9 { log_sum } else { product },
    })
}

/// `E[T_θ] = Σ_{n≥1} p_n(θ)` from the recursion, extended until `p_n < tol`.
pub fn expected_t_by_recursion(theta: f64, tol: f64) -> Result<f64> {
    check_unit(theta)?;
    let mut len = 64;
    loop {
        let q = pos_drift_q(&theta, len)?;
        let mut p = 1.0;
        let mut sum = 0.0;
        for qk in &q {
            p -= qk;
            sum += p;
        }
        if p.abs() < tol || len >= 1 << 16 {
            return Ok(sum);
        }
        len *= 2;
    }
}

/// `σ_θ` with `ψ_θ(z) = (1/2)/(1 − zσ_θ(z))`, for `θ ∈ (0,1)`:
/// `σ_θ(z) = (2(1+θ))^{−1} Σ_k (θ; θ²)_k / (θ⁴; θ²)_k (θz)^k`.
///
/// The prefactor is `1/(2(1+θ))`, not `1/(1+θ)`: expanding
/// `1/ψ_θ = 1 + (z;θ²)_∞/(θz;θ²)_∞` by the q-binomial theorem gives constant term 2, which
/// must be divided out. The `θ → 1` limit `σ_1(z) = 1/(2(1+√(1−z)))` confirms it.
pub fn sigma_series<T: Scalar>(theta: &T, order: usize) -> Result<Series<T>> {
    check_unit(theta.to_f64())?;
    let q = theta.clone() * theta.clone();
    let q2 = q.clone() * q.clone();
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut ratio = T::one();
    let mut num_pow = theta.clone(); // θ q^k
    let mut den_pow = q2; // θ⁴ q^k
    let mut theta_k = T::one();
    let lead = T::one() / (T::from_i64(2) * (T::one() + theta.clone()));
    for _ in 0..=order {
        coeffs.push(lead.clone() * ratio.clone() * theta_k.clone());
        ratio = ratio * (T::one() - num_pow.clone()) / (T::one() - den_pow.clone());
        num_pow = num_pow * q.clone();
        den_pow = den_pow * q.clone();
        theta_k = theta_k * theta.clone();
    }
    Ok(Series::new(coeffs))
}

/// `σ_{1/θ}(z) = θ σ_θ(θ z)`.
pub fn sigma_inverse_series<T: Scalar>(theta: &T, order: usize) -> Result<Series<T>> {
    Ok(sigma_series(theta, order)?
        .scale_argument(theta.clone())
        .scale(theta.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn neg_drift_examples() {
        let t = neg_drift_table(r(-1, 1), r(1, 2), 6).unwrap();
        assert_eq!(t.rows[1].p, r(1, 2));
        assert_eq!(t.rows[2].p, r(1, 8));
        assert_eq!(t.rows[1].q, r(3, 8));
        assert_eq!(t.rows[0].q, r(1, 2));
        let t = neg_drift_table(r(-1, 1), r(1, 1), 6).unwrap();
        assert_eq!(t.rows[3].p, r(1, 4));
        assert!(neg_drift_table(0.5, 0.5, 3).is_err());
        assert!(neg_drift_table(-0.5, 0.0, 3).is_err());
    }

    #[test]
    fn neg_drift_closed_form_q_matches_differences() {
        for &(tn, td, rn, rd) in &[(-1, 2, 7, 10), (-2, 1, 1, 1), (-1, 3, 1, 2), (-3, 1, 2, 5)] {
            let (theta, rho) = (r(tn, td), r(rn, rd));
            let t = neg_drift_table(theta.clone(), rho.clone(), 12).unwrap();
            for row in &t.rows {
                assert_eq!(row.q, neg_drift_q(&theta, &rho, row.n));
            }
            t.check_invariants(0.0).unwrap();
        }
    }

    #[test]
    fn neg_drift_log_concavity_identities() {
        let (theta, rho) = (r(-1, 2), r(7, 10));
        let q: Vec<Rational> = (0..12).map(|n| neg_drift_q(&theta, &rho, n)).collect();
        for n in 2..11 {
            assert_eq!(q[n].clone() * q[n].clone(), q[n - 1].clone() * q[n + 1].clone());
        }
        let gap = q[1].clone() * q[1].clone() - q[0].clone() * q[2].clone();
        let ratio = rho.clone() / (r(1, 1) - theta.clone());
        let expect = -theta.clone() * (r(1, 1) - rho - theta) * ratio.clone() * ratio;
        assert_eq!(gap, expect);
        assert!(gap > r(0, 1));
    }

    #[test]
    fn neg_drift_weight_examples() {
        assert_eq!(neg_drift_weights(&r(-1, 2), &r(7, 10), 1), r(7, 10));
        for n in (2..=10).step_by(2) {
            assert_eq!(neg_drift_weights(&r(-1, 1), &r(1, 1), n), r(0, 1));
        }
        assert_eq!(neg_drift_weights(&r(-2, 1), &r(1, 1), 2), r(-1, 3));
    }

    #[test]
    fn classification_examples() {
        let c = neg_drift_classify(-1.0, 0.5).unwrap();
        assert!(c.t_quasi_id && !c.t_id && c.that_id);
        assert!(neg_drift_classify(-0.4, 0.5).unwrap().t_id);
        let c = neg_drift_classify(-0.5, 1.0).unwrap();
        assert!(!c.t_quasi_id && c.that_id);
        assert!(!neg_drift_classify(-1.5, 0.5).unwrap().that_id);
    }

    #[test]
    fn recursion_examples() {
        let q = pos_drift_q(&r(1, 2), 3).unwrap();
        assert_eq!(q, vec![r(1, 2), r(1, 6), r(1, 10), r(11, 162)]);
        let q = pos_drift_q(&r(1, 1), 1).unwrap();
        assert_eq!(q[1], r(1, 8));
        let t = pos_drift_table(r(1, 2), 3).unwrap();
        assert_eq!(t.rows[3].p, r(7, 30));
        assert!(pos_drift_q(&-1.0, 3).is_err());
    }

    #[test]
    fn catalan_examples() {
        assert_eq!(catalan_reference(0), r(1, 2));
        assert_eq!(catalan_reference(1), r(1, 8));
        assert_eq!(catalan_reference(3), r(5, 128));
    }

    #[test]
    fn q_products_match_recursion() {
        let theta = 0.5;
        assert_relative_eq!(larralde_psi(theta, 0.0, 1e-14).unwrap(), 0.5, epsilon = 1e-15);
        let series = psi_series_from_products(&theta, 20).unwrap();
        let rec = pos_drift_q(&theta, 20).unwrap();
        for n in 0..=20 {
            assert!((series.coeff(n) - rec[n]).abs() < 1e-9, "n = {n}");
        }
        // Rational route is exact.
        let series = psi_series_from_products(&r(1, 2), 8).unwrap();
        assert_eq!(series.into_coeffs(), pos_drift_q(&r(1, 2), 8).unwrap());
    }

    #[test]
    fn inverse_drift_psi() {
        for &theta in &[0.3, 0.5, 0.8] {
            for &z in &[-0.9, -0.3, 0.0, 0.4, 1.0] {
                let a = psi_inverse_drift(theta, z, 1e-14).unwrap();
                let b = larralde_psi(theta, theta * z, 1e-14).unwrap();
                assert!((a - b).abs() <= 10.0 * 1e-14);
            }
        }
        let d = defect(0.5, 1e-14).unwrap();
        // mpmath: 0.378553783328590190...
        assert_relative_eq!(d, 0.378_553_783_328_590_2, epsilon = 1e-12);
        assert_relative_eq!(psi_inverse_drift(0.5, 1.0, 1e-14).unwrap(), 1.0 - d, epsilon = 1e-12);
        // coefficient n of ψ_{1/θ} is θ^n q_n(θ)
        let scaled = Series::new(pos_drift_q(&0.5, 30).unwrap()).scale_argument(0.5);
        assert!((scaled.eval_f64(1.0) - (1.0 - d)).abs() < 1e-12);
    }

    #[test]
    fn expected_t_routes() {
        let e = expected_t(0.5, 1e-14).unwrap();
        // mpmath: 1.641632560655153866...
        assert_relative_eq!(e.product, 1.641_632_560_655_153_9, epsilon = 1e-12);
        assert!((e.product - e.log_sum).abs() < 1e-12);
        let rec = expected_t_by_recursion(0.5, 1e-15).unwrap();
        assert!((rec - e.product).abs() < 1e-12);
        let small = expected_t(1e-6, 1e-14).unwrap();
        assert!((small.value - 1.0).abs() < 1e-5);
    }

    #[test]
    fn sigma_reconstructs_psi() {
        let theta: f64 = 0.5;
        let k = 24;
        let sigma = sigma_series(&theta, k).unwrap();
        assert_relative_eq!(sigma.coeff(0), 1.0 / 3.0, epsilon = 1e-15);
        assert!(sigma.coeffs().iter().all(|c| *c >= 0.0));
        let den = &Series::one(k) - &sigma.shift_up().truncate(k);
        let psi = den.reciprocal(k).unwrap().scale(0.5);
        let rec = pos_drift_q(&theta, k).unwrap();
        for n in 0..=20 {
            assert!((psi.coeff(n) - rec[n]).abs() < 1e-9, "n = {n}");
        }
        // exact version
        let sigma = sigma_series(&r(1, 3), 10).unwrap();
        let den = &Series::one(10) - &sigma.shift_up().truncate(10);
        let psi = den.reciprocal(10).unwrap().scale(r(1, 2));
        assert_eq!(psi.into_coeffs(), pos_drift_q(&r(1, 3), 10).unwrap());
    }

    #[test]
    fn sigma_inverse_drift_relation() {
        let theta: f64 = 0.4;
        let s = sigma_series(&theta, 15).unwrap();
        let inv = sigma_inverse_series(&theta, 15).unwrap();
        for n in 0..=15 {
            assert_relative_eq!(inv.coeff(n), f64::powi(theta, n as i32 + 1) * s.coeff(n), max_relative = 1e-14);
        }
    }

    #[test]
    fn sigma_near_one_approaches_random_walk_limit() {
        // σ_1(z) = 1/(2(1+√(1−z))) = Σ q_n(1)/2 · z^n.
        let sigma = sigma_series(&0.999, 6).unwrap();
        for n in 0..=6 {
            let limit = catalan_reference(n).to_f64() / 2.0;
            assert!((sigma.coeff(n) - limit).abs() < 5e-3 * limit.max(1e-3), "n = {n}");
        }
    }
}
