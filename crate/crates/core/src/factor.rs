//! Factorization verifiers, the discrete Van Dantzig solver and sequence-shape
//! diagnostics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{weights, Series};
use crate::table::{PersistTable, Provenance};

/// `max_{n≤N} |Σ_{k≤n} p_{n−k}(θ) p_k(1/θ) − 1|`.
pub fn verify_theorem_a<T: Scalar>(p_theta: &[T], p_inv: &[T], n: usize) -> f64 {
    let top = n.min(p_theta.len().min(p_inv.len()).saturating_sub(1));
    (0..=top)
        .map(|m| {
            let mut acc = T::zero();
            for k in 0..=m {
                acc = acc + p_theta[m - k].clone() * p_inv[k].clone();
            }
            (acc - T::one()).to_f64().abs()
        })
        .fold(0.0, f64::max)
}

/// `max_{n≤N} |[z^n] φ_θ(z) φ_{1/θ}(−z) − δ_{n0}|`.
pub fn verify_van_dantzig<T: Scalar>(phi_theta: &Series<T>, phi_inv: &Series<T>, n: usize) -> f64 {
    let prod = phi_theta.mul(&phi_inv.negate_argument(), n);
    prod.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let target = if k == 0 { T::one() } else { T::zero() };
            (c.clone() - target).to_f64().abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum DvdRejection {
    /// `s_0 ≤ 0`: `f(z)g(−z) = f(0)g(0)` forces `f(0) > 0`.
    NonPositiveConstant,
    NegativeEntry { index: usize },
    NonSummable { ratio: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DvdVerdict<T> {
    /// Solution `u_0 = 1, u_1, …` of the triangular system.
    pub u: Vec<T>,
    pub nonneg: bool,
    pub summable_heuristic: bool,
    /// Geometric-ratio estimate of `|u_{n+1}/u_n|` over the last quarter.
    pub ratio_estimate: f64,
    pub accepted: bool,
    pub rejection: Option<DvdRejection>,
    /// `u / Σu` when accepted (partial sum up to the computed order).
    pub partner: Option<Vec<T>>,
}

const SUMMABLE_MARGIN: f64 = 1e-6;

/// Growth-rate estimate `(|u_N|/|u_m|)^{1/(N−m)}` with `m = N − ⌊N/4⌋`.
/// A zero tail gives 0; a zero at `m` alone falls back to the root test `|u_N|^{1/N}`.
fn ratio_estimate(u: &[f64]) -> f64 {
    let n = u.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let m = n - (n / 4).max(1);
    let tail = &u[m..];
    if tail.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let (a, b) = (u[m].abs(), u[n].abs());
    if a > 0.0 && b > 0.0 {
        ((b.ln() - a.ln()) / (n - m) as f64).exp()
    } else {
        b.powf(1.0 / n as f64)
    }
}

/// Solves `u_0 = 1`, `Σ_{k≤n} (−1)^k s_k u_{n−k} = 0` for `n = 1..=order`.
///
/// The pair is accepted when `u ≥ 0` and the growth estimate is below `1 − 1e-6`;
/// non-negativity alone does not make `u` a mass function.
pub fn dvd_solve<T: Scalar>(s: &[T], order: usize) -> DvdVerdict<T> {
    let reject = |u: Vec<T>, nonneg, why| DvdVerdict {
        u,
        nonneg,
        summable_heuristic: false,
        ratio_estimate: f64::NAN,
        accepted: false,
        rejection: Some(why),
        partner: None,
    };
    let Some(s0) = s.first().cloned().filter(|v| *v > T::zero()) else {
        return reject(vec![T::one()], true, DvdRejection::NonPositiveConstant);
    };
    let mut u: Vec<T> = Vec::with_capacity(order + 1);
    // rounding floor of each u_n; entries below it carry no sign information
    let mut floor = vec![0.0];
    u.push(T::one());
    for n in 1..=order {
        let mut acc = T::zero();
        let mut mag = 0.0;
        for k in 1..=n.min(s.len() - 1) {
            let term = s[k].clone() * u[n - k].clone();
            mag += term.to_f64().abs();
            acc = if k % 2 == 0 { acc + term } else { acc - term };
        }
        floor.push(64.0 * T::epsilon() * mag / s0.to_f64());
        u.push(-(acc / s0.clone()));
    }
    let negative = u
        .iter()
        .zip(&floor)
        .position(|(v, f)| *v < T::zero() && v.to_f64().abs() > *f);
    if let Some(index) = negative {
        return reject(u, false, DvdRejection::NegativeEntry { index });
    }
    let ratio = ratio_estimate(&u.iter().map(Scalar::to_f64).collect::<Vec<_>>());
    let summable = ratio < 1.0 - SUMMABLE_MARGIN;
    if !summable {
        let mut v = reject(u, true, DvdRejection::NonSummable { ratio });
        v.ratio_estimate = ratio;
        return v;
    }
    let total = u.iter().fold(T::zero(), |a, b| a + b.clone());
    let partner = u.iter().map(|v| v.clone() / total.clone()).collect();
    DvdVerdict {
        u,
        nonneg: true,
        summable_heuristic: true,
        ratio_estimate: ratio,
        accepted: true,
        rejection: None,
        partner: Some(partner),
    }
}

/// True iff every even-index coefficient of `log(φ/φ_0)` is within `tol` of zero.
pub fn self_reciprocal_check<T: Scalar>(phi: &Series<T>, n: usize, tol: f64) -> Result<bool> {
    let c0 = phi.coeff(0);
    if !(c0 > T::zero()) {
        return Err(Error::param("phi", c0, "constant term must be positive"));
    }
    let log = phi.scale(T::one() / c0).log(n)?;
    Ok(log.coeffs().iter().step_by(2).all(|c| c.to_f64().abs() <= tol))
}

/// `1 − 1/φ` has non-negative coefficients (within `tol`).
pub fn kaluza_check<T: Scalar>(phi: &Series<T>, n: usize, tol: f64) -> Result<bool> {
    let inv = phi.reciprocal(n)?;
    Ok(inv.coeffs().iter().skip(1).all(|c| c.to_f64() <= tol))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompoundGeometric<T> {
    pub sigma: Series<T>,
    pub nonnegative: bool,
}

/// `σ(z) = (1 − ψ_0/ψ(z))/z`, so that `ψ = ψ_0/(1 − zσ)`.
pub fn compound_geometric_extract<T: Scalar>(psi: &Series<T>, n: usize) -> Result<CompoundGeometric<T>> {
    let q0 = psi.coeff(0);
    if !(q0 > T::zero()) {
        return Err(Error::param("psi", q0, "constant term must be positive"));
    }
    let inv = psi.reciprocal(n + 1)?.scale(q0);
    let sigma = (&Series::one(n + 1) - &inv).shift_down().truncate(n);
    let nonnegative = sigma.coeffs().iter().all(|c| *c >= T::zero());
    Ok(CompoundGeometric { sigma, nonnegative })
}

/// First `(n, m)` with `p_{n+m} < p_n p_m − tol` (`θ > 0`), or `p_{n+m} > p_n p_m + tol` (`θ < 0`).
pub fn supermultiplicativity_violation(p: &[f64], theta: f64, tol: f64) -> Option<(usize, usize)> {
    for n in 1..p.len() {
        for m in 1..=n {
            if n + m >= p.len() {
                break;
            }
            let d = p[n + m] - p[n] * p[m];
            let bad = if theta > 0.0 { d < -tol } else { d > tol };
            if bad {
                return Some((n, m));
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SequenceShape {
    pub log_convex: bool,
    pub log_concave: bool,
    /// First `n` with `s_n s_{n+2} < s_{n+1}²` beyond slack.
    pub first_convexity_violation: Option<usize>,
    pub first_concavity_violation: Option<usize>,
    /// A zero or negative entry was met; verdicts cover the indices before it.
    pub non_positive_entry: Option<usize>,
}

/// Signs of `s_n s_{n+2} − s_{n+1}²` for `n ≥ start`, with slack `rel_tol · max(s_n s_{n+2}, s_{n+1}²)`.
pub fn log_shape<T: Scalar>(s: &[T], rel_tol: f64, start: usize) -> SequenceShape {
    let mut out = SequenceShape {
        log_convex: true,
        log_concave: true,
        ..Default::default()
    };
    let tol = T::from_f64(rel_tol);
    let stop = s.iter().skip(start).position(|v| *v <= T::zero()).map(|i| i + start);
    out.non_positive_entry = stop;
    let end = stop.unwrap_or(s.len());
    for n in start..end.saturating_sub(2) {
        let outer = s[n].clone() * s[n + 2].clone();
        let inner = s[n + 1].clone() * s[n + 1].clone();
        let slack = tol.clone() * if outer > inner { outer.clone() } else { inner.clone() };
        let d = outer - inner;
        if d < -slack.clone() && out.first_convexity_violation.is_none() {
            out.first_convexity_violation = Some(n);
            out.log_convex = false;
        }
        if d > slack && out.first_concavity_violation.is_none() {
            out.first_concavity_violation = Some(n);
            out.log_concave = false;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShapeReport {
    pub p: SequenceShape,
    pub q: SequenceShape,
    /// `exp((log p_N − log p_{N/2})/(N − N/2))`.
    pub lambda_by_root: Option<f64>,
    /// `q_N / q_{N−1}`.
    pub lambda_by_ratio: Option<f64>,
    /// Root of `zψ̃(z) = 1` when a series for `ψ̃` was supplied.
    pub mu_root: Option<f64>,
    /// Verdicts come from a noisy table.
    pub statistical: bool,
}

/// Shape verdicts for both columns of a table.
///
/// Monte Carlo tables use slack of three combined standard errors per comparison
/// instead of `rel_tol`; their verdicts are marked statistical.
pub fn shape_tests<T: Scalar>(
    table: &PersistTable<T>,
    rel_tol: f64,
    start: usize,
    psi_tilde: Option<&Series<f64>>,
) -> ShapeReport {
    let p = table.p();
    let q = table.q();
    let statistical = table.provenance == Provenance::Mc;
    let (p_shape, q_shape) = if statistical {
        let t = table.to_f64();
        (mc_shape(&t, false, start), mc_shape(&t, true, start))
    } else {
        (log_shape(&p, rel_tol, start), log_shape(&q, rel_tol, start))
    };
    let pf: Vec<f64> = p.iter().map(Scalar::to_f64).collect();
    let qf: Vec<f64> = q.iter().map(Scalar::to_f64).collect();
    ShapeReport {
        p: p_shape,
        q: q_shape,
        lambda_by_root: lambda_by_root(&pf),
        lambda_by_ratio: lambda_by_ratio(&qf),
        mu_root: psi_tilde.and_then(mu_root),
        statistical,
    }
}

fn mc_shape(t: &PersistTable<f64>, use_q: bool, start: usize) -> SequenceShape {
    let n_rows = t.rows.len();
    let val = |i: usize| if use_q { t.rows[i].q } else { t.rows[i].p };
    // q = p_n − p_{n+1}: its standard error is bounded by the sum of the two.
    let se = |i: usize| {
        let s = t.rows[i].stderr.unwrap_or(0.0);
        if use_q {
            s + t.rows.get(i + 1).and_then(|r| r.stderr).unwrap_or(s)
        } else {
            s
        }
    };
    let mut out = SequenceShape {
        log_convex: true,
        log_concave: true,
        ..Default::default()
    };
    for n in start..n_rows.saturating_sub(2) {
        if val(n) <= 0.0 || val(n + 1) <= 0.0 || val(n + 2) <= 0.0 {
            out.non_positive_entry = Some(n);
            break;
        }
        let d = val(n) * val(n + 2) - val(n + 1) * val(n + 1);
        // first-order error propagation
        let sd = val(n + 2) * se(n) + val(n) * se(n + 2) + 2.0 * val(n + 1) * se(n + 1);
        if d < -3.0 * sd && out.first_convexity_violation.is_none() {
            out.first_convexity_violation = Some(n);
            out.log_convex = false;
        }
        if d > 3.0 * sd && out.first_concavity_violation.is_none() {
            out.first_concavity_violation = Some(n);
            out.log_concave = false;
        }
    }
    out
}

fn last_positive(s: &[f64]) -> Option<usize> {
    s.iter().rposition(|v| *v > 0.0 && v.is_finite())
}

pub fn lambda_by_root(p: &[f64]) -> Option<f64> {
    let n = last_positive(p)?;
    let h = n / 2;
    if n < 2 || !(p[h] > 0.0) {
        return None;
    }
    Some(((p[n].ln() - p[h].ln()) / (n - h) as f64).exp())
}

pub fn lambda_by_ratio(q: &[f64]) -> Option<f64> {
    let n = last_positive(q)?;
    (n >= 1 && q[n - 1] > 0.0).then(|| q[n] / q[n - 1])
}

/// `inf{z ≥ 1 : zψ̃(z) ≥ 1}` by bisection on `[1, R)`, `R` the ratio-test radius.
pub fn mu_root(psi: &Series<f64>) -> Option<f64> {
    let c = psi.coeffs();
    let k = c.iter().rposition(|v| *v != 0.0)?;
    let radius = if k >= 1 && c[k - 1] != 0.0 {
        (c[k - 1] / c[k]).abs()
    } else {
        f64::INFINITY
    };
    let h = |z: f64| z * psi.eval_f64(z) - 1.0;
    if h(1.0) >= 0.0 {
        return Some(1.0);
    }
    let mut hi = if radius.is_finite() { radius * (1.0 - 1e-9) } else { 2.0 };
    if !radius.is_finite() {
        while h(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return None;
            }
        }
    }
    if hi <= 1.0 || h(hi) < 0.0 {
        return None;
    }
    let mut lo = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightSign {
    pub n: usize,
    pub weight: f64,
    pub sign: i8,
}

/// Weights `a_1..a_N` of `φ` and their signs (zero within `tol`).
pub fn weight_signs(p: &[f64], n: usize, tol: f64) -> Result<Vec<WeightSign>> {
    let phi = Series::new(p.to_vec());
    let a = weights(&phi, n.min(phi.order()))?;
    Ok(a.into_iter()
        .enumerate()
        .skip(1)
        .map(|(n, w)| WeightSign {
            n,
            weight: w,
            sign: if w > tol {
                1
            } else if w < -tol {
                -1
            } else {
                0
            },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace::*;
    use crate::series::weights;
    use crate::Rational;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn theorem_a_examples() {
        let p = pos_drift_table(0.5, 41).unwrap().p();
        let inv = inverse_drift_table(0.5, 41).unwrap().p();
        assert!(verify_theorem_a(&p, &inv, 40) < 1e-9);
        let ones = vec![r(1, 1); 20];
        let unit: Vec<Rational> = std::iter::once(r(1, 1)).chain(vec![r(0, 1); 19]).collect();
        assert_eq!(verify_theorem_a(&unit, &ones, 19), 0.0);
    }

    #[test]
    fn van_dantzig_examples() {
        let a = neg_drift_phi_series(&r(-1, 2), &r(7, 10), 50).unwrap();
        let b = neg_drift_phi_series(&r(-2, 1), &r(7, 10), 50).unwrap();
        assert_eq!(verify_van_dantzig(&a, &b, 50), 0.0);
        let self_rec = Series::from_poly(&[r(2, 1), r(1, 1)], 40)
            .div(&Series::from_poly(&[r(2, 1), r(-1, 1)], 40), 40)
            .unwrap();
        assert_eq!(verify_van_dantzig(&self_rec, &self_rec, 40), 0.0);
        assert_eq!(verify_van_dantzig(&Series::<f64>::one(5), &Series::one(5), 5), 0.0);
        // φ_{−1} with ρ = 1 is that rational function
        let phi = neg_drift_phi_series(&r(-1, 1), &r(1, 1), 40).unwrap();
        assert_eq!(phi, self_rec);
    }

    #[test]
    fn dvd_examples() {
        let geo: Vec<Rational> = (0..30).map(|n| Rational::from_ratio(1, 1i64 << (n + 1))).collect();
        let v = dvd_solve(&geo, 29);
        assert!(v.accepted);
        assert_eq!(&v.u[..3], &[r(1, 1), r(1, 2), r(0, 1)]);
        assert!(v.u[3..].iter().all(|u| *u == r(0, 1)));
        let partner = v.partner.unwrap();
        assert_eq!(&partner[..2], &[r(2, 3), r(1, 3)]);

        let v = dvd_solve(&[r(1, 3), r(2, 3)], 40);
        assert!(v.nonneg && !v.summable_heuristic && !v.accepted);
        assert_eq!(v.u[10], r(1024, 1));
        assert!(matches!(v.rejection, Some(DvdRejection::NonSummable { .. })));

        let v = dvd_solve(&[0.0, 0.5, 0.5], 10);
        assert_eq!(v.rejection, Some(DvdRejection::NonPositiveConstant));
    }

    #[test]
    fn dvd_accepts_negative_drift_series() {
        for &(theta, rho) in &[(-0.5f64, 0.7f64), (-2.0, 0.4), (-0.9, 0.9)] {
            let phi = neg_drift_phi_series(&theta, &rho, 80).unwrap();
            let v = dvd_solve(phi.coeffs(), 80);
            assert!(v.accepted, "theta {theta} rho {rho}: {:?}", v.rejection);
            // the partner is φ_{1/θ}
            let inv = neg_drift_phi_series(&(1.0 / theta), &rho, 80).unwrap();
            for n in 0..20 {
                assert!((v.u[n] - inv.coeff(n)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn self_reciprocal_examples() {
        let phi = neg_drift_phi_series(&r(-1, 1), &r(1, 1), 30).unwrap();
        assert!(self_reciprocal_check(&phi, 30, 0.0).unwrap());
        let geo = Series::geometric(0.3, 30);
        assert!(!self_reciprocal_check(&geo, 30, 1e-12).unwrap());
        assert!(self_reciprocal_check(&Series::<f64>::one(10), 10, 0.0).unwrap());
        // ψ_θ is self-reciprocal exactly when θ = ρ − 1
        let psi = neg_drift_psi_series(&r(-1, 2), &r(1, 2), 30).unwrap();
        assert!(self_reciprocal_check(&psi, 30, 0.0).unwrap());
        let psi = neg_drift_psi_series(&r(-1, 2), &r(7, 10), 30).unwrap();
        assert!(!self_reciprocal_check(&psi, 30, 0.0).unwrap());
    }

    #[test]
    fn shape_examples() {
        let t = pos_drift_table(r(1, 2), 31).unwrap();
        let rep = shape_tests(&t, 0.0, 0, None);
        assert!(rep.q.log_convex);
        assert!(rep.p.log_convex);
        let lam = rep.lambda_by_ratio.unwrap();
        assert!((lam - 0.712_667_558).abs() < 1e-3);

        let t = neg_drift_table(r(-1, 2), r(7, 10), 30).unwrap();
        let rep = shape_tests(&t, 0.0, 0, None);
        assert!(rep.q.log_concave);
        assert!(rep.p.log_concave && !rep.p.log_convex);
        assert_eq!(rep.p.first_convexity_violation, Some(0));
        let tail = log_shape(&t.q(), 0.0, 1);
        assert!(tail.log_convex && tail.log_concave);

        let geo: Vec<f64> = (0..20).map(|n| 3.0 * 0.4f64.powi(n)).collect();
        let s = log_shape(&geo, 1e-12, 0);
        assert!(s.log_convex && s.log_concave);
    }

    #[test]
    fn mu_root_is_reciprocal_of_decay_rate() {
        // ψ̃_{1/θ} has coefficients θ^n q_n(θ); 1 − 1/φ_θ = zψ̃_{1/θ} vanishes where φ_θ has its pole z_0
        let q = pos_drift_q(&0.5, 200).unwrap();
        let psi = Series::new(q).scale_argument(0.5);
        let mu = mu_root(&psi).unwrap();
        assert!((mu - 1.403_178_787).abs() < 1e-6);
    }

    #[test]
    fn compound_geometric_examples() {
        let psi = Series::new(pos_drift_q(&0.5, 25).unwrap());
        let cg = compound_geometric_extract(&psi, 20).unwrap();
        let sigma = sigma_series(&0.5, 20).unwrap();
        assert!(cg.nonnegative);
        assert!(cg.sigma.max_abs_diff(&sigma, 20) < 1e-9);

        // ψ_1 = (1 − √(1−z))/z has coefficients C_n/2^{2n+1}
        let psi = Series::new((0..=15).map(catalan_reference).collect::<Vec<_>>());
        let cg = compound_geometric_extract(&psi, 14).unwrap();
        assert!(cg.nonnegative && cg.sigma.coeffs().iter().all(|c| *c > r(0, 1)));
        assert_eq!(cg.sigma.coeff(0), r(1, 4));

        let cg = compound_geometric_extract(&Series::constant(r(1, 2), 5), 5).unwrap();
        assert!(cg.sigma.coeffs().iter().all(|c| *c == r(0, 1)));
    }

    #[test]
    fn kaluza_and_weight_duality() {
        let p = pos_drift_table(r(1, 3), 25).unwrap().p();
        let phi = Series::new(p);
        assert!(kaluza_check(&phi, 24, 0.0).unwrap());
        // weights(φ_θ) + weights(φ_{1/θ}) = 1
        let pf = pos_drift_table(0.5, 31).unwrap().p();
        let pi = inverse_drift_table(0.5, 31).unwrap().p();
        let a = weights(&Series::new(pf), 30).unwrap();
        let b = weights(&Series::new(pi), 30).unwrap();
        for n in 1..=30 {
            assert!((a[n] + b[n] - 1.0).abs() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn strong_negative_drift_weight_signs() {
        let phi = neg_drift_phi_series(&r(-2, 1), &r(1, 1), 10).unwrap();
        assert_eq!(weights(&phi, 10).unwrap()[2], r(-1, 3));
        for &theta in &[-0.1, -0.5, -0.9] {
            let phi = neg_drift_phi_series(&theta, &0.7, 10).unwrap();
            assert!(weights(&phi, 10).unwrap()[2] > 0.0);
        }
        let signs = weight_signs(neg_drift_phi_series(&-0.5, &0.7, 12).unwrap().coeffs(), 12, 1e-14).unwrap();
        assert!(signs.iter().all(|s| s.sign == 1));
    }

    #[test]
    fn supermultiplicativity() {
        let p = pos_drift_table(0.5, 20).unwrap().p();
        assert_eq!(supermultiplicativity_violation(&p, 0.5, 1e-14), None);
        let p = neg_drift_table(-0.5, 0.7, 20).unwrap().p();
        assert_eq!(supermultiplicativity_violation(&p, -0.5, 1e-14), None);
        assert!(supermultiplicativity_violation(&p, 0.5, 1e-14).is_some());
    }

    proptest! {
        #[test]
        fn dvd_partner_satisfies_pair_identity(a in 0.05f64..0.95, b in 0.0f64..1.0) {
            let s = vec![a, (1.0 - a) * b, (1.0 - a) * (1.0 - b)];
            let v = dvd_solve(&s, 30);
            let f = Series::new(s.clone()).negate_argument();
            let prod = f.mul(&Series::new(v.u.clone()), 30);
            prop_assert!((prod.coeff(0) - a).abs() < 1e-12);
            for n in 1..=30 {
                prop_assert!(prod.coeff(n).abs() <= 1e-9 * v.u.iter().fold(1.0f64, |m, u| m.max(u.abs())));
            }
        }

        #[test]
        fn geometric_sequences_are_both_shapes(c in 0.1f64..10.0, ratio in 0.05f64..0.99) {
            let s: Vec<f64> = (0..25).map(|n| c * ratio.powi(n)).collect();
            let v = log_shape(&s, 1e-12, 0);
            prop_assert!(v.log_convex && v.log_concave);
        }
    }
}
