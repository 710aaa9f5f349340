use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Where the numbers in a table came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Recursion,
    Spectral,
    Mc,
    Quadrature,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Exact => "exact",
            Provenance::Recursion => "recursion",
            Provenance::Spectral => "spectral",
            Provenance::Mc => "mc",
            Provenance::Quadrature => "quadrature",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PersistRow<T> {
    pub n: usize,
    pub p: T,
    pub q: T,
    /// Standard error of `p`, for stochastic tables.
    pub stderr: Option<f64>,
}

/// Per-`n` persistence probabilities `p_n` and first-passage masses `q_n = p_n − p_{n+1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PersistTable<T> {
    pub theta: f64,
    pub rows: Vec<PersistRow<T>>,
    pub provenance: Provenance,
    /// `P[T = ∞]`; zero outside the `θ > 1` regime.
    pub defect: T,
}

impl<T: Scalar> PersistTable<T> {
    /// Builds rows `0..q.len()` from the mass function, with `p_n = 1 − Σ_{k<n} q_k`.
    pub fn from_q(theta: f64, q: Vec<T>, provenance: Provenance, defect: T) -> Self {
        let mut p = T::one();
        let rows = q
            .into_iter()
            .enumerate()
            .map(|(n, qn)| {
                let row = PersistRow {
                    n,
                    p: p.clone(),
                    q: qn.clone(),
                    stderr: None,
                };
                p = p.clone() - qn;
                row
            })
            .collect();
        PersistTable {
            theta,
            rows,
            provenance,
            defect,
        }
    }

    /// Builds rows `0..p.len()−1` from `p_0..p_{N+1}`.
    pub fn from_p(theta: f64, p: &[T], provenance: Provenance, defect: T) -> Self {
        let rows = p
            .windows(2)
            .enumerate()
            .map(|(n, w)| PersistRow {
                n,
                p: w[0].clone(),
                q: w[0].clone() - w[1].clone(),
                stderr: None,
            })
            .collect();
        PersistTable {
            theta,
            rows,
            provenance,
            defect,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn p(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.p.clone()).collect()
    }

    pub fn q(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.q.clone()).collect()
    }

    pub fn to_f64(&self) -> PersistTable<f64> {
        PersistTable {
            theta: self.theta,
            rows: self
                .rows
                .iter()
                .map(|r| PersistRow {
                    n: r.n,
                    p: r.p.to_f64(),
                    q: r.q.to_f64(),
                    stderr: r.stderr,
                })
                .collect(),
            provenance: self.provenance,
            defect: self.defect.to_f64(),
        }
    }

    /// Checks `p_0 = 1`, monotonicity, `q_n ≥ 0`, the row identity and `defect + Σq ≤ 1`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let fail = |msg: String| Err(Error::Invariant(msg));
        let Some(first) = self.rows.first() else {
            return Ok(());
        };
        if (first.p.to_f64() - 1.0).abs() > tol {
            return fail(format!("p_0 = {} != 1", first.p));
        }
        let mut mass = self.defect.to_f64();
        for (i, row) in self.rows.iter().enumerate() {
            let q = row.q.to_f64();
            if q < -tol {
                return fail(format!("q_{} = {q} < 0", row.n));
            }
            mass += q;
            if let Some(next) = self.rows.get(i + 1) {
                if next.p.to_f64() > row.p.to_f64() + tol {
                    return fail(format!("p not non-increasing at n = {}", row.n));
                }
                let gap = (row.p.clone() - next.p.clone() - row.q.clone()).to_f64();
                if gap.abs() > tol {
                    return fail(format!("p_{0} − p_{{{0}+1}} != q_{0} (gap {gap})", row.n));
                }
            }
        }
        if mass > 1.0 + tol {
            return fail(format!("defect + Σ q_n = {mass} > 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_from_q_and_p_agree() {
        let q = vec![0.5, 0.25, 0.125];
        let t = PersistTable::from_q(1.0, q, Provenance::Exact, 0.0);
        assert_eq!(t.p(), vec![1.0, 0.5, 0.25]);
        let t2 = PersistTable::from_p(1.0, &[1.0, 0.5, 0.25, 0.125], Provenance::Exact, 0.0);
        assert_eq!(t, t2);
        t.check_invariants(1e-15).unwrap();
    }

    #[test]
    fn invariant_breach_is_reported() {
        let t = PersistTable::from_p(0.5, &[1.0, 0.4, 0.6], Provenance::Mc, 0.0);
        assert!(matches!(t.check_invariants(1e-9), Err(Error::Invariant(_))));
    }
}
