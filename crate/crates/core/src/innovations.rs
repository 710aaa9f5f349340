//! Innovation laws driving the chain: density, CDF, sampler, kinks and shape flags.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SamplerFn = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;

/// A caller-supplied law. Shape flags are never inferred for these.
#[derive(Clone)]
pub struct CustomLaw {
    pub name: String,
    pub density: DensityFn,
    pub cdf: DensityFn,
    pub sampler: SamplerFn,
    /// Points where the density is not smooth (quadrature splits cells there).
    pub kinks: Vec<f64>,
}

impl fmt::Debug for CustomLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomLaw")
            .field("name", &self.name)
            .field("kinks", &self.kinks)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum Family {
    /// Density `(1−ρ) a e^{a x}` on `x < 0` and `ρ b e^{−b x}` on `x > 0`.
    Laplace { a: f64, b: f64, rho: f64 },
    Gaussian { sigma: f64 },
    Uniform { lo: f64, hi: f64 },
    Custom(CustomLaw),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShapeFlags {
    pub atomless: bool,
    pub log_concave_density: bool,
    pub log_convex_on_positive_halfline: bool,
}

#[derive(Clone, Debug)]
pub struct Innovation {
    family: Family,
    flags: ShapeFlags,
}

impl Innovation {
    pub fn laplace(a: f64, b: f64, rho: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::param("a", a, "Laplace rate must be positive"));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::param("b", b, "Laplace rate must be positive"));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::param("rho", rho, "positive mass must lie in (0, 1]"));
        }
        // log f is piecewise linear; concave iff it does not jump at 0.
        let left = (1.0 - rho) * a;
        let right = rho * b;
        let continuous = (left - right).abs() <= 1e-12 * right;
        Ok(Innovation {
            family: Family::Laplace { a, b, rho },
            flags: ShapeFlags {
                atomless: true,
                log_concave_density: continuous || rho == 1.0,
                log_convex_on_positive_halfline: true,
            },
        })
    }

    /// Density `e^{−|x|}/2`.
    pub fn symmetric_laplace() -> Self {
        Self::laplace(1.0, 1.0, 0.5).expect("valid parameters")
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", sigma, "scale must be positive"));
        }
        Ok(Innovation {
            family: Family::Gaussian { sigma },
            flags: ShapeFlags {
                atomless: true,
                log_concave_density: true,
                log_convex_on_positive_halfline: false,
            },
        })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::param("hi", hi, "uniform law needs finite lo < hi"));
        }
        Ok(Innovation {
            family: Family::Uniform { lo, hi },
            flags: ShapeFlags {
                atomless: true,
                log_concave_density: true,
                // Constant on (0, hi) then zero: only log-convex on R+ if it never drops there.
                log_convex_on_positive_halfline: hi <= 0.0,
            },
        })
    }

    pub fn custom(law: CustomLaw, flags: ShapeFlags) -> Self {
        Innovation {
            family: Family::Custom(law),
            flags,
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn flags(&self) -> ShapeFlags {
        self.flags
    }

    pub fn name(&self) -> &str {
        match &self.family {
            Family::Laplace { .. } => "laplace",
            Family::Gaussian { .. } => "gaussian",
            Family::Uniform { .. } => "uniform",
            Family::Custom(law) => &law.name,
        }
    }

    /// Family parameters as `(name, value)` pairs.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match &self.family {
            Family::Laplace { a, b, rho } => vec![("a", *a), ("b", *b), ("rho", *rho)],
            Family::Gaussian { sigma } => vec![("sigma", *sigma)],
            Family::Uniform { lo, hi } => vec![("a", *lo), ("b", *hi)],
            Family::Custom(_) => vec![],
        }
    }

    pub fn is_symmetric_laplace(&self) -> bool {
        matches!(self.family, Family::Laplace { a, b, rho } if a == b && rho == 0.5)
    }

    /// Density at `x`. The Laplace density takes its right limit at 0.
    pub fn density(&self, x: f64) -> f64 {
        match &self.family {
            Family::Laplace { a, b, rho } => {
                if x < 0.0 {
                    (1.0 - rho) * a * (a * x).exp()
                } else {
                    rho * b * (-b * x).exp()
                }
            }
            Family::Gaussian { sigma } => {
                let u = x / sigma;
                (-0.5 * u * u).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            Family::Uniform { lo, hi } => {
                if x >= *lo && x <= *hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Family::Custom(law) => (law.density)(x),
        }
    }

    /// `P[X ≤ x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.family {
            Family::Laplace { a, b, rho } => {
                if x < 0.0 {
                    (1.0 - rho) * (a * x).exp()
                } else {
                    1.0 - rho * (-b * x).exp()
                }
            }
            Family::Gaussian { sigma } => 0.5 * libm::erfc(-x / (sigma * std::f64::consts::SQRT_2)),
            Family::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Family::Custom(law) => (law.cdf)(x),
        }
    }

    /// `P[X > x]`, without the cancellation of `1 − cdf` where a closed form exists.
    pub fn survival(&self, x: f64) -> f64 {
        match &self.family {
            Family::Laplace { a, b, rho } => {
                if x < 0.0 {
                    1.0 - (1.0 - rho) * (a * x).exp()
                } else {
                    rho * (-b * x).exp()
                }
            }
            Family::Gaussian { sigma } => 0.5 * libm::erfc(x / (sigma * std::f64::consts::SQRT_2)),
            _ => 1.0 - self.cdf(x),
        }
    }

    /// `P[X > 0]`.
    pub fn positive_mass(&self) -> f64 {
        self.survival(0.0)
    }

    /// Points where the density is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.family {
            Family::Laplace { .. } => vec![0.0],
            Family::Gaussian { .. } => vec![],
            Family::Uniform { lo, hi } => vec![*lo, *hi],
            Family::Custom(law) => law.kinks.clone(),
        }
    }

    /// Smallest `u ≥ 0` with `P[X > u] ≤ eps` (up to bisection resolution).
    pub fn upper_quantile_bound(&self, eps: f64) -> f64 {
        if self.survival(0.0) <= eps {
            return 0.0;
        }
        let mut hi = 1.0;
        while self.survival(hi) > eps {
            hi *= 2.0;
            if hi > 1e12 {
                return hi;
            }
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.survival(mid) > eps {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// One draw.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match &self.family {
            Family::Laplace { a, b, rho } => {
                let u: f64 = rng.random();
                let e: f64 = rng.sample(Exp1);
                if u < *rho {
                    e / b
                } else {
                    -e / a
                }
            }
            Family::Gaussian { sigma } => {
                let g: f64 = rng.sample(StandardNormal);
                sigma * g
            }
            Family::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Family::Custom(law) => (law.sampler)(rng),
        }
    }
}
