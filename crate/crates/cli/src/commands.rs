use persist_lab::estimate::{self, McConfig, QuadConfig, Rule};
use persist_lab::factor::{self, DvdRejection};
use persist_lab::laplace;
use persist_lab::scalar::parse_rational;
use persist_lab::spectral;
use persist_lab::{Error, Innovation, PersistTable, Rational, Scalar, Series};
use serde_json::{json, Value};

use crate::args::{Experiment, FamilyArg, Identity, Opts, RuleArg, Source};
use crate::report::{Cell, Report};

/// Largest `n` computed in exact rational arithmetic; beyond it doubles are used.
const RATIONAL_LIMIT: usize = 200;

/// Failure classes mapped to exit codes 1 and 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } => Failure::Usage(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Out<T> {
    Err(Failure::Usage(msg.into()))
}

/// `θ` as a double and, when the text is a plain decimal or fraction, as an exact rational.
pub struct Theta {
    pub value: f64,
    pub exact: Option<Rational>,
}

pub fn theta(opts: &Opts) -> Out<Theta> {
    let Some(text) = opts.theta.as_deref() else {
        return usage("--theta is required for this command");
    };
    number(text, "--theta").map(|(value, exact)| Theta { value, exact })
}

fn number(text: &str, flag: &str) -> Out<(f64, Option<Rational>)> {
    let exact = parse_rational(text);
    let value = match &exact {
        Some(r) => r.to_f64(),
        None => match text.trim().parse::<f64>() {
            Ok(v) => v,
            Err(_) => return usage(format!("{flag}: cannot parse '{text}' as a number")),
        },
    };
    if !value.is_finite() {
        return usage(format!("{flag} must be finite"));
    }
    Ok((value, exact))
}

fn rho(opts: &Opts) -> Out<(f64, Option<Rational>)> {
    number(&opts.rho, "--rho")
}

pub fn innovation(opts: &Opts) -> Out<Innovation> {
    Ok(match opts.family {
        FamilyArg::Laplace => Innovation::laplace(opts.a, opts.b, rho(opts)?.0)?,
        FamilyArg::Gaussian => Innovation::gaussian(opts.sigma)?,
        FamilyArg::Uniform => Innovation::uniform(opts.lo, opts.hi)?,
    })
}

fn quad_config(opts: &Opts) -> QuadConfig {
    QuadConfig {
        grid_points: opts.grid,
        domain_max: opts.zmax,
        rule: match opts.rule {
            RuleArg::Trapezoid => Rule::Trapezoid,
            RuleArg::Simpson => Rule::Simpson,
        },
    }
}

fn mc_config(opts: &Opts) -> McConfig {
    McConfig {
        paths: opts.paths,
        horizon: opts.horizon.unwrap_or(opts.n),
        seed: opts.seed,
        block_size: opts.block_size,
        x0: opts.x0,
        threads: None,
    }
}

fn is_symmetric_laplace(opts: &Opts, inn: &Innovation) -> bool {
    opts.family == FamilyArg::Laplace && inn.is_symmetric_laplace()
}

fn table_report(command: &str, table: &PersistTable<f64>, exact: Option<&PersistTable<Rational>>) -> Report {
    let rows = table
        .rows
        .iter()
        .map(|r| vec![r.n.into(), r.p.into(), r.q.into(), r.stderr.into()])
        .collect();
    let mut result = json!({
        "theta": table.theta,
        "defect": table.defect,
        "provenance": table.provenance,
        "rows": table.rows,
    });
    if let Some(t) = exact {
        let ex: Vec<Value> = t
            .rows
            .iter()
            .map(|r| json!({"n": r.n, "p": r.p.to_string(), "q": r.q.to_string()}))
            .collect();
        result["exact_rows"] = Value::Array(ex);
    }
    Report {
        command: command.to_string(),
        provenance: vec![table.provenance.to_string()],
        header: vec!["n", "p", "q", "stderr"],
        rows,
        result,
        plot: table.rows.iter().map(|r| (r.n as f64, r.p)).collect(),
        summary: format!(
            "{command}: theta = {}, n = 0..={}, provenance {}",
            table.theta,
            table.rows.len().saturating_sub(1),
            table.provenance
        ),
        violation: None,
    }
}

/// Exact Laplace table for either drift sign, in rationals when possible.
fn laplace_table(opts: &Opts, th: &Theta, n: usize) -> Out<(PersistTable<f64>, Option<PersistTable<Rational>>)> {
    if opts.family != FamilyArg::Laplace {
        return usage("exact tables exist only for --family laplace");
    }
    let (rho_f, rho_q) = rho(opts)?;
    let small = n <= RATIONAL_LIMIT;
    if th.value < 0.0 {
        // the answer depends on θ and ρ only
        if let (true, Some(t), Some(r)) = (small, &th.exact, &rho_q) {
            let exact = laplace::neg_drift_table(t.clone(), r.clone(), n)?;
            return Ok((exact.to_f64(), Some(exact)));
        }
        return Ok((laplace::neg_drift_table(th.value, rho_f, n)?, None));
    }
    if th.value == 0.0 {
        return usage("--theta 0 is the i.i.d. case; use a non-zero drift");
    }
    if !(opts.a == opts.b && rho_f == 0.5) {
        return usage("positive drift is implemented for symmetric Laplace only (--a = --b, --rho 0.5)");
    }
    if th.value > 1.0 {
        return Ok((laplace::inverse_drift_table(1.0 / th.value, n)?, None));
    }
    if let (true, Some(t)) = (small, &th.exact) {
        let exact = laplace::pos_drift_table(t.clone(), n)?;
        return Ok((exact.to_f64(), Some(exact)));
    }
    Ok((laplace::pos_drift_table(th.value, n)?, None))
}

pub fn exact(opts: &Opts) -> Out<Report> {
    let th = theta(opts)?;
    let (table, exact) = laplace_table(opts, &th, opts.n)?;
    table.check_invariants(1e-12)?;
    Ok(table_report("exact", &table, exact.as_ref()))
}

pub fn mc(opts: &Opts) -> Out<Report> {
    let th = theta(opts)?;
    let inn = innovation(opts)?;
    let cfg = mc_config(opts);
    let table = estimate::mc_persistence(&inn, th.value, &cfg)?;
    let mut report = table_report("mc", &table, None);
    let mean_truncated: f64 = table.rows.iter().skip(1).map(|r| r.p).sum();
    let last = table.rows.last().map_or(0.0, |r| r.p);
    report.result["summary"] = json!({
        "mean_t_truncated": mean_truncated,
        "survival_at_horizon": last,
        "censored": last > 0.0,
        "paths": cfg.paths,
        "block_size": cfg.block_size,
    });
    Ok(report)
}

pub fn quad(opts: &Opts) -> Out<Report> {
    let th = theta(opts)?;
    let inn = innovation(opts)?;
    let cfg = quad_config(opts);
    let table = estimate::quad_persistence(&inn, th.value, opts.n, &cfg)?;
    let mut report = table_report("quad", &table, None);
    report.result["grid"] = json!({
        "intervals": cfg.grid_points,
        "zmax": cfg.domain_max.unwrap_or_else(|| estimate::default_domain(&inn, th.value)),
        "rule": cfg.rule,
    });
    if opts.richardson {
        let r = estimate::quad_richardson(&inn, th.value, opts.n, &cfg)?;
        report.summary = format!("{}; Richardson error estimate {:e}", report.summary, r.error_estimate);
        report.result["richardson"] = serde_json::to_value(r).expect("plain data");
    }
    Ok(report)
}

pub fn spectral_cmd(opts: &Opts) -> Out<Report> {
    let th = theta(opts)?;
    let spec = spectral::spectrum(th.value, opts.depth, opts.tol)?;
    let intervals = spectral::ltz_intervals(&spec);
    let rows = (0..spec.depth)
        .map(|i| {
            vec![
                i.into(),
                spec.zeroes[i].into(),
                spec.masses[i].into(),
                spec.coeffs[i].into(),
                intervals[i].lo.into(),
                intervals[i].hi.into(),
            ]
        })
        .collect();
    let table: Vec<Value> = (0..=opts.n)
        .map(|n| {
            let q = spectral::spectral_q(&spec, n);
            let p = spectral::spectral_p(&spec, n, false);
            let pi = spectral::spectral_p(&spec, n, true);
            let (a, a_inv) = spectral::spectral_weights(&spec, n);
            json!({
                "n": n,
                "q": q.value, "q_bound": q.truncation_bound,
                "p": p.value, "p_bound": p.truncation_bound,
                "p_inverse_drift": pi.value, "p_inverse_drift_bound": pi.truncation_bound,
                "a": a, "a_inverse_drift": a_inv,
            })
        })
        .collect();
    let plot = (0..=opts.n)
        .map(|n| (n as f64, spectral::spectral_q(&spec, n).value))
        .collect();
    Ok(Report {
        command: "spectral".into(),
        provenance: vec!["spectral".into()],
        header: vec!["i", "z", "x", "c", "interval_lo", "interval_hi"],
        rows,
        summary: format!(
            "spectral: theta = {}, depth {}, x_0 = {}, c_0 = {}, defect of 1/theta = {}",
            spec.theta, spec.depth, spec.masses[0], spec.coeffs[0], spec.defect
        ),
        result: json!({
            "spectrum": spec,
            "intervals": intervals,
            "complement": spectral::ltz_complement(&spec),
            "table": table,
        }),
        plot,
        violation: None,
    })
}

/// `p_0..p_{n+1}` for the configured law: exact for Laplace, quadrature otherwise.
fn persistence(opts: &Opts, th: &Theta, n: usize, source: Source) -> Out<PersistTable<f64>> {
    match source {
        Source::Exact => Ok(laplace_table(opts, th, n)?.0),
        Source::Quad => Ok(estimate::quad_persistence(&innovation(opts)?, th.value, n, &quad_config(opts))?),
        Source::Mc => {
            let cfg = McConfig {
                horizon: n,
                ..mc_config(opts)
            };
            Ok(estimate::mc_persistence(&innovation(opts)?, th.value, &cfg)?)
        }
    }
}

fn default_source(opts: &Opts) -> Source {
    opts.source.unwrap_or(if opts.family == FamilyArg::Laplace {
        Source::Exact
    } else {
        Source::Quad
    })
}

pub fn weights(opts: &Opts) -> Out<Report> {
    let th = theta(opts)?;
    let n = opts.n;
    let source = default_source(opts);
    let table = persistence(opts, &th, n + 1, source)?;
    let phi = Series::new(table.p());
    let a = persistence_lab_weights(&phi, n)?;
    let inn = innovation(opts)?;
    let reference: Vec<Option<f64>> = if source == Source::Exact && th.value < 0.0 {
        let r = rho(opts)?.0;
        (0..=n).map(|k| Some(laplace::neg_drift_weights(&th.value, &r, k))).collect()
    } else if source == Source::Exact && is_symmetric_laplace(opts, &inn) && th.value != 1.0 {
        let inverse = th.value > 1.0;
        let t = if inverse { 1.0 / th.value } else { th.value };
        let spec = spectral::find_zeroes(t, opts.depth, opts.tol)?;
        (0..=n)
            .map(|k| {
                let (w, w_inv) = spectral::spectral_weights(&spec, k);
                Some(if inverse { w_inv } else { w })
            })
            .collect()
    } else {
        vec![None; n + 1]
    };
    let rows = (1..=n)
        .map(|k| vec![k.into(), a[k].into(), reference[k].into()])
        .collect();
    let max_gap = (1..=n)
        .filter_map(|k| reference[k].map(|r| (r - a[k]).abs()))
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
    Ok(Report {
        command: "weights".into(),
        provenance: vec![table.provenance.to_string()],
        header: vec!["n", "weight", "reference"],
        rows,
        result: json!({
            "theta": th.value,
            "weights": &a[1..],
            "reference": &reference[1..],
            "max_abs_gap": max_gap,
        }),
        plot: (1..=n).map(|k| (k as f64, a[k])).collect(),
        summary: match max_gap {
            Some(g) => format!("weights: a_1..a_{n}, max |series − reference| = {g:e}"),
            None => format!("weights: a_1..a_{n} from the series logarithm"),
        },
        violation: None,
    })
}

fn persistence_lab_weights(phi: &Series<f64>, n: usize) -> Out<Vec<f64>> {
    Ok(persist_lab::series::weights(phi, n)?)
}

pub fn dvd(opts: &Opts) -> Out<Report> {
    let Some(text) = opts.mass.as_deref() else {
        return usage("dvd needs --mass s0,s1,...");
    };
    let parts: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if parts.is_empty() {
        return usage("--mass is empty");
    }
    let mut exact = Vec::with_capacity(parts.len());
    for p in &parts {
        match parse_rational(p) {
            Some(r) => exact.push(r),
            None => return usage(format!("--mass: cannot parse '{p}'")),
        }
    }
    if exact.iter().any(|s| *s < Rational::from_i64(0)) {
        return usage("--mass entries must be non-negative");
    }
    let v = factor::dvd_solve(&exact, opts.order);
    let verdict = if v.accepted {
        format!("accepted: partner mass function, growth ratio {}", v.ratio_estimate)
    } else {
        match v.rejection {
            Some(DvdRejection::NonPositiveConstant) => {
                "rejected: s_0 must be positive for a discrete Van Dantzig pair".to_string()
            }
            Some(DvdRejection::NegativeEntry { index }) => format!("rejected: negative partner entry u_{index}"),
            Some(DvdRejection::NonSummable { ratio }) => {
                format!("rejected: non-summable partner (growth ratio {ratio})")
            }
            None => "rejected".to_string(),
        }
    };
    let u: Vec<f64> = v.u.iter().map(Scalar::to_f64).collect();
    let partner: Option<Vec<f64>> = v.partner.as_ref().map(|p| p.iter().map(Scalar::to_f64).collect());
    let rows = u
        .iter()
        .enumerate()
        .map(|(n, x)| vec![n.into(), (*x).into(), partner.as_ref().map(|p| p[n]).into()])
        .collect();
    Ok(Report {
        command: "dvd".into(),
        provenance: vec!["exact".into()],
        header: vec!["n", "u", "partner"],
        rows,
        result: json!({
            "mass": exact.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "accepted": v.accepted,
            "nonneg": v.nonneg,
            "summable_heuristic": v.summable_heuristic,
            "ratio_estimate": if v.ratio_estimate.is_finite() { Some(v.ratio_estimate) } else { None },
            "rejection": v.rejection,
            "verdict": verdict,
            "u": u,
            "u_exact": v.u.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "partner": partner,
        }),
        plot: u.iter().enumerate().map(|(n, x)| (n as f64, *x)).collect(),
        summary: verdict,
        violation: None,
    })
}

fn residual_report(
    command: &str,
    provenance: Vec<String>,
    label: &'static str,
    residuals: Vec<(usize, f64, f64)>,
    tolerance: f64,
    invariant: &str,
    extra: Value,
) -> Report {
    let max = residuals.iter().map(|r| r.2).fold(0.0, f64::max);
    let ok = max <= tolerance;
    let rows = residuals
        .iter()
        .map(|(n, v, r)| vec![(*n).into(), (*v).into(), (*r).into()])
        .collect();
    Report {
        command: command.into(),
        provenance,
        header: vec!["n", label, "residual"],
        plot: residuals.iter().map(|(n, _, r)| (*n as f64, *r)).collect(),
        rows,
        result: json!({
            "max_residual": max,
            "tolerance": tolerance,
            "passed": ok,
            "residuals": residuals.iter().map(|r| r.2).collect::<Vec<_>>(),
            "details": extra,
        }),
        summary: format!(
            "{command}: max residual {max:e} over n <= {} (tolerance {tolerance:e}): {}",
            residuals.last().map_or(0, |r| r.0),
            if ok { "ok" } else { "FAILED" }
        ),
        violation: (!ok).then(|| format!("{invariant}: max residual {max:e} exceeds {tolerance:e}")),
    }
}

fn tolerance_for(source: Source) -> f64 {
    match source {
        Source::Exact => 1e-9,
        Source::Quad => 1e-6,
        Source::Mc => f64::INFINITY,
    }
}

pub fn verify(opts: &Opts, identity: Identity) -> Out<Report> {
    let th = theta(opts)?;
    let n = opts.n;
    let source = default_source(opts);
    match identity {
        Identity::TheoremA => {
            if th.value <= 0.0 {
                return usage("theorem-a needs --theta > 0");
            }
            let inn = innovation(opts)?;
            if inn.parameters().is_empty() {
                return usage("unsupported family");
            }
            if opts.family == FamilyArg::Laplace && !is_symmetric_laplace(opts, &inn) {
                return usage("theorem-a pairs p(theta) with the chain driven by -X; only symmetric laws are supported");
            }
            let inv = Theta {
                value: 1.0 / th.value,
                exact: th.exact.as_ref().filter(|t| **t != Rational::from_i64(0)).map(|t| t.recip()),
            };
            let a = persistence(opts, &th, n + 1, source)?.p();
            let b = persistence(opts, &inv, n + 1, source)?.p();
            let residuals = (0..=n)
                .map(|m| {
                    let conv: f64 = (0..=m).map(|k| a[m - k] * b[k]).sum();
                    (m, conv, (conv - 1.0).abs())
                })
                .collect();
            Ok(residual_report(
                "verify theorem-a",
                vec![source_name(source)],
                "convolution",
                residuals,
                tolerance_for(source),
                "inverse-drift convolution identity sum_k p_{n-k}(theta) p_k(1/theta) = 1",
                json!({"theta": th.value}),
            ))
        }
        Identity::VanDantzig => {
            if th.value >= 0.0 {
                return usage("van-dantzig needs --theta < 0");
            }
            let inv = Theta {
                value: 1.0 / th.value,
                exact: th.exact.as_ref().map(|t| t.recip()),
            };
            if source == Source::Exact && n <= RATIONAL_LIMIT {
                if let (Some(t), Some(ti), Some(r)) = (&th.exact, &inv.exact, rho(opts)?.1) {
                    if opts.family != FamilyArg::Laplace {
                        return usage("exact tables exist only for --family laplace");
                    }
                    let a = laplace::neg_drift_phi_series(t, &r, n)?;
                    let b = laplace::neg_drift_phi_series(ti, &r, n)?;
                    let prod = a.mul(&b.negate_argument(), n);
                    let residuals = rows_from_product(prod.coeffs().iter().map(Scalar::to_f64));
                    return Ok(residual_report(
                        "verify van-dantzig",
                        vec!["exact".into()],
                        "coefficient",
                        residuals,
                        1e-12,
                        "Van Dantzig identity phi_theta(z) phi_{1/theta}(-z) = 1",
                        json!({"theta": th.value, "arithmetic": "rational"}),
                    ));
                }
            }
            let a = Series::new(persistence(opts, &th, n + 1, source)?.p()).truncate(n);
            let b = Series::new(persistence(opts, &inv, n + 1, source)?.p()).truncate(n);
            let prod = a.mul(&b.negate_argument(), n);
            let tol = if source == Source::Exact { 1e-12 } else { tolerance_for(source) };
            Ok(residual_report(
                "verify van-dantzig",
                vec![source_name(source)],
                "coefficient",
                rows_from_product(prod.coeffs().iter().copied()),
                tol,
                "Van Dantzig identity phi_theta(z) phi_{1/theta}(-z) = 1",
                json!({"theta": th.value, "arithmetic": "double"}),
            ))
        }
        Identity::Kalouze => kalouze(opts, &th, source),
    }
}

fn rows_from_product(coeffs: impl Iterator<Item = f64>) -> Vec<(usize, f64, f64)> {
    coeffs
        .enumerate()
        .map(|(k, c)| (k, c, (c - if k == 0 { 1.0 } else { 0.0 }).abs()))
        .collect()
}

fn source_name(s: Source) -> String {
    match s {
        Source::Exact => "exact",
        Source::Quad => "quadrature",
        Source::Mc => "mc",
    }
    .into()
}

fn kalouze(opts: &Opts, th: &Theta, source: Source) -> Out<Report> {
    let n = opts.n;
    if th.value <= 0.0 {
        return usage("kalouze needs --theta > 0");
    }
    let table = persistence(opts, th, n + 2, source)?;
    let psi = Series::new(table.q());
    let cg = factor::compound_geometric_extract(&psi, n)?;
    let inn = innovation(opts)?;
    let reference = if source == Source::Exact && is_symmetric_laplace(opts, &inn) && th.value != 1.0 {
        Some(if th.value < 1.0 {
            laplace::sigma_series(&th.value, n)?
        } else {
            laplace::sigma_inverse_series(&(1.0 / th.value), n)?
        })
    } else {
        None
    };
    let residuals: Vec<(usize, f64, f64)> = (0..=n)
        .map(|k| {
            let s = cg.sigma.coeff(k);
            let r = reference.as_ref().map_or(0.0, |r| (r.coeff(k) - s).abs());
            (k, s, r)
        })
        .collect();
    let mut report = residual_report(
        "verify kalouze",
        vec![source_name(source)],
        "sigma",
        residuals,
        if reference.is_some() { 1e-9 } else { f64::INFINITY },
        "compound-geometric form psi = q_0/(1 - z sigma) with the q-series sigma",
        json!({"theta": th.value, "sigma_nonnegative": cg.nonnegative, "has_reference": reference.is_some()}),
    );
    report.summary = format!("{}; sigma non-negative: {}", report.summary, cg.nonnegative);
    if !cg.nonnegative && source == Source::Exact && inn.flags().log_concave_density && report.violation.is_none() {
        report.violation = Some("compound-geometric form: sigma has a negative coefficient".into());
    }
    Ok(report)
}

pub fn shape(opts: &Opts) -> Out<Report> {
    let th = theta(opts)?;
    let source = default_source(opts);
    let table = persistence(opts, &th, opts.n, source)?;
    let inn = innovation(opts)?;
    let slack = opts.slack.unwrap_or(match source {
        Source::Exact => 1e-10,
        _ => 1e-8,
    });
    let psi_tilde = (source == Source::Exact && is_symmetric_laplace(opts, &inn) && th.value > 0.0 && th.value < 1.0)
        .then(|| {
            let q = laplace::pos_drift_q(&th.value, opts.n.max(200)).expect("theta checked positive");
            Series::new(q).scale_argument(th.value)
        });
    let rep = factor::shape_tests(&table, slack, opts.start, psi_tilde.as_ref());
    let row = |name: &str, s: &factor::SequenceShape| {
        let idx = |v: Option<usize>| v.map_or(Cell::Empty, Cell::from);
        vec![
            Cell::from(name),
            s.log_convex.into(),
            s.log_concave.into(),
            idx(s.first_convexity_violation),
            idx(s.first_concavity_violation),
            idx(s.non_positive_entry),
        ]
    };
    let fmt_opt = |v: Option<f64>| v.map_or("none".to_string(), |x| x.to_string());
    Ok(Report {
        command: "shape".into(),
        provenance: vec![table.provenance.to_string()],
        header: vec![
            "sequence",
            "log_convex",
            "log_concave",
            "first_convexity_violation",
            "first_concavity_violation",
            "non_positive_entry",
        ],
        rows: vec![row("p", &rep.p), row("q", &rep.q)],
        summary: format!(
            "shape: q log-convex {} log-concave {}; p log-convex {} log-concave {}; lambda by root {}, by ratio {}, mu root {}{}",
            rep.q.log_convex,
            rep.q.log_concave,
            rep.p.log_convex,
            rep.p.log_concave,
            fmt_opt(rep.lambda_by_root),
            fmt_opt(rep.lambda_by_ratio),
            fmt_opt(rep.mu_root),
            if rep.statistical { " (statistical)" } else { "" }
        ),
        plot: table.rows.iter().filter(|r| r.q > 0.0).map(|r| (r.n as f64, r.q.ln())).collect(),
        result: json!({"theta": th.value, "slack": slack, "report": rep}),
        violation: None,
    })
}

const SIGN_GRID: [f64; 13] = [-0.1, -0.2, -0.3, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9, -1.0, -1.5, -2.0, -3.0];

pub fn experiment(opts: &Opts, which: Experiment) -> Out<Report> {
    let Experiment::Signs = which;
    let grid: Vec<f64> = match &opts.theta {
        Some(_) => vec![theta(opts)?.value],
        None => SIGN_GRID.to_vec(),
    };
    if grid.iter().any(|t| *t >= 0.0) {
        return usage("experiment signs explores negative drifts only");
    }
    let source = default_source(opts);
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut even_negative_inside = 0usize;
    for &t in &grid {
        let th = Theta { value: t, exact: None };
        let table = persistence(opts, &th, opts.n + 1, source)?;
        let signs = factor::weight_signs(&table.p(), opts.n, 1e-13)?;
        for s in &signs {
            if t > -1.0 && s.n % 2 == 0 && s.sign < 0 {
                even_negative_inside += 1;
            }
            rows.push(vec![t.into(), s.n.into(), s.weight.into(), Cell::Int(i64::from(s.sign))]);
        }
        records.push(json!({"theta": t, "weights": signs}));
    }
    Ok(Report {
        command: "experiment signs".into(),
        provenance: vec![source_name(source)],
        header: vec!["theta", "n", "weight", "sign"],
        rows,
        plot: Vec::new(),
        summary: format!(
            "experiment signs: {} negative even-index weights for theta in (-1, 0) over {} drifts (exploratory, no verdict)",
            even_negative_inside,
            grid.len()
        ),
        result: json!({"tables": records}),
        violation: None,
    })
}
