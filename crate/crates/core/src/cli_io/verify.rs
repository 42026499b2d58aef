//! Property suite behind `mems verify`.

use std::fmt;
use std::sync::Arc;

use crate::analysis::regime::{classify, f0, in_existence_range, p_sharp, p_star, q_sharp, Extremal};
use crate::analysis::{lambda_hash, stability};
use crate::error::Result;
use crate::geometry::{build_grid, Domain};
use crate::membrane::{solve_minimal, MinimalSolveResult};
use crate::operators::LaplaceOperator;

use super::commands::Problem;
use super::config::RunConfig;
use super::table::{format_real, CsvTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub outcomes: Vec<PropertyOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.verdict != Verdict::Fail)
    }

    pub fn lines(&self) -> String {
        self.outcomes.iter().map(|o| format!("{} {}: {}\n", o.verdict, o.name, o.detail)).collect()
    }

    pub fn table(&self) -> CsvTable {
        let mut t = CsvTable::new(["property", "status", "detail"]);
        for o in &self.outcomes {
            t.push(vec![o.name.into(), o.verdict.to_string().as_str().into(), o.detail.as_str().into()]);
        }
        t
    }
}

fn outcome(name: &'static str, ok: bool, detail: String) -> PropertyOutcome {
    PropertyOutcome { name, verdict: if ok { Verdict::Pass } else { Verdict::Fail }, detail }
}

fn r(v: f64) -> String {
    format_real(v)
}

/// Error of the piecewise-linear reconstruction of `G[1]` against
/// `x(1-x)/2`, sampled at cell midpoints, and the nodal error.
pub fn green_oracle_errors(n: usize) -> Result<(f64, f64)> {
    let g = Arc::new(build_grid(Domain::unit_interval(), n)?);
    let op = LaplaceOperator::assemble(g.clone());
    let u = op.green_apply(&vec![1.0; g.len()])?;
    let exact = |x: f64| x * (1.0 - x) / 2.0;
    let mut nodes = vec![(0.0, 0.0)];
    nodes.extend(g.coords().iter().zip(u.iter()).map(|(c, &v)| (c[0], v)));
    nodes.push((1.0, 0.0));
    let nodal = nodes.iter().map(|&(x, v)| (v - exact(x)).abs()).fold(0.0, f64::max);
    let cells =
        nodes.windows(2).map(|w| (0.5 * (w[0].1 + w[1].1) - exact(0.5 * (w[0].0 + w[1].0))).abs()).fold(0.0, f64::max);
    Ok((cells, nodal))
}

fn green_oracle() -> Result<PropertyOutcome> {
    let ((e64, n64), (e128, n128)) = (green_oracle_errors(64)?, green_oracle_errors(128)?);
    let ok = e64 <= 1e-3 && n64 <= 1e-3 && (e64 / e128 - 4.0).abs() <= 0.8;
    Ok(outcome(
        "green_oracle",
        ok,
        format!("err64={} err128={} nodal64={} nodal128={}", r(e64), r(e128), r(n64), r(n128)),
    ))
}

fn classifier_identities() -> PropertyOutcome {
    let mut bad = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            bad.push(what.to_string());
        }
    };
    check(p_star(0.5) == 3.0 && p_star(1.0) == 1.0, "p_star");
    check(p_sharp(6).is_infinite() && p_sharp(11) == 1.0 / 3.0, "p_sharp table");
    check(q_sharp(12).is_infinite(), "q_sharp table");
    for n in 7..=12u32 {
        check((f0(p_sharp(n)) - f64::from(n - 1)).abs() <= 1e-10, "f0(p_sharp)");
    }
    for n in 13..=16u32 {
        check((f0(q_sharp(n)) - (f64::from(n) / 2.0 - 1.0)).abs() <= 1e-10, "f0(q_sharp)");
    }
    let ts: Vec<f64> = (0..60).map(|k| 10f64.powf(-3.0 + 0.1 * f64::from(k))).collect();
    check(ts.windows(2).all(|w| f0(w[1]) < f0(w[0])), "f0 decreasing");
    check((f0(1e12) - 5.0).abs() < 1e-5, "f0 limit");
    for n in [7u32, 9, 13, 20] {
        for k in 1..40 {
            let p = 0.1 * f64::from(k);
            if let Ok(rep) = classify(0.2, p, n) {
                if rep.extremal == Some(Extremal::ExtremalHolder) {
                    check(rep.alpha.is_some_and(|a| a > 0.0 && a <= 1.0 + 1e-12), "alpha range");
                }
            }
        }
    }
    let ok = bad.is_empty();
    outcome("classifier_identities", ok, if ok { "all identities hold".into() } else { bad.join("; ") })
}

fn m_matrix(pb: &Problem) -> PropertyOutcome {
    let m = pb.op.matrix();
    let mut ok = true;
    for i in 0..m.dim() {
        for (j, v) in m.row(i) {
            ok &= if i == j { v > 0.0 } else { v <= 0.0 };
        }
        ok &= m.row_sum(i) >= -1e-9 * m.diagonal()[i];
    }
    outcome("m_matrix", ok, format!("rows={}", m.dim()))
}

fn comparison(pb: &Problem) -> Result<PropertyOutcome> {
    let rho = pb.prof.rho();
    let f: Vec<f64> = rho.iter().map(|r| 1.0 + r).collect();
    let g: Vec<f64> = rho.iter().map(|r| r * r).collect();
    let (gf, gg) = (pb.op.green_apply(&f)?, pb.op.green_apply(&g)?);
    let violations = gf.iter().zip(gg.iter()).filter(|(a, b)| a < b).count();
    Ok(outcome("discrete_comparison", violations == 0, format!("violations={violations}")))
}

fn eigen_shift(pb: &Problem, tol: f64) -> Result<PropertyOutcome> {
    let n = pb.grid.len();
    let m0 = pb.op.smallest_eigenvalue(&vec![0.0; n], tol)?.mu;
    let m1 = pb.op.smallest_eigenvalue(&vec![1.0; n], tol)?.mu;
    let diff = (m0 - 1.0 - m1).abs();
    Ok(outcome("eigen_shift", diff <= 10.0 * tol * (1.0 + m0.abs()), format!("mu0={} mu1={}", r(m0), r(m1))))
}

fn solve(pb: &Problem, cfg: &RunConfig, p: f64, lambda: f64, eps: f64) -> Result<MinimalSolveResult> {
    solve_minimal(&pb.op, &pb.prof, p, lambda, &cfg.solve_options().with_epsilon(eps))
}

fn le_all(u: &[f64], v: &[f64]) -> bool {
    u.iter().zip(v).all(|(a, b)| a <= b)
}

fn existence_properties(pb: &Problem, cfg: &RunConfig, out: &mut Vec<PropertyOutcome>) -> Result<()> {
    let p = cfg.p;
    let pr = pb.pullin(cfg)?;
    out.push(outcome(
        "pullin_bracket",
        pr.lambda_hash <= pr.lambda_lo && pr.lambda_lo < pr.lambda_hi && pr.lambda_hi <= pr.lambda_upper,
        format!(
            "hash={} lo={} hi={} upper={}",
            r(pr.lambda_hash),
            r(pr.lambda_lo),
            r(pr.lambda_hi),
            r(pr.lambda_upper)
        ),
    ));

    let fracs = [0.25, 0.5, 0.9];
    let sols: Vec<MinimalSolveResult> =
        fracs.iter().map(|f| solve(pb, cfg, p, f * pr.lambda_lo, 0.0)).collect::<Result<_>>()?;
    let conv = sols.iter().all(MinimalSolveResult::is_converged);
    let violations: usize = sols.iter().map(|s| s.monotone_violations).sum();
    let resid_ok = sols.iter().all(|s| s.residual <= 10.0 * s.tol);
    out.push(outcome(
        "monotone_iteration",
        conv && violations == 0 && resid_ok,
        format!("converged={conv} violations={violations} residual_ok={resid_ok}"),
    ));

    let strict = conv && sols.windows(2).all(|w| w[0].u.iter().zip(w[1].u.iter()).all(|(a, b)| a < b));
    out.push(outcome("lambda_monotonicity", strict, format!("fractions={fracs:?}")));

    let p2 = 0.5 * p;
    let lam = lambda_hash(&pb.op, &pb.prof, p)?.min(lambda_hash(&pb.op, &pb.prof, p2)?);
    let (up, up2) = (solve(pb, cfg, p, lam, 0.0)?, solve(pb, cfg, p2, lam, 0.0)?);
    // 0 < a - u < 1, so (a - u)^{-p} grows with p and so does u
    let ok = up.is_converged() && up2.is_converged() && le_all(&up2.u, &up.u);
    out.push(outcome("p_monotonicity", ok, format!("p={} p2={} lambda={}", r(p), r(p2), r(lam))));

    let lam = 0.5 * pr.lambda_lo;
    let u = &sols[1];
    let mut prev: Option<MinimalSolveResult> = None;
    let mut ok = u.is_converged();
    let mut dists = Vec::new();
    for k in 1..=6 {
        let w = solve(pb, cfg, p, lam, 10f64.powi(-k))?;
        ok &= w.is_converged() && le_all(&w.u, &u.u);
        if let Some(pw) = &prev {
            ok &= le_all(&pw.u, &w.u);
        }
        let d = w.u.iter().zip(u.u.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if let Some(&last) = dists.last() {
            ok &= d < last;
        }
        dists.push(d);
        prev = Some(w);
    }
    out.push(outcome(
        "epsilon_monotonicity",
        ok,
        format!("sup_dist={}", dists.iter().map(|d| r(*d)).collect::<Vec<_>>().join(" ")),
    ));

    let mus: Vec<f64> = fracs
        .iter()
        .zip(&sols)
        .map(|(f, s)| Ok(stability(&pb.op, &pb.prof, p, f * pr.lambda_lo, &s.u, cfg.eig_tol)?.mu1))
        .collect::<Result<_>>()?;
    let ok = mus.iter().all(|&m| m > 0.0) && mus.windows(2).all(|w| w[1] < w[0]);
    out.push(outcome("stability", ok, format!("mu1={}", mus.iter().map(|m| r(*m)).collect::<Vec<_>>().join(" "))));
    Ok(())
}

const EXISTENCE_PROPERTIES: [&str; 6] = [
    "pullin_bracket",
    "monotone_iteration",
    "lambda_monotonicity",
    "p_monotonicity",
    "epsilon_monotonicity",
    "stability",
];

/// Runs every property on the configured problem. Properties that need a
/// minimal solution are skipped when `p` lies outside the existence range.
pub fn run_verify(cfg: &RunConfig) -> Result<VerifyReport> {
    let pb = Problem::build(cfg)?;
    let mut out = vec![green_oracle()?, classifier_identities(), m_matrix(&pb), comparison(&pb)?];
    out.push(eigen_shift(&pb, cfg.eig_tol)?);
    if in_existence_range(cfg.gamma, cfg.p) {
        existence_properties(&pb, cfg, &mut out)?;
    } else {
        for name in EXISTENCE_PROPERTIES {
            out.push(PropertyOutcome { name, verdict: Verdict::Skip, detail: "p outside the existence range".into() });
        }
    }
    Ok(VerifyReport { outcomes: out })
}
