//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary and exits nonzero if any criterion fails.

use std::fs;
use std::process::ExitCode;
use std::sync::Arc;

use mems_core::analysis::regime::{f0, holder_exponent, p_sharp, p_star, q_sharp};
use mems_core::analysis::{
    extremal_probe, find_pullin, fit_boundary_decay, lambda_hash, lambda_upper_bound, lambda_upper_bound_discrete,
    mu_star, stability, sweep_lambda, PullInResult, DEFAULT_REL_TOL,
};
use mems_core::cli_io::{parse_config, run_command, Command, ExitStatus};
use mems_core::geometry::{build_grid, Domain};
use mems_core::membrane::{
    make_profile, solve_minimal, MinimalSolveResult, Profile, ProfileShape, SolveOptions, SolveStatus,
};
use mems_core::operators::{LaplaceOperator, DEFAULT_EIGEN_TOL};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Counts every direct solve made by the suite.
#[derive(Default)]
struct Tracker {
    solves: usize,
    converged: usize,
    violations_on_converged: usize,
}

impl Tracker {
    fn solve(
        &mut self,
        op: &LaplaceOperator,
        prof: &Profile,
        p: f64,
        lambda: f64,
        opts: &SolveOptions,
    ) -> MinimalSolveResult {
        let r = solve_minimal(op, prof, p, lambda, opts).expect("linear solve");
        self.solves += 1;
        if r.is_converged() {
            self.converged += 1;
            self.violations_on_converged += r.monotone_violations;
        }
        r
    }
}

fn problem(domain: Domain, n: usize, gamma: f64) -> (LaplaceOperator, Profile) {
    let g = Arc::new(build_grid(domain, n).unwrap());
    let prof = make_profile(g.clone(), gamma, 1.0, ProfileShape::PurePower).unwrap();
    (LaplaceOperator::assemble(g), prof)
}

fn interval(n: usize, gamma: f64) -> (LaplaceOperator, Profile) {
    problem(Domain::unit_interval(), n, gamma)
}

fn pullin(op: &LaplaceOperator, prof: &Profile, p: f64) -> PullInResult {
    find_pullin(op, prof, p, DEFAULT_REL_TOL, &SolveOptions::default()).unwrap()
}

/// Tridiagonal solve of `(-u'' = f, u(0) = u(1) = 0)` on `n` cells.
fn thomas(f: &[f64], n: usize) -> Vec<f64> {
    let h2 = (1.0 / n as f64).powi(2);
    let m = f.len();
    let (mut c, mut d) = (vec![0.0; m], vec![0.0; m]);
    for i in 0..m {
        let denom = 2.0 + if i > 0 { c[i - 1] } else { 0.0 };
        c[i] = -1.0 / denom;
        d[i] = (f[i] * h2 + if i > 0 { d[i - 1] } else { 0.0 }) / denom;
    }
    let mut u = vec![0.0; m];
    for i in (0..m).rev() {
        u[i] = d[i] - if i + 1 < m { c[i] * u[i + 1] } else { 0.0 };
    }
    u
}

fn interval_rho(n: usize) -> Vec<f64> {
    (1..n)
        .map(|i| {
            let x = i as f64 / n as f64;
            x.min(1.0 - x).min(0.5)
        })
        .collect()
}

fn criterion_1() -> Verdict {
    let exact = |x: f64| x * (1.0 - x) / 2.0;
    let errors = |n: usize| {
        let (op, _) = interval(n, 0.5);
        let u = op.green_apply(&vec![1.0; n - 1]).unwrap();
        let mut pts = vec![(0.0, 0.0)];
        pts.extend((1..n).map(|i| (i as f64 / n as f64, u[i - 1])));
        pts.push((1.0, 0.0));
        let nodal = pts.iter().map(|&(x, v)| (v - exact(x)).abs()).fold(0.0, f64::max);
        // the discrete solution read as a piecewise-linear function
        let cont = pts
            .windows(2)
            .map(|w| (0.5 * (w[0].1 + w[1].1) - exact(0.5 * (w[0].0 + w[1].0))).abs())
            .fold(0.0, f64::max);
        (nodal, cont)
    };
    let ((n64, e64), (n128, e128)) = (errors(64), errors(128));
    let ratio = e64 / e128;
    verdict(
        n64 <= 1e-3 && e64 <= 1e-3 && (ratio - 4.0).abs() <= 0.8,
        format!("max err n=64 {e64:.3e} (nodal {n64:.1e}), n=128 {e128:.3e} (nodal {n128:.1e}), ratio {ratio:.4}"),
    )
}

fn criterion_2() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for tau in [0.5, 1.0, 1.5] {
        let band = |n: usize| {
            let (op, _) = interval(n, 0.5);
            let rho = interval_rho(n);
            let f: Vec<f64> = rho.iter().map(|r| r.powf(tau - 2.0)).collect();
            let g = op.green_apply(&f).unwrap();
            let oracle = thomas(&f, n);
            let agree = g.iter().zip(&oracle).all(|(a, b)| (a - b).abs() <= 1e-9 * b.abs().max(1e-300));
            let w: Vec<f64> =
                rho.iter().map(|&r| if tau == 1.0 { r * (1.0 / r).ln() } else { r.powf(tau.min(1.0)) }).collect();
            let ratios: Vec<f64> = g.iter().zip(&w).map(|(g, w)| g / w).collect();
            let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().copied().fold(0.0, f64::max);
            (lo, hi, agree)
        };
        let ((l1, h1, a1), (l2, h2, a2)) = (band(256), band(512));
        let c1 = h1.max(1.0 / l1);
        let c2 = h2.max(1.0 / l2);
        let dl = (l2 / l1 - 1.0).abs();
        let dh = (h2 / h1 - 1.0).abs();
        let dc = (c2 / c1 - 1.0).abs();
        ok &= a1 && a2 && l1 > 0.0 && dl < 0.1 && dh < 0.1 && dc < 0.1;
        parts.push(format!("tau={tau}: [{l1:.4}, {h1:.4}] -> [{l2:.4}, {h2:.4}] c {c1:.4} -> {c2:.4}"));
    }
    verdict(ok, parts.join("; "))
}

fn criterion_3(extra: &mut Tracker) -> Verdict {
    let opts = SolveOptions::default();
    for (domain, n) in [
        (Domain::unit_interval(), 256),
        (Domain::Rectangle { lx: 1.0, ly: 1.0 }, 48),
        (Domain::Disk { radius: 0.5 }, 48),
    ] {
        let (op, prof) = problem(domain, n, 0.5);
        let lo = pullin(&op, &prof, 1.0).lambda_lo;
        for f in [0.1, 0.5, 0.9, 0.999] {
            extra.solve(&op, &prof, 1.0, f * lo, &opts);
            extra.solve(&op, &prof, 1.0, f * lo, &opts.with_epsilon(1e-3));
        }
    }
    let g = Arc::new(build_grid(Domain::Disk { radius: 1.0 }, 40).unwrap());
    let prof = make_profile(g.clone(), 0.7, 2.0, ProfileShape::Modulated).unwrap();
    let op = LaplaceOperator::assemble(g);
    let hash = lambda_hash(&op, &prof, 0.8).unwrap();
    extra.solve(&op, &prof, 0.8, hash, &opts);
    verdict(
        extra.violations_on_converged == 0 && extra.converged > 0,
        format!(
            "{} converged of {} direct solves, {} decreasing steps",
            extra.converged, extra.solves, extra.violations_on_converged
        ),
    )
}

fn criterion_4(t: &mut Tracker) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (gamma, p) in [(0.5, 1.0), (0.5, 3.0), (1.0, 0.5)] {
        for (domain, n) in [(Domain::unit_interval(), 256), (Domain::Disk { radius: 0.5 }, 48)] {
            let (op, prof) = problem(domain, n, gamma);
            let hash = lambda_hash(&op, &prof, p).unwrap();
            let r = t.solve(&op, &prof, p, hash, &SolveOptions::default());
            let ms = mu_star(1.0, p);
            assert_eq!(ms, 1.0 / (p + 1.0));
            let worst =
                r.u.iter().zip(prof.rho().iter()).map(|(u, rho)| u / (ms * rho.powf(gamma))).fold(0.0, f64::max);
            ok &= r.is_converged() && worst <= 1.0;
            parts.push(format!("({gamma},{p},{}D) {} max u/(mu* rho^g)={worst:.4}", domain.dimension(), r.status));
        }
    }
    verdict(ok, parts.join("; "))
}

fn criterion_5() -> Verdict {
    let run = |n: usize| {
        let (op, prof) = interval(n, 0.5);
        pullin(&op, &prof, 1.0)
    };
    let (a, b) = (run(256), run(512));
    let ordered =
        |r: &PullInResult| r.lambda_hash <= r.lambda_lo && r.lambda_lo < r.lambda_hi && r.lambda_hi <= r.lambda_upper;
    let shift = (b.midpoint() / a.midpoint() - 1.0).abs();
    verdict(
        ordered(&a) && ordered(&b) && shift < 0.02,
        format!(
            "n=256 [{:.6}, {:.6}] in [{:.4}, {:.4}]; n=512 [{:.6}, {:.6}]; midpoint shift {:.3e}",
            a.lambda_lo, a.lambda_hi, a.lambda_hash, a.lambda_upper, b.lambda_lo, b.lambda_hi, shift
        ),
    )
}

fn criterion_6(t: &mut Tracker) -> Verdict {
    let (op, prof) = interval(256, 0.5);
    let lo = pullin(&op, &prof, 1.0).lambda_lo;
    let mut mus = Vec::new();
    let mut all_conv = true;
    for f in [0.25, 0.5, 0.75, 0.9, 0.999] {
        let r = t.solve(&op, &prof, 1.0, f * lo, &SolveOptions::default());
        all_conv &= r.is_converged();
        mus.push(stability(&op, &prof, 1.0, f * lo, &r.u, DEFAULT_EIGEN_TOL).unwrap().mu1);
    }
    let first4 = &mus[..4];
    let ok = all_conv
        && first4.iter().all(|&m| m > 0.0)
        && first4.windows(2).all(|w| w[1] < w[0])
        && mus[4] > 0.0
        && mus[4] < 0.2 * mus[0];
    verdict(ok, format!("mu1 at 0.25/0.5/0.75/0.9/0.999 lambda_lo: {:.5?}", mus))
}

fn criterion_7(t: &mut Tracker) -> Verdict {
    let (op, prof) = interval(256, 0.5);
    let opts = SolveOptions::default();
    let lo = pullin(&op, &prof, 1.0).lambda_lo;
    let le = |u: &[f64], v: &[f64]| u.iter().zip(v).all(|(a, b)| a <= b);

    let sols: Vec<_> = [0.25, 0.5, 0.75].iter().map(|f| t.solve(&op, &prof, 1.0, f * lo, &opts)).collect();
    let lam_ok = sols.iter().all(|s| s.is_converged()) && sols.windows(2).all(|w| le(&w[0].u, &w[1].u));

    // p-direction, same λ, both p in the existence range
    let (p1, p2) = (0.5, 1.0);
    let lam = lambda_hash(&op, &prof, p1).unwrap().min(lambda_hash(&op, &prof, p2).unwrap());
    let (u1, u2) = (t.solve(&op, &prof, p1, lam, &opts), t.solve(&op, &prof, p2, lam, &opts));
    let p_decreasing = u1.is_converged() && u2.is_converged() && le(&u2.u, &u1.u);
    let p_increasing = le(&u1.u, &u2.u);

    let u = &sols[1];
    let mut eps_ok = true;
    let mut dists = Vec::new();
    let mut prev: Option<MinimalSolveResult> = None;
    for k in 1..=6 {
        let w = t.solve(&op, &prof, 1.0, 0.5 * lo, &opts.with_epsilon(10f64.powi(-k)));
        eps_ok &= w.is_converged() && le(&w.u, &u.u);
        if let Some(pw) = &prev {
            eps_ok &= le(&pw.u, &w.u);
        }
        let d = w.u.iter().zip(u.u.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if let Some(&last) = dists.last() {
            eps_ok &= d < last;
        }
        dists.push(d);
        prev = Some(w);
    }
    verdict(
        lam_ok && p_decreasing && eps_ok,
        format!(
            "lambda-increasing {lam_ok}; p-decreasing {p_decreasing} (u_p nondecreasing in p: {p_increasing}); \
             epsilon ordering and w <= u {eps_ok}, sup|w-u| {:.2e}..{:.2e}",
            dists[0], dists[5]
        ),
    )
}

fn criterion_8(t: &mut Tracker) -> Verdict {
    let (op, prof) = interval(1024, 0.5);
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, lo_b, hi_b) in [(1.0, 0.9, 1.1), (3.0, 0.4, 0.6)] {
        let lam = 0.3 * pullin(&op, &prof, p).lambda_lo;
        let r = t.solve(&op, &prof, p, lam, &SolveOptions::default());
        let fit = fit_boundary_decay(op.grid(), &r.u, 0.5, p).unwrap();
        ok &= r.is_converged() && fit.exponent >= lo_b && fit.exponent <= hi_b;
        parts.push(format!("p={p}: exponent {:.4} in [{lo_b}, {hi_b}], r2 {:.5}", fit.exponent, fit.r2));
    }
    verdict(ok, parts.join("; "))
}

fn criterion_9(t: &mut Tracker) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (gamma, p) in [(1.5, 1.0), (0.5, 4.0)] {
        let mut gaps = Vec::new();
        for n in [256, 512] {
            let (op, prof) = interval(n, gamma);
            let upper =
                lambda_upper_bound(&op, &prof, p).or_else(|_| lambda_upper_bound_discrete(&op, &prof, p)).unwrap();
            let lambdas: Vec<f64> = (-6..=0).map(|k| 10f64.powi(k) * upper).collect();
            let recs = sweep_lambda(&op, &prof, p, &lambdas, &SolveOptions::default(), DEFAULT_EIGEN_TOL).unwrap();
            let conv = recs.iter().filter(|r| r.status == SolveStatus::Converged).count();
            ok &= conv == 0;
            // normalized gap min (a - u)/a at 1e-3 of the upper bound
            let r = t.solve(&op, &prof, p, 1e-3 * upper, &SolveOptions::default());
            let g = r.u.iter().zip(prof.values().iter()).map(|(u, a)| (a - u) / a).fold(f64::INFINITY, f64::min);
            gaps.push(g);
            parts.push(format!("(g={gamma},p={p},n={n}) converged {conv}/7"));
        }
        parts.push(format!("min (a-u)/a at 1e-3 upper: {:.4} -> {:.4}", gaps[0], gaps[1]));
    }
    verdict(ok, parts.join("; "))
}

fn criterion_10() -> Verdict {
    let mut fails = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            fails.push(what);
        }
    };
    check(p_star(0.5) == 3.0, "p_star(0.5)".into());
    check(p_star(1.0) == 1.0, "p_star(1)".into());
    check(p_sharp(6) == f64::INFINITY, "p_sharp(6)".into());
    check(p_sharp(11) == 1.0 / 3.0, "p_sharp(11)".into());
    for n in 7..=12u32 {
        let v = f0(p_sharp(n));
        check((v - f64::from(n)).abs() <= 1e-10, format!("f0(p_sharp({n}))={v:.10}"));
    }
    for n in 13..=16u32 {
        let v = f0(q_sharp(n));
        check((v - f64::from(n) / 2.0).abs() <= 1e-10, format!("f0(q_sharp({n}))={v:.10}"));
    }
    for n in 7..=12u32 {
        let a = holder_exponent(p_sharp(n), n);
        check((a - 1.0).abs() <= 1e-10, format!("alpha(p_sharp({n}))={a:.6}"));
    }
    let ok = fails.is_empty();
    verdict(ok, if ok { "all identities hold".into() } else { format!("mismatches: {}", fails.join(", ")) })
}

fn criterion_11() -> Verdict {
    let brackets = |gamma: f64, ps: &[f64]| -> Vec<PullInResult> {
        let (op, prof) = interval(256, gamma);
        ps.iter().map(|&p| pullin(&op, &prof, p)).collect()
    };
    let g1 = brackets(1.0, &[0.5, 0.7, 0.9, 0.95]);
    let g05 = brackets(0.5, &[0.5, 1.0, 2.0, 3.0]);
    // strict: the next bracket lies entirely below the previous one
    let strict = g1.windows(2).all(|w| w[1].lambda_hi < w[0].lambda_lo);
    let nonincreasing = g05.windows(2).all(|w| w[1].lambda_lo <= w[0].lambda_hi);
    let fmt = |v: &[PullInResult]| v.iter().map(|r| format!("{:.5}", r.midpoint())).collect::<Vec<_>>().join(" > ");
    verdict(strict && nonincreasing, format!("gamma=1: {}; gamma=0.5: {}", fmt(&g1), fmt(&g05)))
}

fn criterion_12() -> Verdict {
    let mut floors = Vec::new();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [256, 512] {
        let (op, prof) = interval(n, 0.5);
        let lo = pullin(&op, &prof, 1.0).lambda_lo;
        let lambdas: Vec<f64> = [0.9, 0.99, 0.999].iter().map(|f| f * lo).collect();
        let probe = extremal_probe(&op, &prof, 1.0, &lambdas, 0.25, 2.0, 0.1, &SolveOptions::default()).unwrap();
        let ib: Vec<f64> = probe.entries.iter().filter_map(|e| e.i_beta).collect();
        let jq: Vec<f64> = probe.entries.iter().filter_map(|e| e.j_q).collect();
        ok &= probe.i_beta_bounded && probe.j_q_bounded && probe.warning.is_none() && ib.len() == 3;
        let floor = probe.core_gap_floor.unwrap_or(0.0);
        floors.push(floor);
        parts.push(format!(
            "n={n}: I_beta {:.4}..{:.4}, J_q {:.4}..{:.4}, core gap floor {floor:.5}",
            ib[0],
            ib[ib.len() - 1],
            jq[0],
            jq[jq.len() - 1]
        ));
    }
    let stable = floors[0] > 0.0 && floors[1] > 0.0 && (floors[1] / floors[0] - 1.0).abs() < 0.1;
    verdict(ok && stable, parts.join("; "))
}

fn criterion_13() -> Verdict {
    let cfg = parse_config("domain = interval 0 1\ngamma = 0.5\np = 1\nn = 256\n").unwrap();
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = run_command(Command::Verify, &cfg, dir.path()).unwrap();
        let files: Vec<(String, Vec<u8>)> = out
            .files
            .iter()
            .map(|f| (f.file_name().unwrap().to_string_lossy().into_owned(), fs::read(f).unwrap()))
            .collect();
        (out.summary, out.exit, files)
    };
    let (a, b) = (run(), run());
    let bytes: usize = a.2.iter().map(|f| f.1.len()).sum();
    verdict(
        a == b && a.1 == ExitStatus::Success,
        format!("{} files, {bytes} bytes, identical {}, exit {:?}", a.2.len(), a == b, a.1),
    )
}

fn main() -> ExitCode {
    let mut t = Tracker::default();
    let mut results: Vec<(u32, &str, Verdict)> =
        vec![(1, "green oracle", criterion_1()), (2, "green kernel band", criterion_2())];
    results.push((4, "solvable at lambda_hash", criterion_4(&mut t)));
    results.push((5, "bracket consistency", criterion_5()));
    results.push((6, "stability program", criterion_6(&mut t)));
    results.push((7, "monotonicity and comparison", criterion_7(&mut t)));
    results.push((8, "decay exponent", criterion_8(&mut t)));
    results.push((9, "nonexistence", criterion_9(&mut t)));
    results.push((10, "classifier identities", criterion_10()));
    results.push((11, "lambda* trends", criterion_11()));
    results.push((12, "extremal probes", criterion_12()));
    results.push((13, "determinism", criterion_13()));
    results.push((3, "monotone iteration", criterion_3(&mut t)));
    results.sort_by_key(|r| r.0);

    let mut failed = 0;
    for (n, name, v) in &results {
        println!("criterion {n:>2} {}: {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
