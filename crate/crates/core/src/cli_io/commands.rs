//! The eight CLI commands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::analysis::{
    classify, decay_window, extremal_probe, find_pullin, fit_boundary_decay, lambda_star_diagnostic, stability,
    sweep_lambda, PullInResult,
};
use crate::error::{Error, Result};
use crate::geometry::{build_grid, Grid};
use crate::membrane::{make_profile, solve_minimal, MinimalSolveResult, Profile};
use crate::operators::LaplaceOperator;

use super::config::{LambdaList, LambdaSpec, RunConfig};
use super::table::{write_plot, Cell, CsvTable};
use super::verify::run_verify;

pub const DEFAULT_LAMBDA_FRACTION: f64 = 0.5;
pub const DEFAULT_SWEEP_FRACTIONS: [f64; 6] = [0.1, 0.25, 0.5, 0.75, 0.9, 0.99];
pub const DEFAULT_EXTREMAL_FRACTIONS: [f64; 3] = [0.9, 0.99, 0.999];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Pullin,
    Sweep,
    Stability,
    Decay,
    Extremal,
    Classify,
    Verify,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Solve,
        Command::Pullin,
        Command::Sweep,
        Command::Stability,
        Command::Decay,
        Command::Extremal,
        Command::Classify,
        Command::Verify,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Pullin => "pullin",
            Command::Sweep => "sweep",
            Command::Stability => "stability",
            Command::Decay => "decay",
            Command::Extremal => "extremal",
            Command::Classify => "classify",
            Command::Verify => "verify",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown command '{s}'")))
    }
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Validation = 1,
    SolverFailure = 2,
    VerifyFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Exit code for an error raised while running a command.
pub fn exit_status(err: &Error) -> ExitStatus {
    match err {
        Error::InvalidDomain(_)
        | Error::GridTooCoarse { .. }
        | Error::FieldLength { .. }
        | Error::NonFinite { .. }
        | Error::InvalidParameter(_)
        | Error::ProfileBound { .. }
        | Error::Precondition(_)
        | Error::Config(_) => ExitStatus::Validation,
        Error::SolverDiverged { .. }
        | Error::Breakdown { .. }
        | Error::EigenDiverged { .. }
        | Error::NonpositiveGap { .. }
        | Error::InvalidBracket(_)
        | Error::Io(_)
        | Error::Csv(_) => ExitStatus::SolverFailure,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    /// Human-readable summary for stdout.
    pub summary: String,
    pub exit: ExitStatus,
}

/// Grid, operator and profile built from a config.
pub struct Problem {
    pub grid: Arc<Grid>,
    pub op: LaplaceOperator,
    pub prof: Profile,
}

impl Problem {
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        let grid = Arc::new(build_grid(cfg.domain, cfg.n)?);
        let op = LaplaceOperator::assemble(grid.clone());
        let prof = make_profile(grid.clone(), cfg.gamma, cfg.kappa, cfg.shape)?;
        Ok(Problem { grid, op, prof })
    }

    pub fn pullin(&self, cfg: &RunConfig) -> Result<PullInResult> {
        find_pullin(&self.op, &self.prof, cfg.p, cfg.rel_tol, &cfg.solve_options())
    }

    fn lambda(&self, cfg: &RunConfig) -> Result<f64> {
        match cfg.lambda.clone().unwrap_or(LambdaSpec::Fraction(DEFAULT_LAMBDA_FRACTION)) {
            LambdaSpec::Absolute(l) => Ok(l),
            LambdaSpec::Fraction(f) => Ok(f * self.pullin(cfg)?.lambda_lo),
        }
    }

    fn lambdas(&self, cfg: &RunConfig, default: &[f64]) -> Result<Vec<f64>> {
        let list = cfg.lambdas.clone().unwrap_or_else(|| LambdaList::Fractions(default.to_vec()));
        list.resolve(|| Ok(self.pullin(cfg)?.lambda_lo))
    }

    fn converged_solve(&self, cfg: &RunConfig, lambda: f64) -> Result<MinimalSolveResult> {
        let res = solve_minimal(&self.op, &self.prof, cfg.p, lambda, &cfg.solve_options())?;
        if !res.is_converged() {
            return Err(Error::Precondition(format!(
                "solve at lambda = {lambda} ended with status {}; a converged solution is required",
                res.status
            )));
        }
        Ok(res)
    }

    fn coord_header(&self) -> Vec<&'static str> {
        if self.grid.dimension() == 1 {
            vec!["x"]
        } else {
            vec!["x", "y"]
        }
    }

    fn coord_cells(&self, cfg: &RunConfig, i: usize) -> Vec<Cell> {
        let c = self.grid.coords()[i];
        if self.grid.dimension() == 1 {
            vec![(c[0] + cfg.origin).into()]
        } else {
            vec![c[0].into(), c[1].into()]
        }
    }

    /// `(coordinate, value)` along the midline.
    fn midline_points(&self, cfg: &RunConfig, values: &[f64]) -> Vec<(f64, f64)> {
        self.grid.midline_nodes().into_iter().map(|i| (self.grid.coords()[i][0] + cfg.origin, values[i])).collect()
    }
}

struct Emitter<'a> {
    dir: &'a Path,
    hash: String,
    files: Vec<PathBuf>,
}

impl Emitter<'_> {
    fn csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        let path = self.dir.join(name);
        table.write(&path, &self.hash)?;
        self.files.push(path);
        Ok(())
    }

    fn plot(&mut self, name: &str, columns: (&str, &str), points: &[(f64, f64)]) -> Result<()> {
        let path = self.dir.join(name);
        write_plot(&path, &self.hash, columns, points)?;
        self.files.push(path);
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, format!("# config_hash={}\n{body}", self.hash))?;
        self.files.push(path);
        Ok(())
    }
}

/// Runs `cmd` and writes its files into `out_dir` (created if missing).
pub fn run_command(cmd: Command, cfg: &RunConfig, out_dir: &Path) -> Result<CommandOutput> {
    fs::create_dir_all(out_dir)?;
    let mut em = Emitter { dir: out_dir, hash: cfg.hash(), files: Vec::new() };
    let mut exit = ExitStatus::Success;
    let summary = match cmd {
        Command::Classify => {
            let body = classify_text(cfg)?;
            em.text("classify.txt", &body)?;
            body
        }
        Command::Verify => {
            let report = run_verify(cfg)?;
            em.csv("verify.csv", &report.table())?;
            if !report.all_passed() {
                exit = ExitStatus::VerifyFailure;
            }
            report.lines()
        }
        Command::Solve => solve_cmd(cfg, &mut em)?,
        Command::Pullin => pullin_cmd(cfg, &mut em)?,
        Command::Sweep => sweep_cmd(cfg, &mut em)?,
        Command::Stability => stability_cmd(cfg, &mut em)?,
        Command::Decay => decay_cmd(cfg, &mut em)?,
        Command::Extremal => extremal_cmd(cfg, &mut em)?,
    };
    Ok(CommandOutput { files: em.files, summary, exit })
}

/// Regime report as `key = value` lines.
pub fn classify_text(cfg: &RunConfig) -> Result<String> {
    let r = classify(cfg.gamma, cfg.p, cfg.dimension())?;
    let mut s = String::new();
    let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
    kv("gamma", r.gamma.to_string());
    kv("p", r.p.to_string());
    kv("dimension", r.dimension.to_string());
    kv("p_star", r.p_star.to_string());
    kv("in_i_gamma", r.in_i_gamma.to_string());
    kv("p_sharp", r.p_sharp.to_string());
    kv("q_sharp", r.q_sharp.to_string());
    kv("f0_p", r.f0_p.to_string());
    kv("alpha", r.alpha.map_or("none".into(), |a| a.to_string()));
    kv("regime", r.regime.to_string());
    kv("extremal", r.extremal.map_or("none".into(), |e| e.to_string()));
    Ok(s)
}

fn solve_cmd(cfg: &RunConfig, em: &mut Emitter) -> Result<String> {
    let pb = Problem::build(cfg)?;
    let lambda = pb.lambda(cfg)?;
    let res = solve_minimal(&pb.op, &pb.prof, cfg.p, lambda, &cfg.solve_options())?;
    let (a, rho) = (pb.prof.values(), pb.prof.rho());

    let mut header = pb.coord_header();
    header.extend(["rho", "a", "u", "gap"]);
    let mut sol = CsvTable::new(header);
    for i in 0..pb.grid.len() {
        let mut row = pb.coord_cells(cfg, i);
        row.extend([rho[i].into(), a[i].into(), res.u[i].into(), (a[i] + cfg.epsilon - res.u[i]).into()]);
        sol.push(row);
    }
    em.csv("solution.csv", &sol)?;

    let sup_u = res.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut sum = CsvTable::new([
        "status",
        "lambda",
        "p",
        "epsilon",
        "iterations",
        "tol",
        "residual",
        "min_gap",
        "sup_norm_u",
        "monotone_violations",
    ]);
    sum.push(vec![
        res.status.as_str().into(),
        lambda.into(),
        cfg.p.into(),
        cfg.epsilon.into(),
        res.iterations.into(),
        res.tol.into(),
        res.residual.into(),
        res.min_gap().into(),
        sup_u.into(),
        res.monotone_violations.into(),
    ]);
    em.csv("solve_summary.csv", &sum)?;

    let mut trace = CsvTable::new(["iteration", "increment", "min_gap"]);
    for t in &res.trace {
        trace.push(vec![t.iteration.into(), t.increment.into(), t.min_gap.into()]);
    }
    em.csv("solve_trace.csv", &trace)?;
    em.plot("solution.dat", ("x", "u"), &pb.midline_points(cfg, &res.u))?;

    Ok(format!(
        "status = {}\nlambda = {lambda}\niterations = {}\nresidual = {}\nmin_gap = {}\n",
        res.status,
        res.iterations,
        res.residual,
        res.min_gap()
    ))
}

fn pullin_cmd(cfg: &RunConfig, em: &mut Emitter) -> Result<String> {
    let pb = Problem::build(cfg)?;
    let r = pb.pullin(cfg)?;
    let mut t = CsvTable::new([
        "lambda_lo",
        "lambda_hi",
        "midpoint",
        "lambda_upper",
        "lambda_hash",
        "undecided_count",
        "rel_width",
        "solves",
    ]);
    t.push(vec![
        r.lambda_lo.into(),
        r.lambda_hi.into(),
        r.midpoint().into(),
        r.lambda_upper.into(),
        r.lambda_hash.into(),
        r.undecided_count.into(),
        r.rel_width.into(),
        r.solves.into(),
    ]);
    em.csv("pullin.csv", &t)?;
    Ok(format!(
        "lambda_lo = {}\nlambda_hi = {}\nlambda_hash = {}\nlambda_upper = {}\nundecided = {}\n",
        r.lambda_lo, r.lambda_hi, r.lambda_hash, r.lambda_upper, r.undecided_count
    ))
}

fn sweep_cmd(cfg: &RunConfig, em: &mut Emitter) -> Result<String> {
    let pb = Problem::build(cfg)?;
    let lambdas = pb.lambdas(cfg, &DEFAULT_SWEEP_FRACTIONS)?;
    let recs = sweep_lambda(&pb.op, &pb.prof, cfg.p, &lambdas, &cfg.solve_options(), cfg.eig_tol)?;
    let mut t = CsvTable::new([
        "lambda",
        "status",
        "iterations",
        "sup_norm_u",
        "min_gap",
        "mu1",
        "decay_exponent",
        "normalized_gap",
    ]);
    for r in &recs {
        t.push(vec![
            r.lambda.into(),
            r.status.as_str().into(),
            r.iterations.into(),
            r.sup_norm_u.into(),
            r.min_gap.into(),
            Cell::opt(r.mu1),
            Cell::opt(r.decay_exponent),
            Cell::opt(r.normalized_gap),
        ]);
    }
    em.csv("sweep.csv", &t)?;
    let pts: Vec<(f64, f64)> = recs.iter().filter(|r| r.mu1.is_some()).map(|r| (r.lambda, r.sup_norm_u)).collect();
    em.plot("sweep.dat", ("lambda", "sup_norm_u"), &pts)?;

    let converged = recs.iter().filter(|r| r.mu1.is_some()).count();
    let mut s = format!("records = {}\nconverged = {converged}\n", recs.len());
    if let Some(l) = lambda_star_diagnostic(&recs) {
        writeln!(s, "normalized_gap_drop_lambda = {l}").unwrap();
    }
    Ok(s)
}

fn stability_cmd(cfg: &RunConfig, em: &mut Emitter) -> Result<String> {
    let pb = Problem::build(cfg)?;
    let lambda = pb.lambda(cfg)?;
    let res = pb.converged_solve(cfg, lambda)?;
    let rep = stability(&pb.op, &pb.prof, cfg.p, lambda, &res.u, cfg.eig_tol)?;
    let mut t = CsvTable::new(["lambda", "mu1", "stable", "margin", "iterations", "residual"]);
    t.push(vec![
        lambda.into(),
        rep.mu1.into(),
        rep.stable.into(),
        rep.margin.into(),
        rep.iterations.into(),
        rep.residual.into(),
    ]);
    em.csv("stability.csv", &t)?;

    let mut header = pb.coord_header();
    header.push("phi");
    let mut field = CsvTable::new(header);
    for i in 0..pb.grid.len() {
        let mut row = pb.coord_cells(cfg, i);
        row.push(rep.phi[i].into());
        field.push(row);
    }
    em.csv("eigenfield.csv", &field)?;
    em.plot("eigenfield.dat", ("x", "phi"), &pb.midline_points(cfg, &rep.phi))?;
    Ok(format!("lambda = {lambda}\nmu1 = {}\nstable = {}\n", rep.mu1, rep.stable))
}

fn decay_cmd(cfg: &RunConfig, em: &mut Emitter) -> Result<String> {
    let pb = Problem::build(cfg)?;
    let lambda = pb.lambda(cfg)?;
    let res = pb.converged_solve(cfg, lambda)?;
    let fit = fit_boundary_decay(&pb.grid, &res.u, cfg.gamma, cfg.p)?;
    let mut t =
        CsvTable::new(["lambda", "exponent", "intercept", "rho_min", "rho_max", "r2", "log_corrected", "samples"]);
    t.push(vec![
        lambda.into(),
        fit.exponent.into(),
        fit.intercept.into(),
        fit.window.0.into(),
        fit.window.1.into(),
        fit.r2.into(),
        fit.log_corrected.into(),
        fit.samples.into(),
    ]);
    em.csv("decay.csv", &t)?;
    let rho = pb.prof.rho();
    let pts: Vec<(f64, f64)> = decay_window(&pb.grid).into_iter().map(|i| (rho[i].ln(), res.u[i].ln())).collect();
    em.plot("decay.dat", ("log_rho", "log_u"), &pts)?;
    Ok(format!("lambda = {lambda}\nexponent = {}\nr2 = {}\n", fit.exponent, fit.r2))
}

fn extremal_cmd(cfg: &RunConfig, em: &mut Emitter) -> Result<String> {
    let pb = Problem::build(cfg)?;
    let lambdas = pb.lambdas(cfg, &DEFAULT_EXTREMAL_FRACTIONS)?;
    let probe = extremal_probe(&pb.op, &pb.prof, cfg.p, &lambdas, cfg.beta(), cfg.q, cfg.r, &cfg.solve_options())?;
    let mut t = CsvTable::new(["lambda", "status", "i_beta", "j_q", "core_gap"]);
    for e in &probe.entries {
        t.push(vec![
            e.lambda.into(),
            e.status.as_str().into(),
            Cell::opt(e.i_beta),
            Cell::opt(e.j_q),
            Cell::opt(e.core_gap),
        ]);
    }
    em.csv("extremal.csv", &t)?;
    let mut s = CsvTable::new(["beta", "q", "r", "i_beta_bounded", "j_q_bounded", "core_gap_floor", "warning"]);
    s.push(vec![
        probe.beta.into(),
        probe.q.into(),
        probe.r.into(),
        probe.i_beta_bounded.into(),
        probe.j_q_bounded.into(),
        Cell::opt(probe.core_gap_floor),
        Cell::text(probe.warning.clone().unwrap_or_default()),
    ]);
    em.csv("extremal_summary.csv", &s)?;
    let mut out = format!(
        "i_beta_bounded = {}\nj_q_bounded = {}\ncore_gap_floor = {}\n",
        probe.i_beta_bounded,
        probe.j_q_bounded,
        probe.core_gap_floor.map_or("none".into(), |g| g.to_string())
    );
    if let Some(w) = &probe.warning {
        writeln!(out, "warning = {w}").unwrap();
    }
    Ok(out)
}
