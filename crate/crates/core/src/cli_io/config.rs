//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::analysis::DEFAULT_REL_TOL;
use crate::geometry::{Domain, MIN_RESOLUTION};
use crate::membrane::{ProfileShape, SolveOptions};
use crate::operators::DEFAULT_EIGEN_TOL;

pub const DEFAULT_RESOLUTION: usize = 256;

const KEYS: &[&str] = &[
    "domain",
    "n",
    "gamma",
    "p",
    "kappa",
    "shape",
    "lambda",
    "lambda_fraction",
    "lambdas",
    "lambda_fractions",
    "lambda_range",
    "epsilon",
    "tol",
    "max_iter",
    "touch_eps",
    "eig_tol",
    "rel_tol",
    "beta",
    "q",
    "r",
    "dimension",
    "out",
];

/// How a single voltage is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSpec {
    Absolute(f64),
    /// Multiple of the lower end of the pull-in bracket.
    Fraction(f64),
}

/// How a list of voltages is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaList {
    Absolute(Vec<f64>),
    Fractions(Vec<f64>),
    /// `count` log-spaced values from `lo` to `hi`.
    LogRange {
        lo: f64,
        hi: f64,
        count: usize,
    },
}

impl LambdaList {
    pub fn resolve(&self, lambda_lo: impl FnOnce() -> crate::Result<f64>) -> crate::Result<Vec<f64>> {
        Ok(match self {
            LambdaList::Absolute(v) => v.clone(),
            LambdaList::Fractions(f) => {
                let lo = lambda_lo()?;
                f.iter().map(|x| x * lo).collect()
            }
            LambdaList::LogRange { lo, hi, count } => log_space(*lo, *hi, *count),
        })
    }

    pub fn needs_pullin(&self) -> bool {
        matches!(self, LambdaList::Fractions(_))
    }
}

pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|k| if k + 1 == count { hi } else { (a + (b - a) * k as f64 / (count - 1) as f64).exp() }).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub domain: Domain,
    /// Left end of the interval, used only to shift written coordinates.
    pub origin: f64,
    pub n: usize,
    pub gamma: f64,
    pub p: f64,
    pub kappa: f64,
    pub shape: ProfileShape,
    pub lambda: Option<LambdaSpec>,
    pub lambdas: Option<LambdaList>,
    pub epsilon: f64,
    pub tol: Option<f64>,
    pub max_iter: usize,
    pub touch_eps: f64,
    pub eig_tol: f64,
    pub rel_tol: f64,
    pub beta: Option<f64>,
    pub q: f64,
    pub r: f64,
    pub dimension: Option<u32>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { tol: self.tol, max_iter: self.max_iter, touch_eps: self.touch_eps, epsilon: self.epsilon }
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(self.gamma / 2.0)
    }

    pub fn dimension(&self) -> u32 {
        self.dimension.unwrap_or(self.domain.dimension() as u32)
    }

    /// Normalized text of every resolved field; two configs that differ only
    /// in comments, spacing or key order share it.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k}={v}").unwrap();
        kv(
            "domain",
            match self.domain {
                Domain::Interval { length } => format!("interval {:e} {:e}", self.origin, self.origin + length),
                Domain::Rectangle { lx, ly } => format!("rectangle {lx:e} {ly:e}"),
                Domain::Disk { radius } => format!("disk {radius:e}"),
            },
        );
        kv("n", self.n.to_string());
        kv("gamma", format!("{:e}", self.gamma));
        kv("p", format!("{:e}", self.p));
        kv("kappa", format!("{:e}", self.kappa));
        kv("shape", shape_name(self.shape).into());
        kv(
            "lambda",
            match &self.lambda {
                None => "-".into(),
                Some(LambdaSpec::Absolute(l)) => format!("abs {l:e}"),
                Some(LambdaSpec::Fraction(f)) => format!("frac {f:e}"),
            },
        );
        kv(
            "lambdas",
            match &self.lambdas {
                None => "-".into(),
                Some(LambdaList::Absolute(v)) => format!("abs {}", join(v)),
                Some(LambdaList::Fractions(v)) => format!("frac {}", join(v)),
                Some(LambdaList::LogRange { lo, hi, count }) => format!("range {lo:e} {hi:e} {count}"),
            },
        );
        kv("epsilon", format!("{:e}", self.epsilon));
        kv("tol", self.tol.map_or("-".into(), |t| format!("{t:e}")));
        kv("max_iter", self.max_iter.to_string());
        kv("touch_eps", format!("{:e}", self.touch_eps));
        kv("eig_tol", format!("{:e}", self.eig_tol));
        kv("rel_tol", format!("{:e}", self.rel_tol));
        kv("beta", format!("{:e}", self.beta()));
        kv("q", format!("{:e}", self.q));
        kv("r", format!("{:e}", self.r));
        kv("dimension", self.dimension().to_string());
        s
    }

    /// SHA-256 of [`RunConfig::canonical`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(",")
}

pub fn shape_name(shape: ProfileShape) -> &'static str {
    match shape {
        ProfileShape::PurePower => "pure",
        ProfileShape::Modulated => "modulated",
    }
}

/// Every problem found in a config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<String>);

impl std::fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

struct Parser {
    errors: Vec<String>,
}

impl Parser {
    fn real(&mut self, key: &str, raw: &str) -> Option<f64> {
        match raw.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.errors.push(format!("{key}: '{raw}' is not a finite number"));
                None
            }
        }
    }

    fn reals(&mut self, key: &str, raw: &str) -> Option<Vec<f64>> {
        let parts: Vec<&str> = raw.split([',', ' ', '\t']).filter(|s| !s.is_empty()).collect();
        if parts.is_empty() {
            self.errors.push(format!("{key}: empty list"));
            return None;
        }
        let vals: Vec<Option<f64>> = parts.iter().map(|s| self.real(key, s)).collect();
        vals.into_iter().collect()
    }

    fn count(&mut self, key: &str, raw: &str) -> Option<usize> {
        match raw.trim().parse::<usize>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.errors.push(format!("{key}: '{raw}' is not a nonnegative integer"));
                None
            }
        }
    }

    fn require(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.errors.push(msg.into());
        }
    }

    fn domain(&mut self, raw: &str) -> Option<(Domain, f64)> {
        let mut words = raw.split_whitespace();
        let kind = words.next().unwrap_or("").to_ascii_lowercase();
        let rest: Vec<&str> = words.collect();
        let nums = self.reals("domain", &rest.join(" "))?;
        let parsed = match (kind.as_str(), nums.as_slice()) {
            ("interval", [l]) => Some((Domain::Interval { length: *l }, 0.0)),
            ("interval", [a, b]) => Some((Domain::Interval { length: b - a }, *a)),
            ("rectangle", [lx, ly]) => Some((Domain::Rectangle { lx: *lx, ly: *ly }, 0.0)),
            ("disk", [r]) => Some((Domain::Disk { radius: *r }, 0.0)),
            _ => None,
        };
        match parsed {
            Some((d, o)) => match d.validate() {
                Ok(()) => Some((d, o)),
                Err(e) => {
                    self.errors.push(format!("domain: {e}"));
                    None
                }
            },
            None => {
                self.errors
                    .push(format!("domain: '{raw}' is not one of 'interval [a] b', 'rectangle lx ly', 'disk r'"));
                None
            }
        }
    }
}

/// Parses and validates a config, collecting all errors.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let mut ps = Parser { errors: Vec::new() };
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            ps.errors.push(format!("line {}: expected 'key = value'", no + 1));
            continue;
        };
        let (k, v) = (k.trim().to_ascii_lowercase(), v.trim().to_string());
        if !KEYS.contains(&k.as_str()) {
            ps.errors.push(format!("line {}: unknown key '{k}'", no + 1));
        } else if pairs.iter().any(|(_, pk, _)| *pk == k) {
            ps.errors.push(format!("line {}: duplicate key '{k}'", no + 1));
        } else {
            pairs.push((no + 1, k, v));
        }
    }
    let get = |k: &str| pairs.iter().find(|(_, pk, _)| pk == k).map(|(_, _, v)| v.as_str());

    let (domain, origin) = match get("domain") {
        Some(raw) => ps.domain(raw).unwrap_or((Domain::unit_interval(), 0.0)),
        None => (Domain::unit_interval(), 0.0),
    };
    let n = get("n").and_then(|v| ps.count("n", v)).unwrap_or(DEFAULT_RESOLUTION);
    ps.require(n >= MIN_RESOLUTION, format!("n: must be at least {MIN_RESOLUTION}, got {n}"));

    let gamma = match get("gamma") {
        Some(v) => ps.real("gamma", v),
        None => {
            ps.errors.push("missing required key 'gamma'".into());
            None
        }
    };
    if let Some(g) = gamma {
        ps.require(g > 0.0, format!("gamma: must be positive, got {g}"));
    }
    let p = match get("p") {
        Some(v) => ps.real("p", v),
        None => {
            ps.errors.push("missing required key 'p'".into());
            None
        }
    };
    if let Some(p) = p {
        ps.require(p > 0.0, format!("p: must be positive, got {p}"));
    }

    let shape = match get("shape").map(str::to_ascii_lowercase).as_deref() {
        None | Some("pure") | Some("purepower") => ProfileShape::PurePower,
        Some("modulated") => ProfileShape::Modulated,
        Some(other) => {
            ps.errors.push(format!("shape: '{other}' is not 'pure' or 'modulated'"));
            ProfileShape::PurePower
        }
    };
    let default_kappa = if shape == ProfileShape::Modulated { 2.0 } else { 1.0 };
    let kappa = get("kappa").and_then(|v| ps.real("kappa", v)).unwrap_or(default_kappa);
    ps.require(kappa >= 1.0, format!("kappa: must be at least 1, got {kappa}"));
    if shape == ProfileShape::PurePower {
        ps.require(kappa == 1.0, format!("kappa: the pure profile needs kappa = 1, got {kappa}"));
    }

    let lambda = match (get("lambda"), get("lambda_fraction")) {
        (Some(_), Some(_)) => {
            ps.errors.push("give at most one of 'lambda' and 'lambda_fraction'".into());
            None
        }
        (Some(v), None) => ps.real("lambda", v).map(LambdaSpec::Absolute),
        (None, Some(v)) => ps.real("lambda_fraction", v).map(LambdaSpec::Fraction),
        (None, None) => None,
    };
    if let Some(LambdaSpec::Absolute(l) | LambdaSpec::Fraction(l)) = lambda {
        ps.require(l > 0.0, format!("lambda: must be positive, got {l}"));
    }

    let list_keys = ["lambdas", "lambda_fractions", "lambda_range"];
    let given: Vec<&str> = list_keys.iter().copied().filter(|k| get(k).is_some()).collect();
    let lambdas = if given.len() > 1 {
        ps.errors.push(format!("give at most one of {}", given.join(", ")));
        None
    } else {
        match given.first().copied() {
            Some("lambdas") => ps.reals("lambdas", get("lambdas").unwrap()).map(LambdaList::Absolute),
            Some("lambda_fractions") => {
                ps.reals("lambda_fractions", get("lambda_fractions").unwrap()).map(LambdaList::Fractions)
            }
            Some(_) => {
                let raw = get("lambda_range").unwrap();
                let parts: Vec<&str> = raw.split_whitespace().collect();
                if parts.len() != 3 {
                    ps.errors.push(format!("lambda_range: expected 'lo hi count', got '{raw}'"));
                    None
                } else {
                    let lo = ps.real("lambda_range", parts[0]);
                    let hi = ps.real("lambda_range", parts[1]);
                    let count = ps.count("lambda_range", parts[2]);
                    match (lo, hi, count) {
                        (Some(lo), Some(hi), Some(count)) => {
                            ps.require(
                                lo > 0.0 && hi >= lo && count >= 1 && (count == 1 || hi > lo),
                                format!("lambda_range: need 0 < lo < hi and count >= 1, got '{raw}'"),
                            );
                            Some(LambdaList::LogRange { lo, hi, count })
                        }
                        _ => None,
                    }
                }
            }
            None => None,
        }
    };
    if let Some(LambdaList::Absolute(v) | LambdaList::Fractions(v)) = &lambdas {
        ps.require(v.iter().all(|&l| l > 0.0), "lambdas: every value must be positive");
        ps.require(v.windows(2).all(|w| w[0] <= w[1]), "lambdas: values must be sorted ascending");
    }

    let defaults = SolveOptions::default();
    let epsilon = get("epsilon").and_then(|v| ps.real("epsilon", v)).unwrap_or(0.0);
    ps.require(epsilon >= 0.0, format!("epsilon: must be nonnegative, got {epsilon}"));
    let tol = get("tol").and_then(|v| ps.real("tol", v));
    if let Some(t) = tol {
        ps.require(t > 0.0, format!("tol: must be positive, got {t}"));
    }
    let max_iter = get("max_iter").and_then(|v| ps.count("max_iter", v)).unwrap_or(defaults.max_iter);
    ps.require(max_iter >= 1, "max_iter: must be at least 1");
    let touch_eps = get("touch_eps").and_then(|v| ps.real("touch_eps", v)).unwrap_or(defaults.touch_eps);
    ps.require(touch_eps > 0.0, format!("touch_eps: must be positive, got {touch_eps}"));
    let eig_tol = get("eig_tol").and_then(|v| ps.real("eig_tol", v)).unwrap_or(DEFAULT_EIGEN_TOL);
    ps.require(eig_tol > 0.0 && eig_tol < 1.0, format!("eig_tol: must lie in (0, 1), got {eig_tol}"));
    let rel_tol = get("rel_tol").and_then(|v| ps.real("rel_tol", v)).unwrap_or(DEFAULT_REL_TOL);
    ps.require((1e-4..=1e-2).contains(&rel_tol), format!("rel_tol: must lie in [1e-4, 1e-2], got {rel_tol}"));
    let beta = get("beta").and_then(|v| ps.real("beta", v));
    if let (Some(b), Some(g)) = (beta, gamma) {
        ps.require(b > 0.0 && b < g, format!("beta: must lie in (0, gamma), got {b}"));
    }
    let q = get("q").and_then(|v| ps.real("q", v)).unwrap_or(2.0);
    ps.require(q >= 1.0, format!("q: must be at least 1, got {q}"));
    let r = get("r").and_then(|v| ps.real("r", v)).unwrap_or(0.1);
    ps.require(r > 0.0, format!("r: must be positive, got {r}"));
    let dimension = get("dimension").and_then(|v| ps.count("dimension", v)).map(|d| d as u32);
    if let Some(d) = dimension {
        ps.require(d >= 1, "dimension: must be at least 1");
    }
    let out = get("out").map(PathBuf::from);

    if !ps.errors.is_empty() {
        return Err(ConfigErrors(ps.errors));
    }
    Ok(RunConfig {
        domain,
        origin,
        n,
        gamma: gamma.unwrap(),
        p: p.unwrap(),
        kappa,
        shape,
        lambda,
        lambdas,
        epsilon,
        tol,
        max_iter,
        touch_eps,
        eig_tol,
        rel_tol,
        beta,
        q,
        r,
        dimension,
        out,
    })
}
