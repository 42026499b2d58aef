//! Closed-form critical exponents and the `(γ, p, N)` regime classifier.

use std::fmt;

use crate::error::{Error, Result};

/// `p*_γ = 2/γ - 1`.
pub fn p_star(gamma: f64) -> f64 {
    2.0 / gamma - 1.0
}

/// Membership in the existence range: `(0, p*_γ]` for `γ < 1`, `(0, 1)` for
/// `γ = 1`, empty for `γ > 1`.
pub fn in_existence_range(gamma: f64, p: f64) -> bool {
    if !(p > 0.0) || !(gamma > 0.0) {
        return false;
    }
    if gamma < 1.0 {
        p <= p_star(gamma)
    } else if gamma == 1.0 {
        p < 1.0
    } else {
        false
    }
}

/// `f0(t) = 3 + 1/t + 2 sqrt(1 + 1/t)`, strictly decreasing with limit 5.
pub fn f0(t: f64) -> f64 {
    3.0 + 1.0 / t + 2.0 * (1.0 + 1.0 / t).sqrt()
}

fn threshold(root: f64) -> f64 {
    let s = root.sqrt() - 1.0;
    1.0 / (s * s - 1.0)
}

/// `p#_N = 1/((sqrt(N-2) - 1)^2 - 1)` for `N ≥ 7`, and `+∞` below.
///
/// Note that this closed form satisfies `f0(p#_N) = N - 1`.
pub fn p_sharp(n: u32) -> f64 {
    if n >= 7 {
        threshold(f64::from(n) - 2.0)
    } else {
        f64::INFINITY
    }
}

/// `q#_N = 1/((sqrt(N/2-2) - 1)^2 - 1)` for `N ≥ 13`, and `+∞` below.
///
/// Satisfies `f0(q#_N) = N/2 - 1`.
pub fn q_sharp(n: u32) -> f64 {
    if n >= 13 {
        threshold(f64::from(n) / 2.0 - 2.0)
    } else {
        f64::INFINITY
    }
}

/// `α = 2 - N / f0(p)`.
pub fn holder_exponent(p: f64, n: u32) -> f64 {
    2.0 - f64::from(n) / f0(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    ExistsMinimal,
    NoSolutionSupercritical,
    NoSolutionGammaLarge,
}

/// Regularity class of the extremal solution, when minimal solutions exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremal {
    ExtremalClassical,
    ExtremalHolder,
    ExtremalUnknown,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for Extremal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub gamma: f64,
    pub p: f64,
    pub dimension: u32,
    pub p_star: f64,
    pub in_i_gamma: bool,
    pub p_sharp: f64,
    pub q_sharp: f64,
    pub f0_p: f64,
    /// Hölder exponent, present only for [`Extremal::ExtremalHolder`].
    pub alpha: Option<f64>,
    pub regime: Regime,
    pub extremal: Option<Extremal>,
}

pub fn classify(gamma: f64, p: f64, dimension: u32) -> Result<RegimeReport> {
    if !(gamma > 0.0 && gamma.is_finite()) || !(p > 0.0 && p.is_finite()) || dimension == 0 {
        return Err(Error::InvalidParameter(format!(
            "classify needs gamma > 0, p > 0, N >= 1 (got {gamma}, {p}, {dimension})"
        )));
    }
    let ps = p_star(gamma);
    let in_i = in_existence_range(gamma, p);
    let (p_sh, q_sh) = (p_sharp(dimension), q_sharp(dimension));

    let regime = if gamma > 1.0 {
        Regime::NoSolutionGammaLarge
    } else if in_i {
        Regime::ExistsMinimal
    } else {
        Regime::NoSolutionSupercritical
    };

    let mut alpha = None;
    let extremal = (regime == Regime::ExistsMinimal).then(|| {
        if p < p_sh {
            Extremal::ExtremalClassical
        } else if dimension >= 7 && p < ps.min(q_sh) {
            // the closed-form thresholds do not keep α inside (0, 1] on the
            // whole range, so the Hölder class is only assigned where it is
            let a = holder_exponent(p, dimension);
            if a > 0.0 && a <= 1.0 + 1e-12 {
                alpha = Some(a);
                Extremal::ExtremalHolder
            } else {
                Extremal::ExtremalUnknown
            }
        } else {
            Extremal::ExtremalUnknown
        }
    });

    Ok(RegimeReport {
        gamma,
        p,
        dimension,
        p_star: ps,
        in_i_gamma: in_i,
        p_sharp: p_sh,
        q_sharp: q_sh,
        f0_p: f0(p),
        alpha,
        regime,
        extremal,
    })
}
