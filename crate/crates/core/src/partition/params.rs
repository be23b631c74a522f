//! Decomposition constants derived from `(r, R, q)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Enforces the parameter constraints under which the decomposition
    /// guarantees are proven, including `mu(S) >= R/2` at every light ball.
    Strict,
    /// Accepts any `beta` with `r < R0` and `3 R0 < R1`; clamps the radius draw
    /// to `mu(S)` when `S` is short.
    Practical,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Mode::Strict),
            "practical" => Ok(Mode::Practical),
            _ => Err(Error::InvalidParameter(format!("unknown mode {s:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Practical => "practical",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PartitionParams {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub q: f64,
    pub beta: f64,
    pub d_beta: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    pub rho: f64,
    pub mode: Mode,
}

/// Scale-free quantities for a given `(beta, q)`; `R = 1`.
fn unit(beta: f64, q: f64) -> (f64, f64, f64) {
    let d = 2.0 * (q + 1.0) * (1.0 / beta).ln();
    let r0 = 1.0 / d;
    (d, r0, 1.0 - r0)
}

/// The four strict-mode constraints at `(beta, q)`, in the order
/// `r < R0 < R1 < R`, `R0 + r < R1/100`, `2 beta D < 1`, `beta D < 1/(5 sqrt 2)`.
pub fn strict_constraints(beta: f64, q: f64) -> [bool; 4] {
    let (d, r0, r1) = unit(beta, q);
    let r = beta;
    [
        r < r0 && r0 < r1 && r1 < 1.0,
        r0 + r < r1 / 100.0,
        2.0 * beta * d < 1.0,
        beta * d < 1.0 / (5.0 * std::f64::consts::SQRT_2),
    ]
}

fn practical_ok(beta: f64, q: f64) -> bool {
    let (d, r0, r1) = unit(beta, q);
    beta > 0.0 && beta < 1.0 && beta < r0 && 3.0 * r0 < r1 && d.is_finite()
}

/// Largest `beta` in `(lo, hi)` for which `ok` holds, assuming `ok` is true on
/// `(0, beta*]` and false above it. Geometric steps first, so tiny answers keep
/// full relative precision.
fn bisect_largest(mut lo: f64, mut hi: f64, ok: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > 1e-15 * hi {
        let mid = if hi > 4.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Largest `beta` in `(0, 1/e)` satisfying all strict-mode constraints.
pub fn beta_star(q: f64) -> f64 {
    assert!(q >= 1.0, "q must be at least 1");
    bisect_largest(1e-300, (-1.0f64).exp(), |b| strict_constraints(b, q).iter().all(|&c| c))
}

/// Largest `beta` with `beta * D <= 1/2` (so `r <= R0/2`) and `3 R0 < R1`.
/// Used to cap alpha-derived radii in practical mode.
pub fn beta_practical(q: f64) -> f64 {
    assert!(q >= 1.0, "q must be at least 1");
    bisect_largest(1e-300, (-1.0f64).exp(), |b| {
        let (d, _, _) = unit(b, q);
        b * d <= 0.5 && practical_ok(b, q)
    })
}

/// `r = sqrt(alpha) / ln(1/alpha)`.
pub fn alpha_radius(alpha: f64) -> f64 {
    alpha.sqrt() / (1.0 / alpha).ln()
}

/// Solves `alpha_radius(alpha) / R = beta_star(q)` for `alpha`.
pub fn alpha_star(q: f64, big_r: f64) -> f64 {
    let target = beta_star(q);
    // alpha_radius is increasing on (0, e^-2); bisect on ln(alpha)
    let (mut lo, mut hi) = (-745.0f64, -2.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if alpha_radius(mid.exp()) / big_r <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.exp()
}

impl PartitionParams {
    pub fn new(r: f64, big_r: f64, q: f64, mode: Mode) -> Result<Self> {
        if !(big_r > 0.0 && big_r.is_finite()) {
            return Err(Error::InvalidParameter(format!("R must be positive, got {big_r}")));
        }
        if !(r > 0.0 && r < big_r) {
            return Err(Error::InvalidParameter(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
        }
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!("q must be at least 1, got {q}")));
        }
        let p = PartitionParams::unchecked(r, big_r, q, mode);
        let beta = p.beta;
        match mode {
            Mode::Strict => {
                let c = p.strict_checks();
                if let Some(i) = c.iter().position(|&ok| !ok) {
                    return Err(Error::InvalidParameter(format!(
                        "beta = {beta} violates strict constraint #{} (beta_star({q}) = {})",
                        i + 1,
                        beta_star(q)
                    )));
                }
            }
            Mode::Practical => {
                if !(p.r < p.r0 && 3.0 * p.r0 < p.r1) {
                    return Err(Error::InvalidParameter(format!(
                        "beta = {beta} needs r < R0 and 3 R0 < R1 (r = {}, R0 = {}, R1 = {})",
                        p.r, p.r0, p.r1
                    )));
                }
            }
        }
        Ok(p)
    }

    /// Derived constants without any mode checks, for formula-level tests.
    pub fn unchecked(r: f64, big_r: f64, q: f64, mode: Mode) -> Self {
        let beta = r / big_r;
        let d_beta = 2.0 * (q + 1.0) * (1.0 / beta).ln();
        let r0 = big_r / d_beta;
        PartitionParams {
            r,
            big_r,
            q,
            beta,
            d_beta,
            r0,
            r1: big_r - r0,
            rho: beta.powf(-(q + 1.0)),
            mode,
        }
    }

    pub fn from_beta(beta: f64, big_r: f64, q: f64, mode: Mode) -> Result<Self> {
        PartitionParams::new(beta * big_r, big_r, q, mode)
    }

    /// Strict constraints evaluated on the stored radii.
    pub fn strict_checks(&self) -> [bool; 4] {
        let (r, r0, r1, br) = (self.r, self.r0, self.r1, self.big_r);
        [
            r < r0 && r0 < r1 && r1 < br,
            r0 + r < r1 / 100.0,
            2.0 * self.beta * self.d_beta < 1.0,
            self.beta * self.d_beta < 1.0 / (5.0 * std::f64::consts::SQRT_2),
        ]
    }

    /// Constant `25 beta D^2` of the shell inequality.
    pub fn shell_constant(&self) -> f64 {
        25.0 * self.beta * self.d_beta * self.d_beta
    }

    /// `|exp(-D/2) - beta^(q+1)|`.
    pub fn exp_identity_residual(&self) -> f64 {
        ((-self.d_beta / 2.0).exp() - self.beta.powf(self.q + 1.0)).abs()
    }
}

/// Radii chosen from the asymmetry parameter.
///
/// Strict mode first lowers `alpha` to `alpha_star(q, R)`. Practical mode keeps
/// `r = sqrt(alpha)/ln(1/alpha)` unless that breaks `r < R0`, in which case
/// `beta` is capped at [`beta_practical`]; the second return value reports
/// whether the cap applied.
pub fn derive_params(alpha: f64, q: f64, big_r: f64, mode: Mode) -> Result<(PartitionParams, bool)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    match mode {
        Mode::Strict => {
            let a = alpha.min(alpha_star(q, big_r));
            let r = alpha_radius(a);
            // guard the last ulp of the bisection
            let r = r.min(beta_star(q) * big_r);
            Ok((PartitionParams::new(r, big_r, q, mode)?, a < alpha))
        }
        Mode::Practical => {
            let r = alpha_radius(alpha);
            if r < big_r && practical_ok(r / big_r, q) {
                Ok((PartitionParams::new(r, big_r, q, mode)?, false))
            } else {
                Ok((PartitionParams::from_beta(beta_practical(q), big_r, q, mode)?, true))
            }
        }
    }
}
