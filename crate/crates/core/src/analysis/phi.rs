//! Ball-growth bound at a light pivot.

use serde::Serialize;

use crate::partition::{MetricView, PartitionParams};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiCheck {
    pub gamma: f64,
    pub eta: f64,
    pub r_prime: f64,
    /// Right end `R1 - 3 R0 - r` of the domain of `Phi`.
    pub domain: f64,
    /// `(t, Phi(t))` at `t = 0` and at every jump inside the domain.
    pub phi_samples: Vec<(f64, f64)>,
    /// Measure of the `t` where `Phi(t + r') >= Phi(t) + gamma * int_0^t Phi`.
    pub mu_s_prime: f64,
    pub phi_end: f64,
    pub lower_bound: f64,
    pub bound_ok: bool,
    /// Set when `gamma * r' >= 1`, where the bound does not apply.
    pub skipped: bool,
}

/// Builds `Phi(t) = |Ball(z, t + 3 R0)| / |Ball(z, 3 R0)|` on `[0, R']` with
/// `R' = R1 - 3R0 - r`, `r' = 2r`, `gamma = 25 r / R0^2`,
/// `eta = sqrt(gamma / ((e - 1) r'))`, measures the set `S'` exactly (`Phi`
/// is a step function, its integral piecewise linear) and tests
/// `Phi(R') >= e^{eta mu(S') - 1}` with relative slack `1e-9`.
pub fn check_phi_bound(view: &MetricView<'_>, z: usize, params: &PartitionParams) -> PhiCheck {
    let r_prime = 2.0 * params.r;
    let gamma = 25.0 * params.r / (params.r0 * params.r0);
    let eta = (gamma / ((std::f64::consts::E - 1.0) * r_prime)).sqrt();
    let offset = 3.0 * params.r0;
    let domain = params.r1 - offset - params.r;
    let base = view.ball_size(z, offset) as f64;

    // jump positions of Phi (right-continuous), shifted into t coordinates
    let jumps: Vec<f64> = view
        .ball(z, params.r1 + params.r)
        .map(|(d, _)| d - offset)
        .filter(|&t| t > 0.0)
        .collect();
    let phi = |t: f64| -> f64 { (base + jumps.partition_point(|&j| j <= t) as f64) / base };

    let mut phi_samples = vec![(0.0, 1.0)];
    for &j in jumps.iter().filter(|&&j| j <= domain) {
        if phi_samples.last().is_some_and(|s| s.0 == j) {
            phi_samples.last_mut().expect("nonempty").1 = phi(j);
        } else {
            phi_samples.push((j, phi(j)));
        }
    }
    let phi_end = phi(domain);

    let skipped = gamma * r_prime >= 1.0 || !(r_prime <= domain);
    let mut mu_s_prime = 0.0;
    if !skipped {
        let hi = domain - r_prime;
        let mut cuts: Vec<f64> = vec![0.0, hi];
        for &j in &jumps {
            for c in [j, j - r_prime] {
                if c > 0.0 && c < hi {
                    cuts.push(c);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut integral = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let level = phi(a);
            let gap = phi(a + r_prime) - level;
            // holds on [a, a + (gap/gamma - integral)/level) ∩ [a, b)
            let room = gap / gamma - integral;
            if room >= 0.0 {
                mu_s_prime += (room / level).min(b - a);
            }
            integral += level * (b - a);
        }
    }
    let lower_bound = (eta * mu_s_prime - 1.0).exp();
    PhiCheck {
        gamma,
        eta,
        r_prime,
        domain,
        phi_samples,
        mu_s_prime,
        phi_end,
        lower_bound,
        bound_ok: skipped || phi_end >= lower_bound * (1.0 - 1e-9),
        skipped,
    }
}
