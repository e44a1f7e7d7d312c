//! Highest reliable rate R_sup, lowest secure rate R_inf, the rate margins
//! from capacity, and the feasible rate interval.

use crate::bounds::{optimize_rho_bob, optimize_rho_eve, Thresholds};
use crate::channel::{ChannelModel, InputDistribution};
use crate::error::{Error, Result};
use crate::optim;

/// Relative bisection tolerance of the rate searches.
const RATE_BISECT_REL_TOL: f64 = 1e-9;

/// Rate margins and the feasible interval between them.
///
/// delta_r_bob = C_bob - r_sup and delta_r_eve = r_inf - C_eve are the
/// margins the finite blocklength costs on each side; rate_interval =
/// r_sup - r_inf (negative when no rate satisfies both conditions) and
/// capacity_interval = C_bob - C_eve.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MarginResult {
    pub r_sup: f64,
    pub r_inf: f64,
    pub delta_r_bob: f64,
    pub delta_r_eve: f64,
    pub rate_interval: f64,
    pub capacity_interval: f64,
    pub rho_at_sup: f64,
    pub rho_prime_at_inf: f64,
    pub feasible: bool,
}

/// Highest rate whose Bob block-error upper bound stays at or below the
/// threshold; returns `(r_sup, rho_at_sup)`.
///
/// The degenerate threshold 1 returns C_bob exactly (with 0.0 recorded for
/// rho, the R -> C_bob limit of the optimizer). Interior thresholds bisect
/// the monotone feasibility predicate
/// `exponent(R) >= ln(1 / p_err_bob_th) / n` over (0, C_bob).
pub fn rate_sup(
    bob_channel: &ChannelModel,
    dist: &InputDistribution,
    n: u64,
    p_err_bob_th: f64,
) -> Result<(f64, f64)> {
    if !(p_err_bob_th > 0.0 && p_err_bob_th <= 1.0) {
        return Err(Error::Domain(format!(
            "Bob block-error threshold must lie in (0, 1], got {p_err_bob_th}"
        )));
    }
    let capacity = bob_channel.capacity();
    if p_err_bob_th == 1.0 {
        return Ok((capacity, 0.0));
    }
    if capacity <= 0.0 {
        return Err(Error::Infeasible(
            "Bob's channel has zero capacity; no positive rate is reliable".into(),
        ));
    }
    let needed = -(p_err_bob_th.ln()) / n as f64;
    // Fail fast on invalid inputs before entering the closure.
    optimize_rho_bob(bob_channel, dist, capacity * 0.5, n)?;
    let feasible = |rate: f64| {
        optimize_rho_bob(bob_channel, dist, rate, n)
            .expect("inputs validated above")
            .exponent
            >= needed
    };
    let lo = capacity * 1e-12;
    if !feasible(lo) {
        return Err(Error::Infeasible(format!(
            "block-error threshold {p_err_bob_th} unreachable at blocklength {n} even as R -> 0"
        )));
    }
    let hi = capacity * (1.0 - 1e-12);
    let r_sup = optim::bisect_last_true(feasible, lo, hi, RATE_BISECT_REL_TOL * capacity);
    let rho = optimize_rho_bob(bob_channel, dist, r_sup, n)?.rho_opt;
    Ok((r_sup, rho))
}

/// Lowest rate whose Eve block-error lower bound reaches the threshold;
/// returns `(r_inf, rho_prime_at_inf)`.
///
/// The degenerate threshold 0 returns C_eve exactly. Interior thresholds
/// bisect `exponent(R) >= ln(1 / (1 - p_err_eve_th)) / n` over
/// (C_eve, R_hi), where R_hi grows by doubling from C_eve + 1 until feasible.
pub fn rate_inf(
    eve_channel: &ChannelModel,
    dist: &InputDistribution,
    n: u64,
    p_err_eve_th: f64,
) -> Result<(f64, f64)> {
    if !(p_err_eve_th >= 0.0 && p_err_eve_th < 1.0) {
        return Err(Error::Domain(format!(
            "Eve block-error threshold must lie in [0, 1), got {p_err_eve_th}"
        )));
    }
    let capacity = eve_channel.capacity();
    if p_err_eve_th == 0.0 {
        return Ok((capacity, 0.0));
    }
    let needed = -(-p_err_eve_th).ln_1p() / n as f64;
    optimize_rho_eve(eve_channel, dist, capacity + 0.5, n)?;
    let feasible = |rate: f64| {
        rate > 0.0
            && optimize_rho_eve(eve_channel, dist, rate, n)
                .expect("inputs validated above")
                .exponent
                >= needed
    };
    let mut hi = capacity + 1.0;
    let mut doublings = 0;
    while !feasible(hi) {
        hi = capacity + (hi - capacity) * 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::Numerical(
                "no feasible rate found for the security condition within the search range".into(),
            ));
        }
    }
    let r_inf = optim::bisect_first_true(feasible, capacity, hi, RATE_BISECT_REL_TOL * hi.max(1.0));
    let rho = optimize_rho_eve(eve_channel, dist, r_inf, n)?.rho_opt;
    Ok((r_inf, rho))
}

/// Composes [`rate_sup`], [`rate_inf`] and the capacities into the full
/// margin record.
pub fn margins(
    bob_channel: &ChannelModel,
    eve_channel: &ChannelModel,
    dist: &InputDistribution,
    n: u64,
    thresholds: &Thresholds,
) -> Result<MarginResult> {
    let c_bob = bob_channel.capacity();
    let c_eve = eve_channel.capacity();
    let (r_sup, rho_at_sup) = rate_sup(bob_channel, dist, n, thresholds.p_err_bob_th)?;
    let (r_inf, rho_prime_at_inf) = rate_inf(eve_channel, dist, n, thresholds.p_err_eve_th)?;
    let rate_interval = r_sup - r_inf;
    Ok(MarginResult {
        r_sup,
        r_inf,
        delta_r_bob: c_bob - r_sup,
        delta_r_eve: r_inf - c_eve,
        rate_interval,
        capacity_interval: c_bob - c_eve,
        rho_at_sup,
        rho_prime_at_inf,
        feasible: rate_interval > 0.0,
    })
}
