//! Optimal power policy for Gaussian-input Rayleigh-fading wiretap channels
//! and Monte-Carlo estimation of the reliability/security/overall outage and
//! suspension probabilities.
//!
//! The policy transmits the minimum power p_min(Gamma_bob) = g_bob(rho)/Gamma_bob
//! meeting Bob's reliability condition whenever it also meets Eve's security
//! cap p_max(Gamma_eve) = g_eve(rho')/Gamma_eve and the average-power cut z,
//! and suspends (p = 0) otherwise. rho and rho' are optimized once per
//! scenario; they do not depend on the instantaneous channels.

use rand_core::{RngCore, SeedableRng};

use crate::bounds::Thresholds;
use crate::error::{Error, Result};
use crate::gap;

/// Monte-Carlo scenario: Rayleigh gains with the given mean square values,
/// common noise variance (unequal noise variances can be expressed by folding
/// the ratio into the mean gains, since only Gamma = |h|^2 / sigma^2 enters),
/// and the reliability/security thresholds.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FadingScenario {
    /// E[|h_bob|^2].
    pub mean_gain_bob: f64,
    /// E[|h_eve|^2].
    pub mean_gain_eve: f64,
    /// Common noise variance sigma^2.
    pub noise_var: f64,
    pub n: u64,
    /// Rate in nats per two-dimensional (complex) channel use.
    pub rate: f64,
    pub thresholds: Thresholds,
    /// Average-power grid for sweeps; individual runs take their p_av from
    /// the policy.
    pub p_av_grid: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    /// Reject draws with |h_bob| <= |h_eve| (outages are then evaluated only
    /// where both conditions are simultaneously satisfiable).
    pub condition_on_bob_stronger: bool,
}

impl FadingScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.mean_gain_bob > 0.0) || !(self.mean_gain_eve > 0.0) {
            return Err(Error::Domain("mean channel gains must be positive".into()));
        }
        if !(self.noise_var > 0.0) {
            return Err(Error::Domain("noise variance must be positive".into()));
        }
        if self.n == 0 {
            return Err(Error::Domain("blocklength must be at least 1".into()));
        }
        if !(self.rate > 0.0) {
            return Err(Error::Domain("rate must be positive".into()));
        }
        if self.samples == 0 {
            return Err(Error::Domain("sample count must be at least 1".into()));
        }
        if self.p_av_grid.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::Domain("average-power grid entries must be nonnegative".into()));
        }
        if !self.thresholds.interior() {
            return Err(Error::Domain(
                "the power policy needs interior thresholds (degenerate thresholds make the \
                 reliability or security condition vacuous)"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Transmit-power policy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum PowerPolicy {
    /// Fixed power p for every accepted draw.
    Constant(f64),
    /// The Theorem-3 optimal policy under the average-power budget p_av.
    OptimalTheorem3 { p_av: f64 },
}

/// Average-power cut of the optimal policy. The sample-average power is a
/// right-continuous step function of z, so its supremum under the budget is
/// either unbounded or an open boundary at the first step level whose
/// cumulative average exceeds the budget.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ZOpt {
    /// Every feasible sample fits in the budget.
    Infinite,
    /// Transmit exactly the samples with p_min strictly below the boundary.
    OpenAt(f64),
}

impl ZOpt {
    pub fn admits(&self, p_min: f64) -> bool {
        match self {
            ZOpt::Infinite => true,
            ZOpt::OpenAt(bound) => p_min < *bound,
        }
    }

    /// The reported numeric value: the boundary, or +inf.
    pub fn value(&self) -> f64 {
        match self {
            ZOpt::Infinite => f64::INFINITY,
            ZOpt::OpenAt(bound) => *bound,
        }
    }
}

/// Outage and suspension probabilities of one (scenario, policy) run, with
/// the applied power cut and the achieved sample-average power.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OutageReport {
    pub rel: f64,
    pub sec: f64,
    pub overall: f64,
    pub suspension: f64,
    pub z_opt: f64,
    pub achieved_avg_power: f64,
}

/// Scenario-constant policy ingredients: the optimized g values. Both are
/// independent of the instantaneous channels, so they are computed once per
/// scenario and shared across all draws.
struct PolicyConstants {
    g_bob_min: f64,
    /// Raw g_eve optimum; nonpositive when no power satisfies the security
    /// condition.
    g_eve_max: f64,
}

fn policy_constants(scenario: &FadingScenario) -> Result<PolicyConstants> {
    let limits = gap::gamma_limits_gaussian(scenario.n, scenario.rate, &scenario.thresholds)?;
    Ok(PolicyConstants { g_bob_min: limits.gamma_bob_inf, g_eve_max: limits.gamma_eve_sup })
}

/// Minimum power satisfying Bob's reliability condition at instantaneous SNR
/// Gamma_bob: g_bob(rho_opt) / Gamma_bob.
pub fn p_min(gamma_bob: f64, n: u64, rate: f64, p_err_bob_th: f64) -> Result<f64> {
    if !(gamma_bob > 0.0) {
        return Err(Error::Domain(format!("Gamma_bob must be positive, got {gamma_bob}")));
    }
    let (g, _) = gap::min_g_bob(n, rate, p_err_bob_th)?;
    Ok(g / gamma_bob)
}

/// Maximum power satisfying Eve's security condition at instantaneous SNR
/// Gamma_eve: g_eve(rho'_opt) / Gamma_eve, or 0 when no power does (the
/// existence condition fails).
pub fn p_max(gamma_eve: f64, n: u64, rate: f64, p_err_eve_th: f64) -> Result<f64> {
    if !(gamma_eve > 0.0) {
        return Err(Error::Domain(format!("Gamma_eve must be positive, got {gamma_eve}")));
    }
    let (g, _) = gap::max_g_eve(n, rate, p_err_eve_th)?;
    Ok(if g <= 0.0 { 0.0 } else { g / gamma_eve })
}

/// Draws the scenario's (Gamma_bob, Gamma_eve) pairs. Each sample's
/// randomness derives only from (seed, sample index); rejected draws (when
/// conditioning on |h_bob| > |h_eve|) are simply dropped, so any partitioning
/// reproduces the same accepted set.
pub fn sample_gains(scenario: &FadingScenario) -> Result<Vec<(f64, f64)>> {
    scenario.validate()?;
    let mut out = Vec::with_capacity(scenario.samples as usize);
    for i in 0..scenario.samples {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(scenario.seed);
        rng.set_stream(i.wrapping_add(1));
        let h2_bob = -scenario.mean_gain_bob * unit_open_closed(&mut rng).ln();
        let h2_eve = -scenario.mean_gain_eve * unit_open_closed(&mut rng).ln();
        if scenario.condition_on_bob_stronger && h2_bob <= h2_eve {
            continue;
        }
        out.push((h2_bob / scenario.noise_var, h2_eve / scenario.noise_var));
    }
    if out.is_empty() {
        return Err(Error::Scenario(
            "no samples were accepted after conditioning on |h_bob| > |h_eve|".into(),
        ));
    }
    Ok(out)
}

/// Uniform draw in (0, 1].
fn unit_open_closed(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Largest power cut keeping the sample-average power of the optimal policy
/// within p_av, on the given common-random-number sample set.
pub fn z_opt(scenario: &FadingScenario, gammas: &[(f64, f64)], p_av: f64) -> Result<ZOpt> {
    if !(p_av >= 0.0) {
        return Err(Error::Domain(format!("average power budget must be nonnegative, got {p_av}")));
    }
    let constants = policy_constants(scenario)?;
    z_opt_from_constants(&constants, gammas, p_av)
}

fn z_opt_from_constants(
    constants: &PolicyConstants,
    gammas: &[(f64, f64)],
    p_av: f64,
) -> Result<ZOpt> {
    if gammas.is_empty() {
        return Err(Error::Scenario("empty sample set".into()));
    }
    // Feasible samples (p_min <= p_max), sorted by their p_min step level.
    let mut levels: Vec<f64> = gammas
        .iter()
        .filter_map(|&(gb, ge)| {
            let pmin = constants.g_bob_min / gb;
            let pmax = constants.g_eve_max / ge;
            (pmin <= pmax).then_some(pmin)
        })
        .collect();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("p_min values are comparable"));
    if levels.is_empty() {
        // z never matters: the policy suspends everywhere and E[p] = 0.
        return Ok(ZOpt::Infinite);
    }
    // Group duplicates: a cut cannot admit a strict subset of equal levels.
    let mut distinct: Vec<(f64, f64)> = Vec::new(); // (level, cumulative sum)
    let mut cum = 0.0;
    for &p in &levels {
        cum += p;
        match distinct.last_mut() {
            Some((level, sum)) if *level == p => *sum = cum,
            _ => distinct.push((p, cum)),
        }
    }
    let budget = p_av * gammas.len() as f64;
    // Prefix sums grow monotonically, so "bisect" for the first infeasible level.
    let first_over = distinct.partition_point(|&(_, sum)| sum <= budget);
    if first_over == distinct.len() {
        Ok(ZOpt::Infinite)
    } else {
        Ok(ZOpt::OpenAt(distinct[first_over].0))
    }
}

/// The Theorem-3 case split: transmit p_min when it satisfies both the
/// security cap and the average-power cut, else suspend.
pub fn optimal_power(
    gamma_bob: f64,
    gamma_eve: f64,
    scenario: &FadingScenario,
    z: &ZOpt,
) -> Result<f64> {
    let pmin = p_min(gamma_bob, scenario.n, scenario.rate, scenario.thresholds.p_err_bob_th)?;
    let pmax = p_max(gamma_eve, scenario.n, scenario.rate, scenario.thresholds.p_err_eve_th)?;
    Ok(if pmin <= pmax && z.admits(pmin) { pmin } else { 0.0 })
}

/// Monte-Carlo outage estimation.
///
/// Draws the scenario's channel pairs, applies the policy (computing z_opt on
/// the same sample set for the optimal policy), and averages the Definition-4
/// indicator events. The reliability event `P_ber_bob_up(p Gamma_bob) > th`
/// is evaluated as `p < p_min` and the security event
/// `P_ber_eve_low(p Gamma_eve) < th` as `p > p_max`: these are exact monotone
/// rearrangements of the BER-bound comparisons (gamma >= g_bob(rho_opt) resp.
/// gamma <= g_eve(rho'_opt)), and comparing in the power domain reuses the
/// identical floats the policy used, so the Theorem-3 identities hold exactly
/// instead of flipping on rounding at the policy boundary.
pub fn outage_mc(scenario: &FadingScenario, policy: &PowerPolicy) -> Result<OutageReport> {
    scenario.validate()?;
    if let PowerPolicy::Constant(p) = policy {
        if !(*p >= 0.0) {
            return Err(Error::Domain(format!("constant power must be nonnegative, got {p}")));
        }
    }
    let constants = policy_constants(scenario)?;
    let gammas = sample_gains(scenario)?;
    let n_samples = gammas.len() as f64;

    let z = match policy {
        PowerPolicy::Constant(_) => ZOpt::Infinite,
        PowerPolicy::OptimalTheorem3 { p_av } => {
            if !(*p_av >= 0.0) {
                return Err(Error::Domain(format!(
                    "average power budget must be nonnegative, got {p_av}"
                )));
            }
            z_opt_from_constants(&constants, &gammas, *p_av)?
        }
    };

    let mut rel = 0u64;
    let mut sec = 0u64;
    let mut overall = 0u64;
    let mut suspended = 0u64;
    let mut power_sum = 0.0;
    for &(gamma_bob, gamma_eve) in &gammas {
        let pmin = constants.g_bob_min / gamma_bob;
        let pmax_raw = constants.g_eve_max / gamma_eve;
        let p = match policy {
            PowerPolicy::Constant(p) => *p,
            PowerPolicy::OptimalTheorem3 { .. } => {
                if pmin <= pmax_raw && z.admits(pmin) {
                    pmin
                } else {
                    0.0
                }
            }
        };
        let rel_out = p < pmin;
        let sec_out = p > pmax_raw;
        rel += rel_out as u64;
        sec += sec_out as u64;
        overall += (rel_out || sec_out) as u64;
        suspended += (p == 0.0) as u64;
        power_sum += p;
    }

    Ok(OutageReport {
        rel: rel as f64 / n_samples,
        sec: sec as f64 / n_samples,
        overall: overall as f64 / n_samples,
        suspension: suspended as f64 / n_samples,
        z_opt: z.value(),
        achieved_avg_power: power_sum / n_samples,
    })
}
