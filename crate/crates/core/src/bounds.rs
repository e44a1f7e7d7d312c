//! Bob's ensemble-average block/BER upper bounds and Eve's universal
//! block/BER lower bounds at a given rate and blocklength, including the
//! inner optimization over rho (Bob, (0, 1]) and rho' (Eve, (-1, 0)).

use crate::channel::{gallager_e0, ChannelModel, InputDistribution};
use crate::error::{Error, Result};
use crate::optim;

/// Lower clip of Bob's rho search interval (the paper's interval is open at 0).
pub const RHO_BOB_MIN: f64 = 1e-9;
/// Clip margin of Eve's rho' interval: the search runs on
/// [-1 + RHO_PRIME_CLIP, -RHO_PRIME_CLIP] because the supremum can sit at the
/// open endpoint -1 (e.g. when E0 vanishes identically).
pub const RHO_PRIME_CLIP: f64 = 1e-6;
/// Golden-section width tolerance of the rho searches.
pub const RHO_SEARCH_TOL: f64 = 1e-9;

/// Reliability/security block-error thresholds plus the SPN output-BER floor
/// used to derive the BER thresholds.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Thresholds {
    /// Bob's block-error threshold, in (0, 1].
    pub p_err_bob_th: f64,
    /// Eve's block-error threshold, in [0, 1).
    pub p_err_eve_th: f64,
    /// Single-error SPN output BER floor P_ber_spn_low(r, K), in (0, 0.5].
    pub spn_ber_low: f64,
}

impl Thresholds {
    pub fn new(p_err_bob_th: f64, p_err_eve_th: f64, spn_ber_low: f64) -> Result<Self> {
        if !(p_err_bob_th > 0.0 && p_err_bob_th <= 1.0) {
            return Err(Error::Domain(format!(
                "Bob block-error threshold must lie in (0, 1], got {p_err_bob_th}"
            )));
        }
        if !(p_err_eve_th >= 0.0 && p_err_eve_th < 1.0) {
            return Err(Error::Domain(format!(
                "Eve block-error threshold must lie in [0, 1), got {p_err_eve_th}"
            )));
        }
        if !(spn_ber_low > 0.0 && spn_ber_low <= 0.5) {
            return Err(Error::Domain(format!(
                "SPN BER floor must lie in (0, 0.5], got {spn_ber_low}"
            )));
        }
        Ok(Self { p_err_bob_th, p_err_eve_th, spn_ber_low })
    }

    /// Bob's derived BER threshold, always recomputed as 0.5 * P_err_bob_th.
    pub fn p_ber_bob_th(&self) -> f64 {
        0.5 * self.p_err_bob_th
    }

    /// Eve's derived BER threshold, always recomputed as
    /// spn_ber_low * P_err_eve_th.
    pub fn p_ber_eve_th(&self) -> f64 {
        self.spn_ber_low * self.p_err_eve_th
    }

    /// True when both block-error thresholds are strictly interior.
    pub fn interior(&self) -> bool {
        self.p_err_bob_th < 1.0 && self.p_err_eve_th > 0.0
    }
}

/// Result of an inner rho optimization: the optimizer, the attained exponent
/// max{E0(rho) - rho R}, and the block bound at the given blocklength, clamped
/// to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExponentResult {
    pub rho_opt: f64,
    pub exponent: f64,
    pub bound: f64,
}

fn check_rate_and_n(rate: f64, n: u64) -> Result<()> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::Domain(format!("rate must be positive, got {rate}")));
    }
    if n == 0 {
        return Err(Error::Domain("blocklength must be at least 1".into()));
    }
    Ok(())
}

/// Maximize E0(rho) - rho R over Bob's interval (0, 1].
///
/// The search is a 64-point pre-scan followed by golden-section refinement to
/// width 1e-9. If the attained maximum is nonpositive (rate at or above the
/// achievable region), the exponent is reported as-is and the bound clamps
/// at 1.
pub fn optimize_rho_bob(
    channel: &ChannelModel,
    dist: &InputDistribution,
    rate: f64,
    n: u64,
) -> Result<ExponentResult> {
    check_rate_and_n(rate, n)?;
    dist.validate_for(channel)?;
    let objective =
        |rho: f64| gallager_e0(channel, dist, rho).expect("rho within domain") - rho * rate;
    let (rho_opt, exponent) = optim::maximize(objective, RHO_BOB_MIN, 1.0, RHO_SEARCH_TOL)?;
    let bound = (-(n as f64) * exponent).exp().min(1.0);
    Ok(ExponentResult { rho_opt, exponent, bound })
}

/// Maximize E0(rho') - rho' R over Eve's clipped interval
/// [-1 + RHO_PRIME_CLIP, -RHO_PRIME_CLIP].
pub fn optimize_rho_eve(
    channel: &ChannelModel,
    dist: &InputDistribution,
    rate: f64,
    n: u64,
) -> Result<ExponentResult> {
    check_rate_and_n(rate, n)?;
    dist.validate_for(channel)?;
    let objective =
        |rho: f64| gallager_e0(channel, dist, rho).expect("rho within domain") - rho * rate;
    let (rho_opt, exponent) =
        optim::maximize(objective, -1.0 + RHO_PRIME_CLIP, -RHO_PRIME_CLIP, RHO_SEARCH_TOL)?;
    let bound = (1.0 - (-(n as f64) * exponent).exp()).max(0.0);
    Ok(ExponentResult { rho_opt, exponent, bound })
}

/// Bob's ensemble-average block-error upper bound
/// min(1, exp(-n max{E0(rho) - rho R})).
pub fn bob_block_upper(
    channel: &ChannelModel,
    dist: &InputDistribution,
    rate: f64,
    n: u64,
) -> Result<f64> {
    Ok(optimize_rho_bob(channel, dist, rate, n)?.bound)
}

/// Eve's universal block-error lower bound
/// max(0, 1 - exp(-n max{E0(rho') - rho' R})).
pub fn eve_block_lower(
    channel: &ChannelModel,
    dist: &InputDistribution,
    rate: f64,
    n: u64,
) -> Result<f64> {
    Ok(optimize_rho_eve(channel, dist, rate, n)?.bound)
}

/// Bob's BER upper bound: half the block bound (the SPN output BER given a
/// block error never exceeds 0.5).
pub fn bob_ber_upper(
    channel: &ChannelModel,
    dist: &InputDistribution,
    rate: f64,
    n: u64,
) -> Result<f64> {
    Ok(0.5 * bob_block_upper(channel, dist, rate, n)?)
}

/// Eve's BER lower bound: the single-error SPN floor times the block lower
/// bound.
pub fn eve_ber_lower(
    channel: &ChannelModel,
    dist: &InputDistribution,
    rate: f64,
    n: u64,
    spn_ber_low: f64,
) -> Result<f64> {
    if !(spn_ber_low > 0.0 && spn_ber_low <= 0.5) {
        return Err(Error::Domain(format!(
            "SPN BER floor must lie in (0, 0.5], got {spn_ber_low}"
        )));
    }
    Ok(spn_ber_low * eve_block_lower(channel, dist, rate, n)?)
}
