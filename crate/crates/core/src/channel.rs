//! Channel families, their capacities and inverse capacities, and the
//! Gallager function E0(rho, q) for positive rho (Bob side) and negative
//! rho' (Eve side).
//!
//! All rates are in nats per channel use. The binary-input AWGN channel is a
//! one-dimensional real channel with unit antipodal inputs and noise variance
//! 1/gamma; the Gaussian-input AWGN channel is a complex (two-dimensional)
//! channel with unit-power input and noise variance 1/gamma.

use crate::error::{Error, Result};
use crate::quad;

/// Relative tolerance of capacity-inverting bisections.
const INVERSE_CAPACITY_REL_TOL: f64 = 1e-10;
/// Relative tolerance of the binary-input AWGN quadratures.
const BIAWGN_QUAD_REL_TOL: f64 = 1e-10;

/// Memoryless channel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ChannelFamily {
    /// Binary symmetric channel; parameter is the crossover probability.
    Bsc,
    /// Binary erasure channel; parameter is the erasure probability.
    Bec,
    /// Binary-input real AWGN channel; parameter is the linear SNR.
    BiAwgn,
    /// Gaussian-input complex AWGN channel; parameter is the linear SNR.
    GaussianAwgn,
}

impl ChannelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelFamily::Bsc => "bsc",
            ChannelFamily::Bec => "bec",
            ChannelFamily::BiAwgn => "bi-awgn",
            ChannelFamily::GaussianAwgn => "gi-awgn",
        }
    }
}

/// A memoryless channel instance: a family plus its noise parameter
/// (crossover/erasure probability for BSC/BEC, linear SNR for the AWGN
/// families).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChannelModel {
    family: ChannelFamily,
    param: f64,
}

impl ChannelModel {
    pub fn new(family: ChannelFamily, param: f64) -> Result<Self> {
        if !param.is_finite() {
            return Err(Error::Domain(format!("channel parameter must be finite, got {param}")));
        }
        match family {
            ChannelFamily::Bsc if !(0.0..=0.5).contains(&param) => Err(Error::Domain(format!(
                "BSC crossover probability must lie in [0, 0.5], got {param}"
            ))),
            ChannelFamily::Bec if !(0.0..=1.0).contains(&param) => Err(Error::Domain(format!(
                "BEC erasure probability must lie in [0, 1], got {param}"
            ))),
            ChannelFamily::BiAwgn | ChannelFamily::GaussianAwgn if param < 0.0 => Err(
                Error::Domain(format!("SNR must be nonnegative, got {param}")),
            ),
            _ => Ok(Self { family, param }),
        }
    }

    pub fn bsc(eps: f64) -> Result<Self> {
        Self::new(ChannelFamily::Bsc, eps)
    }

    pub fn bec(eps: f64) -> Result<Self> {
        Self::new(ChannelFamily::Bec, eps)
    }

    pub fn bi_awgn(snr: f64) -> Result<Self> {
        Self::new(ChannelFamily::BiAwgn, snr)
    }

    pub fn gaussian_awgn(snr: f64) -> Result<Self> {
        Self::new(ChannelFamily::GaussianAwgn, snr)
    }

    pub fn family(&self) -> ChannelFamily {
        self.family
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// Channel capacity in nats per channel use.
    pub fn capacity(&self) -> f64 {
        capacity(self)
    }
}

/// Input distribution over the channel alphabet.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum InputDistribution {
    /// Equiprobable inputs (the optimal and converse-valid choice for the
    /// symmetric discrete-input families).
    Equiprobable,
    /// Explicit pmf over a binary input alphabet. For the AWGN channel the
    /// entries weight the inputs +1 and -1 in that order.
    ExplicitPmf(Vec<f64>),
    /// Circularly symmetric complex Gaussian input with the given power;
    /// only valid with the Gaussian-input AWGN family.
    CircularGaussian(f64),
}

impl InputDistribution {
    /// Checks the distribution's own invariants and its compatibility with
    /// `channel`.
    pub fn validate_for(&self, channel: &ChannelModel) -> Result<()> {
        match self {
            InputDistribution::Equiprobable => match channel.family {
                ChannelFamily::GaussianAwgn => Err(Error::Incompatible(
                    "equiprobable input requires a discrete-input family".into(),
                )),
                _ => Ok(()),
            },
            InputDistribution::ExplicitPmf(q) => {
                if channel.family == ChannelFamily::GaussianAwgn {
                    return Err(Error::Incompatible(
                        "explicit pmf input requires a discrete-input family".into(),
                    ));
                }
                if q.len() != 2 {
                    return Err(Error::Incompatible(format!(
                        "explicit pmf must cover the binary alphabet, got {} entries",
                        q.len()
                    )));
                }
                if q.iter().any(|&p| !(p >= 0.0)) {
                    return Err(Error::Incompatible("pmf entries must be nonnegative".into()));
                }
                let sum: f64 = q.iter().sum();
                if (sum - 1.0).abs() > 1e-12 {
                    return Err(Error::Incompatible(format!(
                        "pmf entries must sum to 1 within 1e-12, got {sum}"
                    )));
                }
                Ok(())
            }
            InputDistribution::CircularGaussian(p) => {
                if channel.family != ChannelFamily::GaussianAwgn {
                    return Err(Error::Incompatible(
                        "circular-Gaussian input is only valid with the Gaussian-input AWGN family"
                            .into(),
                    ));
                }
                if !(*p >= 0.0) {
                    return Err(Error::Incompatible(format!(
                        "circular-Gaussian power must be nonnegative, got {p}"
                    )));
                }
                Ok(())
            }
        }
    }

    fn binary_probs(&self) -> (f64, f64) {
        match self {
            InputDistribution::Equiprobable => (0.5, 0.5),
            InputDistribution::ExplicitPmf(q) => (q[0], q[1]),
            InputDistribution::CircularGaussian(_) => unreachable!("checked by validate_for"),
        }
    }
}

/// Binary entropy in nats, with the exact x ln x -> 0 limits at the edges.
fn binary_entropy_nats(eps: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    term(eps) + term(1.0 - eps)
}

/// ln cosh(z), overflow-free: |z| + ln(1 + e^{-2|z|}) - ln 2.
fn ln_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// ln(1 + e^t) without overflow.
fn ln_1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Quadrature window for the binary-input AWGN integrands: the integrands are
/// concentrated around the unit antipodal inputs, so 12-sigma tails suffice.
fn biawgn_window(gamma: f64) -> (f64, f64) {
    let spread = 12.0 / gamma.sqrt();
    (-1.0 - spread, 1.0 + spread)
}

/// Integrand of the binary-input AWGN Gallager integral at equiprobable
/// inputs, evaluated in the log domain to survive large gamma.
pub(crate) fn biawgn_e0_integrand(gamma: f64, rho: f64) -> impl Fn(f64) -> f64 {
    let log_norm = 0.5 * (gamma / (2.0 * std::f64::consts::PI)).ln();
    move |y: f64| {
        let log_val = log_norm - 0.5 * gamma * (y * y + 1.0)
            + (1.0 + rho) * ln_cosh(gamma * y / (1.0 + rho));
        log_val.exp()
    }
}

/// Same integrand for a general binary pmf (q_plus on +1, q_minus on -1).
fn biawgn_e0_integrand_pmf(gamma: f64, rho: f64, q_plus: f64, q_minus: f64) -> impl Fn(f64) -> f64 {
    let log_norm = 0.5 * (gamma / (2.0 * std::f64::consts::PI)).ln();
    move |y: f64| {
        // ln(q+ e^a + q- e^{-a}) with a = s*gamma*y, s = 1/(1+rho).
        let a = gamma * y / (1.0 + rho);
        let log_mix = if a >= 0.0 {
            a + (q_plus + q_minus * (-2.0 * a).exp()).ln()
        } else {
            -a + (q_plus * (2.0 * a).exp() + q_minus).ln()
        };
        (log_norm - 0.5 * gamma * (y * y + 1.0) + (1.0 + rho) * log_mix).exp()
    }
}

/// Capacity in nats per channel use.
///
/// BSC: ln 2 - H(eps). BEC: (1 - eps) ln 2. Gaussian-input AWGN: ln(1+gamma).
/// Binary-input AWGN: ln 2 - E_y[ln(1 + e^{-2 gamma y})] over y ~ N(1, 1/gamma),
/// evaluated by quadrature.
pub fn capacity(channel: &ChannelModel) -> f64 {
    match channel.family {
        ChannelFamily::Bsc => std::f64::consts::LN_2 - binary_entropy_nats(channel.param),
        ChannelFamily::Bec => (1.0 - channel.param) * std::f64::consts::LN_2,
        ChannelFamily::GaussianAwgn => channel.param.ln_1p(),
        ChannelFamily::BiAwgn => {
            let gamma = channel.param;
            if gamma == 0.0 {
                return 0.0;
            }
            let log_norm = 0.5 * (gamma / (2.0 * std::f64::consts::PI)).ln();
            let f = move |y: f64| {
                let d = y - 1.0;
                (log_norm - 0.5 * gamma * d * d).exp() * ln_1p_exp(-2.0 * gamma * y)
            };
            let (a, b) = biawgn_window(gamma);
            let expected_llr_term = quad::integrate(&f, a, b, BIAWGN_QUAD_REL_TOL);
            std::f64::consts::LN_2 - expected_llr_term
        }
    }
}

/// Channel parameter at which the family's capacity equals `rate`.
///
/// Gaussian-input AWGN inverts in closed form (e^R - 1); the discrete-input
/// families bisect the monotone capacity map to relative tolerance 1e-10.
pub fn inverse_capacity(family: ChannelFamily, rate: f64) -> Result<f64> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::Range(format!("rate must be positive, got {rate}")));
    }
    match family {
        ChannelFamily::GaussianAwgn => Ok(rate.exp_m1()),
        ChannelFamily::Bsc | ChannelFamily::Bec | ChannelFamily::BiAwgn => {
            if rate >= std::f64::consts::LN_2 {
                return Err(Error::Range(format!(
                    "rate {rate} is at or above the noiseless capacity ln 2 of {}",
                    family.name()
                )));
            }
            let cap_at = |p: f64| capacity(&ChannelModel { family, param: p });
            match family {
                // Capacity decreases in the channel parameter.
                ChannelFamily::Bsc | ChannelFamily::Bec => {
                    let hi_param = if family == ChannelFamily::Bsc { 0.5 } else { 1.0 };
                    let (mut lo, mut hi) = (0.0_f64, hi_param);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if cap_at(mid) > rate {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                        if hi - lo <= INVERSE_CAPACITY_REL_TOL * mid.max(f64::MIN_POSITIVE) {
                            break;
                        }
                    }
                    Ok(0.5 * (lo + hi))
                }
                // Capacity increases in the SNR.
                ChannelFamily::BiAwgn => {
                    let mut hi = 1.0_f64;
                    while cap_at(hi) < rate {
                        hi *= 2.0;
                        if hi > 1e18 {
                            return Err(Error::Range(format!(
                                "rate {rate} not reachable by binary-input AWGN"
                            )));
                        }
                    }
                    let mut lo = 0.0_f64;
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if cap_at(mid) < rate {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                        if hi - lo <= INVERSE_CAPACITY_REL_TOL * mid.max(f64::MIN_POSITIVE) {
                            break;
                        }
                    }
                    Ok(0.5 * (lo + hi))
                }
                ChannelFamily::GaussianAwgn => unreachable!(),
            }
        }
    }
}

/// Gallager function E0(rho, q) in nats.
///
/// A single implementation serves both Bob's E0(rho, .) on [0, 1] and Eve's
/// E0(rho', .) on (-1, 0]. Closed forms are used for BSC, BEC, and the
/// Gaussian-input channel; the binary-input AWGN integral is evaluated by
/// quadrature on the truncated 12-sigma window.
pub fn gallager_e0(channel: &ChannelModel, dist: &InputDistribution, rho: f64) -> Result<f64> {
    if !(rho > -1.0 && rho <= 1.0) {
        return Err(Error::Domain(format!("rho must lie in (-1, 1], got {rho}")));
    }
    dist.validate_for(channel)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    let s = 1.0 / (1.0 + rho);
    match channel.family {
        ChannelFamily::Bsc => {
            let eps = channel.param;
            let (q0, q1) = dist.binary_probs();
            let a = (1.0 - eps).powf(s);
            let b = eps.powf(s);
            let sum = (q0 * a + q1 * b).powf(1.0 + rho) + (q0 * b + q1 * a).powf(1.0 + rho);
            Ok(-sum.ln())
        }
        ChannelFamily::Bec => {
            let eps = channel.param;
            let (q0, q1) = dist.binary_probs();
            let sum = (1.0 - eps) * (q0.powf(1.0 + rho) + q1.powf(1.0 + rho)) + eps;
            Ok(-sum.ln())
        }
        ChannelFamily::GaussianAwgn => {
            let power = match dist {
                InputDistribution::CircularGaussian(p) => *p,
                _ => unreachable!("checked by validate_for"),
            };
            Ok(rho * (power * channel.param / (1.0 + rho)).ln_1p())
        }
        ChannelFamily::BiAwgn => {
            let gamma = channel.param;
            if gamma == 0.0 {
                return Ok(0.0);
            }
            let (a, b) = biawgn_window(gamma);
            let integral = match dist {
                InputDistribution::Equiprobable => {
                    quad::integrate(&biawgn_e0_integrand(gamma, rho), a, b, BIAWGN_QUAD_REL_TOL)
                }
                InputDistribution::ExplicitPmf(q) => quad::integrate(
                    &biawgn_e0_integrand_pmf(gamma, rho, q[0], q[1]),
                    a,
                    b,
                    BIAWGN_QUAD_REL_TOL,
                ),
                InputDistribution::CircularGaussian(_) => unreachable!(),
            };
            Ok(-integral.ln())
        }
    }
}
