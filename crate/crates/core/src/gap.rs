//! Security gaps: the Gaussian-input closed form, its high-SNR approximation,
//! the existence condition, and the numerically obtained gaps for BI-AWGN,
//! BSC, and BEC.
//!
//! The Gaussian case rides on the closed-form constraint inversions
//!
//!   g_bob(rho)  = (1+rho)  ((P_err_bob_th)^{-1/(n rho)}   e^R - 1)
//!   g_eve(rho') = (1+rho') ((1-P_err_eve_th)^{-1/(n rho')} e^R - 1)
//!
//! whose extrema over rho in (0, 1] and rho' in (-1, 0) give the SNR limits;
//! the discrete and binary-input cases bisect the BER bounds directly.

use crate::bounds::{
    bob_ber_upper, eve_ber_lower, optimize_rho_bob, optimize_rho_eve, Thresholds, RHO_BOB_MIN,
    RHO_PRIME_CLIP,
};
use crate::channel::{inverse_capacity, ChannelFamily, ChannelModel, InputDistribution};
use crate::error::{Error, Result};
use crate::optim;

/// Golden-section width tolerance of the g-function searches.
const G_SEARCH_TOL: f64 = 1e-9;

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("blocklength must be at least 1".into()));
    }
    Ok(())
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::Domain(format!("rate must be positive, got {rate}")));
    }
    Ok(())
}

/// Minimum SNR multiplier satisfying Bob's reliability condition at parameter
/// rho: the constraint `P_ber_bob_up <= threshold` on a Gaussian-input channel
/// is exactly `gamma >= g_bob(rho)`.
pub fn g_bob(rho: f64, n: u64, rate: f64, p_err_bob_th: f64) -> Result<f64> {
    check_n(n)?;
    check_rate(rate)?;
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Domain(format!("rho must lie in (0, 1], got {rho}")));
    }
    if !(p_err_bob_th > 0.0 && p_err_bob_th < 1.0) {
        return Err(Error::Domain(format!(
            "g_bob needs an interior Bob threshold, got {p_err_bob_th}"
        )));
    }
    Ok((1.0 + rho) * ((rate - p_err_bob_th.ln() / (n as f64 * rho)).exp() - 1.0))
}

/// Maximum SNR multiplier satisfying Eve's security condition at parameter
/// rho': `P_ber_eve_low >= threshold` is exactly `gamma <= g_eve(rho')`.
/// Negative values mean the condition is unsatisfiable at this rho'.
pub fn g_eve(rho_prime: f64, n: u64, rate: f64, p_err_eve_th: f64) -> Result<f64> {
    check_n(n)?;
    check_rate(rate)?;
    if !(rho_prime > -1.0 && rho_prime < 0.0) {
        return Err(Error::Domain(format!("rho' must lie in (-1, 0), got {rho_prime}")));
    }
    if !(p_err_eve_th > 0.0 && p_err_eve_th < 1.0) {
        return Err(Error::Domain(format!(
            "g_eve needs an interior Eve threshold, got {p_err_eve_th}"
        )));
    }
    let ln_1m = (-p_err_eve_th).ln_1p();
    Ok((1.0 + rho_prime) * ((rate - ln_1m / (n as f64 * rho_prime)).exp() - 1.0))
}

/// min over (0, 1] of g_bob; returns (value, argmin).
pub(crate) fn min_g_bob(n: u64, rate: f64, p_err_bob_th: f64) -> Result<(f64, f64)> {
    g_bob(1.0, n, rate, p_err_bob_th)?;
    let f = |rho: f64| g_bob(rho, n, rate, p_err_bob_th).expect("validated above");
    let (rho, value) = optim::minimize(f, RHO_BOB_MIN, 1.0, G_SEARCH_TOL)?;
    Ok((value, rho))
}

/// max over the clipped (-1, 0) interval of g_eve; returns (value, argmax).
/// The value can be nonpositive when the existence condition fails.
pub(crate) fn max_g_eve(n: u64, rate: f64, p_err_eve_th: f64) -> Result<(f64, f64)> {
    g_eve(-0.5, n, rate, p_err_eve_th)?;
    let f = |rho: f64| g_eve(rho, n, rate, p_err_eve_th).expect("validated above");
    let (rho, value) = optim::maximize(f, -1.0 + RHO_PRIME_CLIP, -RHO_PRIME_CLIP, G_SEARCH_TOL)?;
    Ok((value, rho))
}

/// The Gaussian-input SNR limits: Bob's lowest admissible SNR and Eve's
/// highest admissible SNR at rate R and blocklength n.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GammaLimits {
    pub gamma_bob_inf: f64,
    pub rho_opt: f64,
    /// Raw optimum of g_eve; nonpositive when no SNR satisfies the security
    /// condition (the existence condition fails).
    pub gamma_eve_sup: f64,
    pub rho_prime_opt: f64,
}

/// Computes both SNR limits. Degenerate thresholds return the capacity
/// boundary gamma_0 = e^R - 1 on that side (with 0.0 recorded for the
/// then-undefined optimizer).
pub fn gamma_limits_gaussian(n: u64, rate: f64, thresholds: &Thresholds) -> Result<GammaLimits> {
    check_n(n)?;
    check_rate(rate)?;
    let gamma_0 = rate.exp_m1();
    let (gamma_bob_inf, rho_opt) = if thresholds.p_err_bob_th == 1.0 {
        (gamma_0, 0.0)
    } else {
        min_g_bob(n, rate, thresholds.p_err_bob_th)?
    };
    let (gamma_eve_sup, rho_prime_opt) = if thresholds.p_err_eve_th == 0.0 {
        (gamma_0, 0.0)
    } else {
        max_g_eve(n, rate, thresholds.p_err_eve_th)?
    };
    Ok(GammaLimits { gamma_bob_inf, rho_opt, gamma_eve_sup, rho_prime_opt })
}

/// Existence condition for a positive Eve SNR limit:
/// (1 - (2/n) ln(1 - P_err_eve_th)) (1 - P_err_eve_th)^{1/n} e^R > 1.
pub fn existence_condition(n: u64, rate: f64, p_err_eve_th: f64) -> bool {
    let nf = n as f64;
    let ln_1m = (-p_err_eve_th).ln_1p();
    (1.0 - 2.0 / nf * ln_1m) * (ln_1m / nf).exp() * rate.exp() > 1.0
}

/// Security-gap output: the gap itself (dB for the AWGN families, absolute
/// parameter difference for BSC/BEC), the two channel-quality limits, the
/// optimizing rho / rho', and the capacity-boundary reference parameter
/// (gamma_0 or eps_0).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GapResult {
    pub gap: f64,
    pub bob_limit: f64,
    pub eve_limit: f64,
    pub rho_opt: f64,
    pub rho_prime_opt: f64,
    pub reference_param: f64,
}

/// Gaussian-input security gap 10 log10(gamma_bob_inf / gamma_eve_sup).
pub fn security_gap_gaussian(n: u64, rate: f64, thresholds: &Thresholds) -> Result<GapResult> {
    let limits = gamma_limits_gaussian(n, rate, thresholds)?;
    if limits.gamma_eve_sup <= 0.0 {
        return Err(Error::Infeasible(format!(
            "security gap undefined: no positive Eve SNR satisfies the security condition \
             (existence condition fails at n = {n}, R = {rate})"
        )));
    }
    Ok(GapResult {
        gap: 10.0 * (limits.gamma_bob_inf / limits.gamma_eve_sup).log10(),
        bob_limit: limits.gamma_bob_inf,
        eve_limit: limits.gamma_eve_sup,
        rho_opt: limits.rho_opt,
        rho_prime_opt: limits.rho_prime_opt,
        reference_param: rate.exp_m1(),
    })
}

/// High-SNR approximation of the Gaussian gap:
/// -(1/(n rho)) 10 log10 P_bob + (1/(n rho')) 10 log10(1 - P_eve)
/// + 10 log10((1+rho)/(1+rho')), with rho and rho' optimizing the high-SNR
/// g functions (the "-1" terms dropped).
pub fn security_gap_high_snr(n: u64, rate: f64, thresholds: &Thresholds) -> Result<f64> {
    check_n(n)?;
    check_rate(rate)?;
    if !thresholds.interior() {
        return Err(Error::Domain(
            "the high-SNR gap approximation needs interior thresholds".into(),
        ));
    }
    let nf = n as f64;
    let ln_pb = thresholds.p_err_bob_th.ln();
    let ln_1m_pe = (-thresholds.p_err_eve_th).ln_1p();
    // Optimize the logarithms of the positive high-SNR g functions.
    let (rho, _) = optim::minimize(
        |rho: f64| (1.0 + rho).ln() - ln_pb / (nf * rho),
        RHO_BOB_MIN,
        1.0,
        G_SEARCH_TOL,
    )?;
    let (rho_prime, _) = optim::maximize(
        |rho: f64| (1.0 + rho).ln() - ln_1m_pe / (nf * rho),
        -1.0 + RHO_PRIME_CLIP,
        -RHO_PRIME_CLIP,
        G_SEARCH_TOL,
    )?;
    Ok(-10.0 * ln_pb.exp().log10() / (nf * rho)
        + 10.0 * ln_1m_pe.exp().log10() / (nf * rho_prime)
        + 10.0 * ((1.0 + rho) / (1.0 + rho_prime)).log10())
}

/// BSC/BEC security gap eps_eve_inf - eps_bob_sup (Definition-3 form):
/// Bob's largest admissible and Eve's smallest sufficient channel parameter
/// around the capacity boundary eps_0, found by bisecting the BER bounds with
/// the inner rho optimization inside.
pub fn security_gap_discrete(
    family: ChannelFamily,
    n: u64,
    rate: f64,
    thresholds: &Thresholds,
) -> Result<GapResult> {
    if !matches!(family, ChannelFamily::Bsc | ChannelFamily::Bec) {
        return Err(Error::Incompatible(format!(
            "the parameter-difference gap is defined for BSC and BEC, not {}",
            family.name()
        )));
    }
    check_n(n)?;
    let eps_0 = inverse_capacity(family, rate)?;
    // At eps = 1 the BEC lower-bound exponent degenerates; stop just short.
    let eps_max = match family {
        ChannelFamily::Bsc => 0.5,
        _ => 1.0 - 1e-9,
    };
    let equ = InputDistribution::Equiprobable;
    let channel = |eps: f64| ChannelModel::new(family, eps).expect("eps within family domain");

    let (bob_limit, rho_opt) = if thresholds.p_err_bob_th == 1.0 {
        (eps_0, 0.0)
    } else {
        let th = thresholds.p_ber_bob_th();
        let ok = |eps: f64| {
            bob_ber_upper(&channel(eps), &equ, rate, n).expect("validated inputs") <= th
        };
        if !ok(0.0) {
            return Err(Error::Infeasible(format!(
                "Bob's BER threshold is unreachable even on a noiseless {} channel",
                family.name()
            )));
        }
        let eps = optim::bisect_last_true(ok, 0.0, eps_0 * (1.0 - 1e-12), 1e-10);
        let rho = optimize_rho_bob(&channel(eps), &equ, rate, n)?.rho_opt;
        (eps, rho)
    };

    let (eve_limit, rho_prime_opt) = if thresholds.p_err_eve_th == 0.0 {
        (eps_0, 0.0)
    } else {
        let th = thresholds.p_ber_eve_th();
        let ok = |eps: f64| {
            eve_ber_lower(&channel(eps), &equ, rate, n, thresholds.spn_ber_low)
                .expect("validated inputs")
                >= th
        };
        if !ok(eps_max) {
            return Err(Error::Infeasible(format!(
                "Eve's BER threshold is unreachable on any {} channel at this rate and blocklength",
                family.name()
            )));
        }
        let lo = (eps_0 * (1.0 + 1e-12)).min(eps_max);
        let eps = optim::bisect_first_true(ok, lo, eps_max, 1e-10);
        let rho = optimize_rho_eve(&channel(eps), &equ, rate, n)?.rho_opt;
        (eps, rho)
    };

    Ok(GapResult {
        gap: eve_limit - bob_limit,
        bob_limit,
        eve_limit,
        rho_opt,
        rho_prime_opt,
        reference_param: eps_0,
    })
}

/// Binary-input AWGN security gap in dB: same bisection structure as the
/// discrete case, with the quadrature-backed E0 inside, around the
/// capacity-boundary SNR gamma_0.
pub fn security_gap_biawgn(n: u64, rate: f64, thresholds: &Thresholds) -> Result<GapResult> {
    check_n(n)?;
    let gamma_0 = inverse_capacity(ChannelFamily::BiAwgn, rate)?;
    let equ = InputDistribution::Equiprobable;
    let channel = |gamma: f64| ChannelModel::bi_awgn(gamma).expect("gamma >= 0");
    let xtol = 1e-9 * gamma_0.max(1.0);

    let (bob_limit, rho_opt) = if thresholds.p_err_bob_th == 1.0 {
        (gamma_0, 0.0)
    } else {
        let th = thresholds.p_ber_bob_th();
        let ok = |gamma: f64| {
            bob_ber_upper(&channel(gamma), &equ, rate, n).expect("validated inputs") <= th
        };
        let mut hi = 2.0 * gamma_0 + 1.0;
        let mut doublings = 0;
        while !ok(hi) {
            hi *= 2.0;
            doublings += 1;
            if doublings > 60 {
                return Err(Error::Infeasible(
                    "Bob's BER threshold is unreachable at any binary-input SNR".into(),
                ));
            }
        }
        let gamma = optim::bisect_first_true(ok, gamma_0 * (1.0 + 1e-12), hi, xtol);
        let rho = optimize_rho_bob(&channel(gamma), &equ, rate, n)?.rho_opt;
        (gamma, rho)
    };

    let (eve_limit, rho_prime_opt) = if thresholds.p_err_eve_th == 0.0 {
        (gamma_0, 0.0)
    } else {
        let th = thresholds.p_ber_eve_th();
        let ok = |gamma: f64| {
            eve_ber_lower(&channel(gamma), &equ, rate, n, thresholds.spn_ber_low)
                .expect("validated inputs")
                >= th
        };
        if !ok(0.0) {
            return Err(Error::Infeasible(format!(
                "security gap undefined: Eve's threshold is unreachable even at zero SNR \
                 (n = {n}, R = {rate})"
            )));
        }
        let gamma = optim::bisect_last_true(ok, 0.0, gamma_0 * (1.0 - 1e-12), xtol);
        let rho = optimize_rho_eve(&channel(gamma), &equ, rate, n)?.rho_opt;
        (gamma, rho)
    };

    if eve_limit <= 0.0 {
        return Err(Error::Infeasible(
            "security gap undefined: Eve's admissible SNR collapsed to zero".into(),
        ));
    }
    Ok(GapResult {
        gap: 10.0 * (bob_limit / eve_limit).log10(),
        bob_limit,
        eve_limit,
        rho_opt,
        rho_prime_opt,
        reference_param: gamma_0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn th(b: f64, e: f64) -> Thresholds {
        Thresholds::new(b, e, 0.5).unwrap()
    }

    #[test]
    fn g_bob_hand_value() {
        // 2 ((1e-4)^{-1/1000} e - 1), frozen from an arbitrary-precision oracle.
        let v = g_bob(1.0, 1000, 1.0, 1e-4).unwrap();
        assert!((v - 3.486_867_561_084_196).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn g_eve_boundary_limits() {
        // rho' -> -1: g_eve -> 0; rho' -> 0-: g_eve -> -1.
        let v = g_eve(-1.0 + 1e-9, 1000, 1.0, 0.9999).unwrap();
        assert!(v.abs() < 1e-6, "got {v}");
        let v = g_eve(-1e-9, 1000, 1.0, 0.9999).unwrap();
        assert!((v + 1.0).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn g_function_domains() {
        assert!(matches!(g_bob(0.0, 100, 1.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(g_bob(1.5, 100, 1.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(g_eve(0.0, 100, 1.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(g_eve(-1.0, 100, 1.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(g_bob(0.5, 100, 1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn g_bob_convex_and_steep_at_zero() {
        let f = |rho: f64| g_bob(rho, 1000, 1.0, 1e-4).unwrap();
        let h = 1e-3;
        for i in 1..40 {
            let rho = 0.02 + 0.024 * i as f64;
            let second = f(rho + h) - 2.0 * f(rho) + f(rho - h);
            assert!(second > 0.0, "second difference at {rho} is {second}");
        }
        assert!(f(1e-6) > 10.0 * f(1e-3));
    }

    #[test]
    fn existence_condition_cases() {
        assert!(existence_condition(100, 1.0, 0.9999));
        // Tiny blocklength with an extreme security demand fails.
        assert!(!existence_condition(1, 0.0001, 0.999999));
    }

    #[test]
    fn gamma_limits_degenerate_and_interior() {
        let limits = gamma_limits_gaussian(100, 1.0, &Thresholds::new(1.0, 0.0, 0.5).unwrap())
            .unwrap();
        let gamma_0 = std::f64::consts::E - 1.0;
        assert!((limits.gamma_bob_inf - gamma_0).abs() < 1e-12);
        assert!((limits.gamma_eve_sup - gamma_0).abs() < 1e-12);

        let limits = gamma_limits_gaussian(1000, 1.0, &th(1e-4, 0.9999)).unwrap();
        assert!(limits.gamma_bob_inf > gamma_0);
        assert!(limits.gamma_eve_sup < gamma_0);
        assert!(limits.gamma_eve_sup > 0.0);
        assert!(limits.rho_opt > 0.0 && limits.rho_opt <= 1.0);
        assert!(limits.rho_prime_opt > -1.0 && limits.rho_prime_opt < 0.0);
    }

    #[test]
    fn gamma_limits_match_grid_oracle() {
        let n = 1000;
        let rate = 1.0;
        let limits = gamma_limits_gaussian(n, rate, &th(1e-4, 0.9999)).unwrap();
        let mut best = f64::INFINITY;
        for i in 1..=100_000 {
            let rho = i as f64 / 100_000.0;
            best = best.min(g_bob(rho, n, rate, 1e-4).unwrap());
        }
        assert!((limits.gamma_bob_inf - best).abs() < 1e-7);
        let mut best = f64::NEG_INFINITY;
        for i in 1..100_000 {
            let rho = -(i as f64) / 100_000.0;
            best = best.max(g_eve(rho, n, rate, 0.9999).unwrap());
        }
        assert!((limits.gamma_eve_sup - best).abs() < 1e-7);
    }

    #[test]
    fn gaussian_gap_shrinks_with_blocklength() {
        let t = th(1e-4, 0.9999);
        let mut prev = f64::INFINITY;
        for n in [1_000u64, 10_000, 100_000, 1_000_000] {
            let g = security_gap_gaussian(n, 1.0, &t).unwrap();
            assert!(g.gap >= 0.0);
            assert!(g.gap < prev, "gap {} did not shrink at n = {n}", g.gap);
            prev = g.gap;
        }
        assert!(prev < 0.1, "gap at n = 10^6 is {prev} dB");
    }

    #[test]
    fn gaussian_gap_degenerate_thresholds() {
        let g = security_gap_gaussian(500, 2.0, &Thresholds::new(1.0, 0.0, 0.5).unwrap()).unwrap();
        assert_eq!(g.gap, 0.0);
        assert_eq!(g.bob_limit, g.eve_limit);
    }

    #[test]
    fn high_snr_approximation_tracks_exact_gap() {
        // gamma_bob_inf ~ e^6 >> 100 here, so the approximation is tight.
        let t = th(1e-4, 0.9999);
        let exact = security_gap_gaussian(1000, 6.0, &t).unwrap().gap;
        let approx = security_gap_high_snr(1000, 6.0, &t).unwrap();
        assert!((exact - approx).abs() < 0.2, "exact {exact} vs approx {approx}");
    }

    #[test]
    fn discrete_gap_degenerate_collapses_to_eps0() {
        let t = Thresholds::new(1.0, 0.0, 0.5).unwrap();
        for family in [ChannelFamily::Bsc, ChannelFamily::Bec] {
            let g = security_gap_discrete(family, 1000, 0.3, &t).unwrap();
            assert_eq!(g.gap, 0.0);
            assert_eq!(g.bob_limit, g.reference_param);
            assert_eq!(g.eve_limit, g.reference_param);
        }
    }

    #[test]
    fn discrete_gap_ordering_and_sign() {
        let t = th(1e-4, 0.9999);
        for family in [ChannelFamily::Bsc, ChannelFamily::Bec] {
            let g = security_gap_discrete(family, 10_000, 0.3, &t).unwrap();
            assert!(g.gap >= 0.0);
            assert!(g.bob_limit <= g.reference_param);
            assert!(g.eve_limit >= g.reference_param);
        }
    }

    #[test]
    fn bec_gap_matches_grid_oracle() {
        let t = th(1e-4, 0.9999);
        let n = 10_000;
        let rate = 0.3;
        let g = security_gap_discrete(ChannelFamily::Bec, n, rate, &t).unwrap();
        let equ = InputDistribution::Equiprobable;
        // Brute-force scan of both feasibility boundaries.
        let mut bob_sup = 0.0;
        let mut eve_inf = f64::NAN;
        for i in 0..=100_000 {
            let eps = i as f64 / 100_000.0;
            let ch = ChannelModel::bec(eps).unwrap();
            if eps < g.reference_param
                && bob_ber_upper(&ch, &equ, rate, n).unwrap() <= t.p_ber_bob_th()
            {
                bob_sup = eps;
            }
            if eve_inf.is_nan()
                && eps > g.reference_param
                && eve_ber_lower(&ch, &equ, rate, n, t.spn_ber_low).unwrap() >= t.p_ber_eve_th()
            {
                eve_inf = eps;
            }
        }
        assert!((g.bob_limit - bob_sup).abs() < 2e-5, "{} vs {bob_sup}", g.bob_limit);
        assert!((g.eve_limit - eve_inf).abs() < 2e-5, "{} vs {eve_inf}", g.eve_limit);
    }

    #[test]
    fn discrete_gap_shrinks_with_blocklength() {
        let t = th(1e-4, 0.9999);
        let mut prev = f64::INFINITY;
        for n in [1_000u64, 10_000, 100_000] {
            let g = security_gap_discrete(ChannelFamily::Bsc, n, 0.3, &t).unwrap();
            assert!(g.gap < prev);
            prev = g.gap;
        }
    }

    #[test]
    fn tightening_thresholds_grows_the_gap() {
        let n = 10_000;
        let loose = security_gap_gaussian(n, 1.0, &th(1e-2, 0.99)).unwrap().gap;
        let tighter_bob = security_gap_gaussian(n, 1.0, &th(1e-6, 0.99)).unwrap().gap;
        let tighter_eve = security_gap_gaussian(n, 1.0, &th(1e-2, 0.999999)).unwrap().gap;
        assert!(tighter_bob >= loose);
        assert!(tighter_eve >= loose);
    }

    #[test]
    fn biawgn_gap_ordering() {
        let t = th(1e-4, 0.9999);
        let g = security_gap_biawgn(1000, 0.5, &t).unwrap();
        assert!(g.gap >= 0.0);
        assert!(g.bob_limit > g.reference_param);
        assert!(g.eve_limit < g.reference_param);
        let degenerate = Thresholds::new(1.0, 0.0, 0.5).unwrap();
        let g = security_gap_biawgn(1000, 0.5, &degenerate).unwrap();
        assert_eq!(g.gap, 0.0);
    }

    #[test]
    fn discrete_gap_rejects_awgn_families() {
        let t = th(1e-4, 0.9999);
        assert!(matches!(
            security_gap_discrete(ChannelFamily::GaussianAwgn, 100, 0.3, &t),
            Err(Error::Incompatible(_))
        ));
    }
}
