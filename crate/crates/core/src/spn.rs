//! Error amplification by substitution-permutation networks, two ways: the
//! exact ideal-S-box recursion (strict-avalanche model) and Monte-Carlo
//! simulation of a concrete SPN built from the AES S-box.
//!
//! The ideal recursion propagates the distribution of the bit-error count
//! through rounds of the network:
//!
//!   q_r(w) = sum_l f_{W|L}(w|l) sum_{w'} f_{L|W}(l|w') q_{r-1}(w')
//!
//! with the box-count law f_{L|W}(l|w) = A1(l,w)/A2(w) and the ideal-box
//! output-weight law f_{W|L}(w|l) = (2^B-1)^{-l} sum_i (-1)^i C(l,i) C((l-i)B, w).
//! The alternating sums cancel catastrophically in floating point for large K,
//! so A1 and the f_{W|L} numerators are assembled in exact big-integer
//! arithmetic and divided as exact rationals; conversion to f64 happens only
//! after each sum is fully assembled.

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use rand_core::{RngCore, SeedableRng};

/// Default cap on K for the ideal recursion; the per-round work is O(K^2 J)
/// in big-integer operations.
pub const DEFAULT_IDEAL_K_CAP: usize = 512;

/// SPN size parameters: K total bits, B bits per S-box, J = K/B parallel
/// S-boxes, r rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SpnGeometry {
    pub k: usize,
    pub b: usize,
    pub rounds: usize,
}

impl SpnGeometry {
    pub fn new(k: usize, b: usize, rounds: usize) -> Result<Self> {
        if k == 0 || b == 0 {
            return Err(Error::Domain("K and B must be positive".into()));
        }
        if k % b != 0 {
            return Err(Error::Domain(format!("K must be a multiple of B, got K={k}, B={b}")));
        }
        Ok(Self { k, b, rounds })
    }

    /// Number of parallel S-boxes per round.
    pub fn j(&self) -> usize {
        self.k / self.b
    }
}

/// Distribution of the bit-error count per round, conditioned on at least one
/// error: probs[w] is the probability of weight w for w = 1..K, probs[0] = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorWeightDist {
    probs: Vec<f64>,
}

impl ErrorWeightDist {
    /// Builds a distribution from per-weight probabilities; `probs[w]` is the
    /// probability of weight w and entry 0 must be zero (weight 0 is excluded
    /// by conditioning on at least one error).
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::Domain("weight distribution needs K >= 1".into()));
        }
        if probs[0] != 0.0 {
            return Err(Error::Domain("weight 0 is excluded; probs[0] must be zero".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::Domain("weight probabilities must be nonnegative".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("weight probabilities must sum to 1, got {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn point_mass(k: usize, w: usize) -> Result<Self> {
        if w == 0 || w > k {
            return Err(Error::Domain(format!("point mass weight {w} outside 1..={k}")));
        }
        let mut probs = vec![0.0; k + 1];
        probs[w] = 1.0;
        Ok(Self { probs })
    }

    pub fn k(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn prob(&self, w: usize) -> f64 {
        self.probs[w]
    }

    /// Full probability vector indexed by weight (entry 0 is zero).
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean_weight(&self) -> f64 {
        self.probs.iter().enumerate().map(|(w, p)| w as f64 * p).sum()
    }
}

/// Point mass at a single bit error, the initial condition of the
/// single-error BER floor.
pub fn single_error_initial(k: usize) -> Result<ErrorWeightDist> {
    ErrorWeightDist::point_mass(k, 1)
}

// ---------------------------------------------------------------------------
// Ideal (strict-avalanche) recursion
// ---------------------------------------------------------------------------

/// Pascal triangle up to row n, exact.
fn pascal(n: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
    rows.push(vec![BigUint::from(1u32)]);
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = Vec::with_capacity(i + 1);
        row.push(BigUint::from(1u32));
        for j in 1..i {
            row.push(&prev[j - 1] + &prev[j]);
        }
        row.push(BigUint::from(1u32));
        rows.push(row);
    }
    rows
}

/// C(n, k) with the "choose-plus" convention: zero when k > n.
fn binom(rows: &[Vec<BigUint>], n: usize, k: usize) -> BigUint {
    if k > n {
        BigUint::zero()
    } else {
        rows[n][k].clone()
    }
}

fn ratio_to_f64(numer: BigInt, denom: BigInt) -> f64 {
    Ratio::new(numer, denom).to_f64().expect("finite ratio")
}

/// One-round transition kernel of the ideal recursion.
struct IdealKernel {
    /// f_{L|W}(l | w) indexed [w-1][l-1].
    box_count_given_weight: Vec<Vec<f64>>,
    /// f_{W|L}(w | l) indexed [l-1][w-1].
    weight_given_box_count: Vec<Vec<f64>>,
}

fn build_ideal_kernel(k: usize, b: usize) -> Result<IdealKernel> {
    let j = k / b;
    let rows = pascal(k);

    // A1(l, w) = sum_{i=J-l}^{J} (-1)^{i-(J-l)} C(i, J-l) C(J, i) C((J-i)B, w)+,
    // assembled exactly; the column identity sum_l A1(l, w) = C(K, w) is
    // checked in exact integers before any float conversion.
    let mut box_count_given_weight = vec![vec![0.0; j]; k];
    for w in 1..=k {
        let a2 = BigInt::from(binom(&rows, k, w));
        let mut col_sum = BigInt::zero();
        let mut a1s: Vec<BigInt> = Vec::with_capacity(j);
        for l in 1..=j {
            let mut a1 = BigInt::zero();
            for i in (j - l)..=j {
                let term = BigInt::from(
                    binom(&rows, i, j - l) * binom(&rows, j, i) * binom(&rows, (j - i) * b, w),
                );
                if (i - (j - l)) % 2 == 0 {
                    a1 += term;
                } else {
                    a1 -= term;
                }
            }
            if a1.is_negative() {
                return Err(Error::Numerical(format!("A1({l}, {w}) came out negative")));
            }
            col_sum += &a1;
            a1s.push(a1);
        }
        if col_sum != a2 {
            return Err(Error::Numerical(format!(
                "A1 column {w} does not sum to C(K, {w}); kernel assembly is inconsistent"
            )));
        }
        for (l, a1) in a1s.into_iter().enumerate() {
            box_count_given_weight[w - 1][l] = ratio_to_f64(a1, a2.clone());
        }
    }

    // f_{W|L}(w | l) = (2^B - 1)^{-l} sum_i (-1)^i C(l, i) C((l-i)B, w)+,
    // with the analogous exact row identity sum_w numer = (2^B - 1)^l.
    let nonzero_patterns = BigUint::from(2u32).pow(b as u32) - BigUint::from(1u32);
    let mut weight_given_box_count = vec![vec![0.0; k]; j];
    for l in 1..=j {
        let denom = BigInt::from(nonzero_patterns.pow(l as u32));
        let mut row_sum = BigInt::zero();
        let mut numers: Vec<BigInt> = Vec::with_capacity(k);
        for w in 1..=k {
            let mut s = BigInt::zero();
            for i in 0..=l {
                let term = BigInt::from(binom(&rows, l, i) * binom(&rows, (l - i) * b, w));
                if i % 2 == 0 {
                    s += term;
                } else {
                    s -= term;
                }
            }
            if s.is_negative() {
                return Err(Error::Numerical(format!("f_WL numerator ({w}|{l}) came out negative")));
            }
            row_sum += &s;
            numers.push(s);
        }
        if row_sum != denom {
            return Err(Error::Numerical(format!(
                "f_WL row {l} does not sum to (2^B-1)^{l}; kernel assembly is inconsistent"
            )));
        }
        for (w, s) in numers.into_iter().enumerate() {
            weight_given_box_count[l - 1][w] = ratio_to_f64(s, denom.clone());
        }
    }

    Ok(IdealKernel { box_count_given_weight, weight_given_box_count })
}

impl IdealKernel {
    fn apply(&self, dist: &ErrorWeightDist) -> Result<ErrorWeightDist> {
        let k = dist.k();
        let j = self.weight_given_box_count.len();
        let mut by_box_count = vec![0.0; j];
        for w_prev in 1..=k {
            let p = dist.prob(w_prev);
            if p == 0.0 {
                continue;
            }
            for (l, acc) in by_box_count.iter_mut().enumerate() {
                *acc += self.box_count_given_weight[w_prev - 1][l] * p;
            }
        }
        let mut probs = vec![0.0; k + 1];
        for (l, mass) in by_box_count.iter().enumerate() {
            if *mass == 0.0 {
                continue;
            }
            for w in 1..=k {
                probs[w] += self.weight_given_box_count[l][w - 1] * mass;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() >= 1e-9 {
            return Err(Error::Numerical(format!(
                "weight distribution drifted to total mass {sum} before renormalization"
            )));
        }
        for p in probs.iter_mut() {
            *p /= sum;
        }
        ErrorWeightDist::from_probs(probs)
    }
}

fn check_ideal_cap(k: usize, cap: usize) -> Result<()> {
    if k > cap {
        return Err(Error::Capacity(format!(
            "ideal recursion capped at K <= {cap}, got K = {k}"
        )));
    }
    Ok(())
}

/// One application of the ideal round recursion.
pub fn ideal_round_transition(dist: &ErrorWeightDist, geom: &SpnGeometry) -> Result<ErrorWeightDist> {
    check_ideal_cap(geom.k, DEFAULT_IDEAL_K_CAP)?;
    if dist.k() != geom.k {
        return Err(Error::Domain(format!(
            "distribution is over K = {} bits but the geometry has K = {}",
            dist.k(),
            geom.k
        )));
    }
    build_ideal_kernel(geom.k, geom.b)?.apply(dist)
}

/// BER after rounds 1..=geom.rounds of the ideal recursion:
/// mean weight / K per round.
pub fn ideal_ber(geom: &SpnGeometry, initial: &ErrorWeightDist) -> Result<Vec<f64>> {
    ideal_ber_with_cap(geom, initial, DEFAULT_IDEAL_K_CAP)
}

/// Same as [`ideal_ber`] with an explicit K resource cap.
pub fn ideal_ber_with_cap(
    geom: &SpnGeometry,
    initial: &ErrorWeightDist,
    cap: usize,
) -> Result<Vec<f64>> {
    check_ideal_cap(geom.k, cap)?;
    if geom.rounds == 0 {
        return Err(Error::Domain("ideal BER needs at least one round".into()));
    }
    if initial.k() != geom.k {
        return Err(Error::Domain(format!(
            "distribution is over K = {} bits but the geometry has K = {}",
            initial.k(),
            geom.k
        )));
    }
    let kernel = build_ideal_kernel(geom.k, geom.b)?;
    let mut dist = initial.clone();
    let mut bers = Vec::with_capacity(geom.rounds);
    for _ in 0..geom.rounds {
        dist = kernel.apply(&dist)?;
        bers.push(dist.mean_weight() / geom.k as f64);
    }
    Ok(bers)
}

// ---------------------------------------------------------------------------
// Concrete SPN simulation (AES S-box)
// ---------------------------------------------------------------------------

/// The AES SubBytes table.
pub const AES_SBOX: [u8; 256] = [
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
];

/// Bit moves implementing the block-interleaver P-box
/// pi(i) = (i mod B) * J + floor(i / B), precomputed per geometry.
struct PBox {
    moves: Vec<(usize, u8, usize, u8)>,
}

impl PBox {
    fn new(k: usize, b: usize) -> Self {
        let j = k / b;
        let moves = (0..k)
            .map(|i| {
                let dst = (i % b) * j + i / b;
                (i / 8, 1u8 << (i % 8), dst / 8, 1u8 << (dst % 8))
            })
            .collect();
        Self { moves }
    }

    fn apply(&self, state: &[u8], out: &mut [u8]) {
        out.fill(0);
        for &(sb, sm, db, dm) in &self.moves {
            if state[sb] & sm != 0 {
                out[db] |= dm;
            }
        }
    }
}

fn spn_rounds(state: &mut Vec<u8>, scratch: &mut Vec<u8>, pbox: &PBox) {
    for byte in state.iter_mut() {
        *byte = AES_SBOX[*byte as usize];
    }
    pbox.apply(state, scratch);
    std::mem::swap(state, scratch);
}

fn hamming(a: &[u8], b: &[u8]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum()
}

/// Uniform draw in [0, bound) without modulo bias.
fn uniform_below(rng: &mut rand_chacha::ChaCha8Rng, bound: u64) -> u64 {
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % bound;
        }
    }
}

fn simulate_range(
    geom: &SpnGeometry,
    seed: u64,
    range: std::ops::Range<u64>,
    sums: &mut [u64],
    sumsqs: &mut [u64],
) {
    let bytes = geom.k / 8;
    let pbox = PBox::new(geom.k, geom.b);
    let mut x = vec![0u8; bytes];
    let mut xe = vec![0u8; bytes];
    let mut scratch = vec![0u8; bytes];

    for trial in range {
        // All of a trial's randomness derives from (seed, trial index), so any
        // partitioning of the trial range yields identical results.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial.wrapping_add(1));
        for chunk in x.chunks_mut(8) {
            let v = rng.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
        let flip = uniform_below(&mut rng, geom.k as u64) as usize;
        xe.copy_from_slice(&x);
        xe[flip / 8] ^= 1 << (flip % 8);

        sums[0] += 1;
        sumsqs[0] += 1;
        for r in 1..=geom.rounds {
            spn_rounds(&mut x, &mut scratch, &pbox);
            spn_rounds(&mut xe, &mut scratch, &pbox);
            let d = hamming(&x, &xe) as u64;
            sums[r] += d;
            sumsqs[r] += d * d;
        }
    }
}

/// Monte-Carlo BER of the concrete AES-S-box SPN.
///
/// Per trial, a uniform K-bit string and a uniformly flipped copy run through
/// geom.rounds rounds of [S-box layer; P-box layer] with no key mixing; the
/// per-round Hamming distance / K is recorded. Returns `(ber, stderr)` indexed
/// by round 0..=rounds (round 0 is the single flipped input bit, BER = 1/K
/// exactly). Deterministic for a fixed seed regardless of worker count.
pub fn simulate_spn_ber(geom: &SpnGeometry, trials: u64, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    simulate_spn_ber_workers(geom, trials, seed, workers)
}

/// [`simulate_spn_ber`] with an explicit worker count.
pub fn simulate_spn_ber_workers(
    geom: &SpnGeometry,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if geom.b != 8 {
        return Err(Error::UnsupportedGeometry(format!(
            "only the bundled 8x8 AES S-box is supported, got B = {}",
            geom.b
        )));
    }
    if trials == 0 {
        return Err(Error::Domain("trial count must be at least 1".into()));
    }
    let workers = workers.max(1).min(trials as usize);
    let rounds = geom.rounds;

    // Per-round Hamming-distance sums are accumulated as exact integers, so
    // merging worker partials is associative and the output is bit-identical
    // for any partitioning.
    let chunk = trials.div_ceil(workers as u64);
    let mut sums = vec![0u64; rounds + 1];
    let mut sumsqs = vec![0u64; rounds + 1];
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers as u64 {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(trials);
            if lo >= hi {
                break;
            }
            handles.push(scope.spawn(move || {
                let mut s = vec![0u64; rounds + 1];
                let mut s2 = vec![0u64; rounds + 1];
                simulate_range(geom, seed, lo..hi, &mut s, &mut s2);
                (s, s2)
            }));
        }
        for h in handles {
            let (s, s2) = h.join().expect("simulation worker panicked");
            for r in 0..=rounds {
                sums[r] += s[r];
                sumsqs[r] += s2[r];
            }
        }
    });

    let kf = geom.k as f64;
    let tf = trials as f64;
    let mut ber = Vec::with_capacity(rounds + 1);
    let mut stderr = Vec::with_capacity(rounds + 1);
    for r in 0..=rounds {
        let s = sums[r] as f64;
        ber.push(s / (tf * kf));
        if trials > 1 {
            let var = ((sumsqs[r] as f64 - s * s / tf) / (tf - 1.0)).max(0.0);
            stderr.push((var / tf).sqrt() / kf);
        } else {
            stderr.push(0.0);
        }
    }
    Ok((ber, stderr))
}

/// Method selector for the single-error BER floor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SpnMethod {
    IdealAnalysis,
    Simulation { trials: u64, seed: u64 },
}

/// Single-error output BER after geom.rounds rounds, by the chosen method:
/// the floor P_ber_spn_low(r, K) that scales Eve's BER lower bound.
pub fn spn_ber_lower(geom: &SpnGeometry, method: SpnMethod) -> Result<f64> {
    if geom.rounds == 0 {
        return Ok(1.0 / geom.k as f64);
    }
    match method {
        SpnMethod::IdealAnalysis => {
            let initial = single_error_initial(geom.k)?;
            Ok(*ideal_ber(geom, &initial)?.last().expect("rounds >= 1"))
        }
        SpnMethod::Simulation { trials, seed } => {
            let (ber, _) = simulate_spn_ber(geom, trials, seed)?;
            Ok(*ber.last().expect("rounds >= 1"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_validation() {
        assert!(matches!(SpnGeometry::new(60, 8, 1), Err(Error::Domain(_))));
        assert!(matches!(SpnGeometry::new(0, 8, 1), Err(Error::Domain(_))));
        assert_eq!(SpnGeometry::new(64, 8, 4).unwrap().j(), 8);
    }

    #[test]
    fn single_error_initial_is_point_mass() {
        let d = single_error_initial(8).unwrap();
        assert_eq!(d.prob(1), 1.0);
        assert_eq!(d.probs().iter().sum::<f64>(), 1.0);
        assert_eq!(d.mean_weight(), 1.0);
    }

    #[test]
    fn aes_sbox_self_test() {
        // First row of the published table.
        let first_row = [
            0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7,
            0xab, 0x76,
        ];
        assert_eq!(&AES_SBOX[..16], &first_row);
        assert_eq!(AES_SBOX[0x53], 0xed);
        assert_eq!(AES_SBOX[0xff], 0x16);
        // Must be a permutation of 0..=255.
        let mut seen = [false; 256];
        for &v in AES_SBOX.iter() {
            assert!(!seen[v as usize]);
            seen[v as usize] = true;
        }
    }

    fn c(n: u64, k: u64) -> f64 {
        let mut r = 1.0;
        for i in 0..k {
            r = r * (n - i) as f64 / (i + 1) as f64;
        }
        r
    }

    #[test]
    fn single_box_round_matches_binomial_law() {
        // K = B = 8 (J = 1): one round from a single error gives
        // probs[w] = C(8, w) / 255, mean 1024/255.
        let geom = SpnGeometry::new(8, 8, 1).unwrap();
        let out = ideal_round_transition(&single_error_initial(8).unwrap(), &geom).unwrap();
        for w in 1..=8 {
            assert!((out.prob(w) - c(8, w as u64) / 255.0).abs() < 1e-15, "w = {w}");
        }
        assert!((out.mean_weight() - 1024.0 / 255.0).abs() < 1e-12);

        let bers = ideal_ber(&geom, &single_error_initial(8).unwrap()).unwrap();
        assert!((bers[0] - 0.501_960_784_313_725_5).abs() < 1e-12);
    }

    #[test]
    fn one_affected_box_embeds_in_larger_network() {
        // K = 64, B = 8: a single error affects exactly one box, so the
        // round-1 law is the 8-bit binomial law embedded in 64 bits.
        let geom = SpnGeometry::new(64, 8, 1).unwrap();
        let out = ideal_round_transition(&single_error_initial(64).unwrap(), &geom).unwrap();
        for w in 1..=8 {
            assert!((out.prob(w) - c(8, w as u64) / 255.0).abs() < 1e-14);
        }
        for w in 9..=64 {
            assert_eq!(out.prob(w), 0.0);
        }
        assert!((out.mean_weight() - 1024.0 / 255.0).abs() < 1e-12);
        let bers = ideal_ber(&geom, &single_error_initial(64).unwrap()).unwrap();
        assert!((bers[0] - 0.062_745_098_039_215_69).abs() < 1e-12);
    }

    #[test]
    fn kernel_columns_are_conditional_distributions() {
        let kernel = build_ideal_kernel(32, 8).unwrap();
        for w in 1..=32 {
            let s: f64 = kernel.box_count_given_weight[w - 1].iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "f_LW column {w} sums to {s}");
        }
        for l in 1..=4 {
            let s: f64 = kernel.weight_given_box_count[l - 1].iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "f_WL row {l} sums to {s}");
        }
    }

    /// Independent A1 oracle: C(J, l) times the number of weight-w patterns
    /// filling exactly l labeled boxes (dynamic program over boxes with each
    /// box weight in 1..=B).
    fn a1_oracle(l: usize, w: usize, j: usize, b: usize) -> f64 {
        let mut dp = vec![0.0_f64; w + 1];
        dp[0] = 1.0;
        for _ in 0..l {
            let mut next = vec![0.0_f64; w + 1];
            for prev_w in 0..=w {
                if dp[prev_w] == 0.0 {
                    continue;
                }
                for add in 1..=b.min(w - prev_w) {
                    next[prev_w + add] += dp[prev_w] * c(b as u64, add as u64);
                }
            }
            dp = next;
        }
        c(j as u64, l as u64) * dp[w]
    }

    #[test]
    fn a1_matches_composition_oracle() {
        for (k, b) in [(8, 4), (16, 8), (24, 4), (24, 8)] {
            let j = k / b;
            let rows = pascal(k);
            for w in 1..=k {
                for l in 1..=j {
                    let mut a1 = BigInt::zero();
                    for i in (j - l)..=j {
                        let term = BigInt::from(
                            binom(&rows, i, j - l)
                                * binom(&rows, j, i)
                                * binom(&rows, (j - i) * b, w),
                        );
                        if (i - (j - l)) % 2 == 0 {
                            a1 += term;
                        } else {
                            a1 -= term;
                        }
                    }
                    let got = a1.to_f64().unwrap();
                    let want = a1_oracle(l, w, j, b);
                    assert!(
                        (got - want).abs() <= 1e-9 * want.abs().max(1.0),
                        "K={k} B={b} l={l} w={w}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn small_geometry_matches_exhaustive_enumeration() {
        // K = 8, B = 4, single error: the affected ideal box outputs each of
        // the 2^4 - 1 nonzero patterns equally likely; enumerate them all.
        let geom = SpnGeometry::new(8, 4, 1).unwrap();
        let out = ideal_round_transition(&single_error_initial(8).unwrap(), &geom).unwrap();
        let mut law = vec![0.0; 9];
        for pattern in 1u32..16 {
            law[pattern.count_ones() as usize] += 1.0 / 15.0;
        }
        for w in 1..=8 {
            assert!((out.prob(w) - law[w]).abs() < 1e-12, "w = {w}");
        }
    }

    #[test]
    fn ideal_ber_approaches_half_monotonically() {
        for k in [32usize, 64] {
            let geom = SpnGeometry::new(k, 8, 8).unwrap();
            let bers = ideal_ber(&geom, &single_error_initial(k).unwrap()).unwrap();
            let mut prev_gap = f64::INFINITY;
            for (r, ber) in bers.iter().enumerate() {
                let gap = (ber - 0.5).abs();
                assert!(gap <= prev_gap + 1e-12, "K={k} round {}: {gap} > {prev_gap}", r + 1);
                prev_gap = gap;
            }
            assert!((bers[3] - 0.5).abs() < 0.01, "K={k} round 4: {}", bers[3]);
        }
    }

    #[test]
    fn recursion_cap_is_enforced() {
        let geom = SpnGeometry::new(520, 8, 1).unwrap();
        let d = single_error_initial(520).unwrap();
        assert!(matches!(ideal_round_transition(&d, &geom), Err(Error::Capacity(_))));
        assert!(ideal_ber_with_cap(&SpnGeometry::new(64, 8, 1).unwrap(), &single_error_initial(64).unwrap(), 32).is_err());
    }

    #[test]
    fn simulation_round_zero_is_exact() {
        let geom = SpnGeometry::new(64, 8, 0).unwrap();
        let (ber, stderr) = simulate_spn_ber_workers(&geom, 37, 99, 2).unwrap();
        assert_eq!(ber, vec![1.0 / 64.0]);
        assert_eq!(stderr, vec![0.0]);
        assert_eq!(spn_ber_lower(&geom, SpnMethod::Simulation { trials: 10, seed: 1 }).unwrap(), 1.0 / 64.0);
        assert_eq!(spn_ber_lower(&geom, SpnMethod::IdealAnalysis).unwrap(), 1.0 / 64.0);
    }

    #[test]
    fn simulation_is_deterministic_across_worker_counts() {
        let geom = SpnGeometry::new(64, 8, 5).unwrap();
        let (b1, s1) = simulate_spn_ber_workers(&geom, 501, 42, 1).unwrap();
        let (b2, s2) = simulate_spn_ber_workers(&geom, 501, 42, 2).unwrap();
        let (b8, s8) = simulate_spn_ber_workers(&geom, 501, 42, 8).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&b1), bits(&b2));
        assert_eq!(bits(&b1), bits(&b8));
        assert_eq!(bits(&s1), bits(&s2));
        assert_eq!(bits(&s1), bits(&s8));
    }

    #[test]
    fn simulation_rejects_non_aes_box_width() {
        let geom = SpnGeometry::new(16, 4, 2).unwrap();
        assert!(matches!(
            simulate_spn_ber(&geom, 10, 0),
            Err(Error::UnsupportedGeometry(_))
        ));
    }

    #[test]
    fn simulation_tracks_ideal_analysis() {
        // Concrete S-boxes are not exactly SAC, so agreement is qualitative.
        for k in [32usize, 64] {
            let geom = SpnGeometry::new(k, 8, 6).unwrap();
            let ideal = ideal_ber(&geom, &single_error_initial(k).unwrap()).unwrap();
            let (sim, _) = simulate_spn_ber_workers(&geom, 100_000, 7, 4).unwrap();
            for r in 1..=6 {
                assert!(
                    (sim[r] - ideal[r - 1]).abs() < 0.05,
                    "K={k} round {r}: sim {} vs ideal {}",
                    sim[r],
                    ideal[r - 1]
                );
            }
        }
    }

    #[test]
    fn pbox_is_a_permutation() {
        for (k, b) in [(64usize, 8usize), (128, 8), (256, 8)] {
            let j = k / b;
            let mut seen = vec![false; k];
            for i in 0..k {
                let dst = (i % b) * j + i / b;
                assert!(!seen[dst]);
                seen[dst] = true;
            }
        }
    }
}
