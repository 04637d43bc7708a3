//! Classical statistics around the one-round linear approximation: empirical
//! bias estimation, key-bit recovery from two-round pairs, distinguishing
//! sample complexity and the piling-up lemma.
//!
//! Bit positions follow the per-bit orientation of [`crate::simon::bit`]. The
//! linear statistic throughout is `L_i(j) ^ L_{i+1}(j)`; with the plaintext
//! constraint `L_i(j) = L_i(j+2)` it equals 0 with probability 3/4 exactly
//! when `R_i(j) = K_i(j)` and 1/4 otherwise, which is what both the estimator
//! and the key-recovery procedure lean on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::simon::{
    bit, encrypt, key_schedule, round_function, set_bit, RoundKeySet, SimonError, SimonState,
    SimonVariant,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("bit position {bit_j} out of range for word size {n}")]
    BitOutOfRange { bit_j: u32, n: u32 },
    #[error("need at least one sample")]
    NoSamples,
    #[error("no samples survived the R(j) = K(j) filter")]
    EmptyEstimate,
    #[error("round key set carries word size {keys_n}, expected {expected_n}")]
    WordSizeMismatch { keys_n: u32, expected_n: u32 },
    #[error("need at least {expected} round keys, got {got}")]
    TooFewKeys { got: usize, expected: usize },
    #[error("exhaustive enumeration supports word sizes up to 12 bits, got {0}")]
    ExhaustiveTooWide(u32),
    #[error("probability {0} must lie strictly inside (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("bias {0} outside [-1/2, 1/2]")]
    BiasOutOfRange(f64),
    #[error("piling-up needs at least one bias")]
    EmptyBiasList,
    #[error("exhaustive XOR enumeration supports at most 16 variables, got {0}")]
    TooManyVariables(usize),
    #[error(transparent)]
    Simon(#[from] SimonError),
}

/// Empirical estimate of Pr(statistic = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasEstimate {
    pub p0: f64,
    pub p1: f64,
    /// p0 - 1/2.
    pub bias: f64,
    /// Samples that survived the R(j) = K(j) filter and entered the estimate.
    pub samples_used: u64,
    /// Samples discarded by the filter.
    pub samples_filtered: u64,
    /// sqrt(p0 * p1 / samples_used).
    pub std_error: f64,
}

/// Samples per RNG stream; estimates combine streams by exact count
/// summation, so the result is identical for any degree of parallelism.
const CHUNK: u64 = 1 << 16;

/// ChaCha stream reserved for key derivation, out of reach of the sampling
/// chunk streams.
const KEY_DERIVATION_STREAM: u64 = u64::MAX;

/// Derive a full round-key set deterministically from a seed: the master key
/// comes from a dedicated ChaCha stream, the rest from the key schedule.
pub fn random_round_keys(variant: SimonVariant, seed: u64) -> Result<RoundKeySet, AnalysisError> {
    let n = variant.word_size();
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(KEY_DERIVATION_STREAM);
    let master: Vec<u64> = (0..variant.key_words())
        .map(|_| rng.random::<u64>() & mask)
        .collect();
    Ok(key_schedule(&master, variant)?)
}

/// Monte-Carlo estimate of `Pr(L_i(j) ^ L_{i+1}(j) = 0)` over one round.
///
/// Draws `(L, R)` uniformly subject to `L(j) = L(j+2)`, encrypts one round
/// with the first key of `keys`, keeps the samples with `R(j) = K(j)` and
/// counts zeros of the statistic. Deterministic for a fixed seed: sampling is
/// sharded into fixed-size chunks, each on its own ChaCha stream.
pub fn estimate_bias(
    variant: SimonVariant,
    keys: &RoundKeySet,
    bit_j: u32,
    samples: u64,
    seed: u64,
) -> Result<BiasEstimate, AnalysisError> {
    let n = variant.word_size();
    if keys.word_size() != n {
        return Err(AnalysisError::WordSizeMismatch {
            keys_n: keys.word_size(),
            expected_n: n,
        });
    }
    if keys.is_empty() {
        return Err(AnalysisError::TooFewKeys {
            got: 0,
            expected: 1,
        });
    }
    if bit_j >= n {
        return Err(AnalysisError::BitOutOfRange { bit_j, n });
    }
    if samples == 0 {
        return Err(AnalysisError::NoSamples);
    }
    let key = keys.keys()[0];
    let num_chunks = samples.div_ceil(CHUNK);
    let (zeros, survivors) = (0..num_chunks)
        .into_par_iter()
        .map(|chunk| {
            let count = CHUNK.min(samples - chunk * CHUNK);
            sample_chunk(n, key, bit_j, seed, chunk, count)
        })
        .reduce(|| (0u64, 0u64), |a, b| (a.0 + b.0, a.1 + b.1));
    if survivors == 0 {
        return Err(AnalysisError::EmptyEstimate);
    }
    let p0 = zeros as f64 / survivors as f64;
    Ok(BiasEstimate {
        p0,
        p1: 1.0 - p0,
        bias: p0 - 0.5,
        samples_used: survivors,
        samples_filtered: samples - survivors,
        std_error: (p0 * (1.0 - p0) / survivors as f64).sqrt(),
    })
}

fn sample_chunk(n: u32, key: u64, bit_j: u32, seed: u64, stream: u64, count: u64) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let key_bit = bit(key, bit_j, n);
    let mut zeros = 0u64;
    let mut survivors = 0u64;
    for _ in 0..count {
        let mut left = rng.random::<u64>() & mask;
        left = set_bit(left, bit_j + 2, n, bit(left, bit_j, n));
        let right = rng.random::<u64>() & mask;
        if bit(right, bit_j, n) != key_bit {
            continue;
        }
        let next = round_function(
            SimonState {
                left,
                right,
                round_index: 0,
            },
            key,
            n,
        );
        survivors += 1;
        if bit(left, bit_j, n) == bit(next.left, bit_j, n) {
            zeros += 1;
        }
    }
    (zeros, survivors)
}

/// Exact Pr(statistic = 0) by enumerating every `(L, R)` pair at a reduced
/// word width, split by whether `R(j)` matches or differs from `K(j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExhaustiveBias {
    /// Pr(statistic = 0 | R(j) = K(j)); exactly 3/4.
    pub p0_matching: f64,
    /// Pr(statistic = 0 | R(j) != K(j)); exactly 1/4.
    pub p0_complement: f64,
    /// Number of (L, R) pairs satisfying the L(j) = L(j+2) constraint.
    pub enumerated: u64,
}

pub fn exhaustive_bias(
    n: u32,
    round_key: u64,
    bit_j: u32,
) -> Result<ExhaustiveBias, AnalysisError> {
    if n > 12 {
        return Err(AnalysisError::ExhaustiveTooWide(n));
    }
    if bit_j >= n {
        return Err(AnalysisError::BitOutOfRange { bit_j, n });
    }
    let size = 1u64 << n;
    if round_key >= size {
        return Err(SimonError::WordOutOfRange { word: round_key, n }.into());
    }
    let key_bit = bit(round_key, bit_j, n);
    let mut zeros = [0u64; 2]; // indexed by "R(j) matches K(j)"
    let mut totals = [0u64; 2];
    for left in 0..size {
        if bit(left, bit_j, n) != bit(left, bit_j + 2, n) {
            continue;
        }
        for right in 0..size {
            let group = usize::from(bit(right, bit_j, n) == key_bit);
            let next = round_function(
                SimonState {
                    left,
                    right,
                    round_index: 0,
                },
                round_key,
                n,
            );
            totals[group] += 1;
            if bit(left, bit_j, n) == bit(next.left, bit_j, n) {
                zeros[group] += 1;
            }
        }
    }
    Ok(ExhaustiveBias {
        p0_matching: zeros[1] as f64 / totals[1] as f64,
        p0_complement: zeros[0] as f64 / totals[0] as f64,
        enumerated: totals[0] + totals[1],
    })
}

/// A plaintext and its two-round ciphertext.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CipherPair {
    pub plaintext: SimonState,
    pub ciphertext: SimonState,
}

/// Encrypt `count` uniform plaintexts for two rounds under `keys`.
pub fn generate_pairs(
    keys: &RoundKeySet,
    count: usize,
    seed: u64,
) -> Result<Vec<CipherPair>, AnalysisError> {
    if keys.len() < 2 {
        return Err(AnalysisError::TooFewKeys {
            got: keys.len(),
            expected: 2,
        });
    }
    let n = keys.word_size();
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let plaintext = SimonState {
            left: rng.random::<u64>() & mask,
            right: rng.random::<u64>() & mask,
            round_index: 0,
        };
        let ciphertext = encrypt(plaintext, keys, 2)?;
        pairs.push(CipherPair {
            plaintext,
            ciphertext,
        });
    }
    Ok(pairs)
}

/// Which equality is used to select pairs before reading the statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearFilter {
    /// `L_i(j) = L_i(j+2)`: the plaintext-visible condition under which the
    /// 3/4 probability is provable. This is the default.
    #[default]
    PlaintextEquality,
    /// `L_i(j) = L_{i+1}(j+2)`, read from the ciphertext as `R_{i+2}(j+2)`.
    /// Kept for comparison; it does not reproduce the 3/4 split.
    CiphertextEquality,
}

/// Fewest surviving samples per R(j) group before a decision is attempted.
pub const MIN_GROUP_SAMPLES: u64 = 100;

/// Outcome of one key-bit recovery: either an inferred bit with a confidence
/// score, or an explicit abstention when a group is undersampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KeyBitVerdict {
    Decided {
        bit_j: u32,
        inferred_key_bit: bool,
        /// Normal-CDF of the two-proportion separation between the groups.
        confidence: f64,
        /// Pr(statistic = 0) within the R(j) = 0 and R(j) = 1 groups.
        group_freq: [f64; 2],
        group_counts: [u64; 2],
    },
    Abstained {
        bit_j: u32,
        group_counts: [u64; 2],
    },
}

/// Infer `K_i(j)` from two-round plaintext/ciphertext pairs.
///
/// Pairs passing the filter are partitioned by the observable bit `R_i(j)`;
/// the statistic `L_i(j) ^ L_{i+1}(j)` is read from the ciphertext via the
/// Feistel identity `L_{i+1}(j) = R_{i+2}(j)`. The group whose zero-frequency
/// exceeds the other's sits at 3/4, which happens exactly when its `R_i(j)`
/// value equals `K_i(j)`.
pub fn recover_key_bit(
    pairs: &[CipherPair],
    bit_j: u32,
    n: u32,
    filter: LinearFilter,
) -> Result<KeyBitVerdict, AnalysisError> {
    if bit_j >= n {
        return Err(AnalysisError::BitOutOfRange { bit_j, n });
    }
    let mut zeros = [0u64; 2];
    let mut counts = [0u64; 2];
    for pair in pairs {
        let l_j = bit(pair.plaintext.left, bit_j, n);
        let keep = match filter {
            LinearFilter::PlaintextEquality => l_j == bit(pair.plaintext.left, bit_j + 2, n),
            LinearFilter::CiphertextEquality => l_j == bit(pair.ciphertext.right, bit_j + 2, n),
        };
        if !keep {
            continue;
        }
        let group = usize::from(bit(pair.plaintext.right, bit_j, n));
        counts[group] += 1;
        if l_j == bit(pair.ciphertext.right, bit_j, n) {
            zeros[group] += 1;
        }
    }
    if counts[0] < MIN_GROUP_SAMPLES || counts[1] < MIN_GROUP_SAMPLES {
        return Ok(KeyBitVerdict::Abstained {
            bit_j,
            group_counts: counts,
        });
    }
    let freq = [
        zeros[0] as f64 / counts[0] as f64,
        zeros[1] as f64 / counts[1] as f64,
    ];
    let inferred = freq[1] > freq[0];
    let gap = (freq[0] - freq[1]).abs();
    let variance =
        freq[0] * (1.0 - freq[0]) / counts[0] as f64 + freq[1] * (1.0 - freq[1]) / counts[1] as f64;
    let confidence = if variance == 0.0 {
        if gap > 0.0 {
            1.0
        } else {
            0.5
        }
    } else {
        Normal::standard().cdf(gap / variance.sqrt())
    };
    Ok(KeyBitVerdict::Decided {
        bit_j,
        inferred_key_bit: inferred,
        confidence,
        group_freq: freq,
        group_counts: counts,
    })
}

/// Samples needed to tell distributions {p, 1-p} and {q, 1-q} apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleComplexity {
    /// ceil(1 / (p q^2)).
    pub per_pq_formula: u64,
    /// ceil(1 / (4 eps^2)) with eps = q - p, the conventional distinguishing
    /// bound; `None` when the distributions coincide (eps = 0).
    pub per_bias_formula: Option<u64>,
    /// q - p.
    pub bias_gap: f64,
}

pub fn sample_complexity(p: f64, q: f64) -> Result<SampleComplexity, AnalysisError> {
    for v in [p, q] {
        if !(v.is_finite() && 0.0 < v && v < 1.0) {
            return Err(AnalysisError::ProbabilityOutOfRange(v));
        }
    }
    let eps = q - p;
    let per_bias_formula = if eps == 0.0 {
        None
    } else {
        Some((1.0 / (4.0 * eps * eps)).ceil() as u64)
    };
    Ok(SampleComplexity {
        per_pq_formula: (1.0 / (p * q * q)).ceil() as u64,
        per_bias_formula,
        bias_gap: eps,
    })
}

/// Bias of the XOR of independent bits: `2^(k-1) * prod(eps_i)`.
pub fn piling_up(biases: &[f64]) -> Result<f64, AnalysisError> {
    if biases.is_empty() {
        return Err(AnalysisError::EmptyBiasList);
    }
    let mut product = 0.5f64;
    for &eps in biases {
        if !(eps.is_finite() && eps.abs() <= 0.5) {
            return Err(AnalysisError::BiasOutOfRange(eps));
        }
        // Accumulate 2 * eps factors against a 1/2 prefactor, which keeps
        // every partial product within [-1/2, 1/2].
        product *= 2.0 * eps;
    }
    Ok(product)
}

/// Brute-force check of the piling-up lemma: enumerate all 2^k outcomes of
/// independent bits with `Pr(X_i = 0) = p0_i` and return `Pr(XOR = 0) - 1/2`.
pub fn piling_up_oracle(probabilities: &[f64]) -> Result<f64, AnalysisError> {
    let k = probabilities.len();
    if k == 0 {
        return Err(AnalysisError::EmptyBiasList);
    }
    if k > 16 {
        return Err(AnalysisError::TooManyVariables(k));
    }
    for &p in probabilities {
        if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
            return Err(AnalysisError::ProbabilityOutOfRange(p));
        }
    }
    let mut pr_xor_zero = 0.0f64;
    for outcome in 0u32..1 << k {
        if outcome.count_ones() % 2 != 0 {
            continue;
        }
        let weight: f64 = probabilities
            .iter()
            .enumerate()
            .map(|(i, &p)| if outcome >> i & 1 == 1 { 1.0 - p } else { p })
            .product();
        pr_xor_zero += weight;
    }
    Ok(pr_xor_zero - 0.5)
}
