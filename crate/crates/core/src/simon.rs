//! The SIMON family of lightweight Feistel block ciphers.
//!
//! One round maps `(L, R)` to `(R ^ (S1(L) & S8(L)) ^ S2(L) ^ k, L)` where
//! `S^j` rotates an n-bit word left by j. All ten published parameter sets
//! are supported; words live in `u64` containers masked to n bits.
//!
//! Word-level values use the usual numeric convention (bit 0 is the least
//! significant). The per-bit view used by the linear-approximation analysis
//! counts positions from the *most* significant end instead — see [`bit`] —
//! because that is the orientation in which the round function's taps sit at
//! `j+1`, `j+8` and `j+2`:
//!
//! ```text
//! L'(j) = R(j) ^ K(j) ^ (L(j+1) & L(j+8)) ^ L(j+2)      (indices mod n)
//! ```

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimonError {
    #[error("unknown SIMON variant '{0}' (expected e.g. \"32/64\" or \"128/256\")")]
    UnknownVariant(String),
    #[error("word 0x{word:x} does not fit in {n} bits")]
    WordOutOfRange { word: u64, n: u32 },
    #[error("master key has {got} words, variant needs {expected}")]
    KeyLength { got: usize, expected: usize },
    #[error("{rounds} rounds requested but only {keys} round keys available")]
    InsufficientKeys { rounds: usize, keys: usize },
    #[error("invalid hex string '{0}'")]
    BadHex(String),
}

/// One row of the SIMON parameter table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimonVariant {
    word_size: u32,
    key_words: u32,
    rounds: u32,
    z_index: usize,
}

/// (block, key) -> (n, m, T, z-sequence index), all ten published variants.
const VARIANT_TABLE: [(u32, u32, u32, u32, u32, usize); 10] = [
    (32, 64, 16, 4, 32, 0),
    (48, 72, 24, 3, 36, 0),
    (48, 96, 24, 4, 36, 1),
    (64, 96, 32, 3, 42, 2),
    (64, 128, 32, 4, 44, 3),
    (96, 96, 48, 2, 52, 2),
    (96, 144, 48, 3, 54, 3),
    (128, 128, 64, 2, 68, 2),
    (128, 192, 64, 3, 69, 3),
    (128, 256, 64, 4, 72, 4),
];

/// The five period-62 constant sequences of the key schedule, one bit per
/// character, index 0 leftmost.
const Z_SEQUENCES: [&str; 5] = [
    "11111010001001010110000111001101111101000100101011000011100110",
    "10001110111110010011000010110101000111011111001001100001011010",
    "10101111011100000011010010011000101000010001111110010110110011",
    "11011011101011000110010111100000010010001010011100110100001111",
    "11010001111001101011011000100000010111000011001010010011101111",
];

impl SimonVariant {
    pub const SIMON_32_64: SimonVariant = SimonVariant::row(0);
    pub const SIMON_48_72: SimonVariant = SimonVariant::row(1);
    pub const SIMON_48_96: SimonVariant = SimonVariant::row(2);
    pub const SIMON_64_96: SimonVariant = SimonVariant::row(3);
    pub const SIMON_64_128: SimonVariant = SimonVariant::row(4);
    pub const SIMON_96_96: SimonVariant = SimonVariant::row(5);
    pub const SIMON_96_144: SimonVariant = SimonVariant::row(6);
    pub const SIMON_128_128: SimonVariant = SimonVariant::row(7);
    pub const SIMON_128_192: SimonVariant = SimonVariant::row(8);
    pub const SIMON_128_256: SimonVariant = SimonVariant::row(9);

    const fn row(i: usize) -> SimonVariant {
        let (_, _, n, m, t, z) = VARIANT_TABLE[i];
        SimonVariant {
            word_size: n,
            key_words: m,
            rounds: t,
            z_index: z,
        }
    }

    pub fn all() -> [SimonVariant; 10] {
        [
            Self::SIMON_32_64,
            Self::SIMON_48_72,
            Self::SIMON_48_96,
            Self::SIMON_64_96,
            Self::SIMON_64_128,
            Self::SIMON_96_96,
            Self::SIMON_96_144,
            Self::SIMON_128_128,
            Self::SIMON_128_192,
            Self::SIMON_128_256,
        ]
    }

    /// Parse a `"block/key"` selector such as `"32/64"`.
    pub fn from_name(name: &str) -> Result<SimonVariant, SimonError> {
        Self::all()
            .into_iter()
            .find(|v| v.name() == name)
            .ok_or_else(|| SimonError::UnknownVariant(name.to_string()))
    }

    pub fn name(&self) -> String {
        format!("{}/{}", self.block_size(), self.key_size())
    }

    /// Word size n in bits.
    pub fn word_size(&self) -> u32 {
        self.word_size
    }

    /// Key words m.
    pub fn key_words(&self) -> u32 {
        self.key_words
    }

    /// Round count T.
    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn block_size(&self) -> u32 {
        2 * self.word_size
    }

    pub fn key_size(&self) -> u32 {
        self.key_words * self.word_size
    }
}

/// The (L, R) word pair at some round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimonState {
    pub left: u64,
    pub right: u64,
    pub round_index: u32,
}

impl SimonState {
    pub fn new(left: u64, right: u64, n: u32) -> Result<SimonState, SimonError> {
        check_word(left, n)?;
        check_word(right, n)?;
        Ok(SimonState {
            left,
            right,
            round_index: 0,
        })
    }
}

/// Round keys K_0 .. K_{T-1} for a fixed word size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundKeySet {
    word_size: u32,
    keys: Vec<u64>,
}

impl RoundKeySet {
    pub fn new(keys: Vec<u64>, n: u32) -> Result<RoundKeySet, SimonError> {
        for &k in &keys {
            check_word(k, n)?;
        }
        Ok(RoundKeySet { word_size: n, keys })
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn word_size(&self) -> u32 {
        self.word_size
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

fn mask(n: u32) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_word(word: u64, n: u32) -> Result<(), SimonError> {
    if word & !mask(n) != 0 {
        Err(SimonError::WordOutOfRange { word, n })
    } else {
        Ok(())
    }
}

/// Left circular rotation of an n-bit word. Requires `shift < n` and a word
/// that fits in n bits.
pub fn rotl(word: u64, shift: u32, n: u32) -> u64 {
    assert!(shift < n, "shift {shift} must be < word size {n}");
    assert!(word & !mask(n) == 0, "word 0x{word:x} exceeds {n} bits");
    if shift == 0 {
        word
    } else {
        ((word << shift) | (word >> (n - shift))) & mask(n)
    }
}

/// Right circular rotation; only the key schedule needs it.
fn rotr(word: u64, shift: u32, n: u32) -> u64 {
    rotl(word, (n - shift) % n, n)
}

/// One Feistel round with the given round key.
pub fn round_function(state: SimonState, round_key: u64, n: u32) -> SimonState {
    let l = state.left;
    let new_left = state.right ^ (rotl(l, 1, n) & rotl(l, 8 % n, n)) ^ rotl(l, 2, n) ^ round_key;
    SimonState {
        left: new_left,
        right: l,
        round_index: state.round_index + 1,
    }
}

/// Inverse of [`round_function`].
pub fn inverse_round_function(state: SimonState, round_key: u64, n: u32) -> SimonState {
    let l = state.right;
    let right = state.left ^ (rotl(l, 1, n) & rotl(l, 8 % n, n)) ^ rotl(l, 2, n) ^ round_key;
    SimonState {
        left: l,
        right,
        round_index: state.round_index.saturating_sub(1),
    }
}

/// Encrypt for `rounds` rounds with `keys[0..rounds]` in order.
pub fn encrypt(
    plaintext: SimonState,
    keys: &RoundKeySet,
    rounds: usize,
) -> Result<SimonState, SimonError> {
    if rounds > keys.len() {
        return Err(SimonError::InsufficientKeys {
            rounds,
            keys: keys.len(),
        });
    }
    let n = keys.word_size;
    let mut state = plaintext;
    for &k in &keys.keys[..rounds] {
        state = round_function(state, k, n);
    }
    Ok(state)
}

/// Like [`encrypt`] but captures every intermediate state; entry `i` is the
/// state after `i` rounds, so the result has `rounds + 1` entries.
pub fn encrypt_trajectory(
    plaintext: SimonState,
    keys: &RoundKeySet,
    rounds: usize,
) -> Result<Vec<SimonState>, SimonError> {
    if rounds > keys.len() {
        return Err(SimonError::InsufficientKeys {
            rounds,
            keys: keys.len(),
        });
    }
    let n = keys.word_size;
    let mut trajectory = Vec::with_capacity(rounds + 1);
    trajectory.push(plaintext);
    for &k in &keys.keys[..rounds] {
        let next = round_function(*trajectory.last().expect("non-empty"), k, n);
        trajectory.push(next);
    }
    Ok(trajectory)
}

/// Invert `rounds` rounds of [`encrypt`].
pub fn decrypt(
    ciphertext: SimonState,
    keys: &RoundKeySet,
    rounds: usize,
) -> Result<SimonState, SimonError> {
    if rounds > keys.len() {
        return Err(SimonError::InsufficientKeys {
            rounds,
            keys: keys.len(),
        });
    }
    let n = keys.word_size;
    let mut state = ciphertext;
    for &k in keys.keys[..rounds].iter().rev() {
        state = inverse_round_function(state, k, n);
    }
    Ok(state)
}

/// Expand an m-word master key into the variant's T round keys.
///
/// `master_key[0]` is the first round key. Hex-formatted keys list the most
/// significant word first; see [`parse_key_hex`] for that conversion.
pub fn key_schedule(master_key: &[u64], variant: SimonVariant) -> Result<RoundKeySet, SimonError> {
    let m = variant.key_words as usize;
    let n = variant.word_size;
    if master_key.len() != m {
        return Err(SimonError::KeyLength {
            got: master_key.len(),
            expected: m,
        });
    }
    for &k in master_key {
        check_word(k, n)?;
    }
    let z = Z_SEQUENCES[variant.z_index].as_bytes();
    let c = mask(n) ^ 3; // the constant 2^n - 4
    let mut keys = master_key.to_vec();
    for i in m..variant.rounds as usize {
        let mut tmp = rotr(keys[i - 1], 3, n);
        if m == 4 {
            tmp ^= keys[i - 3];
        }
        tmp ^= rotr(tmp, 1, n);
        let z_bit = (z[(i - m) % 62] - b'0') as u64;
        keys.push(c ^ z_bit ^ keys[i - m] ^ tmp);
    }
    RoundKeySet::new(keys, n)
}

// ---------------------------------------------------------------------------
// Per-bit view
// ---------------------------------------------------------------------------

/// Bit `j` of an n-bit word, counted from the most significant bit and
/// wrapping modulo n. In this orientation `rotl(w, m)` carries bit `j + m`
/// of `w` to position `j`, which puts the round function's taps at the
/// offsets `+1`, `+8`, `+2`.
pub fn bit(word: u64, j: u32, n: u32) -> bool {
    (word >> (n - 1 - (j % n))) & 1 == 1
}

/// Set bit `j` (same orientation as [`bit`]) to `value`.
pub fn set_bit(word: u64, j: u32, n: u32, value: bool) -> u64 {
    let m = 1u64 << (n - 1 - (j % n));
    if value {
        word | m
    } else {
        word & !m
    }
}

/// The round update restricted to a single bit position:
/// `L'(j) = R(j) ^ K(j) ^ (L(j+1) & L(j+8)) ^ L(j+2)`.
pub fn next_left_bit(r_j: bool, k_j: bool, l_j1: bool, l_j8: bool, l_j2: bool) -> bool {
    r_j ^ k_j ^ (l_j1 & l_j8) ^ l_j2
}

// ---------------------------------------------------------------------------
// Hex I/O
// ---------------------------------------------------------------------------

fn strip_0x(text: &str) -> Result<&str, SimonError> {
    text.strip_prefix("0x")
        .or_else(|| text.strip_prefix("0X"))
        .ok_or_else(|| SimonError::BadHex(text.to_string()))
}

/// Parse a `0x`-prefixed n-bit word, big-endian digit order.
pub fn parse_word_hex(text: &str, n: u32) -> Result<u64, SimonError> {
    let digits = strip_0x(text)?;
    if digits.is_empty() || digits.len() > (n as usize) / 4 {
        return Err(SimonError::BadHex(text.to_string()));
    }
    u64::from_str_radix(digits, 16).map_err(|_| SimonError::BadHex(text.to_string()))
}

/// Parse a full 2n-bit block `0xLLLL..RRRR..` into its (L, R) words.
pub fn parse_block_hex(text: &str, n: u32) -> Result<(u64, u64), SimonError> {
    let digits = strip_0x(text)?;
    let word_digits = (n as usize) / 4;
    if digits.len() != 2 * word_digits {
        return Err(SimonError::BadHex(text.to_string()));
    }
    let left = u64::from_str_radix(&digits[..word_digits], 16)
        .map_err(|_| SimonError::BadHex(text.to_string()))?;
    let right = u64::from_str_radix(&digits[word_digits..], 16)
        .map_err(|_| SimonError::BadHex(text.to_string()))?;
    Ok((left, right))
}

/// Parse an m-word master key written most significant word first, returning
/// words in round order (`[0]` is the first round key).
pub fn parse_key_hex(text: &str, variant: SimonVariant) -> Result<Vec<u64>, SimonError> {
    let digits = strip_0x(text)?;
    let word_digits = (variant.word_size() as usize) / 4;
    let m = variant.key_words() as usize;
    if digits.len() != m * word_digits {
        return Err(SimonError::BadHex(text.to_string()));
    }
    let mut words = Vec::with_capacity(m);
    for chunk in 0..m {
        let slice = &digits[chunk * word_digits..(chunk + 1) * word_digits];
        words.push(
            u64::from_str_radix(slice, 16).map_err(|_| SimonError::BadHex(text.to_string()))?,
        );
    }
    words.reverse();
    Ok(words)
}

/// Format an n-bit word as `0x` plus exactly n/4 hex digits.
pub fn format_word_hex(word: u64, n: u32) -> String {
    format!("0x{:0width$x}", word, width = (n as usize) / 4)
}

/// Format an (L, R) block as a single hex string, L first.
pub fn format_block_hex(left: u64, right: u64, n: u32) -> String {
    let width = (n as usize) / 4;
    format!("0x{:0width$x}{:0width$x}", left, right, width = width)
}
