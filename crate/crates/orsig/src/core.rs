//! Bit-vector code words, code books, and random code generation.
//!
//! Positions are stored packed, 64 per block, least-significant bit first,
//! so covering tests and Boolean sums run as wide bitwise operations. The
//! packed layout is observationally identical to the per-bit definitions;
//! blocks past the logical length are kept zero so whole-block comparisons
//! need no masking.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

const BLOCK_BITS: usize = 64;

/// Errors from code construction, generation, and (de)serialization.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodeError {
    #[error("bit probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("a code needs at least one user")]
    NoUsers,
    #[error("a code word needs at least one position")]
    EmptyWord,
    #[error("word {index} has length {actual}, expected {expected}")]
    WordLength {
        index: usize,
        expected: usize,
        actual: usize,
    },
    #[error("invalid bit character {0:?} (expected '0' or '1')")]
    InvalidBitChar(char),
    #[error("declared user count {declared} does not match {actual} stored words")]
    UserCountMismatch { declared: usize, actual: usize },
    #[error("packed code needs {expected} bytes, got {actual}")]
    PackedLength { expected: usize, actual: usize },
}

/// A fixed-length binary word; one slot per bit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    blocks: Vec<u64>,
    len: usize,
}

impl Codeword {
    /// All-zero word of `len` slots.
    pub fn zeros(len: usize) -> Self {
        Codeword {
            blocks: vec![0; len.div_ceil(BLOCK_BITS)],
            len,
        }
    }

    /// All-one word of `len` slots.
    pub fn ones(len: usize) -> Self {
        let mut w = Codeword {
            blocks: vec![u64::MAX; len.div_ceil(BLOCK_BITS)],
            len,
        };
        w.mask_tail();
        w
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut w = Codeword::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                w.set(i, true);
            }
        }
        w
    }

    /// Parses a '0'/'1' string, most significant slot first in reading order
    /// (slot 0 is the leftmost character).
    pub fn from_bitstring(s: &str) -> Result<Self, CodeError> {
        let mut w = Codeword::zeros(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => w.set(i, true),
                other => return Err(CodeError::InvalidBitChar(other)),
            }
        }
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at slot `i`. Panics if `i` is out of range.
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "slot {i} out of range for length {}",
            self.len
        );
        self.blocks[i / BLOCK_BITS] >> (i % BLOCK_BITS) & 1 == 1
    }

    pub(crate) fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "slot {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % BLOCK_BITS);
        if value {
            self.blocks[i / BLOCK_BITS] |= mask;
        } else {
            self.blocks[i / BLOCK_BITS] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Positionwise OR with a word of the same length.
    pub fn or_assign(&mut self, other: &Codeword) {
        assert_eq!(
            self.len, other.len,
            "boolean sum needs equal lengths ({} vs {})",
            self.len, other.len
        );
        for (b, o) in self.blocks.iter_mut().zip(&other.blocks) {
            *b |= o;
        }
    }

    /// True iff `self` covers `z`, i.e. every slot satisfies `self[i] >= z[i]`.
    /// Panics on length mismatch.
    pub fn covers(&self, z: &Codeword) -> bool {
        assert_eq!(
            self.len, z.len,
            "covering test needs equal lengths ({} vs {})",
            self.len, z.len
        );
        self.blocks.iter().zip(&z.blocks).all(|(y, z)| z & !y == 0)
    }

    /// True iff the window of `self` starting at `offset` covers `word`.
    /// Equivalent to `self.slice(offset, word.len()).covers(word)` without
    /// the allocation. Panics if the window does not fit.
    pub fn covers_at(&self, word: &Codeword, offset: usize) -> bool {
        assert!(
            offset + word.len <= self.len,
            "window [{offset}, {}) exceeds length {}",
            offset + word.len,
            self.len
        );
        let block = offset / BLOCK_BITS;
        let shift = offset % BLOCK_BITS;
        for (k, &w) in word.blocks.iter().enumerate() {
            let mut seg = self.blocks[block + k] >> shift;
            if shift != 0 {
                if let Some(&hi) = self.blocks.get(block + k + 1) {
                    seg |= hi << (BLOCK_BITS - shift);
                }
            }
            // Bits of `seg` beyond word.len are garbage, but `w` is zero there.
            if w & !seg != 0 {
                return false;
            }
        }
        true
    }

    /// ORs `word` into `self` starting at slot `offset`.
    pub fn or_assign_at(&mut self, word: &Codeword, offset: usize) {
        assert!(
            offset + word.len <= self.len,
            "window [{offset}, {}) exceeds length {}",
            offset + word.len,
            self.len
        );
        let block = offset / BLOCK_BITS;
        let shift = offset % BLOCK_BITS;
        for (k, &w) in word.blocks.iter().enumerate() {
            self.blocks[block + k] |= w << shift;
            if shift != 0 {
                let hi = w >> (BLOCK_BITS - shift);
                if hi != 0 {
                    self.blocks[block + k + 1] |= hi;
                }
            }
        }
    }

    /// Copy of slots `[start, start + len)` as a fresh word.
    pub fn slice(&self, start: usize, len: usize) -> Codeword {
        assert!(
            start + len <= self.len,
            "slice [{start}, {}) exceeds length {}",
            start + len,
            self.len
        );
        let mut out = Codeword::zeros(len);
        let block = start / BLOCK_BITS;
        let shift = start % BLOCK_BITS;
        for k in 0..out.blocks.len() {
            let mut seg = self.blocks[block + k] >> shift;
            if shift != 0 {
                if let Some(&hi) = self.blocks.get(block + k + 1) {
                    seg |= hi << (BLOCK_BITS - shift);
                }
            }
            out.blocks[k] = seg;
        }
        out.mask_tail();
        out
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    /// Row bytes for the packed on-disk layout: slot `i` lives in byte
    /// `i / 8`, bit `i % 8` (LSB first); the final byte is zero-padded.
    pub fn to_packed_row(&self) -> Vec<u8> {
        let n_bytes = self.len.div_ceil(8);
        (0..n_bytes)
            .map(|b| (self.blocks[b / 8] >> (8 * (b % 8))) as u8)
            .collect()
    }

    pub fn from_packed_row(bytes: &[u8], len: usize) -> Result<Self, CodeError> {
        let n_bytes = len.div_ceil(8);
        if bytes.len() < n_bytes {
            return Err(CodeError::PackedLength {
                expected: n_bytes,
                actual: bytes.len(),
            });
        }
        let mut w = Codeword::zeros(len);
        for i in 0..len {
            if bytes[i / 8] >> (i % 8) & 1 == 1 {
                w.set(i, true);
            }
        }
        Ok(w)
    }

    fn mask_tail(&mut self) {
        let rem = self.len % BLOCK_BITS;
        if rem != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Codeword({})", self.to_bitstring())
    }
}

/// Positionwise OR of a nonempty collection of equal-length words.
/// Panics if the collection is empty or lengths differ.
pub fn boolean_sum<'a, I>(words: I) -> Codeword
where
    I: IntoIterator<Item = &'a Codeword>,
{
    let mut it = words.into_iter();
    let first = it.next().expect("boolean sum of an empty collection");
    let mut acc = first.clone();
    for w in it {
        acc.or_assign(w);
    }
    acc
}

/// A signature book: one code word per user, all of the same length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    words: Vec<Codeword>,
    word_len: usize,
}

impl Code {
    pub fn new(words: Vec<Codeword>) -> Result<Self, CodeError> {
        let first = words.first().ok_or(CodeError::NoUsers)?;
        let word_len = first.len();
        if word_len == 0 {
            return Err(CodeError::EmptyWord);
        }
        for (index, w) in words.iter().enumerate() {
            if w.len() != word_len {
                return Err(CodeError::WordLength {
                    index,
                    expected: word_len,
                    actual: w.len(),
                });
            }
        }
        Ok(Code { words, word_len })
    }

    /// Number of users `T`.
    pub fn users(&self) -> usize {
        self.words.len()
    }

    /// Code length `n` in slots.
    pub fn word_len(&self) -> usize {
        self.word_len
    }

    /// Code word of user `u` (0-based).
    pub fn word(&self, user: usize) -> &Codeword {
        &self.words[user]
    }

    pub fn words(&self) -> &[Codeword] {
        &self.words
    }

    /// Compact binary layout: `T` then `n` as little-endian u32, followed by
    /// the rows of [`Codeword::to_packed_row`] in user order.
    pub fn to_packed_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.users() * self.word_len.div_ceil(8));
        out.extend_from_slice(&(self.users() as u32).to_le_bytes());
        out.extend_from_slice(&(self.word_len as u32).to_le_bytes());
        for w in &self.words {
            out.extend_from_slice(&w.to_packed_row());
        }
        out
    }

    pub fn from_packed_bytes(bytes: &[u8]) -> Result<Self, CodeError> {
        if bytes.len() < 8 {
            return Err(CodeError::PackedLength {
                expected: 8,
                actual: bytes.len(),
            });
        }
        let users = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
        let word_len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let row_bytes = word_len.div_ceil(8);
        let expected = 8 + users * row_bytes;
        if bytes.len() != expected {
            return Err(CodeError::PackedLength {
                expected,
                actual: bytes.len(),
            });
        }
        let words = (0..users)
            .map(|u| {
                let off = 8 + u * row_bytes;
                Codeword::from_packed_row(&bytes[off..off + row_bytes], word_len)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Code::new(words)
    }
}

#[derive(Serialize, Deserialize)]
struct CodeRepr {
    #[serde(rename = "T")]
    users: usize,
    n: usize,
    words: Vec<String>,
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CodeRepr {
            users: self.users(),
            n: self.word_len,
            words: self.words.iter().map(|w| w.to_bitstring()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Code {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = CodeRepr::deserialize(deserializer)?;
        if repr.words.len() != repr.users {
            return Err(D::Error::custom(CodeError::UserCountMismatch {
                declared: repr.users,
                actual: repr.words.len(),
            }));
        }
        let words = repr
            .words
            .iter()
            .map(|s| Codeword::from_bitstring(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        let code = Code::new(words).map_err(D::Error::custom)?;
        if code.word_len() != repr.n {
            return Err(D::Error::custom(CodeError::WordLength {
                index: 0,
                expected: repr.n,
                actual: code.word_len(),
            }));
        }
        Ok(code)
    }
}

/// Parameters for i.i.d. Bernoulli code generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeGenParams {
    /// User count `T`.
    pub users: usize,
    /// Code length `n` in slots.
    pub code_len: usize,
    /// Probability that any given bit is 1.
    pub one_prob: f64,
    /// RNG seed; identical parameters yield a bit-identical code.
    pub seed: u64,
}

impl CodeGenParams {
    pub fn validate(&self) -> Result<(), CodeError> {
        if self.users == 0 {
            return Err(CodeError::NoUsers);
        }
        if self.code_len == 0 {
            return Err(CodeError::EmptyWord);
        }
        if !(0.0..=1.0).contains(&self.one_prob) {
            return Err(CodeError::InvalidProbability(self.one_prob));
        }
        Ok(())
    }
}

/// Draws a `T x n` code with i.i.d. Bernoulli(p) bits.
///
/// User `u`'s word comes from a ChaCha stream derived from `(seed, u)`, so a
/// code is stable under user-count extension: generating with a larger `T`
/// and the same seed reproduces the first `T` words verbatim.
pub fn generate_code(params: &CodeGenParams) -> Result<Code, CodeError> {
    params.validate()?;
    let words = (0..params.users)
        .map(|user| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(user as u64);
            let mut w = Codeword::zeros(params.code_len);
            for pos in 0..params.code_len {
                if rng.random_bool(params.one_prob) {
                    w.set(pos, true);
                }
            }
            w
        })
        .collect();
    Code::new(words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Codeword {
        Codeword::from_bitstring(s).unwrap()
    }

    /// Per-bit reference for the packed covering test.
    fn covers_naive(y: &Codeword, z: &Codeword) -> bool {
        (0..y.len()).all(|i| y.get(i) || !z.get(i))
    }

    /// Per-bit reference for the packed OR.
    fn or_naive(a: &Codeword, b: &Codeword) -> Codeword {
        Codeword::from_bits(
            &(0..a.len())
                .map(|i| a.get(i) || b.get(i))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn boolean_sum_is_positionwise_or() {
        assert_eq!(boolean_sum([&w("00110"), &w("01010")]), w("01110"));
    }

    #[test]
    fn boolean_sum_singleton_is_identity() {
        let x = w("10101");
        assert_eq!(boolean_sum([&x]), x);
    }

    #[test]
    fn boolean_sum_absorbs_into_all_ones() {
        assert_eq!(boolean_sum([&w("11111"), &w("01010")]), w("11111"));
    }

    #[test]
    #[should_panic(expected = "empty collection")]
    fn boolean_sum_rejects_empty() {
        boolean_sum::<[&Codeword; 0]>([]);
    }

    #[test]
    #[should_panic(expected = "equal lengths")]
    fn boolean_sum_rejects_length_mismatch() {
        boolean_sum([&w("01"), &w("011")]);
    }

    #[test]
    fn covers_examples() {
        assert!(w("01110").covers(&w("00110")));
        assert!(!w("01110").covers(&w("10000")));
        let y = w("1011001");
        assert!(y.covers(&y));
    }

    #[test]
    #[should_panic(expected = "equal lengths")]
    fn covers_rejects_length_mismatch() {
        w("01").covers(&w("011"));
    }

    #[test]
    fn generate_zero_prob_gives_all_zero_code() {
        let code = generate_code(&CodeGenParams {
            users: 3,
            code_len: 5,
            one_prob: 0.0,
            seed: 1,
        })
        .unwrap();
        for u in 0..3 {
            assert_eq!(code.word(u).count_ones(), 0);
        }
    }

    #[test]
    fn generate_one_prob_gives_all_one_code() {
        let code = generate_code(&CodeGenParams {
            users: 3,
            code_len: 5,
            one_prob: 1.0,
            seed: 1,
        })
        .unwrap();
        for u in 0..3 {
            assert_eq!(code.word(u).count_ones(), 5);
        }
    }

    #[test]
    fn generate_half_prob_is_balanced() {
        // 64000 bits at p = 1/2: the one-fraction stays within 0.49..0.51
        // (a 5-sigma band) for this fixed seed.
        let code = generate_code(&CodeGenParams {
            users: 1000,
            code_len: 64,
            one_prob: 0.5,
            seed: 7,
        })
        .unwrap();
        let ones: usize = code.words().iter().map(Codeword::count_ones).sum();
        let fraction = ones as f64 / 64000.0;
        assert!((0.49..=0.51).contains(&fraction), "fraction {fraction}");
    }

    #[test]
    fn generate_is_reproducible() {
        let params = CodeGenParams {
            users: 17,
            code_len: 130,
            one_prob: 0.3,
            seed: 99,
        };
        assert_eq!(
            generate_code(&params).unwrap(),
            generate_code(&params).unwrap()
        );
    }

    #[test]
    fn generate_is_stable_under_user_extension() {
        let small = generate_code(&CodeGenParams {
            users: 5,
            code_len: 40,
            one_prob: 0.25,
            seed: 11,
        })
        .unwrap();
        let large = generate_code(&CodeGenParams {
            users: 9,
            code_len: 40,
            one_prob: 0.25,
            seed: 11,
        })
        .unwrap();
        for u in 0..5 {
            assert_eq!(small.word(u), large.word(u), "user {u}");
        }
    }

    #[test]
    fn generate_rejects_invalid_probability() {
        for p in [-0.1, 1.5, f64::NAN] {
            let err = generate_code(&CodeGenParams {
                users: 2,
                code_len: 4,
                one_prob: p,
                seed: 0,
            })
            .unwrap_err();
            assert!(matches!(err, CodeError::InvalidProbability(_)), "{p}");
        }
    }

    #[test]
    fn bitstring_round_trip_and_errors() {
        let s = "100110111010001";
        assert_eq!(w(s).to_bitstring(), s);
        assert_eq!(
            Codeword::from_bitstring("0102").unwrap_err(),
            CodeError::InvalidBitChar('2')
        );
    }

    #[test]
    fn windowed_ops_match_slice_on_block_boundaries() {
        // Lengths straddling the 64-bit block size are where shift bugs hide.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for stream_len in [64usize, 65, 127, 128, 200] {
            let stream = Codeword::from_bits(
                &(0..stream_len)
                    .map(|_| rng.random_bool(0.5))
                    .collect::<Vec<_>>(),
            );
            for word_len in [1usize, 63, 64, 65] {
                if word_len > stream_len {
                    continue;
                }
                let word = Codeword::from_bits(
                    &(0..word_len)
                        .map(|_| rng.random_bool(0.4))
                        .collect::<Vec<_>>(),
                );
                for offset in [0, 1, 62, 63, 64, stream_len - word_len] {
                    if offset + word_len > stream_len {
                        continue;
                    }
                    let window = stream.slice(offset, word_len);
                    assert_eq!(
                        stream.covers_at(&word, offset),
                        covers_naive(&window, &word),
                        "len={stream_len} wlen={word_len} off={offset}"
                    );
                    let mut acc = Codeword::zeros(stream_len);
                    acc.or_assign_at(&word, offset);
                    for i in 0..stream_len {
                        let expect = i >= offset && i < offset + word_len && word.get(i - offset);
                        assert_eq!(acc.get(i), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn code_json_shape_and_round_trip() {
        let code = Code::new(vec![w("10110"), w("01011"), w("11100")]).unwrap();
        let json = serde_json::to_value(&code).unwrap();
        assert_eq!(json["T"], 3);
        assert_eq!(json["n"], 5);
        assert_eq!(json["words"][1], "01011");
        let back: Code = serde_json::from_value(json).unwrap();
        assert_eq!(back, code);
    }

    #[test]
    fn code_json_rejects_inconsistent_header() {
        let bad = r#"{"T": 2, "n": 5, "words": ["10110"]}"#;
        assert!(serde_json::from_str::<Code>(bad).is_err());
        let bad_len = r#"{"T": 1, "n": 4, "words": ["10110"]}"#;
        assert!(serde_json::from_str::<Code>(bad_len).is_err());
    }

    #[test]
    fn code_packed_round_trip() {
        let code = generate_code(&CodeGenParams {
            users: 6,
            code_len: 77,
            one_prob: 1.0 / 3.0,
            seed: 4,
        })
        .unwrap();
        let bytes = code.to_packed_bytes();
        assert_eq!(bytes.len(), 8 + 6 * 10);
        assert_eq!(Code::from_packed_bytes(&bytes).unwrap(), code);
    }

    #[test]
    fn code_packed_rejects_truncation() {
        let code = Code::new(vec![w("1011")]).unwrap();
        let mut bytes = code.to_packed_bytes();
        bytes.pop();
        assert!(matches!(
            Code::from_packed_bytes(&bytes).unwrap_err(),
            CodeError::PackedLength { .. }
        ));
    }

    #[test]
    fn code_rejects_ragged_words() {
        assert!(matches!(
            Code::new(vec![w("101"), w("10")]).unwrap_err(),
            CodeError::WordLength { index: 1, .. }
        ));
        assert!(matches!(Code::new(vec![]).unwrap_err(), CodeError::NoUsers));
    }

    fn arb_word(len: usize) -> impl Strategy<Value = Codeword> {
        proptest::collection::vec(any::<bool>(), len).prop_map(|bits| Codeword::from_bits(&bits))
    }

    proptest! {
        #[test]
        fn sum_covers_every_term(len in 1usize..130, picks in proptest::collection::vec(0usize..5, 1..5)) {
            let words: Vec<Codeword> = (0..5)
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(i as u64 + len as u64 * 31);
                    Codeword::from_bits(&(0..len).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>())
                })
                .collect();
            let chosen: Vec<&Codeword> = picks.iter().map(|&i| &words[i]).collect();
            let sum = boolean_sum(chosen.iter().copied());
            for term in chosen {
                prop_assert!(sum.covers(term));
            }
        }

        #[test]
        fn sum_is_commutative_associative_idempotent(len in 1usize..100, seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Codeword::from_bits(&(0..len).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>());
            let b = Codeword::from_bits(&(0..len).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>());
            let c = Codeword::from_bits(&(0..len).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>());
            prop_assert_eq!(boolean_sum([&a, &b]), boolean_sum([&b, &a]));
            prop_assert_eq!(
                boolean_sum([&boolean_sum([&a, &b]), &c]),
                boolean_sum([&a, &boolean_sum([&b, &c])])
            );
            prop_assert_eq!(boolean_sum([&a, &a]), a.clone());
        }

        #[test]
        fn packed_covers_matches_per_bit_definition(pair in (1usize..150).prop_flat_map(|len| (arb_word(len), arb_word(len)))) {
            let (y, z) = pair;
            prop_assert_eq!(y.covers(&z), covers_naive(&y, &z));
        }

        #[test]
        fn packed_or_matches_per_bit_definition(pair in (1usize..150).prop_flat_map(|len| (arb_word(len), arb_word(len)))) {
            let (a, b) = pair;
            let mut packed = a.clone();
            packed.or_assign(&b);
            prop_assert_eq!(packed, or_naive(&a, &b));
        }

        #[test]
        fn mutual_cover_means_equal(pair in (1usize..100).prop_flat_map(|len| (arb_word(len), arb_word(len)))) {
            let (y, z) = pair;
            if y.covers(&z) && z.covers(&y) {
                prop_assert_eq!(y, z);
            }
        }
    }
}
