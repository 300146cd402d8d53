//! Binary linear block codes: generator matrices, exhaustive codeword
//! enumeration, weight enumerators and BPSK modulation.

use thiserror::Error;

use crate::Real;

/// Largest message length for which codewords are enumerated (2^24 words).
pub const MAX_ENUMERABLE_K: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodeError {
    #[error("invalid code dimensions k={k}, n={n} (need 1 <= k <= n)")]
    Dimensions { k: usize, n: usize },
    #[error("generator row {row} has length {found}, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("generator row {row} contains a symbol other than 0/1")]
    NonBinary { row: usize },
    #[error("generator matrix has GF(2) rank {rank} < k={k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("k={k} exceeds the enumeration cap of {MAX_ENUMERABLE_K}")]
    Capacity { k: usize },
    #[error("invalid weight enumerator: {0}")]
    Enumerator(String),
    #[error("unknown builtin code `{0}` (expected hamming84 or ldpc128)")]
    UnknownBuiltin(String),
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// k×n binary generator matrix with full row rank, rows bit-packed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    k: usize,
    n: usize,
    stride: usize,
    rows: Vec<u64>,
}

impl GeneratorMatrix {
    /// Builds from rows of 0/1 values. Rejects ragged, non-binary and
    /// rank-deficient input.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, CodeError> {
        let k = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        if k == 0 || n < k {
            return Err(CodeError::Dimensions { k, n });
        }
        let stride = words_for(n);
        let mut packed = vec![0u64; k * stride];
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(CodeError::RowLength { row: i, expected: n, found: row.len() });
            }
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => packed[i * stride + j / 64] |= 1 << (j % 64),
                    _ => return Err(CodeError::NonBinary { row: i }),
                }
            }
        }
        let g = Self { k, n, stride, rows: packed };
        let rank = g.rank();
        if rank < k {
            return Err(CodeError::RankDeficient { rank, k });
        }
        Ok(g)
    }

    /// Builds from strings of `0`/`1` characters, one per row.
    pub fn from_strs<S: AsRef<str>>(rows: &[S]) -> Result<Self, CodeError> {
        let mut bits = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            let row: Result<Vec<u8>, _> = r
                .as_ref()
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(CodeError::NonBinary { row: i }),
                })
                .collect();
            bits.push(row?);
        }
        Self::from_rows(&bits)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bit(&self, row: usize, col: usize) -> u8 {
        ((self.rows[row * self.stride + col / 64] >> (col % 64)) & 1) as u8
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.stride..(i + 1) * self.stride]
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<u64>> = (0..self.k).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.n {
            let (w, b) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..m.len()).find(|&r| m[r][w] & b != 0) else {
                continue;
            };
            m.swap(rank, p);
            let pivot = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && row[w] & b != 0 {
                    row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
                }
            }
            rank += 1;
            if rank == m.len() {
                break;
            }
        }
        rank
    }
}

/// All 2^k codewords, bit-packed, indexed by message value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodewordList {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

impl CodewordList {
    pub fn len(&self) -> usize {
        self.words.len() / self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn packed(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    /// Codeword `i` as 0/1 values.
    pub fn bits(&self, i: usize) -> Vec<u8> {
        let w = self.packed(i);
        (0..self.n).map(|j| ((w[j / 64] >> (j % 64)) & 1) as u8).collect()
    }

    pub fn weight(&self, i: usize) -> usize {
        self.packed(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the codeword equal to `packed`, if any.
    pub fn position(&self, packed: &[u64]) -> Option<usize> {
        (0..self.len()).find(|&i| self.packed(i) == packed)
    }

    /// Hamming distance between codewords `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> usize {
        self.packed(i)
            .iter()
            .zip(self.packed(j))
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }
}

/// Lists every codeword. Index `m` is the encoding of message `m` read as a
/// binary counter (bit `i` selects generator row `i`), so index 0 is the
/// all-zero word.
pub fn enumerate_codewords(g: &GeneratorMatrix) -> Result<CodewordList, CodeError> {
    if g.k > MAX_ENUMERABLE_K {
        return Err(CodeError::Capacity { k: g.k });
    }
    if g.rank() < g.k {
        return Err(CodeError::RankDeficient { rank: g.rank(), k: g.k });
    }
    let count = 1usize << g.k;
    let stride = g.stride;
    let mut words = vec![0u64; count * stride];
    for m in 1..count {
        let parent = m & (m - 1);
        let row = g.row(m.trailing_zeros() as usize);
        let (done, rest) = words.split_at_mut(m * stride);
        let src = &done[parent * stride..(parent + 1) * stride];
        for ((dst, a), b) in rest[..stride].iter_mut().zip(src).zip(row) {
            *dst = a ^ b;
        }
    }
    Ok(CodewordList { n: g.n, stride, words })
}

/// Codeword counts A_w by Hamming weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightEnumerator {
    n: usize,
    d_min: usize,
    coeffs: Vec<u128>,
    truncated: bool,
}

impl WeightEnumerator {
    /// Exact enumerator of a full codeword list.
    pub fn from_codewords(list: &CodewordList) -> Self {
        let mut coeffs = vec![0u128; list.n() + 1];
        for i in 0..list.len() {
            coeffs[list.weight(i)] += 1;
        }
        let d_min = coeffs.iter().skip(1).position(|&a| a > 0).map_or(0, |p| p + 1);
        Self { n: list.n(), d_min, coeffs, truncated: false }
    }

    /// Enumerator from explicit `(w, A_w)` terms. A_0 defaults to 1.
    ///
    /// Requires A_w = 0 below `d_min` and, unless `truncated`, A_{d_min} > 0.
    /// A truncated enumerator may list no terms at all.
    pub fn from_terms(
        n: usize,
        d_min: usize,
        terms: &[(usize, u128)],
        truncated: bool,
    ) -> Result<Self, CodeError> {
        let bad = |msg: String| Err(CodeError::Enumerator(msg));
        if n == 0 {
            return bad("block length must be positive".into());
        }
        if d_min == 0 || d_min > n {
            return bad(format!("d_min={d_min} outside 1..={n}"));
        }
        let mut coeffs = vec![0u128; n + 1];
        coeffs[0] = 1;
        for &(w, a) in terms {
            if w > n {
                return bad(format!("weight {w} exceeds block length {n}"));
            }
            if w == 0 && a != 1 {
                return bad(format!("A_0 must be 1, got {a}"));
            }
            if w > 0 && w < d_min && a != 0 {
                return bad(format!("A_{w}={a} is nonzero below d_min={d_min}"));
            }
            coeffs[w] = a;
        }
        if coeffs[d_min] == 0 && !truncated {
            return bad(format!("A_{d_min} must be positive at d_min"));
        }
        Ok(Self { n, d_min, coeffs, truncated })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// A_w; zero outside 0..=n.
    pub fn coeff(&self, w: usize) -> u128 {
        self.coeffs.get(w).copied().unwrap_or(0)
    }

    /// A_0..=A_n.
    pub fn coeffs(&self) -> &[u128] {
        &self.coeffs
    }

    /// Nonzero terms with w ≥ 1, ascending.
    pub fn nonzero_terms(&self) -> impl Iterator<Item = (usize, u128)> + '_ {
        self.coeffs.iter().enumerate().skip(1).filter(|(_, &a)| a > 0).map(|(w, &a)| (w, a))
    }

    /// Σ_w A_w (equals 2^k for a complete enumerator).
    pub fn total(&self) -> u128 {
        self.coeffs.iter().sum()
    }
}

/// Binary linear code with its full codeword list.
#[derive(Debug, Clone)]
pub struct LinearCode {
    name: String,
    generator: GeneratorMatrix,
    codewords: CodewordList,
    weight_enum: WeightEnumerator,
}

impl LinearCode {
    /// Enumerates the code; fails for k above [`MAX_ENUMERABLE_K`].
    pub fn new(name: impl Into<String>, generator: GeneratorMatrix) -> Result<Self, CodeError> {
        let codewords = enumerate_codewords(&generator)?;
        let weight_enum = WeightEnumerator::from_codewords(&codewords);
        Ok(Self { name: name.into(), generator, codewords, weight_enum })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.generator.n
    }

    pub fn k(&self) -> usize {
        self.generator.k
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    pub fn codewords(&self) -> &CodewordList {
        &self.codewords
    }

    pub fn weight_enumerator(&self) -> &WeightEnumerator {
        &self.weight_enum
    }
}

/// Code known only through its (possibly truncated) weight enumerator.
#[derive(Debug, Clone)]
pub struct EnumeratorCode {
    pub name: String,
    pub k: usize,
    pub enumerator: WeightEnumerator,
}

/// A code as loaded from a builtin name or a code file.
#[derive(Debug, Clone)]
pub enum Code {
    Linear(LinearCode),
    Enumerator(EnumeratorCode),
}

impl Code {
    pub fn name(&self) -> &str {
        match self {
            Code::Linear(c) => c.name(),
            Code::Enumerator(c) => &c.name,
        }
    }

    pub fn n(&self) -> usize {
        self.weight_enumerator().n()
    }

    pub fn k(&self) -> usize {
        match self {
            Code::Linear(c) => c.k(),
            Code::Enumerator(c) => c.k,
        }
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn weight_enumerator(&self) -> &WeightEnumerator {
        match self {
            Code::Linear(c) => c.weight_enumerator(),
            Code::Enumerator(c) => &c.enumerator,
        }
    }

    /// The enumerated code, if this source carries a generator matrix.
    pub fn linear(&self) -> Option<&LinearCode> {
        match self {
            Code::Linear(c) => Some(c),
            Code::Enumerator(_) => None,
        }
    }
}

/// Maps bit 0 to +1 and bit 1 to −1, so modulated codewords at Hamming
/// distance w are 2√w apart.
pub fn bpsk_modulate<T: Real>(word: &[u8]) -> Vec<T> {
    word.iter().map(|&b| if b == 0 { T::one() } else { -T::one() }).collect()
}

/// (7,4) Hamming code in systematic form extended by an overall parity bit.
pub fn builtin_extended_hamming_8_4() -> LinearCode {
    let g = GeneratorMatrix::from_strs(&["10001101", "01000111", "00101110", "00011011"])
        .expect("builtin generator is valid");
    LinearCode::new("hamming84", g).expect("builtin code enumerates")
}

/// Leading terms of the weight enumerator of the rate-1/2 (128,64)
/// telecommand LDPC code. Only weights 14 through 18 are known.
pub fn builtin_ldpc_128_64_weight_enum() -> WeightEnumerator {
    WeightEnumerator::from_terms(128, 14, &[(14, 16), (15, 0), (16, 512), (17, 0), (18, 5344)], true)
        .expect("builtin enumerator is valid")
}

/// Resolves a builtin code name (without the `builtin:` prefix).
pub fn builtin(name: &str) -> Result<Code, CodeError> {
    match name {
        "hamming84" => Ok(Code::Linear(builtin_extended_hamming_8_4())),
        "ldpc128" => Ok(Code::Enumerator(EnumeratorCode {
            name: "ldpc128".into(),
            k: 64,
            enumerator: builtin_ldpc_128_64_weight_enum(),
        })),
        other => Err(CodeError::UnknownBuiltin(other.into())),
    }
}
