//! Code construction: Gaussian-approximation channel ranking, frozen-set
//! selection, and CRC handling for list decoding.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("block length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("payload {k} + crc {r} exceeds block length {n}")]
    RateTooHigh { n: usize, k: usize, r: usize },
    #[error("reliability order has {got} entries, expected {want}")]
    OrderLength { got: usize, want: usize },
    #[error("reliability order is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("message has {got} bits, expected {want}")]
    MessageLength { got: usize, want: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Channel indices ordered from least to most reliable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReliabilitySequence {
    pub order: Vec<usize>,
}

impl ReliabilitySequence {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self, ConstructionError> {
        let text = std::fs::read_to_string(path)?;
        let seq: Self = serde_json::from_str(&text)?;
        Ok(seq)
    }

    pub fn validate(&self, n: usize) -> Result<(), ConstructionError> {
        if self.order.len() != n {
            return Err(ConstructionError::OrderLength {
                got: self.order.len(),
                want: n,
            });
        }
        let mut seen = vec![false; n];
        for &i in &self.order {
            if i >= n || seen[i] {
                return Err(ConstructionError::NotAPermutation(n));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// phi(x) approximation used by the Gaussian-approximation density evolution
/// (Chung et al. / Trifonov form).
fn phi(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < 10.0 {
        (-0.4527 * x.powf(0.86) + 0.0218).exp()
    } else {
        (std::f64::consts::PI / x).sqrt() * (-x / 4.0).exp() * (1.0 - 10.0 / (7.0 * x))
    }
}

/// Inverse of `phi` by bisection; phi is strictly decreasing on (0, inf).
fn phi_inv(y: f64) -> f64 {
    if y >= 1.0 {
        return 0.0;
    }
    let mut lo = 1e-12;
    let mut hi = 1.0;
    while phi(hi) > y {
        hi *= 2.0;
        if hi > 1e12 {
            return hi;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mean LLR of the check-side combined channel given both inputs have mean m.
fn check_mean(m: f64) -> f64 {
    // 1 - (1 - p)^2 written cancellation-free: p can be far below machine
    // epsilon for reliable channels
    let p = phi(m);
    if p < 1e-300 {
        // phi underflows; for large m the check combination costs a factor of
        // two in the density, i.e. a shift of 4 ln 2 in the mean
        return m - 4.0 * std::f64::consts::LN_2;
    }
    phi_inv(p * (2.0 - p))
}

/// Gaussian-approximation construction: returns per-channel mean LLRs in
/// natural bit order for block length 2^n at the given design SNR (dB).
pub fn ga_channel_means(n: u32, design_snr_db: f64) -> Vec<f64> {
    let m0 = 4.0 * 10f64.powf(design_snr_db / 10.0);
    let mut means = vec![m0];
    for _ in 0..n {
        let mut next = vec![0.0; 2 * means.len()];
        for (j, &m) in means.iter().enumerate() {
            next[2 * j] = check_mean(m);
            next[2 * j + 1] = 2.0 * m;
        }
        means = next;
    }
    means
}

/// Build a reliability order (ascending mean LLR, ties by index) for 2^n
/// channels at the given design SNR.
pub fn build_reliability(n: u32, design_snr_db: f64) -> ReliabilitySequence {
    let means = ga_channel_means(n, design_snr_db);
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&a, &b| means[a].partial_cmp(&means[b]).unwrap().then(a.cmp(&b)));
    ReliabilitySequence { order }
}

/// A concrete code: block length 2^n carrying K payload bits plus an r-bit CRC.
///
/// `indicator[i]` is 1 if channel i carries information (payload or CRC).
#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub n: u32,
    pub k: usize,
    pub r: usize,
    pub indicator: Vec<u8>,
}

/// Serialized form listing only the frozen channel indices.
#[derive(Debug, Serialize, Deserialize)]
struct CodeSpecJson {
    n: u32,
    #[serde(rename = "K")]
    k: usize,
    r: usize,
    frozen: Vec<usize>,
}

impl CodeSpec {
    pub fn block_length(&self) -> usize {
        1usize << self.n
    }

    /// Number of non-frozen channels (payload + CRC).
    pub fn info_length(&self) -> usize {
        self.k + self.r
    }

    /// Non-frozen channel indices in natural order.
    pub fn info_positions(&self) -> Vec<usize> {
        self.indicator
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 1)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_json(&self) -> String {
        let frozen: Vec<usize> = self
            .indicator
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0)
            .map(|(i, _)| i)
            .collect();
        serde_json::to_string_pretty(&CodeSpecJson {
            n: self.n,
            k: self.k,
            r: self.r,
            frozen,
        })
        .unwrap()
    }

    pub fn from_json(text: &str) -> Result<Self, ConstructionError> {
        let j: CodeSpecJson = serde_json::from_str(text)?;
        let n = 1usize << j.n;
        if j.k + j.r + j.frozen.len() != n {
            return Err(ConstructionError::RateTooHigh {
                n,
                k: j.k,
                r: j.r,
            });
        }
        let mut indicator = vec![1u8; n];
        for &i in &j.frozen {
            if i >= n {
                return Err(ConstructionError::NotAPermutation(n));
            }
            indicator[i] = 0;
        }
        Ok(Self {
            n: j.n,
            k: j.k,
            r: j.r,
            indicator,
        })
    }

    /// Place payload+CRC bits into a full message vector (frozen bits 0).
    pub fn expand(&self, info: &[u8]) -> Result<Vec<u8>, ConstructionError> {
        let want = self.info_length();
        if info.len() != want {
            return Err(ConstructionError::MessageLength {
                got: info.len(),
                want,
            });
        }
        let mut u = vec![0u8; self.block_length()];
        let mut it = info.iter();
        for (slot, &c) in u.iter_mut().zip(self.indicator.iter()) {
            if c == 1 {
                *slot = *it.next().unwrap();
            }
        }
        Ok(u)
    }

    /// Extract payload+CRC bits from a full message vector.
    pub fn compress(&self, u: &[u8]) -> Vec<u8> {
        u.iter()
            .zip(self.indicator.iter())
            .filter(|(_, &c)| c == 1)
            .map(|(&b, _)| b)
            .collect()
    }
}

/// Freeze the least reliable n - K - r channels according to `seq`.
///
/// `forced_frozen` pins extra channels frozen regardless of rank (they still
/// count toward the frozen budget check only implicitly: the K+r most
/// reliable non-pinned channels carry information).
pub fn make_code_spec(
    n_bits: usize,
    k: usize,
    r: usize,
    seq: &ReliabilitySequence,
    forced_frozen: &[usize],
) -> Result<CodeSpec, ConstructionError> {
    if !n_bits.is_power_of_two() {
        return Err(ConstructionError::NotPowerOfTwo(n_bits));
    }
    if k + r > n_bits - forced_frozen.len() {
        return Err(ConstructionError::RateTooHigh { n: n_bits, k, r });
    }
    seq.validate(n_bits)?;
    let mut indicator = vec![0u8; n_bits];
    let pinned: std::collections::HashSet<usize> = forced_frozen.iter().copied().collect();
    let mut assigned = 0;
    for &i in seq.order.iter().rev() {
        if assigned == k + r {
            break;
        }
        if !pinned.contains(&i) {
            indicator[i] = 1;
            assigned += 1;
        }
    }
    Ok(CodeSpec {
        n: n_bits.trailing_zeros(),
        k,
        r,
        indicator,
    })
}

/// Bit-serial CRC over GF(2): long division by a degree-r generator.
#[derive(Debug, Clone)]
pub struct Crc {
    /// Generator coefficients below the leading term, MSB first (length r).
    poly: Vec<u8>,
}

impl Crc {
    /// Degree-8 CRC used by 5G NR: x^8 + x^7 + x^4 + x^3 + x + 1.
    pub fn crc8_nr() -> Self {
        Self::from_poly_bits(0x9B, 8)
    }

    /// Build from the low-order generator bits (leading x^r term implied).
    pub fn from_poly_bits(bits: u64, degree: usize) -> Self {
        let poly = (0..degree)
            .rev()
            .map(|i| ((bits >> i) & 1) as u8)
            .collect();
        Self { poly }
    }

    /// Zero-length CRC: attach/check are no-ops, everything passes.
    pub fn none() -> Self {
        Self { poly: vec![] }
    }

    pub fn degree(&self) -> usize {
        self.poly.len()
    }

    /// Remainder of msg * x^r divided by the generator.
    pub fn remainder(&self, msg: &[u8]) -> Vec<u8> {
        let r = self.poly.len();
        let mut reg = vec![0u8; r];
        for &bit in msg {
            let fb = if r == 0 { 0 } else { reg[0] ^ bit };
            reg.rotate_left(1.min(r));
            if r > 0 {
                reg[r - 1] = 0;
                if fb == 1 {
                    for (s, &p) in reg.iter_mut().zip(self.poly.iter()) {
                        *s ^= p;
                    }
                }
            }
        }
        reg
    }

    /// Append the CRC of `msg` to it.
    pub fn attach(&self, msg: &[u8]) -> Vec<u8> {
        let mut out = msg.to_vec();
        out.extend(self.remainder(msg));
        out
    }

    /// True if the trailing `degree()` bits are a valid CRC of the prefix.
    pub fn check(&self, msg_with_crc: &[u8]) -> bool {
        let r = self.poly.len();
        if r == 0 {
            return true;
        }
        if msg_with_crc.len() < r {
            return false;
        }
        let split = msg_with_crc.len() - r;
        self.remainder(&msg_with_crc[..split]) == msg_with_crc[split..]
    }
}
