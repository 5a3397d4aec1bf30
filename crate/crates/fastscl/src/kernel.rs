//! Polar transform and the SC message-passing primitives on the decoding tree.

use thiserror::Error;

use crate::construction::CodeSpec;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("input lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("nonzero bit at frozen position {0}")]
    NonzeroFrozenBit(usize),
}

/// Sign with the convention sgn(0) = +1, matching the frozen-bit-0 tie break.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Check-node LLR update (min-sum form): sign product, minimum magnitude.
#[inline]
pub fn f_llr(a: f64, b: f64) -> f64 {
    sgn(a) * sgn(b) * a.abs().min(b.abs())
}

/// Check-node LLR update, exact form: 2 atanh(tanh(a/2) tanh(b/2)), computed
/// as the min-sum value plus a stable log-domain correction.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    let (aa, ab) = (a.abs(), b.abs());
    let ln1pexp_neg = |t: f64| (-t).exp().ln_1p();
    sgn(a) * sgn(b) * (aa.min(ab) + ln1pexp_neg(aa + ab) - ln1pexp_neg((aa - ab).abs()))
}

/// Variable-node LLR update: (1 - 2*beta)*a + b.
#[inline]
pub fn g_llr(a: f64, b: f64, beta: u8) -> f64 {
    (1.0 - 2.0 * f64::from(beta)) * a + b
}

/// Hard decision on an LLR; alpha == 0 decides 0.
#[inline]
pub fn hard_decision(alpha: f64) -> u8 {
    if alpha < 0.0 {
        1
    } else {
        0
    }
}

/// In-place polar transform x = u F^{⊗n} over GF(2).
///
/// F^{⊗n} is self-inverse, so applying this twice is the identity.
pub fn polar_transform_inplace(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut len = 1;
    while len < n {
        let mut base = 0;
        while base < n {
            for j in 0..len {
                bits[base + j] ^= bits[base + j + len];
            }
            base += 2 * len;
        }
        len <<= 1;
    }
}

/// Encode a full message vector u (frozen positions must hold 0).
pub fn encode(u: &[u8], spec: &CodeSpec) -> Result<Vec<u8>, KernelError> {
    let n = spec.block_length();
    if u.len() != n {
        return Err(KernelError::LengthMismatch(u.len(), n));
    }
    for (i, (&bit, &c)) in u.iter().zip(spec.indicator.iter()).enumerate() {
        if c == 0 && bit != 0 {
            return Err(KernelError::NonzeroFrozenBit(i));
        }
    }
    let mut x = u.to_vec();
    polar_transform_inplace(&mut x);
    Ok(x)
}

/// Combine child codewords one level up: (left ^ right, right).
pub fn beta_combine(left: &[u8], right: &[u8]) -> Result<Vec<u8>, KernelError> {
    if left.len() != right.len() {
        return Err(KernelError::LengthMismatch(left.len(), right.len()));
    }
    let mut out = Vec::with_capacity(2 * left.len());
    for (l, r) in left.iter().zip(right.iter()) {
        out.push(l ^ r);
    }
    out.extend_from_slice(right);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{make_code_spec, ReliabilitySequence};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn f_llr_examples() {
        assert_eq!(f_llr(2.0, -3.0), -2.0);
        assert_eq!(f_llr(0.0, 5.0), 0.0);
        assert_eq!(f_llr(-1.5, -4.0), 1.5);
    }

    #[test]
    fn boxplus_matches_tanh_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let a: f64 = rng.gen_range(-6.0..6.0);
            let b: f64 = rng.gen_range(-6.0..6.0);
            let want = 2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh();
            assert!((boxplus(a, b) - want).abs() < 1e-9, "a={a} b={b}");
        }
        // magnitude never exceeds the min-sum value
        assert!(boxplus(40.0, 40.0) <= 40.0);
    }

    #[test]
    fn g_llr_examples() {
        assert_eq!(g_llr(2.0, 3.0, 0), 5.0);
        assert_eq!(g_llr(2.0, 3.0, 1), 1.0);
        for a in [-2.5, 0.0, 7.0] {
            assert_eq!(g_llr(a, 0.0, 1), -a);
        }
    }

    #[test]
    fn hard_decision_examples() {
        assert_eq!(hard_decision(3.2), 0);
        assert_eq!(hard_decision(-0.1), 1);
        assert_eq!(hard_decision(0.0), 0);
    }

    #[test]
    fn kernel_by_hand_n2() {
        let seq = ReliabilitySequence { order: vec![0, 1] };
        let spec = make_code_spec(2, 2, 0, &seq, &[]).unwrap();
        assert_eq!(encode(&[0, 1], &spec).unwrap(), vec![1, 1]);
        assert_eq!(encode(&[1, 0], &spec).unwrap(), vec![1, 0]);
    }

    /// Brute-force Kronecker power of F, row-times-matrix.
    fn kronecker_encode(u: &[u8]) -> Vec<u8> {
        let n = u.len();
        let mut f = vec![vec![1u8]];
        while f.len() < n {
            let m = f.len();
            let mut next = vec![vec![0u8; 2 * m]; 2 * m];
            for (i, row) in f.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    next[i][j] = v;
                    next[i + m][j] = v;
                    next[i + m][j + m] = v;
                }
            }
            f = next;
        }
        (0..n)
            .map(|j| (0..n).fold(0u8, |acc, i| acc ^ (u[i] & f[i][j])))
            .collect()
    }

    #[test]
    fn encode_matches_kronecker_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut u: Vec<u8> = (0..8).map(|_| rng.gen_range(0..2)).collect();
            let mut x = u.clone();
            polar_transform_inplace(&mut x);
            assert_eq!(x, kronecker_encode(&u));
            // self-inverse
            polar_transform_inplace(&mut x);
            assert_eq!(x, u);
            u[0] ^= 1; // keep rng honest about being used
        }
    }

    #[test]
    fn beta_combine_matches_encode() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(beta_combine(&[1], &[1]).unwrap(), vec![0, 1]);
        let r: Vec<u8> = (0..4).map(|_| rng.gen_range(0..2)).collect();
        assert_eq!(beta_combine(&[0, 0, 0, 0], &r).unwrap(), [&r[..], &r[..]].concat());
        // combined children equal the transform of concatenated child messages
        for _ in 0..10 {
            let ul: Vec<u8> = (0..4).map(|_| rng.gen_range(0..2)).collect();
            let ur: Vec<u8> = (0..4).map(|_| rng.gen_range(0..2)).collect();
            let mut xl = ul.clone();
            let mut xr = ur.clone();
            polar_transform_inplace(&mut xl);
            polar_transform_inplace(&mut xr);
            let combined = beta_combine(&xl, &xr).unwrap();
            let mut full = [ul, ur].concat();
            polar_transform_inplace(&mut full);
            assert_eq!(combined, full);
        }
    }
}
