//! Monte-Carlo frame-error-rate measurement over a binary-input AWGN
//! channel, with paired noise across decoders and deterministic per-frame
//! seeding so results do not depend on thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::latency::TauMap;
use crate::scl::ListDecoder;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// BPSK + AWGN soft output: LLR of each code bit.
pub fn awgn_llr(codeword: &[u8], sigma2: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let sigma = sigma2.sqrt();
    codeword
        .iter()
        .map(|&b| {
            let s = 1.0 - 2.0 * f64::from(b);
            let n: f64 = StandardNormal.sample(rng);
            2.0 * (s + sigma * n) / sigma2
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub ebn0_db: f64,
    pub min_frames: usize,
    pub max_frames: usize,
    /// Stop (after min_frames) once every decoder has this many errors.
    pub target_errors: usize,
    pub seed: u64,
    /// Record the per-node sequential step counts of the adaptive two-stage
    /// decoder for each decoder.
    pub collect_tau: bool,
}

impl SimConfig {
    pub fn new(ebn0_db: f64, frames: usize, seed: u64) -> Self {
        Self {
            ebn0_db,
            min_frames: frames,
            max_frames: frames,
            target_errors: usize::MAX,
            seed,
            collect_tau: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DecoderStats {
    pub errors: usize,
    pub fer: f64,
    /// 95% normal-approximation confidence interval on the FER.
    pub ci95: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub frames: usize,
    pub per_decoder: Vec<DecoderStats>,
    /// Frames on which some decoder's payload differed from the first's.
    pub disagreements: usize,
    /// Average sequential step count per adaptive node, per decoder.
    pub tau_avg: Vec<TauMap>,
}

struct FrameOut {
    errs: Vec<bool>,
    disagree: bool,
    taus: Vec<Vec<(usize, usize, usize)>>,
}

/// Run all decoders on the same noisy frames.  The decoders must share one
/// code and CRC.
pub fn run_paired(decoders: &[&ListDecoder], cfg: &SimConfig) -> SimResult {
    assert!(!decoders.is_empty());
    let spec = &decoders[0].spec;
    for d in decoders {
        assert_eq!(d.spec.indicator, spec.indicator, "decoders must share a code");
    }
    let rate = (spec.k + spec.r) as f64 / spec.block_length() as f64;
    let sigma2 = 1.0 / (2.0 * rate * 10f64.powf(cfg.ebn0_db / 10.0));

    let mut frames = 0usize;
    let mut errors = vec![0usize; decoders.len()];
    let mut disagreements = 0usize;
    let mut tau_acc: Vec<std::collections::HashMap<(usize, usize), (f64, usize)>> =
        vec![Default::default(); decoders.len()];

    const BATCH: usize = 256;
    while frames < cfg.max_frames {
        let batch = BATCH.min(cfg.max_frames - frames);
        let outs: Vec<FrameOut> = (frames..frames + batch)
            .into_par_iter()
            .map(|f| {
                let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(cfg.seed ^ (f as u64)));
                let payload: Vec<u8> = (0..spec.k).map(|_| rng.gen_range(0..2)).collect();
                let x = decoders[0].encode(&payload);
                let llr = awgn_llr(&x, sigma2, &mut rng);
                let mut errs = Vec::with_capacity(decoders.len());
                let mut infos = Vec::with_capacity(decoders.len());
                let mut taus = Vec::with_capacity(decoders.len());
                for d in decoders {
                    let (res, tau) = d.decode_with_tau(&llr);
                    errs.push(res.info != payload);
                    infos.push(res.info);
                    taus.push(if cfg.collect_tau {
                        tau.iter().map(|t| (t.offset, t.len, t.tau)).collect()
                    } else {
                        Vec::new()
                    });
                }
                let disagree = infos.iter().any(|i| *i != infos[0]);
                FrameOut {
                    errs,
                    disagree,
                    taus,
                }
            })
            .collect();
        for o in outs {
            for (i, e) in o.errs.iter().enumerate() {
                if *e {
                    errors[i] += 1;
                }
            }
            if o.disagree {
                disagreements += 1;
            }
            for (i, recs) in o.taus.iter().enumerate() {
                for &(off, len, tau) in recs {
                    let e = tau_acc[i].entry((off, len)).or_insert((0.0, 0));
                    e.0 += tau as f64;
                    e.1 += 1;
                }
            }
        }
        frames += batch;
        if frames >= cfg.min_frames && errors.iter().all(|&e| e >= cfg.target_errors) {
            break;
        }
    }

    let per_decoder = errors
        .iter()
        .map(|&e| {
            let p = e as f64 / frames as f64;
            let half = 1.96 * (p * (1.0 - p) / frames as f64).sqrt();
            DecoderStats {
                errors: e,
                fer: p,
                ci95: ((p - half).max(0.0), (p + half).min(1.0)),
            }
        })
        .collect();
    let tau_avg = tau_acc
        .into_iter()
        .map(|m| {
            m.into_iter()
                .map(|(k, (sum, cnt))| (k, sum / cnt as f64))
                .collect()
        })
        .collect();
    SimResult {
        frames,
        per_decoder,
        disagreements,
        tau_avg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_reliability, make_code_spec, Crc};
    use crate::scl::{DecodeConfig, DecoderVariant};

    #[test]
    fn determinism_across_runs() {
        let seq = build_reliability(6, 1.0);
        let spec = make_code_spec(64, 24, 8, &seq, &[]).unwrap();
        let dec = ListDecoder::new(
            spec,
            Crc::crc8_nr(),
            DecodeConfig::new(4, DecoderVariant::Fsl),
        );
        let cfg = SimConfig::new(1.0, 300, 42);
        let a = run_paired(&[&dec], &cfg);
        let b = run_paired(&[&dec], &cfg);
        assert_eq!(a.per_decoder[0].errors, b.per_decoder[0].errors);
        assert_eq!(a.frames, 300);
    }

    #[test]
    fn llr_statistics() {
        // mean LLR for the all-zero word is 2/sigma^2, variance 4/sigma^2
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sigma2 = 0.5;
        let n = 40_000;
        let llr = awgn_llr(&vec![0u8; n], sigma2, &mut rng);
        let mean: f64 = llr.iter().sum::<f64>() / n as f64;
        assert!((mean - 2.0 / sigma2).abs() < 0.1, "mean {mean}");
        let var: f64 = llr.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!((var - 4.0 / sigma2).abs() < 0.3, "var {var}");
    }

    #[test]
    fn noiseless_gives_zero_errors() {
        let seq = build_reliability(5, 1.0);
        let spec = make_code_spec(32, 16, 0, &seq, &[]).unwrap();
        let dec = ListDecoder::new(spec, Crc::none(), DecodeConfig::new(2, DecoderVariant::Fpl));
        let mut cfg = SimConfig::new(12.0, 100, 7);
        cfg.ebn0_db = 12.0; // essentially noise-free
        let r = run_paired(&[&dec], &cfg);
        assert_eq!(r.per_decoder[0].errors, 0);
    }
}
