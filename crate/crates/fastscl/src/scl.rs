//! Successive-cancellation list decoding over the pruned node tree.
//!
//! The recursion works on spans: a span receives up to L parent paths, each
//! carrying a path metric and the soft input for the span, and returns up to
//! L surviving paths with the span's hard output attached.

use crate::construction::{CodeSpec, Crc};
use crate::kernel::{boxplus, f_llr, g_llr, hard_decision, polar_transform_inplace};
use crate::mcs::{clamp_to_len, restrict_mcs, McsTables};
use crate::tree::{classify, NodeKind, NodePolicy};
use crate::{nodes, sr1spc};

/// Path-metric arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmMode {
    /// Exact log-likelihood penalty ln(1 + exp(-(1-2u) alpha)).
    Exact,
    /// Hardware-friendly: magnitude penalty only when opposing the sign.
    Hwf,
}

/// Which decoder processes the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderVariant {
    /// Plain bit-by-bit list decoding (no special nodes).
    CaScl,
    /// Fast sequential node decoders: one rank-sorted flip per step.
    Fsl,
    /// Parallel node decoders driven by precomputed flip-set tables.
    Fpl,
}

#[derive(Debug, Clone)]
pub struct DecodeConfig {
    pub l: usize,
    pub pm_mode: PmMode,
    pub variant: DecoderVariant,
    pub policy: NodePolicy,
    /// Cap on sequential steps in the two-stage nodes.
    pub t_max: Option<usize>,
    /// Pre-split count for the parity-constrained two-stage node (parallel
    /// decoder); defaults to L - 1.
    pub upsilon: Option<usize>,
    /// Optional cap on the rank sum of table flip sets.
    pub i_max: Option<usize>,
}

impl DecodeConfig {
    pub fn new(l: usize, variant: DecoderVariant) -> Self {
        let policy = match variant {
            DecoderVariant::CaScl => NodePolicy::none(),
            _ => NodePolicy::all(),
        };
        Self {
            l,
            pm_mode: PmMode::Exact,
            variant,
            policy,
            t_max: None,
            upsilon: None,
            i_max: None,
        }
    }
}

/// One incoming path at a span boundary.
#[derive(Debug, Clone)]
pub struct NodeParent {
    pub pm: f64,
    pub alpha: Vec<f64>,
}

/// One surviving path leaving a span: `parent` indexes the incoming paths,
/// `beta` is the span's codeword, `u` the span's message bits.
#[derive(Debug, Clone)]
pub struct SpanOutput {
    pub parent: usize,
    pub pm: f64,
    pub beta: Vec<u8>,
    pub u: Vec<u8>,
}

/// Sequential-step count recorded by the adaptive two-stage decoder.
#[derive(Debug, Clone)]
pub struct TauRecord {
    pub offset: usize,
    pub len: usize,
    pub tau: usize,
}

pub struct DecodeCtx<'a> {
    pub cfg: &'a DecodeConfig,
    pub tables: &'a McsTables,
    pub tau_log: Vec<TauRecord>,
}

/// ln(1 + e^t), stable for large |t|.
#[inline]
pub fn ln1pexp(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Penalty for deciding `bit` against soft input `alpha`.
#[inline]
pub fn bit_penalty(alpha: f64, bit: u8, mode: PmMode) -> f64 {
    match mode {
        PmMode::Exact => ln1pexp(-(1.0 - 2.0 * f64::from(bit)) * alpha),
        PmMode::Hwf => {
            if bit != hard_decision(alpha) {
                alpha.abs()
            } else {
                0.0
            }
        }
    }
}

/// Penalty of a whole hard vector against the span input.  The exact metric
/// telescopes over any tree decomposition, so this matches bit-by-bit
/// decoding of the same decisions.
pub fn span_penalty(alpha: &[f64], beta: &[u8], mode: PmMode) -> f64 {
    alpha
        .iter()
        .zip(beta.iter())
        .map(|(&a, &b)| bit_penalty(a, b, mode))
        .sum()
}

/// Metric change when flipping one bit away from its current value.  Exact
/// and hardware-friendly arithmetic agree on this quantity.
#[inline]
pub fn flip_cost(alpha: f64, current_bit: u8) -> f64 {
    (1.0 - 2.0 * f64::from(current_bit)) * alpha
}

/// Stable sort by metric and keep the best `l`.
pub fn prune(cands: &mut Vec<SpanOutput>, l: usize) {
    cands.sort_by(|a, b| a.pm.partial_cmp(&b.pm).unwrap());
    cands.truncate(l);
}

/// Attach the message bits (the transform is its own inverse).
pub fn with_message(parent: usize, pm: f64, beta: Vec<u8>) -> SpanOutput {
    let mut u = beta.clone();
    polar_transform_inplace(&mut u);
    SpanOutput { parent, pm, beta, u }
}

/// Decode one span given its soft inputs.  Returns at most L survivors,
/// sorted by metric.
pub fn decode_span(
    ind: &[u8],
    offset: usize,
    parents: &[NodeParent],
    ctx: &mut DecodeCtx,
) -> Vec<SpanOutput> {
    debug_assert!(parents.iter().all(|p| p.alpha.len() == ind.len()));
    match classify(ind, &ctx.cfg.policy) {
        NodeKind::R0 => nodes::decode_r0(parents, ctx),
        NodeKind::Rep => nodes::decode_rep(parents, ctx),
        NodeKind::R1 => nodes::decode_r1(parents, ctx),
        NodeKind::Spc => nodes::decode_spc(parents, ctx),
        NodeKind::Sr1Spc { n_q, spc_sizes } => {
            sr1spc::decode(ind, offset, parents, n_q, &spc_sizes, ctx)
        }
        // the source-last chain needs no dedicated decoder: recursing on the
        // halves reaches its frozen and repetition blocks directly
        NodeKind::Sr0Rep { .. } | NodeKind::Generic => {
            if ind.len() == 1 {
                decode_leaf(ind[0], parents, ctx)
            } else {
                decode_split(ind, offset, parents, ctx)
            }
        }
    }
}

fn decode_leaf(info: u8, parents: &[NodeParent], ctx: &mut DecodeCtx) -> Vec<SpanOutput> {
    let mode = ctx.cfg.pm_mode;
    let mut out = Vec::with_capacity(parents.len() * 2);
    for (i, p) in parents.iter().enumerate() {
        let a = p.alpha[0];
        if info == 0 {
            out.push(SpanOutput {
                parent: i,
                pm: p.pm + bit_penalty(a, 0, mode),
                beta: vec![0],
                u: vec![0],
            });
        } else {
            for bit in [0u8, 1u8] {
                out.push(SpanOutput {
                    parent: i,
                    pm: p.pm + bit_penalty(a, bit, mode),
                    beta: vec![bit],
                    u: vec![bit],
                });
            }
        }
    }
    prune(&mut out, ctx.cfg.l);
    out
}

fn decode_split(
    ind: &[u8],
    offset: usize,
    parents: &[NodeParent],
    ctx: &mut DecodeCtx,
) -> Vec<SpanOutput> {
    let half = ind.len() / 2;
    // In exact-metric mode the check-node update must be exact too, so that
    // every path metric equals the span penalty of its hard output; with the
    // min-sum update that identity only holds for the hardware-friendly metric.
    let cf = match ctx.cfg.pm_mode {
        PmMode::Exact => boxplus,
        PmMode::Hwf => f_llr,
    };
    let left_parents: Vec<NodeParent> = parents
        .iter()
        .map(|p| NodeParent {
            pm: p.pm,
            alpha: (0..half).map(|j| cf(p.alpha[j], p.alpha[j + half])).collect(),
        })
        .collect();
    let lefts = decode_span(&ind[..half], offset, &left_parents, ctx);

    let right_parents: Vec<NodeParent> = lefts
        .iter()
        .map(|lo| {
            let pa = &parents[lo.parent].alpha;
            NodeParent {
                pm: lo.pm,
                alpha: (0..half)
                    .map(|j| g_llr(pa[j], pa[j + half], lo.beta[j]))
                    .collect(),
            }
        })
        .collect();
    let rights = decode_span(&ind[half..], offset + half, &right_parents, ctx);

    rights
        .into_iter()
        .map(|ro| {
            let lo = &lefts[ro.parent];
            let mut beta = Vec::with_capacity(ind.len());
            for (bl, br) in lo.beta.iter().zip(ro.beta.iter()) {
                beta.push(bl ^ br);
            }
            beta.extend_from_slice(&ro.beta);
            let mut u = lo.u.clone();
            u.extend_from_slice(&ro.u);
            SpanOutput {
                parent: lo.parent,
                pm: ro.pm,
                beta,
                u,
            }
        })
        .collect()
}

/// Result of decoding one received frame.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    /// Payload bits (CRC stripped).
    pub info: Vec<u8>,
    /// Full message vector including frozen bits.
    pub u: Vec<u8>,
    pub pm: f64,
    pub crc_ok: bool,
}

/// A configured code + CRC + decoder.
pub struct ListDecoder {
    pub spec: CodeSpec,
    pub crc: Crc,
    pub cfg: DecodeConfig,
    pub tables: McsTables,
}

impl ListDecoder {
    pub fn new(spec: CodeSpec, crc: Crc, cfg: DecodeConfig) -> Self {
        assert_eq!(crc.degree(), spec.r, "CRC degree must match the code spec");
        let mut tables = McsTables::new(cfg.l.max(2).next_power_of_two());
        if let Some(im) = cfg.i_max {
            tables.spc_even = restrict_mcs(&tables.spc_even, im);
            tables.spc_odd = restrict_mcs(&tables.spc_odd, im);
            tables.r1 = restrict_mcs(&tables.r1, im);
        }
        Self {
            spec,
            crc,
            cfg,
            tables,
        }
    }

    /// Encode a payload of K bits into a codeword of N bits.
    pub fn encode(&self, payload: &[u8]) -> Vec<u8> {
        assert_eq!(payload.len(), self.spec.k);
        let info = self.crc.attach(payload);
        let u = self.spec.expand(&info).unwrap();
        crate::kernel::encode(&u, &self.spec).unwrap()
    }

    pub fn decode(&self, llr: &[f64]) -> DecodeResult {
        self.decode_with_tau(llr).0
    }

    /// Decode and also report the sequential-step counts of the adaptive
    /// two-stage nodes encountered during this frame.
    pub fn decode_with_tau(&self, llr: &[f64]) -> (DecodeResult, Vec<TauRecord>) {
        assert_eq!(llr.len(), self.spec.block_length());
        let mut ctx = DecodeCtx {
            cfg: &self.cfg,
            tables: &self.tables,
            tau_log: Vec::new(),
        };
        let parents = vec![NodeParent {
            pm: 0.0,
            alpha: llr.to_vec(),
        }];
        let outs = decode_span(&self.spec.indicator, 0, &parents, &mut ctx);
        let chosen = outs
            .iter()
            .find(|o| self.crc.check(&self.spec.compress(&o.u)))
            .or_else(|| outs.first())
            .expect("decoder produced no paths");
        let with_crc = self.spec.compress(&chosen.u);
        let crc_ok = self.crc.check(&with_crc);
        let info = with_crc[..self.spec.k.min(with_crc.len())].to_vec();
        (
            DecodeResult {
                info,
                u: chosen.u.clone(),
                pm: chosen.pm,
                crc_ok,
            },
            ctx.tau_log,
        )
    }

    /// Table of flip sets for an unconstrained node of `len` positions.
    pub fn r1_table(&self, len: usize) -> Vec<crate::mcs::FlipSet> {
        clamp_to_len(&self.tables.r1, len)
    }
}
