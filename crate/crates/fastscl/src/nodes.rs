//! Fast list decoders for the leaf-free special nodes: fully frozen,
//! repetition, unconstrained, and single parity check.

use crate::kernel::hard_decision;
use crate::mcs::clamp_to_len;
use crate::scl::{
    prune, span_penalty, with_message, DecodeCtx, DecoderVariant, NodeParent,
    SpanOutput,
};

/// Positions of `alpha` ordered by ascending magnitude; ties by index.
fn rank_order(alpha: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..alpha.len()).collect();
    idx.sort_by(|&a, &b| {
        alpha[a]
            .abs()
            .partial_cmp(&alpha[b].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    idx
}

pub fn decode_r0(parents: &[NodeParent], ctx: &mut DecodeCtx) -> Vec<SpanOutput> {
    let mode = ctx.cfg.pm_mode;
    let mut out: Vec<SpanOutput> = parents
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let beta = vec![0u8; p.alpha.len()];
            let pm = p.pm + span_penalty(&p.alpha, &beta, mode);
            with_message(i, pm, beta)
        })
        .collect();
    prune(&mut out, ctx.cfg.l);
    out
}

pub fn decode_rep(parents: &[NodeParent], ctx: &mut DecodeCtx) -> Vec<SpanOutput> {
    let mode = ctx.cfg.pm_mode;
    let mut out = Vec::with_capacity(parents.len() * 2);
    for (i, p) in parents.iter().enumerate() {
        for bit in [0u8, 1u8] {
            let beta = vec![bit; p.alpha.len()];
            let pm = p.pm + span_penalty(&p.alpha, &beta, mode);
            out.push(with_message(i, pm, beta));
        }
    }
    prune(&mut out, ctx.cfg.l);
    out
}

/// Metric of the per-position hard decisions (zero in hardware-friendly
/// arithmetic, the soft residual in exact arithmetic).
fn hd_base(alpha: &[f64], ctx: &DecodeCtx) -> f64 {
    let hd: Vec<u8> = alpha.iter().map(|&a| hard_decision(a)).collect();
    span_penalty(alpha, &hd, ctx.cfg.pm_mode)
}

pub fn decode_r1(parents: &[NodeParent], ctx: &mut DecodeCtx) -> Vec<SpanOutput> {
    match ctx.cfg.variant {
        DecoderVariant::Fpl => r1_fpl(parents, ctx),
        _ => r1_fsl(parents, ctx),
    }
}

/// Table-driven unconstrained node: every candidate is the hard decision
/// with one flip set applied, scored in a single pass.
fn r1_fpl(parents: &[NodeParent], ctx: &mut DecodeCtx) -> Vec<SpanOutput> {
    let l = ctx.cfg.l;
    let mut out = Vec::new();
    for (i, p) in parents.iter().enumerate() {
        let n = p.alpha.len();
        let ranks = rank_order(&p.alpha);
        let base = p.pm + hd_base(&p.alpha, ctx);
        let hd: Vec<u8> = p.alpha.iter().map(|&a| hard_decision(a)).collect();
        for f in clamp_to_len(&ctx.tables.r1, n) {
            let mut beta = hd.clone();
            let mut pm = base;
            for &r in &f {
                let pos = ranks[r - 1];
                beta[pos] ^= 1;
                pm += p.alpha[pos].abs();
            }
            out.push(with_message(i, pm, beta));
        }
    }
    prune(&mut out, l);
    out
}

/// Sequential unconstrained node: one rank-sorted bit split per step.
fn r1_fsl(parents: &[NodeParent], ctx: &mut DecodeCtx) -> Vec<SpanOutput> {
    let l = ctx.cfg.l;
    let n = parents[0].alpha.len();
    let mut out: Vec<SpanOutput> = parents
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let hd: Vec<u8> = p.alpha.iter().map(|&a| hard_decision(a)).collect();
            let pm = p.pm + hd_base(&p.alpha, ctx);
            with_message(i, pm, hd)
        })
        .collect();
    let ranks: Vec<Vec<usize>> = parents.iter().map(|p| rank_order(&p.alpha)).collect();
    for t in 0..(l - 1).min(n) {
        let mut next = Vec::with_capacity(out.len() * 2);
        for o in out {
            let pos = ranks[o.parent][t];
            let mut flipped = o.beta.clone();
            flipped[pos] ^= 1;
            let pm = o.pm + parents[o.parent].alpha[pos].abs();
            next.push(with_message(o.parent, pm, flipped));
            next.push(o);
        }
        prune(&mut next, l);
        out = next;
    }
    prune(&mut out, l);
    out
}

pub fn decode_spc(parents: &[NodeParent], ctx: &mut DecodeCtx) -> Vec<SpanOutput> {
    match ctx.cfg.variant {
        DecoderVariant::Fpl => spc_fpl(parents, ctx),
        _ => spc_fsl(parents, ctx),
    }
}

/// Table-driven single parity check: flip sets of the syndrome's parity
/// class applied to the hard decision, one shared sort at the end.
fn spc_fpl(parents: &[NodeParent], ctx: &mut DecodeCtx) -> Vec<SpanOutput> {
    let l = ctx.cfg.l;
    let mut out = Vec::new();
    for (i, p) in parents.iter().enumerate() {
        let n = p.alpha.len();
        let ranks = rank_order(&p.alpha);
        let hd: Vec<u8> = p.alpha.iter().map(|&a| hard_decision(a)).collect();
        let gamma = hd.iter().fold(0u8, |a, &b| a ^ b);
        let base = p.pm + hd_base(&p.alpha, ctx);
        for f in clamp_to_len(ctx.tables.spc(gamma), n) {
            let mut beta = hd.clone();
            let mut pm = base;
            for &r in &f {
                let pos = ranks[r - 1];
                beta[pos] ^= 1;
                pm += p.alpha[pos].abs();
            }
            out.push(with_message(i, pm, beta));
        }
    }
    prune(&mut out, l);
    out
}

/// Sequential single parity check: satisfy the check on the least reliable
/// position first, then split on pair flips that keep it satisfied.
fn spc_fsl(parents: &[NodeParent], ctx: &mut DecodeCtx) -> Vec<SpanOutput> {
    let l = ctx.cfg.l;
    let n = parents[0].alpha.len();
    let ranks: Vec<Vec<usize>> = parents.iter().map(|p| rank_order(&p.alpha)).collect();

    struct P {
        parent: usize,
        pm: f64,
        beta: Vec<u8>,
        /// current flip state of the least reliable position
        g: u8,
    }
    let mut paths: Vec<P> = parents
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut beta: Vec<u8> = p.alpha.iter().map(|&a| hard_decision(a)).collect();
            let gamma = beta.iter().fold(0u8, |a, &b| a ^ b);
            let mut pm = p.pm + hd_base(&p.alpha, ctx);
            if gamma == 1 {
                let m = ranks[i][0];
                beta[m] ^= 1;
                pm += p.alpha[m].abs();
            }
            P {
                parent: i,
                pm,
                beta,
                g: gamma,
            }
        })
        .collect();

    for t in 1..l.min(n) {
        let mut next = Vec::with_capacity(paths.len() * 2);
        for p in paths {
            let a = &parents[p.parent].alpha;
            let r = &ranks[p.parent];
            let (pt, p1) = (r[t], r[0]);
            let delta = a[pt].abs() + (1.0 - 2.0 * f64::from(p.g)) * a[p1].abs();
            let mut beta = p.beta.clone();
            beta[pt] ^= 1;
            beta[p1] ^= 1;
            next.push(P {
                parent: p.parent,
                pm: p.pm + delta,
                beta,
                g: p.g ^ 1,
            });
            next.push(p);
        }
        next.sort_by(|a, b| a.pm.partial_cmp(&b.pm).unwrap());
        next.truncate(l);
        paths = next;
    }

    let mut out: Vec<SpanOutput> = paths
        .into_iter()
        .map(|p| with_message(p.parent, p.pm, p.beta))
        .collect();
    prune(&mut out, l);
    out
}
