//! Step-count model of node-based list decoders: each node type costs a
//! number of clock steps depending on the decoder generation, and internal
//! tree nodes add one step per soft-message direction.

use std::collections::HashMap;

use crate::mcs::{clamp_to_len, gen_fcs, McsTables};
use crate::tree::{classify, NodeKind, NodePolicy};

/// Decoder generations the model can score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatencyVariant {
    SotaTsp17,
    SotaTcom19,
    SotaCl21,
    SotaTsp22,
    Fsl,
    FplF,
    FplP,
}

impl LatencyVariant {
    pub const ALL: [LatencyVariant; 7] = [
        LatencyVariant::SotaTsp17,
        LatencyVariant::SotaTcom19,
        LatencyVariant::SotaCl21,
        LatencyVariant::SotaTsp22,
        LatencyVariant::Fsl,
        LatencyVariant::FplF,
        LatencyVariant::FplP,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LatencyVariant::SotaTsp17 => "sota-tsp17",
            LatencyVariant::SotaTcom19 => "sota-tcom19",
            LatencyVariant::SotaCl21 => "sota-cl21",
            LatencyVariant::SotaTsp22 => "sota-tsp22",
            LatencyVariant::Fsl => "fsl",
            LatencyVariant::FplF => "fpl-f",
            LatencyVariant::FplP => "fpl-p",
        }
    }
}

pub fn ceil_log2(x: usize) -> f64 {
    if x <= 1 {
        0.0
    } else {
        f64::from((x - 1).ilog2() + 1)
    }
}

fn minf(a: usize, b: usize) -> f64 {
    a.min(b) as f64
}

/// Observed or assumed sequential step counts of the adaptive two-stage
/// nodes, keyed by (offset, len).  Missing nodes fall back to the worst case
/// min(L-1, node len - source len).
pub type TauMap = HashMap<(usize, usize), f64>;

pub struct LatencyModel<'a> {
    pub l: usize,
    pub policy: &'a NodePolicy,
    pub tables: &'a McsTables,
    pub upsilon: usize,
    pub tau: Option<&'a TauMap>,
}

impl<'a> LatencyModel<'a> {
    pub fn new(l: usize, policy: &'a NodePolicy, tables: &'a McsTables) -> Self {
        Self {
            l,
            policy,
            tables,
            upsilon: l.saturating_sub(1),
            tau: None,
        }
    }

    /// Total decoding steps for a code with this information indicator.
    pub fn total_steps(&self, ind: &[u8], variant: LatencyVariant) -> f64 {
        self.node_steps(ind, 0, variant)
    }

    fn node_steps(&self, ind: &[u8], offset: usize, variant: LatencyVariant) -> f64 {
        use LatencyVariant::*;
        let n = ind.len();
        let l = self.l;
        match classify(ind, self.policy) {
            NodeKind::R0 => 1.0,
            NodeKind::Rep => 2.0,
            NodeKind::R1 => match variant {
                SotaTsp17 | SotaTcom19 | SotaTsp22 => minf(l - 1, n),
                SotaCl21 | FplF => 1.0,
                Fsl => 1.0 + minf(l - 1, n),
                FplP => ceil_log2(clamp_to_len(&self.tables.r1, n).len()),
            },
            NodeKind::Spc => match variant {
                SotaTsp17 | SotaTcom19 | SotaCl21 | SotaTsp22 | Fsl => minf(l, n),
                FplF => 1.0,
                FplP => ceil_log2(clamp_to_len(&self.tables.spc_even, n).len()),
            },
            NodeKind::Sr1Spc { n_q, spc_sizes } => {
                self.sr1spc_steps(ind, offset, n_q, &spc_sizes, variant)
            }
            NodeKind::Sr0Rep { n_q, rep_sizes } => {
                self.sr0rep_steps(ind, offset, n_q, &rep_sizes, variant)
            }
            NodeKind::Generic => {
                if n == 1 {
                    1.0
                } else {
                    let half = n / 2;
                    2.0 + self.node_steps(&ind[..half], offset, variant)
                        + self.node_steps(&ind[half..], offset + half, variant)
                }
            }
        }
    }

    fn sr1spc_steps(
        &self,
        ind: &[u8],
        offset: usize,
        n_q: usize,
        spc_sizes: &[usize],
        variant: LatencyVariant,
    ) -> f64 {
        use LatencyVariant::*;
        let n = ind.len();
        let l = self.l;
        let t_q = self.node_steps(&ind[..n_q], offset, variant);
        let stages = (n / n_q).trailing_zeros() as f64; // p - q
        let block_sizes: Vec<usize> = std::iter::successors(Some(n_q), |&s| Some(2 * s))
            .take_while(|&s| 2 * s <= n)
            .collect();
        let constrained: f64 = spc_sizes.iter().map(|&s| minf(l, s)).sum();
        let free: f64 = block_sizes
            .iter()
            .filter(|s| !spc_sizes.contains(s))
            .map(|&s| minf(l - 1, s))
            .sum();

        match variant {
            SotaTsp17 => t_q + 2.0 * stages + constrained + free,
            SotaTcom19 => {
                // dedicated short patterns: two frozen bits then ones, or a
                // repetition source then ones
                if n_q == 2 && spc_sizes.is_empty() && ind[..2] == [0, 0] {
                    1.0 + minf(l - 1, n - 2)
                } else if ind[..4] == [0, 0, 0, 1]
                    && ind[4..].iter().all(|&b| b == 1)
                    && n >= 8
                {
                    1.0 + minf(l - 1, n - 4)
                } else {
                    t_q + 2.0 * stages + constrained + free
                }
            }
            SotaCl21 => {
                let n_free = block_sizes.len() - spc_sizes.len();
                t_q + 2.0 * stages + n_free as f64 + constrained
            }
            SotaTsp22 => {
                if spc_sizes.is_empty() && ind[..n_q].iter().all(|&b| b == 0) {
                    1.0 + minf(l - 1, n - n_q)
                } else {
                    t_q + 2.0 * stages + constrained + free
                }
            }
            Fsl => {
                if spc_sizes.is_empty() {
                    t_q + 1.0 + minf(l - 1, n - n_q)
                } else {
                    let default = minf(l - 1, n - n_q);
                    let tau = self
                        .tau
                        .and_then(|m| m.get(&(offset, n)).copied())
                        .unwrap_or(default);
                    t_q + 1.0 + tau
                }
            }
            FplF => {
                if spc_sizes.is_empty() {
                    t_q + 3.0
                } else {
                    t_q + 4.0
                }
            }
            FplP => {
                if spc_sizes.is_empty() {
                    let c_spc = self.tables.spc_even.len();
                    let c_r1 = self.tables.r1.len();
                    t_q + 1.0
                        + ceil_log2((n_q * c_spc).div_ceil(l))
                        + ceil_log2(c_r1)
                } else {
                    let s_len = gen_fcs(n, n_q, spc_sizes).len();
                    t_q + 3.0 + ceil_log2((1 + self.upsilon) * s_len)
                }
            }
        }
    }

    fn sr0rep_steps(
        &self,
        ind: &[u8],
        offset: usize,
        n_q: usize,
        rep_sizes: &[usize],
        variant: LatencyVariant,
    ) -> f64 {
        use LatencyVariant::*;
        let n = ind.len();
        let t_q = self.node_steps(&ind[n - n_q..], offset + n - n_q, variant);
        let stages = (n / n_q).trailing_zeros() as f64;
        let block_sizes: Vec<usize> = std::iter::successors(Some(n_q), |&s| Some(2 * s))
            .take_while(|&s| 2 * s <= n)
            .collect();
        let block_cost: f64 = block_sizes
            .iter()
            .map(|s| if rep_sizes.contains(s) { 2.0 } else { 1.0 })
            .sum();
        match variant {
            SotaTsp17 | SotaTcom19 | SotaCl21 | Fsl => t_q + 2.0 * stages + block_cost,
            SotaTsp22 | FplF => t_q + 2.0,
            FplP => t_q + 1.0 + rep_sizes.len() as f64,
        }
    }
}
