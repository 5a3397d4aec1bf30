//! Decoding-tree segmentation: recognizing the special node patterns a fast
//! list decoder can process without visiting individual leaves.

use serde::Serialize;

/// Which special nodes the decoder is allowed to use, plus bounds on the
/// source block of the two-stage high-rate nodes.
#[derive(Debug, Clone)]
pub struct NodePolicy {
    pub r0: bool,
    pub r1: bool,
    pub rep: bool,
    pub spc: bool,
    pub sr0rep: bool,
    pub sr1spc: bool,
    pub min_source: usize,
    pub max_source: usize,
}

impl NodePolicy {
    /// Everything enabled (fast decoders).
    pub fn all() -> Self {
        Self {
            r0: true,
            r1: true,
            rep: true,
            spc: true,
            sr0rep: true,
            sr1spc: true,
            min_source: 2,
            max_source: 16,
        }
    }

    /// Nothing enabled: plain bit-by-bit list decoding.
    pub fn none() -> Self {
        Self {
            r0: false,
            r1: false,
            rep: false,
            spc: false,
            sr0rep: false,
            sr1spc: false,
            min_source: 2,
            max_source: 16,
        }
    }
}

/// Node type of a span of the information indicator.
///
/// For the two chained kinds, `n_q` is the source block length.  `spc_sizes`
/// lists the block lengths of the singly-parity-constrained descendant blocks
/// (ascending); `rep_sizes` lists the block lengths of the repetition blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    R0,
    R1,
    Rep,
    Spc,
    Sr0Rep { n_q: usize, rep_sizes: Vec<usize> },
    Sr1Spc { n_q: usize, spc_sizes: Vec<usize> },
    Generic,
}

fn all_of(ind: &[u8], v: u8) -> bool {
    ind.iter().all(|&b| b == v)
}

/// All-zero except a trailing one.
fn is_rep(ind: &[u8]) -> bool {
    let n = ind.len();
    n >= 2 && all_of(&ind[..n - 1], 0) && ind[n - 1] == 1
}

/// A leading zero followed by ones.
fn is_spc(ind: &[u8]) -> bool {
    ind.len() >= 2 && ind[0] == 0 && all_of(&ind[1..], 1)
}

/// Try the source-first chain: source of length n_q, then for each block
/// size n_s = n_q, 2 n_q, .., len/2 the slice [n_s, 2 n_s) is all ones or a
/// zero followed by ones.  Returns the smallest feasible n_q.
fn try_sr1spc(ind: &[u8], policy: &NodePolicy) -> Option<NodeKind> {
    let len = ind.len();
    let mut n_q = policy.min_source.max(1).next_power_of_two();
    while n_q <= policy.max_source && 2 * n_q <= len {
        let mut ok = true;
        let mut spc_sizes = Vec::new();
        let mut n_s = n_q;
        while 2 * n_s <= len {
            let block = &ind[n_s..2 * n_s];
            if all_of(block, 1) {
                // unconstrained block
            } else if is_spc(block) {
                spc_sizes.push(n_s);
            } else {
                ok = false;
                break;
            }
            n_s *= 2;
        }
        if ok {
            return Some(NodeKind::Sr1Spc { n_q, spc_sizes });
        }
        n_q *= 2;
    }
    None
}

/// Try the source-last chain: for each block size n_s = len/2 down to n_q
/// the slice [len - 2 n_s, len - n_s) is all zeros or zeros with a trailing
/// one, then a source of length n_q at the end.
fn try_sr0rep(ind: &[u8], policy: &NodePolicy) -> Option<NodeKind> {
    let len = ind.len();
    let mut n_q = policy.min_source.max(1).next_power_of_two();
    while n_q <= policy.max_source && 2 * n_q <= len {
        let mut ok = true;
        let mut rep_sizes = Vec::new();
        let mut n_s = n_q;
        while 2 * n_s <= len {
            let block = &ind[len - 2 * n_s..len - n_s];
            if all_of(block, 0) {
                // fully frozen block
            } else if is_rep(block) {
                rep_sizes.push(n_s);
            } else {
                ok = false;
                break;
            }
            n_s *= 2;
        }
        if ok {
            return Some(NodeKind::Sr0Rep { n_q, rep_sizes });
        }
        n_q *= 2;
    }
    None
}

/// Classify a span of the indicator.  Precedence: fully frozen, fully
/// unconstrained, repetition, single parity check, then the two chains with
/// the source-first chain preferred.
pub fn classify(ind: &[u8], policy: &NodePolicy) -> NodeKind {
    assert!(!ind.is_empty() && ind.len().is_power_of_two());
    if policy.r0 && all_of(ind, 0) {
        return NodeKind::R0;
    }
    if policy.r1 && all_of(ind, 1) {
        return NodeKind::R1;
    }
    if policy.rep && is_rep(ind) {
        return NodeKind::Rep;
    }
    if policy.spc && is_spc(ind) {
        return NodeKind::Spc;
    }
    if policy.sr1spc {
        if let Some(k) = try_sr1spc(ind, policy) {
            return k;
        }
    }
    if policy.sr0rep {
        if let Some(k) = try_sr0rep(ind, policy) {
            return k;
        }
    }
    NodeKind::Generic
}

/// One node of the pruned decoding tree.
#[derive(Debug, Clone, Serialize)]
pub struct TreeNode {
    pub offset: usize,
    pub len: usize,
    pub kind: NodeKind,
    pub children: Vec<TreeNode>,
}

/// Build the pruned tree: recursion stops at special nodes and leaves.
pub fn build_tree(ind: &[u8], policy: &NodePolicy) -> TreeNode {
    fn rec(ind: &[u8], offset: usize, policy: &NodePolicy) -> TreeNode {
        let kind = classify(ind, policy);
        let mut children = Vec::new();
        if kind == NodeKind::Generic && ind.len() > 1 {
            let half = ind.len() / 2;
            children.push(rec(&ind[..half], offset, policy));
            children.push(rec(&ind[half..], offset + half, policy));
        }
        TreeNode {
            offset,
            len: ind.len(),
            kind,
            children,
        }
    }
    rec(ind, 0, policy)
}

/// Count of tree nodes by coarse kind name.
pub fn census(tree: &TreeNode) -> std::collections::BTreeMap<&'static str, usize> {
    let mut map = std::collections::BTreeMap::new();
    fn rec(node: &TreeNode, map: &mut std::collections::BTreeMap<&'static str, usize>) {
        let name = match node.kind {
            NodeKind::R0 => "r0",
            NodeKind::R1 => "r1",
            NodeKind::Rep => "rep",
            NodeKind::Spc => "spc",
            NodeKind::Sr0Rep { .. } => "sr0rep",
            NodeKind::Sr1Spc { .. } => "sr1spc",
            NodeKind::Generic => {
                if node.len == 1 {
                    "leaf"
                } else {
                    "internal"
                }
            }
        };
        *map.entry(name).or_insert(0) += 1;
        for c in &node.children {
            rec(c, map);
        }
    }
    rec(tree, &mut map);
    map
}
