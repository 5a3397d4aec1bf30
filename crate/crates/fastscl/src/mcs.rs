//! Offline generation of minimal combination sets: the flip-rank sets a
//! single-parity-check or rate-1 list decoder needs to consider so that no
//! surviving path can be displaced by an unconsidered candidate.
//!
//! Ranks are 1-based: rank 1 is the least reliable position of the node.

use std::collections::HashMap;

/// A flip set, sorted ascending, 1-based reliability ranks.
pub type FlipSet = Vec<usize>;

/// Parity classes a candidate family may be restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Even,
    Odd,
    Any,
}

impl Parity {
    fn admits(self, size: usize) -> bool {
        match self {
            Parity::Even => size % 2 == 0,
            Parity::Odd => size % 2 == 1,
            Parity::Any => true,
        }
    }
}

/// Number of strictly increasing positive sequences g with g_i <= bounds[i].
fn count_increasing(bounds: &[usize]) -> u64 {
    // ways[v] = sequences for the first i elements with last element exactly v
    let max_b = bounds.iter().copied().max().unwrap_or(0);
    let mut ways = vec![0u64; max_b + 1];
    ways[0] = 1; // empty prefix, sentinel "last = 0"
    for &b in bounds {
        let mut next = vec![0u64; max_b + 1];
        let mut prefix = 0u64;
        for v in 0..=b.min(max_b) {
            if v >= 1 {
                next[v] = prefix;
            }
            prefix += ways[v];
        }
        ways = next;
    }
    ways.iter().sum()
}

/// Number of candidates in the same family that dominate `f` (excluding f
/// itself).  A size-j set g dominates the size-k set f (j <= k) when
/// g_i <= f_{k-j+i} for all i; the empty set dominates everything.
fn num_dominators(f: &[usize], parity: Parity) -> u64 {
    let k = f.len();
    let mut total = 0u64;
    for j in 0..=k {
        if !parity.admits(j) {
            continue;
        }
        total += count_increasing(&f[k - j..]);
    }
    // the j = k term always counts f itself; domination is strict
    total - 1
}

fn dfs_collect(
    l: usize,
    k: usize,
    max_elem: usize,
    parity: Parity,
    prefix: &mut FlipSet,
    out: &mut Vec<FlipSet>,
) {
    if prefix.len() == k {
        if num_dominators(prefix, parity) < l as u64 {
            out.push(prefix.clone());
        }
        return;
    }
    let lo = prefix.last().map_or(1, |&p| p + 1);
    for v in lo..=max_elem {
        // varying only the last element of (1, 2, .., k-1, x) up to v shows
        // at least v - k + 1 same-size dominators once f_k >= v; prune
        if prefix.len() == k - 1 && v >= k && (v - k) as u64 >= l as u64 {
            break;
        }
        prefix.push(v);
        dfs_collect(l, k, max_elem, parity, prefix, out);
        prefix.pop();
    }
}

fn gen_family(l: usize, sizes: &[usize], parity: Parity) -> Vec<FlipSet> {
    assert!(l >= 1);
    let mut out = Vec::new();
    for &k in sizes {
        // elements above l + k can never survive (see prune in dfs_collect),
        // and 2l is a safe absolute cap
        let max_elem = (l + k).min(2 * l);
        dfs_collect(l, k, max_elem.max(k), parity, &mut Vec::new(), &mut out);
    }
    out
}

/// Combination set for a single-parity-check node with syndrome `gamma`,
/// list size `l` (power of two).
pub fn gen_mcs_spc(l: usize, gamma: u8) -> Vec<FlipSet> {
    assert!(l.is_power_of_two() && l >= 2);
    let log_l = l.trailing_zeros() as usize;
    if gamma == 0 {
        let m = (log_l + 2) / 2; // ceil((log2 L + 1) / 2)
        let sizes: Vec<usize> = (0..=m).map(|i| 2 * i).collect();
        gen_family(l, &sizes, Parity::Even)
    } else {
        let m = (log_l + 1) / 2; // ceil(log2 L / 2)
        let sizes: Vec<usize> = (0..=m).map(|i| 2 * i + 1).collect();
        gen_family(l, &sizes, Parity::Odd)
    }
}

/// Combination set for a rate-1 node: any parity, sizes up to log2 L.
pub fn gen_mcs_r1(l: usize) -> Vec<FlipSet> {
    assert!(l.is_power_of_two() && l >= 2);
    let log_l = l.trailing_zeros() as usize;
    let sizes: Vec<usize> = (0..=log_l).collect();
    gen_family(l, &sizes, Parity::Any)
}

/// Keep only flip sets whose rank sum does not exceed `i_max`.
pub fn restrict_mcs(mcs: &[FlipSet], i_max: usize) -> Vec<FlipSet> {
    mcs.iter()
        .filter(|f| f.iter().sum::<usize>() <= i_max)
        .cloned()
        .collect()
}

/// Keep only flip sets whose ranks all exist in a node of `len` positions.
pub fn clamp_to_len(mcs: &[FlipSet], len: usize) -> Vec<FlipSet> {
    mcs.iter()
        .filter(|f| f.last().map_or(true, |&m| m <= len))
        .cloned()
        .collect()
}

/// Cached tables for one list size.
#[derive(Debug, Clone)]
pub struct McsTables {
    pub l: usize,
    pub spc_even: Vec<FlipSet>,
    pub spc_odd: Vec<FlipSet>,
    pub r1: Vec<FlipSet>,
}

impl McsTables {
    pub fn new(l: usize) -> Self {
        Self {
            l,
            spc_even: gen_mcs_spc(l, 0),
            spc_odd: gen_mcs_spc(l, 1),
            r1: gen_mcs_r1(l),
        }
    }

    pub fn spc(&self, gamma: u8) -> &[FlipSet] {
        if gamma == 0 {
            &self.spc_even
        } else {
            &self.spc_odd
        }
    }
}

/// One candidate bit-pair flip for a partially constrained rate-1 node:
/// flipping positions j1*n_sub + k and j2*n_sub + k toggles the parity
/// checks recorded in `pattern` (bit s set = s-th constrained level toggled).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FcsPair {
    pub pattern: u32,
    pub k: usize,
    pub j1: usize,
    pub j2: usize,
}

/// Enumerate all same-subcode bit pairs of an (n_p, n_q) node whose flip
/// toggles at least one of the parity checks at `spc_levels` (levels given as
/// block sizes n_r).  A position b lies in the level-r check support when
/// floor(b / n_r) is odd.  Result is sorted by (pattern, k, j1, j2).
pub fn gen_fcs(n_p: usize, n_q: usize, spc_levels: &[usize]) -> Vec<FcsPair> {
    assert!(n_p % n_q == 0);
    let rows = n_p / n_q;
    let mut out = Vec::new();
    for k in 0..n_q {
        for j1 in 0..rows {
            for j2 in (j1 + 1)..rows {
                let (b1, b2) = (j1 * n_q + k, j2 * n_q + k);
                let mut pattern = 0u32;
                for (s, &n_r) in spc_levels.iter().enumerate() {
                    let in1 = (b1 / n_r) % 2 == 1;
                    let in2 = (b2 / n_r) % 2 == 1;
                    if in1 != in2 {
                        pattern |= 1 << s;
                    }
                }
                if pattern != 0 {
                    out.push(FcsPair { pattern, k, j1, j2 });
                }
            }
        }
    }
    out.sort_by_key(|p| (p.pattern, p.k, p.j1, p.j2));
    out
}

/// Group an FCS by toggle pattern for O(1) lookup at decode time.
pub fn fcs_by_pattern(pairs: &[FcsPair]) -> HashMap<u32, Vec<FcsPair>> {
    let mut map: HashMap<u32, Vec<FcsPair>> = HashMap::new();
    for p in pairs {
        map.entry(p.pattern).or_default().push(p.clone());
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> FlipSet {
        v.to_vec()
    }

    #[test]
    fn spc_even_l2() {
        assert_eq!(gen_mcs_spc(2, 0), vec![set(&[]), set(&[1, 2])]);
    }

    #[test]
    fn spc_odd_l2() {
        assert_eq!(gen_mcs_spc(2, 1), vec![set(&[1]), set(&[2])]);
    }

    #[test]
    fn spc_even_l4() {
        assert_eq!(
            gen_mcs_spc(4, 0),
            vec![set(&[]), set(&[1, 2]), set(&[1, 3]), set(&[1, 4]), set(&[2, 3])]
        );
    }

    #[test]
    fn table_sizes() {
        for (l, want) in [(2usize, 2usize), (4, 5), (8, 13), (16, 36)] {
            assert_eq!(gen_mcs_spc(l, 0).len(), want, "even L={l}");
            assert_eq!(gen_mcs_spc(l, 1).len(), want, "odd L={l}");
        }
    }

    #[test]
    fn odd_is_even_shifted_in_first_rank() {
        // each odd-parity set equals an even-parity set with rank 1 toggled
        for l in [2usize, 4, 8, 16] {
            let even = gen_mcs_spc(l, 0);
            let odd = gen_mcs_spc(l, 1);
            let toggled: Vec<FlipSet> = even
                .iter()
                .map(|f| {
                    let mut g = f.clone();
                    if g.first() == Some(&1) {
                        g.remove(0);
                    } else {
                        g.insert(0, 1);
                    }
                    g
                })
                .collect();
            for f in &odd {
                assert!(toggled.contains(f), "L={l} odd set {f:?} not even△{{1}}");
            }
        }
    }

    #[test]
    fn r1_l4() {
        let r1 = gen_mcs_r1(4);
        assert!(r1.contains(&set(&[])));
        assert!(r1.contains(&set(&[1])));
        assert!(r1.contains(&set(&[1, 2])));
        assert!(!r1.contains(&set(&[4])));
    }

    #[test]
    fn soundness_random_weights() {
        // with positive weights w sorted ascending, the L smallest-cost flip
        // sets (cost = sum of w over ranks) must all be in the table
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for l in [2usize, 4, 8] {
            let table = gen_mcs_spc(l, 0);
            for _ in 0..20 {
                let n = 8usize;
                let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..5.0)).collect();
                w.sort_by(|a, b| a.partial_cmp(b).unwrap());
                // all even-size subsets of ranks 1..=n
                let mut all: Vec<(f64, Vec<usize>)> = Vec::new();
                for mask in 0..(1u32 << n) {
                    if mask.count_ones() % 2 != 0 {
                        continue;
                    }
                    let ranks: Vec<usize> =
                        (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
                    let cost: f64 = ranks.iter().map(|&r| w[r - 1]).sum();
                    all.push((cost, ranks));
                }
                all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                for (_, ranks) in all.iter().take(l) {
                    assert!(table.contains(ranks), "L={l} missing {ranks:?} for w={w:?}");
                }
            }
        }
    }

    #[test]
    fn restriction_example() {
        let table = gen_mcs_spc(8, 0);
        let got = restrict_mcs(&table, 6);
        let want: Vec<FlipSet> = vec![
            set(&[]),
            set(&[1, 2]),
            set(&[1, 3]),
            set(&[1, 4]),
            set(&[1, 5]),
            set(&[2, 3]),
            set(&[2, 4]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn fcs_patterns_nonempty_and_grouped() {
        // n_p = 8, n_q = 2, one check at n_r = 4: support = positions 4..8
        let pairs = gen_fcs(8, 2, &[4]);
        for p in &pairs {
            assert_eq!(p.pattern, 1);
            let (b1, b2) = (p.j1 * 2 + p.k, p.j2 * 2 + p.k);
            assert_ne!((b1 / 4) % 2, (b2 / 4) % 2);
        }
        // per subcode k: rows {0,1} vs {2,3} crossing the support: 2*2 pairs
        assert_eq!(pairs.len(), 2 * 4);
        let by = fcs_by_pattern(&pairs);
        assert_eq!(by[&1].len(), 8);
    }
}
