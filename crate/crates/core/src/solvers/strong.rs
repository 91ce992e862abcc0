//! Solvers for the restricted-distance query model.
//!
//! `solve_strong` discovers points one at a time: probe negated prefixes of
//! known points for a zero response, then descend coordinate by coordinate.
//! Probes are memoized so no negated prefix is ever queried twice, which is
//! what keeps the total at O(nd). `solve_strong_leveled` instead grows all
//! prefixes level by level in d batched rounds of at most 2n queries.

use crate::cube::BinaryPoint;
use crate::error::{Error, Result};
use crate::oracle::{RestrictedQuery, StrongOracle};

/// Binary trie over the points discovered so far, with a probed flag on the
/// nodes whose prefix has already been sent to the oracle.
pub struct PrefixTrie {
    nodes: Vec<TrieNode>,
}

impl Default for PrefixTrie {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Default, Clone)]
struct TrieNode {
    children: [Option<u32>; 2],
    on_point_path: bool,
    probed: bool,
}

impl PrefixTrie {
    pub fn new() -> Self {
        PrefixTrie {
            nodes: vec![TrieNode::default()],
        }
    }

    fn child(&mut self, node: usize, bit: bool) -> usize {
        if let Some(c) = self.nodes[node].children[usize::from(bit)] {
            c as usize
        } else {
            self.nodes.push(TrieNode::default());
            let c = self.nodes.len() - 1;
            self.nodes[node].children[usize::from(bit)] = Some(c as u32);
            c
        }
    }

    pub fn insert_point(&mut self, p: &BinaryPoint) {
        let mut node = 0;
        self.nodes[0].on_point_path = true;
        for i in 0..p.dim() {
            node = self.child(node, p.get(i));
            self.nodes[node].on_point_path = true;
        }
    }

    pub fn has_point_with_prefix(&self, prefix: &[bool]) -> bool {
        let mut node = 0;
        if !self.nodes[0].on_point_path {
            return false;
        }
        for &b in prefix {
            match self.nodes[node].children[usize::from(b)] {
                Some(c) if self.nodes[c as usize].on_point_path => node = c as usize,
                _ => return false,
            }
        }
        true
    }

    pub fn mark_probed(&mut self, prefix: &[bool]) {
        let mut node = 0;
        for &b in prefix {
            node = self.child(node, b);
        }
        self.nodes[node].probed = true;
    }

    pub fn is_probed(&self, prefix: &[bool]) -> bool {
        let mut node = 0;
        for &b in prefix {
            match self.nodes[node].children[usize::from(b)] {
                Some(c) => node = c as usize,
                None => return false,
            }
        }
        self.nodes[node].probed
    }
}

#[derive(Debug, Clone)]
pub struct StrongSolveReport {
    pub points: Vec<BinaryPoint>,
    pub queries: usize,
    pub rounds: usize,
}

/// Recover a point of the hidden set with the given prefix by extending one
/// coordinate per query: append 0, and keep it exactly when the restricted
/// distance stays zero. Uses `d - prefix.len()` queries past the optional
/// zero-distance precheck.
pub fn find_point_with_prefix(
    oracle: &mut StrongOracle,
    prefix: &[bool],
    verify_pre: bool,
) -> Result<BinaryPoint> {
    let d = oracle.dim();
    if prefix.len() > d {
        return Err(Error::DimensionMismatch { expected: d, got: prefix.len() });
    }
    if verify_pre && oracle.query(&RestrictedQuery::prefix(prefix))? != 0 {
        return Err(Error::NoSuchPrefix);
    }
    let mut bits = prefix.to_vec();
    if bits.len() < d {
        let handle = oracle.open_sequential_round()?;
        while bits.len() < d {
            bits.push(false);
            let response = oracle.query(&RestrictedQuery::prefix(&bits))?;
            debug_assert!(response <= 1);
            if response != 0 {
                *bits.last_mut().expect("nonempty") = true;
            }
        }
        oracle.close_round(handle)?;
    }
    Ok(BinaryPoint::from_bits(&bits))
}

/// Recover the hidden set exactly using at most `3nd + d` queries: one
/// probe per distinct negated prefix plus one descent per point.
pub fn solve_strong(oracle: &mut StrongOracle) -> Result<StrongSolveReport> {
    let d = oracle.dim();
    let before = oracle.ledger_report();
    let mut trie = PrefixTrie::new();
    let mut points: Vec<BinaryPoint> = Vec::new();

    let first = find_point_with_prefix(oracle, &[], false)?;
    trie.insert_point(&first);
    points.push(first);

    loop {
        // Probe batch, fixed from the points known at the start of the sweep.
        let mut probes: Vec<Vec<bool>> = Vec::new();
        for x in &points {
            for i in 1..=d {
                let mut p = x.prefix_bits(i);
                p[i - 1] = !p[i - 1];
                if trie.has_point_with_prefix(&p) || trie.is_probed(&p) {
                    continue;
                }
                trie.mark_probed(&p);
                probes.push(p);
            }
        }
        if probes.is_empty() {
            break;
        }
        let queries: Vec<RestrictedQuery> = probes.iter().map(|p| RestrictedQuery::prefix(p)).collect();
        let handle = oracle.open_round()?;
        let responses = oracle.submit_round(handle, &queries)?;

        let mut found_any = false;
        for (p, r) in probes.iter().zip(&responses) {
            if *r != 0 || trie.has_point_with_prefix(p) {
                continue;
            }
            let x = find_point_with_prefix(oracle, p, false)?;
            trie.insert_point(&x);
            points.push(x);
            found_any = true;
        }
        if !found_any {
            break;
        }
    }

    let after = oracle.ledger_report();
    points.sort();
    Ok(StrongSolveReport {
        points,
        queries: after.total_queries - before.total_queries,
        rounds: after.round_count() - before.round_count(),
    })
}

/// Level-by-level variant: round i learns every length-i prefix of the
/// hidden set by extending each known prefix with both bits in one batch.
/// At most d rounds, each of at most 2n queries.
pub fn solve_strong_leveled(oracle: &mut StrongOracle) -> Result<StrongSolveReport> {
    let d = oracle.dim();
    let before = oracle.ledger_report();
    let mut prefixes: Vec<Vec<bool>> = vec![Vec::new()];
    for _ in 0..d {
        let mut extensions: Vec<Vec<bool>> = Vec::with_capacity(2 * prefixes.len());
        for p in &prefixes {
            for bit in [false, true] {
                let mut e = p.clone();
                e.push(bit);
                extensions.push(e);
            }
        }
        let queries: Vec<RestrictedQuery> =
            extensions.iter().map(|p| RestrictedQuery::prefix(p)).collect();
        let handle = oracle.open_round()?;
        let responses = oracle.submit_round(handle, &queries)?;
        prefixes = extensions
            .into_iter()
            .zip(responses)
            .filter(|(_, r)| *r == 0)
            .map(|(p, _)| p)
            .collect();
    }

    let after = oracle.ledger_report();
    let mut points: Vec<BinaryPoint> = prefixes.iter().map(|p| BinaryPoint::from_bits(p)).collect();
    points.sort();
    Ok(StrongSolveReport {
        points,
        queries: after.total_queries - before.total_queries,
        rounds: after.round_count() - before.round_count(),
    })
}
