use serde::{Deserialize, Serialize};

use super::sequence::{Base, Sequence};

/// Pairing and loop rules for quartet enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldingRules {
    /// Minimum number of unpaired bases enclosed by the inner pair.
    pub min_hairpin: usize,
    /// Admit G-U wobble pairs.
    pub allow_gu: bool,
}

impl Default for FoldingRules {
    fn default() -> Self {
        FoldingRules {
            min_hairpin: 3,
            allow_gu: true,
        }
    }
}

impl FoldingRules {
    pub fn can_pair(&self, a: Base, b: Base) -> bool {
        use Base::*;
        match (a, b) {
            (A, U) | (U, A) | (C, G) | (G, C) => true,
            (G, U) | (U, G) => self.allow_gu,
            _ => false,
        }
    }
}

/// Two stacked base pairs `(i, j)` and `(i+1, j-1)`, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quartet {
    pub index: usize,
    pub i: usize,
    pub j: usize,
    /// Stacked-pair type: outer pair then inner pair, e.g. `"AUGC"`.
    pub stack: String,
}

impl Quartet {
    pub fn outer(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn inner(&self) -> (usize, usize) {
        (self.i + 1, self.j - 1)
    }

    pub fn pairs(&self) -> [(usize, usize); 2] {
        [self.outer(), self.inner()]
    }

    /// Whether the terminal (outer) pair is A-U or U-A.
    pub fn ends_in_ua(&self) -> bool {
        matches!(&self.stack.as_bytes()[..2], b"AU" | b"UA")
    }

    /// `other` continues this helix inwards (or outwards) by one pair.
    pub fn stacks_with(&self, other: &Quartet) -> bool {
        (other.i == self.i + 1 && other.j + 1 == self.j)
            || (self.i == other.i + 1 && self.j + 1 == other.j)
    }

    /// `other` lies strictly inside the loop closed by this quartet's inner pair.
    pub fn encloses(&self, other: &Quartet) -> bool {
        other.i > self.i + 1 && other.j + 1 < self.j
    }
}

/// Lists every quartet of `seq`, indexed densely in lexicographic `(i, j)` order.
pub fn enumerate_quartets(seq: &Sequence, rules: &FoldingRules) -> Vec<Quartet> {
    let len = seq.len();
    let mut out = Vec::new();
    for i in 1..=len {
        for j in (i + 1)..=len {
            // inner pair (i+1, j-1) must enclose at least min_hairpin bases
            if j < i + 3 + rules.min_hairpin {
                continue;
            }
            let (a, b, c, d) = (seq.at(i), seq.at(j), seq.at(i + 1), seq.at(j - 1));
            if rules.can_pair(a, b) && rules.can_pair(c, d) {
                let stack: String = [a, b, c, d].iter().map(|x| x.as_char()).collect();
                out.push(Quartet {
                    index: out.len(),
                    i,
                    j,
                    stack,
                });
            }
        }
    }
    out
}

/// Which quartet pairs are mutually exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictRule {
    /// Quartets may coexist only when stacked or strictly nested. Side-by-side
    /// helices are excluded as well; this is the convention the benchmark
    /// constraint counts are built with.
    #[default]
    NestedOnly,
    /// Quartets conflict only when a base would get two partners or two pairs
    /// cross (pseudoknot).
    NonCrossing,
}

/// Labelled relation sets over dense quartet indices. Every pair is stored
/// as `(a, b)` with `a < b`, sorted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RelationSets {
    pub conflicts: Vec<(usize, usize)>,
    pub stackings: Vec<(usize, usize)>,
    pub ua_terminal: Vec<usize>,
}

impl RelationSets {
    pub fn is_conflict(&self, a: usize, b: usize) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.conflicts.binary_search(&key).is_ok()
    }

    pub fn is_stacking(&self, a: usize, b: usize) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.stackings.binary_search(&key).is_ok()
    }

    /// Per-variable conflict neighbour lists.
    pub fn conflict_adjacency(&self, m: usize) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); m];
        for &(a, b) in &self.conflicts {
            adj[a].push(b);
            adj[b].push(a);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        adj
    }

    /// Conflict-graph edge density `|QC| / C(m, 2)`.
    pub fn conflict_density(&self, m: usize) -> f64 {
        if m < 2 {
            return 0.0;
        }
        self.conflicts.len() as f64 / (m * (m - 1) / 2) as f64
    }
}

fn shares_base_or_crosses(a: &Quartet, b: &Quartet) -> bool {
    let mut pairs: Vec<(usize, usize)> = a.pairs().into_iter().chain(b.pairs()).collect();
    pairs.sort_unstable();
    pairs.dedup();
    for (x, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[x + 1..] {
            // same base, different partner
            if i == k || i == l || j == k || j == l {
                return true;
            }
            if (i < k && k < j && j < l) || (k < i && i < l && l < j) {
                return true;
            }
        }
    }
    false
}

pub fn quartets_conflict(a: &Quartet, b: &Quartet, rule: ConflictRule) -> bool {
    if a.index == b.index || a.stacks_with(b) {
        return false;
    }
    match rule {
        ConflictRule::NonCrossing => shares_base_or_crosses(a, b),
        ConflictRule::NestedOnly => !(a.encloses(b) || b.encloses(a)),
    }
}

pub fn build_relations(quartets: &[Quartet], rule: ConflictRule) -> RelationSets {
    let mut rel = RelationSets::default();
    for (x, a) in quartets.iter().enumerate() {
        if a.ends_in_ua() {
            rel.ua_terminal.push(a.index);
        }
        for b in &quartets[x + 1..] {
            let key = (a.index.min(b.index), a.index.max(b.index));
            if a.stacks_with(b) {
                rel.stackings.push(key);
            } else if quartets_conflict(a, b, rule) {
                rel.conflicts.push(key);
            }
        }
    }
    rel.conflicts.sort_unstable();
    rel.stackings.sort_unstable();
    rel.ua_terminal.sort_unstable();
    rel
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rna::parse_sequence;

    fn q(index: usize, i: usize, j: usize) -> Quartet {
        Quartet {
            index,
            i,
            j,
            stack: "GCGC".into(),
        }
    }

    /// Every `(i, j)` checked directly against the definition.
    fn scan_oracle(seq: &Sequence, rules: &FoldingRules) -> Vec<(usize, usize)> {
        let l = seq.len();
        let mut v = Vec::new();
        for i in 1..=l {
            for j in 1..=l {
                if j <= i + 1 {
                    continue;
                }
                let loop_len = (j - 1) as i64 - (i + 1) as i64 - 1;
                if loop_len < rules.min_hairpin as i64 {
                    continue;
                }
                if rules.can_pair(seq.at(i), seq.at(j)) && rules.can_pair(seq.at(i + 1), seq.at(j - 1))
                {
                    v.push((i, j));
                }
            }
        }
        v
    }

    #[test]
    fn gggaaaccc_quartets() {
        let seq = parse_sequence("GGGAAACCC", "t").unwrap();
        let rules = FoldingRules::default();
        let qs = enumerate_quartets(&seq, &rules);
        let coords: Vec<_> = qs.iter().map(|q| (q.i, q.j)).collect();
        assert!(coords.contains(&(1, 9)));
        assert!(coords.contains(&(2, 8)));
        assert!(!coords.contains(&(3, 7)));
        assert_eq!(coords, scan_oracle(&seq, &rules));
        assert!(qs.iter().enumerate().all(|(k, q)| q.index == k));
    }

    #[test]
    fn enumeration_matches_scan_for_all_rules() {
        let seq = parse_sequence("GCUAGUCGGAUCCGUAGCUUAGCGGCU", "t").unwrap();
        for min_hairpin in 0..4 {
            for allow_gu in [true, false] {
                let rules = FoldingRules {
                    min_hairpin,
                    allow_gu,
                };
                let got: Vec<_> = enumerate_quartets(&seq, &rules)
                    .iter()
                    .map(|q| (q.i, q.j))
                    .collect();
                assert_eq!(got, scan_oracle(&seq, &rules));
            }
        }
    }

    #[test]
    fn no_pairs_no_quartets() {
        let seq = parse_sequence("AAAA", "t").unwrap();
        for min_hairpin in 0..4 {
            let rules = FoldingRules {
                min_hairpin,
                allow_gu: true,
            };
            assert!(enumerate_quartets(&seq, &rules).is_empty());
        }
    }

    #[test]
    fn stacked_neighbors_and_partner_conflicts() {
        let a = q(0, 1, 9);
        let b = q(1, 2, 8);
        let c = q(2, 1, 5);
        for rule in [ConflictRule::NestedOnly, ConflictRule::NonCrossing] {
            let rel = build_relations(&[a.clone(), b.clone(), c.clone()], rule);
            assert!(rel.is_stacking(0, 1));
            assert!(!rel.is_conflict(0, 1));
            assert!(rel.is_conflict(0, 2));
        }
    }

    #[test]
    fn side_by_side_depends_on_rule() {
        let left = q(0, 1, 8);
        let right = q(1, 10, 17);
        let inner = q(2, 3, 6);
        let cross = q(3, 5, 12);
        let all = [left.clone(), right.clone(), inner.clone(), cross.clone()];
        let strict = build_relations(&all, ConflictRule::NonCrossing);
        let nested = build_relations(&all, ConflictRule::NestedOnly);
        assert!(!strict.is_conflict(0, 1));
        assert!(nested.is_conflict(0, 1));
        // (3,6) sits inside the loop of (1,8) without touching (2,7)
        assert!(!strict.is_conflict(0, 2));
        assert!(!nested.is_conflict(0, 2));
        // (1,8) x (5,12) is a pseudoknot under both rules
        assert!(strict.is_conflict(0, 3));
        assert!(nested.is_conflict(0, 3));
    }

    #[test]
    fn stackings_never_conflict() {
        let seq = parse_sequence("GGGGCCAUAGCCCCAUGGGCUAUGGCCCC", "t").unwrap();
        let qs = enumerate_quartets(&seq, &FoldingRules::default());
        for rule in [ConflictRule::NestedOnly, ConflictRule::NonCrossing] {
            let rel = build_relations(&qs, rule);
            assert!(!rel.stackings.is_empty());
            for s in &rel.stackings {
                assert!(rel.conflicts.binary_search(s).is_err());
            }
            assert!(rel.conflicts.iter().all(|&(a, b)| a < b && b < qs.len()));
        }
    }

    #[test]
    fn ua_terminal_membership() {
        let seq = parse_sequence("AGCAAAAGCU", "t").unwrap();
        let qs = enumerate_quartets(&seq, &FoldingRules::default());
        assert_eq!(qs.len(), 2);
        assert_eq!(qs[0].stack, "AUGC");
        assert_eq!(qs[1].stack, "GCCG");
        let rel = build_relations(&qs, ConflictRule::default());
        assert_eq!(rel.ua_terminal, vec![0]);
    }
}
