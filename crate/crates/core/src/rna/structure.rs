//! Dot-bracket export of decoded structures.

use super::instance::QuboInstance;
use crate::{Error, Result};

/// Base pairs (1-based, `i < j`) implied by the selected quartets.
pub fn selected_pairs(inst: &QuboInstance, x: &[bool]) -> Result<Vec<(usize, usize)>> {
    if inst.quartets().len() != inst.m() {
        return Err(Error::MissingQuartets);
    }
    if x.len() != inst.m() {
        return Err(Error::LengthMismatch {
            expected: inst.m(),
            found: x.len(),
        });
    }
    let mut pairs: Vec<(usize, usize)> = inst
        .quartets()
        .iter()
        .filter(|q| x[q.index])
        .flat_map(|q| q.pairs())
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    Ok(pairs)
}

/// Renders a feasible assignment as a dot-bracket string over the sequence.
pub fn to_dot_bracket(inst: &QuboInstance, x: &[bool]) -> Result<String> {
    if !inst.is_feasible(x)? {
        return Err(Error::InfeasibleInput);
    }
    let pairs = selected_pairs(inst, x)?;
    let len = inst
        .sequence()
        .map(|s| s.len())
        .or_else(|| inst.quartets().iter().map(|q| q.j).max())
        .unwrap_or(0);
    let mut out = vec![b'.'; len];
    for (i, j) in pairs {
        if out[i - 1] != b'.' || out[j - 1] != b'.' {
            // only reachable with hand-built relation sets that miss a clash
            return Err(Error::InfeasibleInput);
        }
        out[i - 1] = b'(';
        out[j - 1] = b')';
    }
    Ok(String::from_utf8(out).expect("ascii"))
}

/// Parses a dot-bracket string back into its 1-based pair list.
pub fn parse_dot_bracket(s: &str) -> Result<Vec<(usize, usize)>> {
    let mut stack = Vec::new();
    let mut pairs = Vec::new();
    for (k, c) in s.chars().enumerate() {
        match c {
            '(' => stack.push(k + 1),
            ')' => {
                let i = stack.pop().ok_or_else(|| {
                    Error::InvalidConfig(format!("unbalanced ')' at {}", k + 1))
                })?;
                pairs.push((i, k + 1));
            }
            '.' => {}
            other => {
                return Err(Error::IllegalCharacter {
                    position: k + 1,
                    found: other,
                })
            }
        }
    }
    if !stack.is_empty() {
        return Err(Error::InvalidConfig("unbalanced '('".into()));
    }
    pairs.sort_unstable();
    Ok(pairs)
}
