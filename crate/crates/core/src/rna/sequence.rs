use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Base {
    A,
    U,
    C,
    G,
}

impl Base {
    pub fn from_char(c: char) -> Option<Base> {
        match c.to_ascii_uppercase() {
            'A' => Some(Base::A),
            'U' | 'T' => Some(Base::U),
            'C' => Some(Base::C),
            'G' => Some(Base::G),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::U => 'U',
            Base::C => 'C',
            Base::G => 'G',
        }
    }
}

/// A validated nucleotide sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    id: String,
    bases: Vec<Base>,
}

impl Sequence {
    pub fn new(id: impl Into<String>, bases: Vec<Base>) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(Error::EmptyId);
        }
        if bases.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Sequence { id, bases })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn bases(&self) -> &[Base] {
        &self.bases
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    /// Base at a 1-based position.
    pub fn at(&self, pos: usize) -> Base {
        self.bases[pos - 1]
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bases {
            write!(f, "{}", b.as_char())?;
        }
        Ok(())
    }
}

/// Parses a raw nucleotide string. Whitespace anywhere is ignored, case is
/// folded and `T` is read as `U`. Error positions are 1-based and count only
/// non-whitespace characters.
pub fn parse_sequence(text: &str, id: &str) -> Result<Sequence> {
    let mut bases = Vec::with_capacity(text.len());
    for (k, c) in text.chars().filter(|c| !c.is_whitespace()).enumerate() {
        match Base::from_char(c) {
            Some(b) => bases.push(b),
            None => {
                return Err(Error::IllegalCharacter {
                    position: k + 1,
                    found: c,
                })
            }
        }
    }
    if bases.is_empty() {
        return Err(Error::EmptyInput);
    }
    Sequence::new(id, bases)
}

/// Reads plain or FASTA-like text. Lines starting with `>` open a new record
/// whose id is the rest of the header line; text before any header becomes a
/// record named `default_id`.
pub fn parse_fasta(text: &str, default_id: &str) -> Result<Vec<Sequence>> {
    let mut records: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(header) = line.strip_prefix('>') {
            let id = header.split_whitespace().next().unwrap_or("");
            let id = if id.is_empty() { default_id } else { id };
            records.push((id.to_string(), String::new()));
        } else if !line.is_empty() {
            if records.is_empty() {
                records.push((default_id.to_string(), String::new()));
            }
            records.last_mut().expect("non-empty").1.push_str(line);
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    records
        .iter()
        .map(|(id, body)| parse_sequence(body, id))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_case_and_thymine() {
        let s = parse_sequence("augc", "x").unwrap();
        assert_eq!(s.to_string(), "AUGC");
        assert_eq!(parse_sequence("AUGC", "x").unwrap().to_string(), "AUGC");
        assert_eq!(parse_sequence("ATG c\n", "x").unwrap().to_string(), "AUGC");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_sequence("AXGC", "x"),
            Err(Error::IllegalCharacter { position: 2, found: 'X' })
        ));
        assert!(matches!(parse_sequence("  \n", "x"), Err(Error::EmptyInput)));
        assert!(matches!(parse_sequence("AUGC", " "), Err(Error::EmptyId)));
    }

    #[test]
    fn fasta_records() {
        let recs = parse_fasta(">s1 first\nAUG\nGC\n>s2\ncccc\n", "d").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].id(), "s1");
        assert_eq!(recs[0].to_string(), "AUGGC");
        assert_eq!(recs[1].to_string(), "CCCC");
        let plain = parse_fasta("GGGAAACCC\n", "plain").unwrap();
        assert_eq!(plain[0].id(), "plain");
        assert!(matches!(parse_fasta("\n\n", "d"), Err(Error::EmptyInput)));
    }
}
