//! Bits and finite histories over the alphabet {-1, +1}.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bit {
    Minus,
    Plus,
}

impl Bit {
    /// The value of the bit as -1 or +1.
    pub fn sign(self) -> i64 {
        match self {
            Bit::Minus => -1,
            Bit::Plus => 1,
        }
    }

    /// `+` / `-`, with `1` / `0` accepted as aliases.
    pub fn from_char(c: char) -> Option<Bit> {
        match c {
            '+' | '1' => Some(Bit::Plus),
            '-' | '0' => Some(Bit::Minus),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Bit::Plus => '+',
            Bit::Minus => '-',
        }
    }

    pub fn flip(self) -> Bit {
        match self {
            Bit::Plus => Bit::Minus,
            Bit::Minus => Bit::Plus,
        }
    }

    /// The bit on which a wager of sign `s` loses; `None` for a zero wager.
    pub fn against_sign(s: i32) -> Option<Bit> {
        match s.signum() {
            1 => Some(Bit::Minus),
            -1 => Some(Bit::Plus),
            _ => None,
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid bit character {ch:?} at offset {offset}")]
pub struct ParseHistoryError {
    pub ch: char,
    pub offset: usize,
}

/// A finite bit string. The empty history is the root of every strategy.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History(Vec<Bit>);

impl History {
    pub fn empty() -> Self {
        History(Vec::new())
    }

    pub fn from_bits(bits: Vec<Bit>) -> Self {
        History(bits)
    }

    /// The `k`-th history of length `len` in lexicographic order with
    /// `-` < `+`, reading `k`'s bits from the most significant end.
    pub fn from_index(k: u64, len: usize) -> Self {
        let bits = (0..len)
            .map(|i| {
                if (k >> (len - 1 - i)) & 1 == 1 {
                    Bit::Plus
                } else {
                    Bit::Minus
                }
            })
            .collect();
        History(bits)
    }

    pub fn bits(&self) -> &[Bit] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<Bit> {
        self.0
    }

    pub fn prefix(&self, n: usize) -> &[Bit] {
        &self.0[..n]
    }

    pub fn push(&mut self, b: Bit) {
        self.0.push(b);
    }

    pub fn pop(&mut self) -> Option<Bit> {
        self.0.pop()
    }

    pub fn child(&self, b: Bit) -> History {
        let mut h = self.clone();
        h.push(b);
        h
    }

    pub fn count(&self, b: Bit) -> usize {
        self.0.iter().filter(|&&x| x == b).count()
    }
}

impl Deref for History {
    type Target = [Bit];
    fn deref(&self) -> &[Bit] {
        &self.0
    }
}

impl From<Vec<Bit>> for History {
    fn from(v: Vec<Bit>) -> Self {
        History(v)
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", b.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for History {
    type Err = ParseHistoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(offset, ch)| Bit::from_char(ch).ok_or(ParseHistoryError { ch, offset }))
            .collect::<Result<Vec<_>, _>>()
            .map(History)
    }
}

/// Render bits as a `+`/`-` string.
pub fn bits_to_string(bits: &[Bit]) -> String {
    bits.iter().map(|b| b.to_char()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_forms_are_bijective() {
        let h: History = "+-+-".parse().unwrap();
        let alias: History = "1010".parse().unwrap();
        assert_eq!(h, alias);
        assert_eq!(h.to_string(), "+-+-");
        assert_eq!(h.prefix(0), &[] as &[Bit]);
        assert_eq!(h.prefix(2), &[Bit::Plus, Bit::Minus]);
        assert!("+x".parse::<History>().is_err());
    }

    #[test]
    fn index_enumeration_covers_all_strings() {
        let all: Vec<String> = (0..8)
            .map(|k| History::from_index(k, 3).to_string())
            .collect();
        assert_eq!(all[0], "---");
        assert_eq!(all[7], "+++");
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 8);
    }
}
