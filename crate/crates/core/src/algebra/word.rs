use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Matrix2;
use crate::error::{Error, Result};

/// Multi-index over the letters {1, 2, 3}; the empty word is allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: impl Into<Vec<u8>>) -> Result<Self> {
        let letters = letters.into();
        if let Some(&bad) = letters.iter().find(|&&l| !(1..=3).contains(&l)) {
            return Err(Error::BadLetter(bad));
        }
        Ok(Self(letters))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&self, letter: u8) -> Result<Word> {
        let mut v = self.0.clone();
        v.push(letter);
        Word::new(v)
    }

    /// Dense index over all words ordered by length, then lexicographically;
    /// the empty word has index 0.
    pub fn index(&self) -> usize {
        let offset = (3usize.pow(self.len() as u32) - 1) / 2;
        offset + self.0.iter().fold(0, |acc, &l| acc * 3 + (l as usize - 1))
    }

    /// Number of words of length at most `depth`, the empty word included.
    pub fn count_up_to(depth: usize) -> usize {
        (3usize.pow(depth as u32 + 1) - 1) / 2
    }

    /// All words of exactly `len` letters, lexicographic.
    pub fn all(len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (1..=3u8).map(move |l| {
                        let mut v = w.0.clone();
                        v.push(l);
                        Word(v)
                    })
                })
                .collect();
        }
        out
    }

    /// All words with `1 <= len <= depth`, in index order.
    pub fn all_up_to(depth: usize) -> Vec<Word> {
        (1..=depth).flat_map(Word::all).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| ch.to_digit(10).map(|d| d as u8).ok_or(Error::BadLetter(0)))
            .collect::<Result<Vec<u8>>>()?;
        Word::new(letters)
    }
}

impl TryFrom<String> for Word {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

/// Pauli generator: `m1 = diag(1,-1)`, `m2 = [[0,1],[1,0]]`, `m3 = [[0,i],[-i,0]]`.
pub fn pauli(j: u8) -> Result<Matrix2> {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    match j {
        1 => Ok(Matrix2::new(one, o, o, -one)),
        2 => Ok(Matrix2::new(o, one, one, o)),
        3 => Ok(Matrix2::new(o, i, -i, o)),
        _ => Err(Error::BadLetter(j)),
    }
}

/// Ordered product of the Pauli generators along `w`; identity for the empty word.
pub fn pauli_word(w: &Word) -> Matrix2 {
    w.letters().iter().fold(Matrix2::identity(), |acc, &l| acc * pauli(l).expect("validated word"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let m1 = pauli_word(&"1".parse().unwrap());
        assert_eq!(m1, Matrix2::diag(1.0.into(), (-1.0).into()));
        assert_eq!(pauli_word(&"22".parse().unwrap()), Matrix2::identity());
        let i = Complex64::i();
        assert_eq!(pauli_word(&"23".parse().unwrap()), Matrix2::diag(-i, i));
        assert_eq!(pauli_word(&Word::empty()), Matrix2::identity());
        assert!(matches!(Word::new(vec![1, 4]), Err(Error::BadLetter(4))));
        assert!(pauli(0).is_err());
    }

    #[test]
    fn dense_index_is_a_bijection() {
        let words: Vec<Word> = std::iter::once(Word::empty()).chain(Word::all_up_to(4)).collect();
        assert_eq!(words.len(), Word::count_up_to(4));
        for (k, w) in words.iter().enumerate() {
            assert_eq!(w.index(), k);
        }
    }
}
