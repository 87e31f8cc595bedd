//! Subshifts of finite type: symbols, adjacency, allowed words and
//! higher-block recodings.

use std::collections::HashMap;
use std::fmt;

use crate::algebra::linalg::is_irreducible;
use crate::algebra::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default bound on `|L_n|` for enumerations.
pub const DEFAULT_LANGUAGE_CAP: usize = 1_000_000;

/// A finite word over the dense symbol indices `0..N`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word(symbols))
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// `i(u)`
    pub fn first(&self) -> usize {
        self.0[0]
    }

    /// `t(u)`
    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    /// `true` when `other` occurs in `self` as a contiguous block.
    pub fn contains(&self, other: &Word) -> bool {
        contains_block(&self.0, &other.0)
    }

    pub fn ends_with(&self, other: &Word) -> bool {
        self.0.ends_with(&other.0)
    }

    /// `X * Y` for progressively overlapping words of equal length.
    pub fn star(&self, other: &Word) -> Option<Word> {
        let n = self.len();
        if other.len() != n || self.0[1..] != other.0[..n - 1] {
            return None;
        }
        let mut w = self.0.clone();
        w.push(other.last());
        Some(Word(w))
    }
}

impl std::ops::Index<usize> for Word {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

pub(crate) fn contains_block(hay: &[usize], needle: &[usize]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

/// Symbol labels plus a 0/1 transition matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SftModel {
    symbols: Vec<String>,
    adjacency: Matrix<u8>,
    irreducible: bool,
}

impl SftModel {
    pub fn new(symbols: Vec<String>, adjacency: Vec<Vec<i64>>) -> Result<Self> {
        let n = symbols.len();
        if n < 2 {
            return Err(Error::TooFewSymbols(n));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::DuplicateSymbol(s.clone()));
            }
        }
        if adjacency.len() != n {
            return Err(Error::NonSquare {
                rows: adjacency.len(),
                row: 0,
                len: n,
            });
        }
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquare {
                    rows: n,
                    row: i,
                    len: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|&x| x != 0 && x != 1) {
                return Err(Error::BadEntry {
                    row: i,
                    col: j,
                    value: row[j],
                });
            }
        }
        let adjacency = Matrix::from_fn(n, n, |i, j| adjacency[i][j] as u8);
        for k in 0..n {
            let row_empty = (0..n).all(|j| adjacency[(k, j)] == 0);
            let col_empty = (0..n).all(|i| adjacency[(i, k)] == 0);
            if row_empty || col_empty {
                return Err(Error::StrandedSymbol(symbols[k].clone()));
            }
        }
        let irreducible = is_irreducible(&adjacency.map(|&x| x as f64));
        Ok(SftModel {
            symbols,
            adjacency,
            irreducible,
        })
    }

    /// Full shift on the given labels.
    pub fn full_shift(symbols: &[&str]) -> Self {
        let n = symbols.len();
        SftModel::new(
            symbols.iter().map(|s| s.to_string()).collect(),
            vec![vec![1; n]; n],
        )
        .expect("full shift is valid")
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn n_symbols(&self) -> usize {
        self.symbols.len()
    }

    pub fn adjacency(&self) -> &Matrix<u8> {
        &self.adjacency
    }

    /// The adjacency matrix with entries in a numeric backend.
    pub fn adjacency_as<S: Scalar>(&self) -> Matrix<S> {
        self.adjacency.map(|&x| if x == 1 { S::one() } else { S::zero() })
    }

    pub fn allows(&self, i: usize, j: usize) -> bool {
        self.adjacency[(i, j)] == 1
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    pub fn is_allowed(&self, w: &[usize]) -> bool {
        !w.is_empty()
            && w.iter().all(|&s| s < self.n_symbols())
            && w.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    pub fn symbol_index(&self, label: &str) -> Result<usize> {
        self.symbols
            .iter()
            .position(|s| s == label)
            .ok_or_else(|| Error::UnknownSymbol(label.to_string()))
    }

    fn compact_labels(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses `"1.2.2"`, or `"122"` when every label is a single character.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::EmptyWord);
        }
        let symbols = if text.contains('.') {
            text.split('.')
                .map(|s| self.symbol_index(s.trim()))
                .collect::<Result<Vec<_>>>()?
        } else if self.compact_labels() {
            text.chars()
                .map(|c| self.symbol_index(&c.to_string()))
                .collect::<Result<Vec<_>>>()?
        } else {
            vec![self.symbol_index(text)?]
        };
        if !self.is_allowed(&symbols) {
            return Err(Error::NotAllowed(text.to_string()));
        }
        Word::new(symbols)
    }

    pub fn format_word(&self, w: &Word) -> String {
        let labels = w.symbols().iter().map(|&s| self.symbols[s].as_str());
        if self.compact_labels() {
            labels.collect()
        } else {
            labels.collect::<Vec<_>>().join(".")
        }
    }

    /// `X * Y`, reporting labels on failure.
    pub fn star(&self, x: &Word, y: &Word) -> Result<Word> {
        x.star(y).ok_or_else(|| {
            Error::NoProgressiveOverlap(self.format_word(x), self.format_word(y))
        })
    }

    /// `|L_n|`, saturating.
    pub fn language_size(&self, n: usize) -> u128 {
        if n == 0 {
            return 0;
        }
        let size = self.n_symbols();
        let mut counts = vec![1u128; size];
        for _ in 1..n {
            counts = (0..size)
                .map(|i| {
                    (0..size)
                        .filter(|&j| self.allows(i, j))
                        .fold(0u128, |acc, j| acc.saturating_add(counts[j]))
                })
                .collect();
        }
        counts.iter().fold(0u128, |a, &c| a.saturating_add(c))
    }

    pub fn allowed_words(&self, n: usize) -> Result<Vec<Word>> {
        self.allowed_words_capped(n, DEFAULT_LANGUAGE_CAP)
    }

    /// `L_n` in lexicographic order, by depth-first walks.
    pub fn allowed_words_capped(&self, n: usize, cap: usize) -> Result<Vec<Word>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        if self.language_size(n) > cap as u128 {
            return Err(Error::LanguageTooLarge { length: n, cap });
        }
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(n);
        self.extend_words(n, &mut stack, &mut out);
        Ok(out)
    }

    fn extend_words(&self, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Word>) {
        if prefix.len() == n {
            out.push(Word(prefix.clone()));
            return;
        }
        for s in 0..self.n_symbols() {
            if prefix.last().is_none_or(|&l| self.allows(l, s)) {
                prefix.push(s);
                self.extend_words(n, prefix, out);
                prefix.pop();
            }
        }
    }

    pub fn higher_block(&self, n: usize) -> Result<HigherBlockShift> {
        HigherBlockShift::new(self, n)
    }
}

/// Recoding of the shift over the alphabet `L_n`.
#[derive(Clone, Debug)]
pub struct HigherBlockShift {
    order: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    adjacency: Matrix<u8>,
}

impl HigherBlockShift {
    pub fn new(model: &SftModel, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("higher-block order must be at least 1".into()));
        }
        let words = model.allowed_words(n)?;
        let index: HashMap<Word, usize> =
            words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let size = words.len();
        let mut adjacency = Matrix::filled(size, size, 0u8);
        for (i, x) in words.iter().enumerate() {
            for s in 0..model.n_symbols() {
                if !model.allows(x.last(), s) {
                    continue;
                }
                let mut y = x.symbols()[1..].to_vec();
                y.push(s);
                adjacency[(i, index[&Word(y)])] = 1;
            }
        }
        Ok(HigherBlockShift {
            order: n,
            words,
            index,
            adjacency,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `L_n`, the vertex set, in lexicographic order.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn adjacency(&self) -> &Matrix<u8> {
        &self.adjacency
    }

    /// Label `X * Y` of the edge `(i, j)`, if present.
    pub fn edge_label(&self, i: usize, j: usize) -> Option<Word> {
        if self.adjacency[(i, j)] == 1 {
            self.words[i].star(&self.words[j])
        } else {
            None
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| (s + 1).to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}
