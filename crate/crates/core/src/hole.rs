//! Markov holes: reduced word collections and the open-system adjacency.

use crate::algebra::matrix::Matrix;
use crate::error::{Error, Result};
use crate::sft::{contains_block, SftModel, Word};

/// A reduced, nonempty collection of allowed words.
#[derive(Clone, Debug, PartialEq)]
pub struct HoleSpec {
    words: Vec<Word>,
    original: Vec<Word>,
    removed: Vec<Word>,
}

impl HoleSpec {
    /// Removes every word that contains another member; duplicates collapse.
    pub fn reduce(model: &SftModel, words: Vec<Word>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyCollection);
        }
        for w in &words {
            if !model.is_allowed(w.symbols()) {
                return Err(Error::NotAllowed(model.format_word(w)));
            }
        }
        let mut distinct = words.clone();
        distinct.sort();
        distinct.dedup();
        let (mut kept, mut removed) = (Vec::new(), Vec::new());
        for w in &distinct {
            if distinct.iter().any(|v| v != w && w.contains(v)) {
                removed.push(w.clone());
            } else {
                kept.push(w.clone());
            }
        }
        Ok(HoleSpec {
            words: kept,
            original: words,
            removed,
        })
    }

    pub fn parse(model: &SftModel, words: &[&str]) -> Result<Self> {
        let parsed = words
            .iter()
            .map(|w| model.parse_word(w))
            .collect::<Result<Vec<_>>>()?;
        HoleSpec::reduce(model, parsed)
    }

    /// The reduced collection, sorted.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn original(&self) -> &[Word] {
        &self.original
    }

    /// Words dropped by the reduction.
    pub fn removed(&self) -> &[Word] {
        &self.removed
    }

    /// `true` when the input needed no reduction.
    pub fn was_reduced(&self) -> bool {
        self.removed.is_empty()
    }

    /// Maximal word length `r`.
    pub fn r(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn is_single_word(&self) -> bool {
        self.words.len() == 1
    }

    /// Words of length 1, as symbols.
    pub fn symbols(&self) -> Vec<usize> {
        self.words
            .iter()
            .filter(|w| w.len() == 1)
            .map(Word::first)
            .collect()
    }

    /// Words of length at least 2.
    pub fn long_words(&self) -> Vec<Word> {
        self.words.iter().filter(|w| w.len() >= 2).cloned().collect()
    }

    /// `true` when some word of the hole occurs in `w`.
    pub fn hits(&self, w: &[usize]) -> bool {
        self.words.iter().any(|g| contains_block(w, g.symbols()))
    }

    /// Symbol present in every word, if any.
    pub fn common_symbol(&self) -> Option<usize> {
        let first = &self.words[0];
        first
            .symbols()
            .iter()
            .copied()
            .find(|s| self.words.iter().all(|w| w.symbols().contains(s)))
    }

    pub fn format(&self, model: &SftModel) -> Vec<String> {
        self.words.iter().map(|w| model.format_word(w)).collect()
    }
}

/// Adjacency `B_G` of the open system on `L_{r-1}` (on the symbols when
/// `r = 1`).
#[derive(Clone, Debug)]
pub struct OpenAdjacency {
    pub order: usize,
    pub index: Vec<Word>,
    pub b: Matrix<u8>,
    /// Labels of the removed edges.
    pub removed: Vec<Word>,
}

impl OpenAdjacency {
    pub fn new(model: &SftModel, hole: &HoleSpec) -> Result<Self> {
        let r = hole.r();
        if r == 1 {
            let n = model.n_symbols();
            let g = hole.symbols();
            let mut b = Matrix::filled(n, n, 0u8);
            let mut removed = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if !model.allows(i, j) {
                        continue;
                    }
                    if g.contains(&i) || g.contains(&j) {
                        removed.push(Word::new(vec![i, j])?);
                    } else {
                        b[(i, j)] = 1;
                    }
                }
            }
            let index = (0..n).map(|i| Word::new(vec![i])).collect::<Result<_>>()?;
            return Ok(OpenAdjacency {
                order: 1,
                index,
                b,
                removed,
            });
        }
        let shift = model.higher_block(r - 1)?;
        let size = shift.len();
        let mut b = Matrix::filled(size, size, 0u8);
        let mut removed = Vec::new();
        for i in 0..size {
            for j in 0..size {
                if let Some(label) = shift.edge_label(i, j) {
                    if hole.hits(label.symbols()) {
                        removed.push(label);
                    } else {
                        b[(i, j)] = 1;
                    }
                }
            }
        }
        Ok(OpenAdjacency {
            order: r - 1,
            index: shift.words().to_vec(),
            b,
            removed,
        })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }
}

/// `G'`: every word of `L_target` that contains a word of `G`.
pub fn equalize_lengths(model: &SftModel, hole: &HoleSpec, target: usize) -> Result<HoleSpec> {
    let need = hole.r().max(2);
    if target < need {
        return Err(Error::Inapplicable(format!(
            "equalization target {target} is below {need}"
        )));
    }
    let words: Vec<Word> = model
        .allowed_words(target)?
        .into_iter()
        .filter(|w| hole.hits(w.symbols()))
        .collect();
    HoleSpec::reduce(model, words)
}
