//! The TOML model file: alphabet, adjacency, transition weights, hole.

use std::fmt;
use std::path::Path;

use escape_core::{
    parse_rational, parry_measure, ExactMeasure, FloatMeasure, HoleSpec, MarkovMeasure, Matrix,
    Rational, SftModel,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A scalar written either as a string (`"9/10"`, `"0.35"`) or a bare number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarText {
    Text(String),
    Int(i64),
    Float(f64),
}

impl ScalarText {
    /// Bare floats are read through their shortest decimal form.
    pub fn to_rational(&self) -> escape_core::Result<Rational> {
        match self {
            ScalarText::Text(s) => parse_rational(s),
            ScalarText::Int(n) => Ok(Rational::from_integer((*n).into())),
            ScalarText::Float(x) => parse_rational(&format!("{x}")),
        }
    }
}

impl fmt::Display for ScalarText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarText::Text(s) => f.write_str(s),
            ScalarText::Int(n) => write!(f, "{n}"),
            ScalarText::Float(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    #[default]
    Markov,
    Parry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub symbols: Vec<String>,
    /// Defaults to the support of `stochastic` for Markov measures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stochastic: Option<Vec<Vec<ScalarText>>>,
    #[serde(default)]
    pub measure: MeasureKind,
    #[serde(default)]
    pub hole: Vec<String>,
}

/// The measure in whichever arithmetic the file allows.
#[derive(Clone, Debug)]
pub enum LoadedMeasure {
    Exact(ExactMeasure),
    Float(FloatMeasure),
}

impl LoadedMeasure {
    pub fn model(&self) -> &SftModel {
        match self {
            LoadedMeasure::Exact(m) => m.model(),
            LoadedMeasure::Float(m) => m.model(),
        }
    }
}

/// A parsed model file.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub file: ModelFile,
    pub model: SftModel,
    pub measure: LoadedMeasure,
    pub kind: MeasureKind,
    pub hole: Option<HoleSpec>,
}

fn parse_err(field: &str, e: impl fmt::Display) -> CliError {
    CliError::Parse(format!("{field}: {e}"))
}

impl ModelFile {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        ModelFile::from_toml(&text).map_err(|e| match e {
            CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model files always serialize")
    }

    fn weights(&self) -> Result<Matrix<Rational>, CliError> {
        let rows = self
            .stochastic
            .as_ref()
            .ok_or_else(|| parse_err("stochastic", "required for a markov measure"))?;
        let mut out = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != self.symbols.len() {
                return Err(parse_err(
                    &format!("stochastic row {}", i + 1),
                    format!("expected {} entries, found {}", self.symbols.len(), row.len()),
                ));
            }
            let parsed = row
                .iter()
                .enumerate()
                .map(|(j, x)| {
                    x.to_rational()
                        .map_err(|e| parse_err(&format!("stochastic row {}, column {}", i + 1, j + 1), e))
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.push(parsed);
        }
        if out.len() != self.symbols.len() {
            return Err(parse_err(
                "stochastic",
                format!("expected {} rows, found {}", self.symbols.len(), out.len()),
            ));
        }
        Matrix::from_rows(out).map_err(|e| parse_err("stochastic", e))
    }

    /// Validates everything and builds the model, measure and hole.
    pub fn load(&self) -> Result<Loaded, CliError> {
        let weights = match self.measure {
            MeasureKind::Markov => Some(self.weights()?),
            MeasureKind::Parry => None,
        };
        let adjacency = match (&self.adjacency, &weights) {
            (Some(a), _) => a.clone(),
            (None, Some(p)) => (0..p.rows())
                .map(|i| (0..p.cols()).map(|j| i64::from(p[(i, j)] != Rational::from_integer(0.into()))).collect())
                .collect(),
            (None, None) => return Err(parse_err("adjacency", "required for a parry measure")),
        };
        let model = SftModel::new(self.symbols.clone(), adjacency).map_err(|e| parse_err("adjacency", e))?;
        let measure = match weights {
            Some(p) => LoadedMeasure::Exact(
                MarkovMeasure::new(model.clone(), p).map_err(|e| parse_err("stochastic", e))?,
            ),
            None => LoadedMeasure::Float(parry_measure(&model).map_err(|e| parse_err("adjacency", e))?),
        };
        let hole = if self.hole.is_empty() {
            None
        } else {
            Some(parse_hole(&model, &self.hole)?)
        };
        Ok(Loaded {
            file: self.clone(),
            model,
            measure,
            kind: self.measure,
            hole,
        })
    }
}

pub fn parse_hole<S: AsRef<str>>(model: &SftModel, words: &[S]) -> Result<HoleSpec, CliError> {
    let refs: Vec<&str> = words.iter().map(AsRef::as_ref).collect();
    HoleSpec::parse(model, &refs).map_err(|e| parse_err("hole", e))
}

/// One hole per line; words split on whitespace or commas. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_holes_file(text: &str) -> Vec<(usize, Vec<String>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                return None;
            }
            let words = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|w| !w.is_empty())
                .map(str::to_string)
                .collect();
            Some((i + 1, words))
        })
        .collect()
}
