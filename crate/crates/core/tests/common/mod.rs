#![allow(dead_code)]

use escape_core::{parse_rational, HoleSpec, MarkovMeasure, Matrix, Rational, SftModel, Word};
use rand::Rng;

pub fn q(rows: &[&[&str]]) -> Matrix<Rational> {
    Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|s| parse_rational(s).unwrap()).collect())
            .collect(),
    )
    .unwrap()
}

pub fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// Three symbols, `2 -> 3` forbidden.
pub fn three_model() -> SftModel {
    SftModel::new(labels(3), vec![vec![1, 1, 1], vec![1, 1, 0], vec![1, 1, 1]]).unwrap()
}

pub fn three_measure() -> MarkovMeasure<Rational> {
    let p = q(&[
        &["1/5", "2/5", "2/5"],
        &["9/10", "1/10", "0"],
        &["1/10", "1/10", "4/5"],
    ]);
    MarkovMeasure::new(three_model(), p).unwrap()
}

pub fn golden_model() -> SftModel {
    SftModel::new(labels(2), vec![vec![0, 1], vec![1, 1]]).unwrap()
}

pub fn golden_measure() -> MarkovMeasure<Rational> {
    MarkovMeasure::new(golden_model(), q(&[&["0", "1"], &["1/3", "2/3"]])).unwrap()
}

pub fn full_measure(rows: &[&[&str]]) -> MarkovMeasure<Rational> {
    let n = rows.len();
    let model = SftModel::new(labels(n), vec![vec![1; n]; n]).unwrap();
    MarkovMeasure::new(model, q(rows)).unwrap()
}

pub fn uniform(n: usize) -> MarkovMeasure<Rational> {
    let e = format!("1/{n}");
    let row: Vec<&str> = vec![e.as_str(); n];
    let rows: Vec<&[&str]> = vec![&row[..]; n];
    full_measure(&rows)
}

/// Doubly stochastic 3x3 fixture.
pub fn doubly3() -> MarkovMeasure<Rational> {
    full_measure(&[
        &["0.35", "0.3", "0.35"],
        &["0.3", "0.4", "0.3"],
        &["0.35", "0.3", "0.35"],
    ])
}

/// Doubly stochastic 4x4 fixture.
pub fn doubly4() -> MarkovMeasure<Rational> {
    full_measure(&[
        &["0.1", "0.25", "0.3", "0.35"],
        &["0.25", "0.15", "0.4", "0.2"],
        &["0.3", "0.4", ".05", "0.25"],
        &["0.35", "0.2", "0.25", "0.2"],
    ])
}

/// Full 2-shift, uniform measure, holes `1^{r-1}2`, `2^{r-1}1`, `12^{r-2}1`.
pub fn varying_r_hole(m: &MarkovMeasure<Rational>, r: usize) -> HoleSpec {
    let mut u1 = vec![0; r - 1];
    u1.push(1);
    let mut u2 = vec![1; r - 1];
    u2.push(0);
    let mut u3 = vec![0];
    u3.extend(std::iter::repeat_n(1, r - 2));
    u3.push(0);
    let words = [u1, u2, u3]
        .into_iter()
        .map(|w| Word::new(w).unwrap())
        .collect();
    HoleSpec::reduce(m.model(), words).unwrap()
}

pub fn words_up_to(model: &SftModel, max_len: usize) -> Vec<Word> {
    (1..=max_len)
        .flat_map(|n| model.allowed_words(n).unwrap())
        .collect()
}

/// Positive weights summing to 1.
fn weights<R: Rng>(rng: &mut R, k: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    raw.iter().map(|&x| Rational::new(x.into(), total.into())).collect()
}

/// Random stochastic matrix supported on `adjacency`.
pub fn random_p<R: Rng>(rng: &mut R, adjacency: &[Vec<i64>]) -> Matrix<Rational> {
    let n = adjacency.len();
    let mut rows = Vec::with_capacity(n);
    for row in adjacency {
        let support: Vec<usize> = (0..n).filter(|&j| row[j] == 1).collect();
        let w = weights(rng, support.len());
        let mut r = vec![Rational::from_integer(0.into()); n];
        for (k, &j) in support.iter().enumerate() {
            r[j] = w[k].clone();
        }
        rows.push(r);
    }
    Matrix::from_rows(rows).unwrap()
}

/// Random irreducible SFT on `n` symbols with a random Markov measure.
pub fn random_measure<R: Rng>(rng: &mut R, n: usize) -> MarkovMeasure<Rational> {
    loop {
        let a: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| i64::from(rng.gen_bool(0.7))).collect())
            .collect();
        let Ok(model) = SftModel::new(labels(n), a.clone()) else {
            continue;
        };
        if !model.is_irreducible() {
            continue;
        }
        let p = random_p(rng, &a);
        return MarkovMeasure::new(model, p).unwrap();
    }
}

/// Random reduced hole: up to `k` allowed words of length at most `r`.
pub fn random_hole<R: Rng>(rng: &mut R, model: &SftModel, k: usize, r: usize) -> HoleSpec {
    let count = rng.gen_range(1..=k);
    let words = (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=r);
            let all = model.allowed_words(len).unwrap();
            all[rng.gen_range(0..all.len())].clone()
        })
        .collect();
    HoleSpec::reduce(model, words).unwrap()
}
