//! Fixtures shared by the benchmarks in `benches/`.

use escape_core::{parse_rational, HoleSpec, MarkovMeasure, Matrix, Rational, SftModel};

fn matrix(rows: &[&[&str]]) -> Matrix<Rational> {
    Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|s| parse_rational(s).expect("fixture scalar")).collect())
            .collect(),
    )
    .expect("fixture matrix")
}

fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// Three symbols with `2 -> 3` forbidden and the hole `{12, 222, 3}`.
pub fn worked() -> (MarkovMeasure<Rational>, HoleSpec) {
    let model = SftModel::new(labels(3), vec![vec![1, 1, 1], vec![1, 1, 0], vec![1, 1, 1]]).expect("model");
    let p = matrix(&[
        &["1/5", "2/5", "2/5"],
        &["9/10", "1/10", "0"],
        &["1/10", "1/10", "4/5"],
    ]);
    let m = MarkovMeasure::new(model, p).expect("measure");
    let h = HoleSpec::parse(m.model(), &["12", "222", "3"]).expect("hole");
    (m, h)
}

/// Uniform full 2-shift.
pub fn uniform_two() -> MarkovMeasure<Rational> {
    let model = SftModel::new(labels(2), vec![vec![1, 1], vec![1, 1]]).expect("model");
    MarkovMeasure::new(model, matrix(&[&["1/2", "1/2"], &["1/2", "1/2"]])).expect("measure")
}

/// Holes `1^{r-1}2`, `2^{r-1}1`, `12^{r-2}1` on two symbols.
pub fn varying_hole(m: &MarkovMeasure<Rational>, r: usize) -> HoleSpec {
    let words = [
        format!("{}2", "1".repeat(r - 1)),
        format!("{}1", "2".repeat(r - 1)),
        format!("1{}1", "2".repeat(r - 2)),
    ];
    let refs: Vec<&str> = words.iter().map(String::as_str).collect();
    HoleSpec::parse(m.model(), &refs).expect("hole")
}
