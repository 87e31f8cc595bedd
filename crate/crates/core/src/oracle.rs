//! Brute-force and dynamic-programming survival probabilities, used to
//! validate the analytic methods independently.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::hole::HoleSpec;
use crate::measure::MarkovMeasure;
use crate::scalar::{Rational, Scalar};
use crate::sft::Word;
use crate::spectral::{Diagnostics, EscapeRateResult, Method};

/// Enumeration cap on the number of words visited.
pub const ENUMERATION_CAP: usize = 1 << 22;

/// One row `n` of the avoidance table.
#[derive(Clone, Debug, PartialEq)]
pub struct AvoidanceRow<S> {
    pub n: usize,
    /// `mu(n, i)`: words of length `n` ending in `i` that avoid the hole.
    pub mu: Vec<(usize, S)>,
    /// `nu(n, u)`: words of length `n` whose only hole word is a terminal `u`.
    pub nu: Vec<(Word, S)>,
}

impl<S: Scalar> AvoidanceRow<S> {
    /// Total measure of avoiding words of length `n`.
    pub fn total(&self) -> S {
        self.mu.iter().fold(S::zero(), |a, (_, x)| a + x.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AvoidanceTable<S> {
    pub rows: Vec<AvoidanceRow<S>>,
}

pub fn brute_force_avoidance<S: Scalar>(
    measure: &MarkovMeasure<S>,
    hole: &HoleSpec,
    n: usize,
) -> Result<AvoidanceRow<S>> {
    let model = measure.model();
    if n == 0 {
        return Err(Error::Inapplicable("rows start at n = 1".into()));
    }
    if model.language_size(n) > ENUMERATION_CAP as u128 {
        return Err(Error::TooLarge(n));
    }
    let symbols = hole.symbols();
    let long = hole.long_words();
    let mut mu: Vec<(usize, S)> = (0..model.n_symbols())
        .filter(|i| !symbols.contains(i))
        .map(|i| (i, S::zero()))
        .collect();
    let mut nu: Vec<(Word, S)> = long.iter().map(|u| (u.clone(), S::zero())).collect();
    for w in model.allowed_words_capped(n, ENUMERATION_CAP)? {
        let s = w.symbols();
        if !hole.hits(&s[..n - 1]) {
            if !hole.hits(s) {
                let slot = mu.iter_mut().find(|(i, _)| *i == w.last()).unwrap();
                slot.1 = slot.1.clone() + measure.cylinder_measure(&w)?;
            } else if let Some(slot) = nu.iter_mut().find(|(u, _)| w.ends_with(u)) {
                slot.1 = slot.1.clone() + measure.cylinder_measure(&w)?;
            }
        }
    }
    Ok(AvoidanceRow { n, mu, nu })
}

pub fn avoidance_table<S: Scalar>(
    measure: &MarkovMeasure<S>,
    hole: &HoleSpec,
    max_n: usize,
) -> Result<AvoidanceTable<S>> {
    let rows = (1..=max_n)
        .map(|n| brute_force_avoidance(measure, hole, n))
        .collect::<Result<_>>()?;
    Ok(AvoidanceTable { rows })
}

type Dist<S> = BTreeMap<Vec<usize>, S>;

/// Forward DP over windows of the last `max(r - 1, 1)` symbols.
struct Automaton<'a, S: Scalar> {
    measure: &'a MarkovMeasure<S>,
    hole: &'a HoleSpec,
    window: usize,
}

impl<'a, S: Scalar> Automaton<'a, S> {
    fn new(measure: &'a MarkovMeasure<S>, hole: &'a HoleSpec) -> Self {
        Automaton {
            measure,
            hole,
            window: hole.r().saturating_sub(1).max(1),
        }
    }

    fn start(&self, last_start: Option<usize>) -> Dist<S> {
        let mut d = Dist::new();
        for (i, p) in self.measure.stationary().iter().enumerate() {
            if !self.forbidden(&[i], 0, last_start) && p > &S::zero() {
                d.insert(vec![i], p.clone());
            }
        }
        d
    }

    /// A hole word ending at `pos` (the last symbol of `tail`) whose start
    /// is at most `last_start`; `None` means no start limit.
    fn forbidden(&self, tail: &[usize], pos: usize, last_start: Option<usize>) -> bool {
        self.hole.words().iter().any(|g| {
            let l = g.len();
            l <= tail.len()
                && l <= pos + 1
                && last_start.is_none_or(|m| pos + 1 - l <= m)
                && tail[tail.len() - l..] == *g.symbols()
        })
    }

    /// Appends the symbol at position `pos`.
    fn step(&self, d: &Dist<S>, pos: usize, last_start: Option<usize>) -> Dist<S> {
        let p = self.measure.p();
        let n = self.measure.model().n_symbols();
        let mut out: Dist<S> = Dist::new();
        let mut buf = Vec::with_capacity(self.window + 1);
        for (state, mass) in d {
            let last = *state.last().unwrap();
            for j in 0..n {
                let w = &p[(last, j)];
                if w.is_zero() {
                    continue;
                }
                buf.clear();
                buf.extend_from_slice(state);
                buf.push(j);
                if self.forbidden(&buf, pos, last_start) {
                    continue;
                }
                let key = buf[buf.len().saturating_sub(self.window)..].to_vec();
                let add = mass.clone() * w;
                match out.get_mut(&key) {
                    Some(x) => *x = x.clone() + add,
                    None => {
                        out.insert(key, add);
                    }
                }
            }
        }
        out
    }

    fn total(d: &Dist<S>) -> S {
        d.values().fold(S::zero(), |a, x| a + x.clone())
    }

    /// Survival masses for every `m` in `0..=max_m`. The prefix through
    /// position `m` forbids every hole word; the remaining `r - 1`
    /// positions forbid only words starting at or before `m`.
    fn series(&self, max_m: usize) -> Vec<S> {
        let tail = self.hole.r() - 1;
        let mut prefix = self.start(None);
        let mut out = Vec::with_capacity(max_m + 1);
        for m in 0..=max_m {
            if m > 0 {
                prefix = self.step(&prefix, m, None);
            }
            let mut d = prefix.clone();
            for k in 1..=tail {
                d = self.step(&d, m + k, Some(m));
            }
            out.push(Self::total(&d));
        }
        out
    }
}

/// `mu(W_m)`: measure of points whose first `m + 1` iterates avoid the hole.
pub fn survival_exact<S: Scalar>(measure: &MarkovMeasure<S>, hole: &HoleSpec, m: usize) -> Result<S> {
    Ok(survival_values(measure, hole, m)?.pop().unwrap())
}

fn survival_values<S: Scalar>(measure: &MarkovMeasure<S>, hole: &HoleSpec, max_m: usize) -> Result<Vec<S>> {
    let states = measure.model().language_size(hole.r().saturating_sub(1).max(1));
    if states > ENUMERATION_CAP as u128 {
        return Err(Error::TooLarge(hole.r()));
    }
    Ok(Automaton::new(measure, hole).series(max_m))
}

/// `mu(W_m)` by listing every allowed word of length `m + r`.
pub fn survival_enumerate<S: Scalar>(
    measure: &MarkovMeasure<S>,
    hole: &HoleSpec,
    m: usize,
) -> Result<S> {
    let r = hole.r();
    let n = m + r;
    let model = measure.model();
    if model.language_size(n) > ENUMERATION_CAP as u128 {
        return Err(Error::TooLarge(n));
    }
    let mut total = S::zero();
    'words: for w in model.allowed_words_capped(n, ENUMERATION_CAP)? {
        let s = w.symbols();
        for start in 0..=m {
            if hole
                .words()
                .iter()
                .any(|g| s[start..].starts_with(g.symbols()))
            {
                continue 'words;
            }
        }
        total = total + measure.cylinder_measure(&w)?;
    }
    Ok(total)
}

/// Survival probabilities `mu(W_m)` for `m = 0..=M` and their slopes.
#[derive(Clone, Debug)]
pub struct SurvivalSeries<S> {
    pub values: Vec<S>,
    /// `-(1/m) ln mu(W_m)`; `None` at `m = 0`.
    pub slopes: Vec<Option<f64>>,
}

impl<S: Scalar> SurvivalSeries<S> {
    pub fn ln_values(&self) -> Vec<f64> {
        self.values.iter().map(ln_scalar).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }
}

pub fn survival_series<S: Scalar>(
    measure: &MarkovMeasure<S>,
    hole: &HoleSpec,
    max_m: usize,
) -> Result<SurvivalSeries<S>> {
    let values = survival_values(measure, hole, max_m)?;
    let slopes = values
        .iter()
        .enumerate()
        .map(|(m, v)| (m > 0).then(|| -ln_scalar(v) / m as f64))
        .collect();
    Ok(SurvivalSeries { values, slopes })
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_string().parse::<f64>().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_string().parse::<f64>().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm that survives magnitudes below `f64::MIN_POSITIVE`.
pub fn ln_rational(q: &Rational) -> f64 {
    if !q.is_positive() {
        return f64::NEG_INFINITY;
    }
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

fn ln_scalar<S: Scalar>(x: &S) -> f64 {
    if S::EXACT {
        ln_rational(&x.to_rational())
    } else {
        let v = x.to_f64();
        if v > 0.0 {
            v.ln()
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Oracle estimate together with the series it came from.
#[derive(Clone, Debug)]
pub struct OracleEstimate<S> {
    pub result: EscapeRateResult,
    pub series: SurvivalSeries<S>,
    /// Unaccelerated last difference `ln mu(W_{M-1}) - ln mu(W_M)`.
    pub raw_rate: f64,
}

/// Aitken-accelerated rate from the decrements of `ln mu(W_m)`.
pub fn estimate_rate_oracle<S: Scalar>(
    measure: &MarkovMeasure<S>,
    hole: &HoleSpec,
    max_m: usize,
) -> Result<OracleEstimate<S>> {
    if max_m < 10 {
        return Err(Error::Inapplicable(format!(
            "oracle needs at least 10 terms, got {max_m}"
        )));
    }
    let series = survival_series(measure, hole, max_m)?;
    let mut diag = Diagnostics::for_hole(hole);
    diag.index_size = measure
        .model()
        .language_size(hole.r().saturating_sub(1).max(1)) as usize;
    diag.notes.push("oracle estimate, not certified".into());
    if series.values.iter().any(Zero::is_zero) {
        let result = EscapeRateResult::infinite(Method::Oracle, diag);
        return Ok(OracleEstimate {
            result,
            series,
            raw_rate: f64::INFINITY,
        });
    }
    let ln = series.ln_values();
    let d: Vec<f64> = ln.windows(2).map(|w| w[0] - w[1]).collect();
    let k = d.len();
    let (a, b, c) = (d[k - 3], d[k - 2], d[k - 1]);
    let second = c - 2.0 * b + a;
    let rate = if second.abs() > 1e-14 * c.abs().max(1.0) {
        let acc = c - (c - b) * (c - b) / second;
        // fall back when the extrapolation jumps past the raw sequence
        if (acc - c).abs() <= (c - a).abs().max(1e-12) * 10.0 {
            acc
        } else {
            c
        }
    } else {
        c
    };
    let exp_rate = rate.exp();
    let spread = (c - b).abs().max(f64::EPSILON);
    let result = EscapeRateResult {
        method: Method::Oracle,
        exp_rate,
        rate,
        exp_rate_lo: (rate - spread).exp(),
        exp_rate_hi: (rate + spread).exp(),
        enclosure: None,
        certified: false,
        diagnostics: diag,
    };
    Ok(OracleEstimate {
        result,
        series,
        raw_rate: c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::Matrix;
    use crate::genfun::{build_system, solve_system};
    use crate::scalar::{frac, int, parse_rational};
    use crate::sft::SftModel;
    use crate::spectral::sandwich_bounds;

    fn q(rows: &[&[&str]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_rational(s).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn example() -> (MarkovMeasure<Rational>, HoleSpec) {
        let model = SftModel::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![vec![1, 1, 1], vec![1, 1, 0], vec![1, 1, 1]],
        )
        .unwrap();
        let p = q(&[
            &["1/5", "2/5", "2/5"],
            &["9/10", "1/10", "0"],
            &["1/10", "1/10", "4/5"],
        ]);
        let m = MarkovMeasure::new(model, p).unwrap();
        let h = HoleSpec::parse(m.model(), &["12", "222", "3"]).unwrap();
        (m, h)
    }

    fn uniform2() -> MarkovMeasure<Rational> {
        let full = SftModel::full_shift(&["1", "2"]);
        MarkovMeasure::new(full, q(&[&["1/2", "1/2"], &["1/2", "1/2"]])).unwrap()
    }

    #[test]
    fn first_row_is_stationary() {
        let (m, h) = example();
        let row = brute_force_avoidance(&m, &h, 1).unwrap();
        assert_eq!(row.mu, [(0, frac(3, 11)), (1, frac(2, 11))]);
        assert!(row.nu.iter().all(|(_, x)| x.is_zero()));
        let row2 = brute_force_avoidance(&m, &h, 2).unwrap();
        let nu12 = &row2.nu.iter().find(|(u, _)| m.model().format_word(u) == "12").unwrap().1;
        assert_eq!(*nu12, frac(6, 55));
        let coeffs = solve_system(&build_system(&m, &h).unwrap())
            .unwrap()
            .survivor
            .taylor(3)
            .unwrap();
        assert_eq!(row2.total(), coeffs[2]);
    }

    #[test]
    fn exhausting_hole() {
        let m = uniform2();
        let h = HoleSpec::parse(m.model(), &["1", "2"]).unwrap();
        let row = brute_force_avoidance(&m, &h, 3).unwrap();
        assert!(row.mu.is_empty());
        let h2 = HoleSpec::parse(m.model(), &["11", "12", "21", "22"]).unwrap();
        assert!(survival_exact(&m, &h2, 0).unwrap().is_zero());
        let est = estimate_rate_oracle(&m, &h2, 10).unwrap();
        assert!(est.result.is_infinite());
    }

    #[test]
    fn dp_matches_enumeration() {
        let (m, h) = example();
        let s = survival_series(&m, &h, 8).unwrap();
        for k in 0..=8 {
            assert_eq!(s.values[k], survival_enumerate(&m, &h, k).unwrap(), "m = {k}");
        }
        assert!(s.is_monotone());
        let g = HoleSpec::parse(m.model(), &["121", "33"]).unwrap();
        for k in 0..=6 {
            assert_eq!(
                survival_exact(&m, &g, k).unwrap(),
                survival_enumerate(&m, &g, k).unwrap()
            );
        }
    }

    #[test]
    fn single_symbol_closed_form() {
        let m = uniform2();
        let h = HoleSpec::parse(m.model(), &["1"]).unwrap();
        let s = survival_series(&m, &h, 12).unwrap();
        for (k, v) in s.values.iter().enumerate() {
            assert_eq!(*v, frac(1, 1 << (k + 1)));
        }
        let est = estimate_rate_oracle(&m, &h, 12).unwrap();
        assert!((est.result.rate - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn example_rate_and_sandwich() {
        let (m, h) = example();
        let s = survival_series(&m, &h, 40).unwrap();
        assert!((s.slopes[40].unwrap() - 5f64.ln()).abs() < 0.02);
        let est = estimate_rate_oracle(&m, &h, 60).unwrap();
        assert!((est.result.rate - 5f64.ln()).abs() < 1e-3);
        for k in 0..=10 {
            let b = sandwich_bounds(&m, &h, k).unwrap();
            let v = &s.values[k];
            if let Some(u) = &b.upper {
                assert!(v <= u, "upper at m = {k}");
            }
            assert!(b.lower <= *v && b.lower_valid <= *v, "lower at m = {k}");
        }
    }

    #[test]
    fn path_lower_bound_where_the_short_exponent_fails() {
        let (m, _) = example();
        let h = HoleSpec::parse(m.model(), &["21", "33"]).unwrap();
        let v = survival_exact(&m, &h, 0).unwrap();
        assert_eq!(v, frac(2, 5));
        let b = sandwich_bounds(&m, &h, 0).unwrap();
        assert_eq!(b.lower, frac(6, 11));
        assert!(b.lower > v);
        assert!(b.lower_valid <= v);
        let single = HoleSpec::parse(m.model(), &["3"]).unwrap();
        let s = survival_series(&m, &single, 8).unwrap();
        for k in 0..=8 {
            assert!(sandwich_bounds(&m, &single, k).unwrap().lower_valid <= s.values[k]);
        }
    }

    #[test]
    fn ln_of_tiny_rationals() {
        let x = Rational::new(BigInt::from(1), BigInt::from(10).pow(400));
        assert!((ln_rational(&x) + 400.0 * 10f64.ln()).abs() < 1e-9);
        assert!((ln_rational(&frac(3, 7)) - (3f64 / 7.0).ln()).abs() < 1e-15);
        assert_eq!(ln_rational(&int(0)), f64::NEG_INFINITY);
    }

    #[test]
    fn float_dp() {
        let (m, h) = example();
        let f = m.to_float();
        let a = survival_exact(&f, &h, 10).unwrap();
        let b = survival_exact(&m, &h, 10).unwrap();
        assert!((a - crate::scalar::rational_to_f64(&b)).abs() < 1e-15);
    }
}
