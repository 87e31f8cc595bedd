//! Markov measures on an SFT, their higher-block recodings and the Parry
//! measure.

use crate::algebra::linalg::{perron_f64, rational_matrix_to_f64};
use crate::algebra::matrix::{solve_linear, Matrix};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::sft::{HigherBlockShift, SftModel, Word};

/// Row-sum tolerance for float-mode stochastic matrices.
pub const FLOAT_STOCHASTIC_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct MarkovMeasure<S: Scalar> {
    model: SftModel,
    p: Matrix<S>,
    stationary: Vec<S>,
}

pub type ExactMeasure = MarkovMeasure<Rational>;
pub type FloatMeasure = MarkovMeasure<f64>;

impl<S: Scalar> MarkovMeasure<S> {
    /// Validates `p` against the model and solves for the stationary vector.
    pub fn new(model: SftModel, p: Matrix<S>) -> Result<Self> {
        if !model.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        let n = model.n_symbols();
        if p.rows() != n || p.cols() != n {
            return Err(Error::Dimension(format!(
                "stochastic matrix is {}x{}, model has {n} symbols",
                p.rows(),
                p.cols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let x = &p[(i, j)];
                if *x < S::zero() {
                    return Err(Error::NegativeEntry { row: i, col: j });
                }
                if (*x > S::zero()) != model.allows(i, j) {
                    return Err(Error::Incompatible { row: i, col: j });
                }
            }
        }
        check_stochastic(&p)?;
        let stationary = stationary_vector(&p)?;
        Ok(MarkovMeasure {
            model,
            p,
            stationary,
        })
    }

    pub fn model(&self) -> &SftModel {
        &self.model
    }

    pub fn p(&self) -> &Matrix<S> {
        &self.p
    }

    pub fn stationary(&self) -> &[S] {
        &self.stationary
    }

    pub fn is_exact(&self) -> bool {
        S::EXACT
    }

    /// Product of transition probabilities along `w` (1 for a single symbol).
    pub fn path_weight(&self, w: &[usize]) -> S {
        w.windows(2)
            .fold(S::one(), |acc, e| acc * self.p[(e[0], e[1])].clone())
    }

    /// `mu(C_w) = p_{w_1} P_{w_1 w_2} ... P_{w_{n-1} w_n}`.
    pub fn cylinder_measure(&self, w: &Word) -> Result<S> {
        if !self.model.is_allowed(w.symbols()) {
            return Err(Error::NotAllowed(self.model.format_word(w)));
        }
        Ok(self.stationary[w.first()].clone() * self.path_weight(w.symbols()))
    }

    pub fn higher_block(&self, n: usize) -> Result<HigherBlockMeasure<S>> {
        HigherBlockMeasure::new(self, n)
    }

    /// The same measure with float weights.
    pub fn to_float(&self) -> FloatMeasure {
        MarkovMeasure {
            model: self.model.clone(),
            p: self.p.map(Scalar::to_f64),
            stationary: self.stationary.iter().map(Scalar::to_f64).collect(),
        }
    }
}

fn check_stochastic<S: Scalar>(p: &Matrix<S>) -> Result<()> {
    for (i, s) in p.row_sums().into_iter().enumerate() {
        if !s.approx_eq(&S::one(), FLOAT_STOCHASTIC_TOL) {
            return Err(Error::NotStochastic {
                row: i,
                sum: format!("{s:?}"),
            });
        }
    }
    Ok(())
}

/// Solves `p^T P = p^T`, `sum p = 1`. Float results are polished by a few
/// steps of the lazy chain `(P + I) / 2`.
fn stationary_vector<S: Scalar>(p: &Matrix<S>) -> Result<Vec<S>> {
    let n = p.rows();
    let mut m = Matrix::from_fn(n, n, |i, j| {
        let d = if i == j { S::one() } else { S::zero() };
        p[(j, i)].clone() - d
    });
    for j in 0..n {
        m[(n - 1, j)] = S::one();
    }
    let mut rhs = vec![S::zero(); n];
    rhs[n - 1] = S::one();
    let mut x = solve_linear(&m, &rhs).map_err(|_| Error::NotIrreducible)?;
    if !S::EXACT {
        let half = S::one() / (S::one() + S::one());
        for _ in 0..1000 {
            let y = p.vec_mul(&x);
            let residual = y
                .iter()
                .zip(&x)
                .map(|(a, b)| (a.clone() - b.clone()).abs().to_f64())
                .fold(0.0, f64::max);
            if residual <= 1e-14 {
                break;
            }
            x = y
                .into_iter()
                .zip(&x)
                .map(|(a, b)| (a + b.clone()) * half.clone())
                .collect();
            let total = x.iter().fold(S::zero(), |acc, v| acc + v.clone());
            x = x.into_iter().map(|v| v / total.clone()).collect();
        }
    }
    Ok(x)
}

/// `P_n` and `Lambda_n` on the higher-block alphabet `L_n`.
#[derive(Clone, Debug)]
pub struct HigherBlockMeasure<S: Scalar> {
    pub shift: HigherBlockShift,
    pub p: Matrix<S>,
    pub lambda: Vec<S>,
}

impl<S: Scalar> HigherBlockMeasure<S> {
    pub fn new(measure: &MarkovMeasure<S>, n: usize) -> Result<Self> {
        let shift = measure.model.higher_block(n)?;
        let size = shift.len();
        let words = shift.words();
        let a = shift.adjacency();
        let p = Matrix::from_fn(size, size, |i, j| {
            if a[(i, j)] == 1 {
                measure.p[(words[i].last(), words[j].last())].clone()
            } else {
                S::zero()
            }
        });
        let lambda = words
            .iter()
            .map(|w| measure.cylinder_measure(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(HigherBlockMeasure { shift, p, lambda })
    }

    pub fn lambda_min(&self) -> S {
        min_of(&self.lambda)
    }

    pub fn lambda_max(&self) -> S {
        max_of(&self.lambda)
    }
}

fn min_of<S: Scalar>(v: &[S]) -> S {
    v.iter()
        .cloned()
        .reduce(|a, b| if b < a { b } else { a })
        .unwrap_or_else(S::zero)
}

fn max_of<S: Scalar>(v: &[S]) -> S {
    v.iter()
        .cloned()
        .reduce(|a, b| if b > a { b } else { a })
        .unwrap_or_else(S::zero)
}

/// Measure of maximal entropy: `P_ij = A_ij v_j / (lambda v_i)`,
/// `p_i = u_i v_i / u^T v` from the Perron data of `A`.
pub fn parry_measure(model: &SftModel) -> Result<FloatMeasure> {
    if !model.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let a = rational_matrix_to_f64(&model.adjacency_as::<Rational>());
    let right = perron_f64(&a, 1e-14);
    let left = perron_f64(&a.transpose(), 1e-14);
    let (lambda, v, u) = (right.value, right.vector, left.vector);
    let n = model.n_symbols();
    let mut p = Matrix::from_fn(n, n, |i, j| a[(i, j)] * v[j] / (lambda * v[i]));
    // remove the last bits of rounding from the row sums
    for (i, s) in p.row_sums().into_iter().enumerate() {
        for j in 0..n {
            p[(i, j)] /= s;
        }
    }
    let uv: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
    let stationary = u.iter().zip(&v).map(|(a, b)| a * b / uv).collect();
    check_stochastic(&p)?;
    Ok(MarkovMeasure {
        model: model.clone(),
        p,
        stationary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int, parse_rational};
    use num_traits::{One, Zero};

    fn q(rows: &[&[&str]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_rational(s).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn three() -> SftModel {
        SftModel::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![vec![1, 1, 1], vec![1, 1, 0], vec![1, 1, 1]],
        )
        .unwrap()
    }

    fn example_measure() -> ExactMeasure {
        let p = q(&[
            &["1/5", "2/5", "2/5"],
            &["9/10", "1/10", "0"],
            &["1/10", "1/10", "4/5"],
        ]);
        MarkovMeasure::new(three(), p).unwrap()
    }

    fn golden() -> SftModel {
        SftModel::new(vec!["1".into(), "2".into()], vec![vec![0, 1], vec![1, 1]]).unwrap()
    }

    #[test]
    fn stationary_vectors() {
        let m = example_measure();
        assert_eq!(m.stationary(), &[frac(3, 11), frac(2, 11), frac(6, 11)]);
        let full = SftModel::full_shift(&["1", "2"]);
        let u = MarkovMeasure::new(full, q(&[&["1/2", "1/2"], &["0.5", "0.5"]])).unwrap();
        assert_eq!(u.stationary(), &[frac(1, 2), frac(1, 2)]);
        let f = m.to_float();
        let again = MarkovMeasure::new(three(), f.p().clone()).unwrap();
        for (a, b) in again.stationary().iter().zip([3.0 / 11.0, 2.0 / 11.0, 6.0 / 11.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_matrices() {
        let e = MarkovMeasure::new(golden(), q(&[&["1/2", "1/2"], &["1/2", "1/2"]]));
        assert_eq!(e.unwrap_err(), Error::Incompatible { row: 0, col: 0 });
        let e = MarkovMeasure::new(golden(), q(&[&["0", "1"], &["1/2", "1/3"]]));
        assert!(matches!(e, Err(Error::NotStochastic { row: 1, .. })));
        let loops = SftModel::new(vec!["a".into(), "b".into()], vec![vec![1, 0], vec![0, 1]]).unwrap();
        let e = MarkovMeasure::new(loops, q(&[&["1", "0"], &["0", "1"]]));
        assert_eq!(e.unwrap_err(), Error::NotIrreducible);
    }

    #[test]
    fn cylinders() {
        let m = example_measure();
        let w = m.model().parse_word("12").unwrap();
        assert_eq!(m.cylinder_measure(&w).unwrap(), frac(6, 55));
        let s = m.model().parse_word("3").unwrap();
        assert_eq!(m.cylinder_measure(&s).unwrap(), frac(6, 11));
        let bad = Word::new(vec![1, 2]).unwrap();
        assert!(matches!(m.cylinder_measure(&bad), Err(Error::NotAllowed(_))));
        let full = SftModel::full_shift(&["1", "2"]);
        let u = MarkovMeasure::new(full, q(&[&["1/2", "1/2"], &["1/2", "1/2"]])).unwrap();
        let w = u.model().parse_word("12211").unwrap();
        assert_eq!(u.cylinder_measure(&w).unwrap(), frac(1, 32));
    }

    #[test]
    fn higher_block_measure_is_stationary() {
        let m = example_measure();
        for n in 1..=4 {
            let hb = m.higher_block(n).unwrap();
            assert_eq!(hb.p.vec_mul(&hb.lambda), hb.lambda);
            for s in hb.p.row_sums() {
                assert_eq!(s, int(1));
            }
            let total = hb.lambda.iter().fold(Rational::zero(), |a, b| a + b);
            assert!(total.is_one());
        }
        let hb = m.higher_block(1).unwrap();
        assert_eq!(&hb.p, m.p());
    }

    #[test]
    fn golden_mean_p2() {
        let m = MarkovMeasure::new(golden(), q(&[&["0", "1"], &["1/3", "2/3"]])).unwrap();
        let hb = m.higher_block(2).unwrap();
        let (a, b) = (frac(1, 3), frac(2, 3));
        let z = Rational::zero;
        assert_eq!(
            hb.p.to_rows(),
            vec![
                vec![z(), a.clone(), b.clone()],
                vec![int(1), z(), z()],
                vec![z(), a, b]
            ]
        );
    }

    #[test]
    fn parry() {
        let full = parry_measure(&SftModel::full_shift(&["1", "2"])).unwrap();
        for x in full.p().to_rows().concat() {
            assert!((x - 0.5).abs() < 1e-14);
        }
        let g = parry_measure(&golden()).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(g.p()[(0, 0)], 0.0);
        assert!((g.p()[(1, 0)] - 1.0 / (phi * phi)).abs() < 1e-12);
        assert!((g.p()[(1, 1)] - 1.0 / phi).abs() < 1e-12);
        let t = parry_measure(&three()).unwrap();
        let s: f64 = t.stationary().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        let back = t.p().vec_mul(t.stationary());
        for (a, b) in back.iter().zip(t.stationary()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
