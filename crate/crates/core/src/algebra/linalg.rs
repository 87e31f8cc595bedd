//! Characteristic polynomials, adjugates, fraction-free elimination over
//! `Q[z]`, and Perron roots of non-negative matrices.

use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::algebra::matrix::Matrix;
use crate::algebra::poly::Polynomial;
use crate::algebra::ratfunc::RationalFunction;
use crate::algebra::roots::{isolate_largest_real_root, RootInterval};
use crate::error::{Error, Result};
use crate::scalar::{int, rational_to_f64, Rational, Scalar};

pub type PolyMatrix = Matrix<Polynomial>;

fn exact<S: Scalar>(m: &Matrix<S>) -> Result<Matrix<Rational>> {
    if !S::EXACT {
        return Err(Error::FloatModeUnsupported);
    }
    Ok(m.map(Scalar::to_rational))
}

fn require_square<T: Clone>(m: &Matrix<T>) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}

/// `det(zI - M)` by the Faddeev–LeVerrier recurrence.
pub fn char_poly<S: Scalar>(m: &Matrix<S>) -> Result<Polynomial> {
    require_square(m)?;
    let a = exact(m)?;
    Ok(faddeev_leverrier(&a).0)
}

/// Coefficients `c_0..c_n` of `det(zI - A)` together with the matrices
/// `M_1..M_n` of the recurrence (`M_k = A M_{k-1} + c_{n-k+1} I`).
fn faddeev_leverrier(a: &Matrix<Rational>) -> (Polynomial, Vec<Matrix<Rational>>) {
    let n = a.rows();
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    let mut ms = Vec::with_capacity(n);
    let mut prev: Matrix<Rational> = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut mk = a.mul(&prev);
        for i in 0..n {
            mk[(i, i)] += &c[n - k + 1];
        }
        let t = a.mul(&mk).trace();
        c[n - k] = -t / int(k as i64);
        prev = mk.clone();
        ms.push(mk);
    }
    (Polynomial::new(c), ms)
}

/// `det(I - zM)`, the coefficient reversal of the characteristic polynomial.
pub fn det_one_minus_z<S: Scalar>(m: &Matrix<S>) -> Result<Polynomial> {
    Ok(char_poly(m)?.reversed(m.rows()))
}

/// `I - zM` as a polynomial matrix.
pub fn one_minus_z<S: Scalar>(m: &Matrix<S>) -> Result<PolyMatrix> {
    let a = exact(m)?;
    Ok(Matrix::from_fn(a.rows(), a.cols(), |i, j| {
        let delta = if i == j { Rational::one() } else { Rational::zero() };
        Polynomial::new(vec![delta, -a[(i, j)].clone()])
    }))
}

/// `adj(I - zM)`. Uses cofactors for small sizes and the Faddeev–LeVerrier
/// coefficient expansion beyond that.
pub fn adjugate_poly<S: Scalar>(m: &Matrix<S>) -> Result<PolyMatrix> {
    require_square(m)?;
    if m.rows() <= 8 {
        adjugate_cofactor(m)
    } else {
        adjugate_expansion(m)
    }
}

pub fn adjugate_cofactor<S: Scalar>(m: &Matrix<S>) -> Result<PolyMatrix> {
    require_square(m)?;
    let a = one_minus_z(m)?;
    let n = a.rows();
    if n == 1 {
        return Ok(Matrix::filled(1, 1, Polynomial::one()));
    }
    let mut adj = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // (i, j) entry is the (j, i) cofactor
            let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
                let r = if r < j { r } else { r + 1 };
                let c = if c < i { c } else { c + 1 };
                a[(r, c)].clone()
            });
            let d = bareiss_det(&minor);
            adj[(i, j)] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    Ok(adj)
}

/// With `det(I - zM) = sum_i a_i z^(N-i)`:
/// `adj(I - zM) = sum_{j+k <= N-1} a_{j+k+1} z^(N-1-j) M^k`.
pub fn adjugate_expansion<S: Scalar>(m: &Matrix<S>) -> Result<PolyMatrix> {
    require_square(m)?;
    let a = exact(m)?;
    let n = a.rows();
    let alpha = faddeev_leverrier(&a).0;
    let mut powers = vec![Matrix::<Rational>::identity(n)];
    for k in 1..n {
        powers.push(powers[k - 1].mul(&a));
    }
    let mut adj: PolyMatrix = Matrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let mut coeffs = vec![Rational::zero(); n];
            for (k, mk) in powers.iter().enumerate() {
                let x = &mk[(r, c)];
                if x.is_zero() {
                    continue;
                }
                for j in 0..n - k {
                    coeffs[n - 1 - j] += alpha.coeff(j + k + 1) * x;
                }
            }
            adj[(r, c)] = Polynomial::new(coeffs);
        }
    }
    Ok(adj)
}

/// Determinant over `Q[z]` by Bareiss fraction-free elimination.
pub fn bareiss_det(m: &PolyMatrix) -> Polynomial {
    let n = m.rows();
    if n == 0 {
        return Polynomial::one();
    }
    let mut a = m.clone();
    let mut prev = Polynomial::one();
    let mut negate = false;
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                Some(r) => {
                    a.swap_rows(k, r);
                    negate = !negate;
                }
                None => return Polynomial::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = num
                    .div_exact(&prev)
                    .expect("Bareiss quotients are exact");
            }
            a[(i, k)] = Polynomial::zero();
        }
        prev = a[(k, k)].clone();
    }
    let d = a[(n - 1, n - 1)].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Solves `M x = rhs` over `Q(z)` by Cramer's rule with Bareiss determinants.
pub fn solve_poly_system(m: &PolyMatrix, rhs: &[Polynomial]) -> Result<Vec<RationalFunction>> {
    require_square(m)?;
    let n = m.rows();
    if rhs.len() != n {
        return Err(Error::Dimension(format!(
            "{n}x{n} system with rhs of length {}",
            rhs.len()
        )));
    }
    let det = bareiss_det(m);
    if det.is_zero() {
        return Err(Error::SingularSystem);
    }
    (0..n)
        .map(|col| {
            let mut mi = m.clone();
            for (r, b) in rhs.iter().enumerate() {
                mi[(r, col)] = b.clone();
            }
            RationalFunction::new(bareiss_det(&mi), det.clone())
        })
        .collect()
}

/// Perron root of a non-negative matrix.
#[derive(Clone, Debug)]
pub struct SpectralRadius {
    pub value: f64,
    /// Guaranteed enclosure `[lo, hi]` (up to float rounding in float mode).
    pub lo: f64,
    pub hi: f64,
    /// Isolating interval for the exact root, exact mode only.
    pub exact: Option<RootInterval>,
    pub certified: bool,
}

impl SpectralRadius {
    fn from_interval(iv: RootInterval) -> Self {
        SpectralRadius {
            value: iv.value(),
            lo: iv.lo_f64(),
            hi: iv.hi_f64(),
            exact: Some(iv),
            certified: true,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(iv) => iv.hi.is_zero(),
            None => self.hi == 0.0,
        }
    }
}

/// Strongly connected components that carry at least one cycle.
pub fn cyclic_components<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut g = DiGraph::<(), ()>::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if !m[(i, j)].is_zero() {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .filter(|c| c.len() > 1 || !m[(c[0], c[0])].is_zero())
        .collect();
    comps.sort();
    comps
}

pub fn is_irreducible<S: Scalar>(m: &Matrix<S>) -> bool {
    let comps = cyclic_components(m);
    comps.len() == 1 && comps[0].len() == m.rows()
}

fn check_nonnegative<S: Scalar>(m: &Matrix<S>) -> Result<()> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m[(i, j)] < S::zero() {
                return Err(Error::NegativeEntry { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Spectral radius of a non-negative matrix. Exact matrices get a certified
/// isolating interval; float matrices use shifted power iteration per
/// strongly connected component with Collatz–Wielandt bounds.
pub fn spectral_radius<S: Scalar>(m: &Matrix<S>, tol: f64) -> Result<SpectralRadius> {
    require_square(m)?;
    check_nonnegative(m)?;
    let comps = cyclic_components(m);
    if comps.is_empty() {
        return Ok(if S::EXACT {
            SpectralRadius::from_interval(RootInterval::exact(Rational::zero()))
        } else {
            SpectralRadius {
                value: 0.0,
                lo: 0.0,
                hi: 0.0,
                exact: None,
                certified: true,
            }
        });
    }
    if S::EXACT {
        let a = m.map(Scalar::to_rational);
        // the char poly of a block-triangular matrix factors over its blocks
        let mut poly = Polynomial::one();
        let mut bound = Rational::zero();
        for c in &comps {
            let sub = a.principal(c);
            poly = poly * faddeev_leverrier(&sub).0;
            for s in sub.row_sums() {
                bound = bound.max(s);
            }
        }
        let lower = -(&bound + Rational::one());
        let iv = isolate_largest_real_root(&poly, &lower, Some(bound), tol)
            .expect("a cyclic component has a positive Perron root");
        return Ok(SpectralRadius::from_interval(iv));
    }
    let f = m.map(Scalar::to_f64);
    let mut best: Option<SpectralRadius> = None;
    for c in &comps {
        let p = perron_f64(&f.principal(c), tol);
        let r = SpectralRadius {
            value: p.value,
            lo: p.lo,
            hi: p.hi,
            exact: None,
            certified: p.certified,
        };
        best = match best {
            Some(b) if b.value >= r.value => Some(SpectralRadius {
                lo: b.lo.max(r.lo),
                hi: b.hi.max(r.hi),
                certified: b.certified && r.certified,
                ..b
            }),
            Some(b) => Some(SpectralRadius {
                lo: r.lo.max(b.lo),
                hi: r.hi.max(b.hi),
                certified: b.certified && r.certified,
                ..r
            }),
            None => Some(r),
        };
    }
    Ok(best.expect("nonempty component list"))
}

/// Perron data of an irreducible non-negative float matrix.
#[derive(Clone, Debug)]
pub struct PerronF64 {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    /// Right Perron vector normalized to sum 1.
    pub vector: Vec<f64>,
    pub certified: bool,
}

/// Power iteration on `M + I` (primitive whenever `M` is irreducible),
/// starting from the all-ones vector.
pub fn perron_f64(m: &Matrix<f64>, tol: f64) -> PerronF64 {
    const MAX_ITER: usize = 200_000;
    let n = m.rows();
    let mut x = vec![1.0 / n as f64; n];
    let mut lo = 0.0;
    let mut hi = f64::INFINITY;
    let mut certified = false;
    for _ in 0..MAX_ITER {
        let mut y = m.mul_vec(&x);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += xi;
        }
        let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
        for (yi, xi) in y.iter().zip(&x) {
            let r = yi / xi;
            rmin = rmin.min(r);
            rmax = rmax.max(r);
        }
        lo = f64::max(lo, rmin - 1.0);
        hi = f64::min(hi, rmax - 1.0);
        let s: f64 = y.iter().sum();
        x = y.into_iter().map(|v| v / s).collect();
        if hi - lo <= tol * hi.abs().max(1.0) {
            certified = true;
            break;
        }
    }
    let lo = lo.max(0.0);
    PerronF64 {
        value: 0.5 * (lo + hi),
        lo,
        hi,
        vector: x,
        certified,
    }
}

pub fn rational_matrix_to_f64(m: &Matrix<Rational>) -> Matrix<f64> {
    m.map(rational_to_f64)
}
