//! Escape rates from the survivor generating function and weighted
//! correlation polynomials.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::algebra::linalg::{adjugate_poly, det_one_minus_z, solve_poly_system, PolyMatrix};
use crate::algebra::matrix::Matrix;
use crate::algebra::poly::Polynomial;
use crate::algebra::ratfunc::RationalFunction;
use crate::algebra::roots::{compare_smallest_roots, isolate_smallest_real_root};
use crate::error::{Error, Result};
use crate::hole::HoleSpec;
use crate::measure::MarkovMeasure;
use crate::scalar::{format_rational, Rational, Scalar};
use crate::sft::Word;
use crate::spectral::{
    open_system, theta_upper_bound, Diagnostics, EscapeRateResult, Method, Tolerances,
};

fn exact_p<S: Scalar>(measure: &MarkovMeasure<S>) -> Result<(Matrix<Rational>, Vec<Rational>)> {
    if !S::EXACT {
        return Err(Error::FloatModeUnsupported);
    }
    Ok((
        measure.p().map(Scalar::to_rational),
        measure.stationary().iter().map(Scalar::to_rational).collect(),
    ))
}

fn path_weight(p: &Matrix<Rational>, w: &[usize]) -> Rational {
    w.windows(2)
        .fold(Rational::one(), |acc, e| acc * &p[(e[0], e[1])])
}

/// Overlap structure of `u` against `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationData {
    pub u: Word,
    pub v: Word,
    /// Shifts `s` with `u_{s+1..l} = v_{1..l-s}`.
    pub overlaps: Vec<usize>,
    /// `delta_{s,u,v}` for each entry of `overlaps`.
    pub deltas: Vec<Rational>,
    pub tau: Polynomial,
    /// `tau_{u,v}` without its `s = |u| - 1` term.
    pub tau_tilde: Polynomial,
    /// Product of the transition weights along `v`.
    pub delta_v: Rational,
}

pub fn correlation<S: Scalar>(
    measure: &MarkovMeasure<S>,
    u: &Word,
    v: &Word,
) -> Result<CorrelationData> {
    let (p, _) = exact_p(measure)?;
    correlation_exact(&p, u, v)
}

fn correlation_exact(p: &Matrix<Rational>, u: &Word, v: &Word) -> Result<CorrelationData> {
    let (l, m) = (u.len(), v.len());
    if l < 2 || m < 2 {
        return Err(Error::LengthOne);
    }
    let (us, vs) = (u.symbols(), v.symbols());
    let start = l.saturating_sub(m);
    let mut overlaps = Vec::new();
    let mut deltas = Vec::new();
    let mut coeffs = vec![Rational::zero(); m];
    let mut tilde_drop = Rational::zero();
    for s in start..l {
        if us[s..] != vs[..l - s] {
            continue;
        }
        // P along v from position l - s (1-based) to m
        let delta = path_weight(p, &vs[l - s - 1..]);
        coeffs[m + s - l] += &delta;
        if s == l - 1 {
            tilde_drop = delta.clone();
        }
        overlaps.push(s);
        deltas.push(delta);
    }
    let tau = Polynomial::new(coeffs);
    let tau_tilde = &tau - &Polynomial::monomial(tilde_drop, m - 1);
    Ok(CorrelationData {
        u: u.clone(),
        v: v.clone(),
        overlaps,
        deltas,
        tau,
        tau_tilde,
        delta_v: path_weight(p, vs),
    })
}

/// A word is prime when its only self-overlap is the trivial one.
pub fn is_prime(u: &Word) -> bool {
    let s = u.symbols();
    (1..s.len()).all(|k| s[k..] != s[..s.len() - k])
}

/// The linear system for the generating functions `F_i` (`i` outside the
/// hole) and `G_u` (`u` a hole word of length at least 2).
#[derive(Clone, Debug)]
pub struct GenFunSystem {
    pub matrix: PolyMatrix,
    pub rhs: Vec<Polynomial>,
    /// Symbols not in the hole, indexing the `F` block.
    pub free_symbols: Vec<usize>,
    /// Hole words of length at least 2, indexing the `G` block.
    pub words: Vec<Word>,
    /// Hole symbols carrying their own generating function rows, if any.
    pub symbol_terms: Vec<usize>,
}

impl GenFunSystem {
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }
}

pub fn build_system<S: Scalar>(measure: &MarkovMeasure<S>, hole: &HoleSpec) -> Result<GenFunSystem> {
    build_from_words(measure, hole.words(), false)
}

/// Same system extended by the generating functions of the hole symbols.
/// They feed nothing back, so the survivor function is unchanged.
pub fn build_system_with_symbol_terms<S: Scalar>(
    measure: &MarkovMeasure<S>,
    hole: &HoleSpec,
) -> Result<GenFunSystem> {
    build_from_words(measure, hole.words(), true)
}

/// Assembles the system from a raw word list, which must be reduced.
pub fn build_from_words<S: Scalar>(
    measure: &MarkovMeasure<S>,
    words: &[Word],
    symbol_terms: bool,
) -> Result<GenFunSystem> {
    let (p, pi) = exact_p(measure)?;
    if words.is_empty() {
        return Err(Error::EmptyCollection);
    }
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            if i != j && a.contains(b) {
                return Err(Error::NotReduced);
            }
        }
    }
    let n = measure.model().n_symbols();
    let hole_symbols: Vec<usize> = words.iter().filter(|w| w.len() == 1).map(Word::first).collect();
    let free: Vec<usize> = (0..n).filter(|i| !hole_symbols.contains(i)).collect();
    let long: Vec<Word> = words.iter().filter(|w| w.len() >= 2).cloned().collect();
    let extra = if symbol_terms { hole_symbols } else { Vec::new() };
    let (ns, nw) = (free.len(), long.len());
    let size = ns + nw + extra.len();
    let z = Polynomial::z();
    let mut m: PolyMatrix = Matrix::zeros(size, size);
    let mut rhs = vec![Polynomial::zero(); size];

    // F rows: F_i - z sum_j P_ji F_j + sum_v [i = t(v)] G_v = z p_i
    for (a, &i) in free.iter().enumerate() {
        for (b, &j) in free.iter().enumerate() {
            let delta = if a == b { Polynomial::one() } else { Polynomial::zero() };
            m[(a, b)] = delta - z.clone() * Polynomial::constant(p[(j, i)].clone());
        }
        for (c, v) in long.iter().enumerate() {
            if v.last() == i {
                m[(a, ns + c)] = Polynomial::one();
            }
        }
        rhs[a] = Polynomial::monomial(pi[i].clone(), 1);
    }
    // G rows: z^{|u|-1} delta_u F_{i(u)} - sum_v tau~_{v,u} G_v = 0
    for (c, u) in long.iter().enumerate() {
        let row = ns + c;
        if let Some(b) = free.iter().position(|&j| j == u.first()) {
            m[(row, b)] = Polynomial::monomial(path_weight(&p, u.symbols()), u.len() - 1);
        }
        for (d, v) in long.iter().enumerate() {
            m[(row, ns + d)] = -correlation_exact(&p, v, u)?.tau_tilde;
        }
    }
    // G_k rows for hole symbols: G_k - z sum_j P_jk F_j = z p_k
    for (e, &k) in extra.iter().enumerate() {
        let row = ns + nw + e;
        m[(row, row)] = Polynomial::one();
        for (b, &j) in free.iter().enumerate() {
            m[(row, b)] = -(z.clone() * Polynomial::constant(p[(j, k)].clone()));
        }
        rhs[row] = Polynomial::monomial(pi[k].clone(), 1);
    }
    Ok(GenFunSystem {
        matrix: m,
        rhs,
        free_symbols: free,
        words: long,
        symbol_terms: extra,
    })
}

/// Solved system: every generating function plus their survivor sum.
#[derive(Clone, Debug)]
pub struct GenFunSolution {
    pub f: Vec<(usize, RationalFunction)>,
    pub g: Vec<(Word, RationalFunction)>,
    pub symbol_terms: Vec<(usize, RationalFunction)>,
    pub survivor: RationalFunction,
}

pub fn solve_system(system: &GenFunSystem) -> Result<GenFunSolution> {
    let x = solve_poly_system(&system.matrix, &system.rhs)?;
    let ns = system.free_symbols.len();
    let nw = system.words.len();
    let f: Vec<(usize, RationalFunction)> = system
        .free_symbols
        .iter()
        .copied()
        .zip(x[..ns].iter().cloned())
        .collect();
    let g = system.words.iter().cloned().zip(x[ns..ns + nw].iter().cloned()).collect();
    let symbol_terms = system
        .symbol_terms
        .iter()
        .copied()
        .zip(x[ns + nw..].iter().cloned())
        .collect();
    let survivor = f
        .iter()
        .fold(RationalFunction::polynomial(Polynomial::zero()), |acc, (_, fi)| &acc + fi);
    Ok(GenFunSolution {
        f,
        g,
        symbol_terms,
        survivor,
    })
}

/// `F(z) = sum_i F_i(z)` over symbols outside the hole, in lowest terms.
pub fn survivor_genfun<S: Scalar>(measure: &MarkovMeasure<S>, hole: &HoleSpec) -> Result<RationalFunction> {
    Ok(solve_system(&build_system(measure, hole)?)?.survivor)
}

/// `exp(rho)` as the smallest pole of `F` in `(1, inf)`.
pub fn escape_rate_genfun<S: Scalar>(
    measure: &MarkovMeasure<S>,
    hole: &HoleSpec,
    tol: &Tolerances,
) -> Result<EscapeRateResult> {
    let system = build_system(measure, hole)?;
    let survivor = solve_system(&system)?.survivor;
    let mut diag = Diagnostics::for_hole(hole);
    diag.index_size = system.size();
    let theta = theta_upper_bound(measure, hole);
    diag.theta_bound = theta.as_ref().map(|t| t.bound);
    let den = survivor.denominator();
    if den.eval(&Rational::one()).is_zero() {
        diag.notes.push("denominator vanishes at z = 1".into());
    }
    if den.is_constant() {
        // finitely many survivors
        return Ok(EscapeRateResult::infinite(Method::Generating, diag));
    }
    let iv = smallest_root_above_one(den, theta.as_ref().map(|t| &t.theta.interval.lo), tol)?;
    Ok(EscapeRateResult::from_exact(Method::Generating, iv, diag))
}

/// Root search in `(1, cap]`, with `cap = 1 / theta` when that bound applies.
fn smallest_root_above_one(
    p: &Polynomial,
    theta_lo: Option<&Rational>,
    tol: &Tolerances,
) -> Result<crate::algebra::roots::RootInterval> {
    let cauchy = p.cauchy_bound();
    let cap = match theta_lo {
        Some(t) if !t.is_zero() => t.recip().min(cauchy),
        _ => cauchy,
    };
    isolate_smallest_real_root(p, &Rational::one(), Some(cap.clone()), tol.root_width)
        .ok_or_else(|| Error::NoPoleFound(format_rational(&cap)))
}

/// `f_u(z) = tau~_u(z) det(I - zP) + z^{r-1} delta_u adj(I - zP)_{u_r, u_1}`.
pub fn single_word_poly<S: Scalar>(measure: &MarkovMeasure<S>, u: &Word) -> Result<Polynomial> {
    let (p, _) = exact_p(measure)?;
    let corr = correlation_exact(&p, u, u)?;
    let det = det_one_minus_z(&p)?;
    let adj = adjugate_poly(&p)?;
    let r = u.len();
    let tail = Polynomial::monomial(corr.delta_v.clone(), r - 1) * &adj[(u.last(), u.first())];
    Ok(&corr.tau_tilde * &det + tail)
}

/// `exp(rho(C_u))` as the smallest root of `f_u` in `(1, inf)`.
pub fn escape_rate_poly<S: Scalar>(
    measure: &MarkovMeasure<S>,
    u: &Word,
    tol: &Tolerances,
) -> Result<EscapeRateResult> {
    let f = single_word_poly(measure, u)?;
    let hole = HoleSpec::reduce(measure.model(), vec![u.clone()])?;
    let mut diag = Diagnostics::for_hole(&hole);
    diag.index_size = measure.model().n_symbols();
    let theta = theta_upper_bound(measure, &hole);
    diag.theta_bound = theta.as_ref().map(|t| t.bound);
    if f.is_constant() {
        return Ok(EscapeRateResult::infinite(Method::Polynomial, diag));
    }
    let iv = smallest_root_above_one(&f, theta.as_ref().map(|t| &t.theta.interval.lo), tol)?;
    Ok(EscapeRateResult::from_exact(Method::Polynomial, iv, diag))
}

/// Exact order of `rho(C_u)` against `rho(C_w)`, both single-word holes.
pub fn compare_single_word_rates<S: Scalar>(
    measure: &MarkovMeasure<S>,
    u: &Word,
    w: &Word,
) -> Result<Ordering> {
    let fu = single_word_poly(measure, u)?;
    let fw = single_word_poly(measure, w)?;
    compare_smallest_roots(&fu, &fw, &Rational::one())
        .ok_or_else(|| Error::NoPoleFound("+inf".into()))
}

/// Both sides of `det(I - z B_G∘P_{r-1}) = f_u(z)` for `G = {u}`.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub lhs: Polynomial,
    pub rhs: Polynomial,
    pub difference: Polynomial,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.difference.is_zero()
    }
}

pub fn verify_relate_identity<S: Scalar>(measure: &MarkovMeasure<S>, u: &Word) -> Result<IdentityCheck> {
    exact_p(measure)?;
    if u.len() < 2 {
        return Err(Error::LengthOne);
    }
    let hole = HoleSpec::reduce(measure.model(), vec![u.clone()])?;
    let (open, _) = open_system(measure, &hole)?;
    relate_identity_with(measure, u, &open.b)
}

/// The identity with a caller-supplied `B` (used as a negative control).
pub fn relate_identity_with<S: Scalar>(
    measure: &MarkovMeasure<S>,
    u: &Word,
    b: &Matrix<u8>,
) -> Result<IdentityCheck> {
    let (p, _) = exact_p(measure)?;
    let r = u.len();
    let pn = if r <= 2 {
        p
    } else {
        measure.higher_block(r - 1)?.p.map(Scalar::to_rational)
    };
    if (b.rows(), b.cols()) != (pn.rows(), pn.cols()) {
        return Err(Error::Dimension(format!(
            "B is {}x{}, P_(r-1) is {}x{}",
            b.rows(),
            b.cols(),
            pn.rows(),
            pn.cols()
        )));
    }
    let m = Matrix::from_fn(pn.rows(), pn.cols(), |i, j| {
        if b[(i, j)] == 1 {
            pn[(i, j)].clone()
        } else {
            Rational::zero()
        }
    });
    let lhs = det_one_minus_z(&m)?;
    let rhs = single_word_poly(measure, u)?;
    let difference = &lhs - &rhs;
    Ok(IdentityCheck {
        lhs,
        rhs,
        difference,
    })
}
