//! Escape rates from the spectral radius of the weighted open-system matrix.

use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::linalg::{char_poly, spectral_radius, SpectralRadius};
use crate::algebra::matrix::Matrix;
use crate::algebra::poly::Polynomial;
use crate::algebra::roots::{isolate_largest_real_root, RootInterval};
use crate::error::Result;
use crate::hole::{HoleSpec, OpenAdjacency};
use crate::measure::MarkovMeasure;
use crate::scalar::{rational_to_f64, Rational, Scalar};
use crate::sft::{SftModel, Word};

/// Numerical knobs shared by every method.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative width of certified root intervals.
    pub root_width: f64,
    /// Relative Collatz–Wielandt spread for power iteration.
    pub power_spread: f64,
    /// Agreement tolerance between float results of different methods.
    pub agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_width: 1e-12,
            power_spread: 1e-12,
            agreement: 1e-9,
        }
    }
}

impl Tolerances {
    /// One knob for everything: `p` for roots and power iteration, and
    /// `max(1e-9, 1000 p)` for agreement.
    pub fn with_precision(p: f64) -> Self {
        Tolerances {
            root_width: p,
            power_spread: p,
            agreement: (p * 1e3).max(1e-9),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Spectral,
    Parry,
    Generating,
    Polynomial,
    Oracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Parry => "parry",
            Method::Generating => "generating",
            Method::Polynomial => "polynomial",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Diagnostics {
    pub r: usize,
    /// `|L_{r-1}|`, or the system size for the generating-function path.
    pub index_size: usize,
    pub theta_bound: Option<f64>,
    pub hole_reduced: bool,
    pub reduced_hole: Vec<Word>,
    pub infinite: bool,
    pub notes: Vec<String>,
}

impl Diagnostics {
    pub fn for_hole(hole: &HoleSpec) -> Self {
        Diagnostics {
            r: hole.r(),
            hole_reduced: hole.was_reduced(),
            reduced_hole: hole.words().to_vec(),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct EscapeRateResult {
    pub method: Method,
    /// `exp(rho)`; infinite when the hole swallows everything.
    pub exp_rate: f64,
    pub rate: f64,
    /// Float enclosure of `exp(rho)`.
    pub exp_rate_lo: f64,
    pub exp_rate_hi: f64,
    /// Exact enclosure of `exp(rho)` when one is available.
    pub enclosure: Option<RootInterval>,
    pub certified: bool,
    pub diagnostics: Diagnostics,
}

impl EscapeRateResult {
    pub fn infinite(method: Method, mut diagnostics: Diagnostics) -> Self {
        diagnostics.infinite = true;
        EscapeRateResult {
            method,
            exp_rate: f64::INFINITY,
            rate: f64::INFINITY,
            exp_rate_lo: f64::INFINITY,
            exp_rate_hi: f64::INFINITY,
            enclosure: None,
            certified: true,
            diagnostics,
        }
    }

    /// From an enclosure of `exp(rho)` itself.
    pub fn from_exact(method: Method, iv: RootInterval, diagnostics: Diagnostics) -> Self {
        EscapeRateResult {
            method,
            exp_rate: iv.value(),
            rate: iv.value().ln(),
            exp_rate_lo: iv.lo_f64(),
            exp_rate_hi: iv.hi_f64(),
            enclosure: Some(iv),
            certified: true,
            diagnostics,
        }
    }

    /// From the spectral radius `lambda = exp(-rho)`.
    pub fn from_lambda(method: Method, lambda: &SpectralRadius, diagnostics: Diagnostics) -> Self {
        if lambda.is_zero() {
            return EscapeRateResult::infinite(method, diagnostics);
        }
        if let Some(iv) = &lambda.exact {
            if !iv.lo.is_zero() && iv.lo > Rational::zero() {
                let inv = RootInterval {
                    lo: iv.hi.recip(),
                    hi: iv.lo.recip(),
                };
                let mut r = EscapeRateResult::from_exact(method, inv, diagnostics);
                // the midpoint of 1/lambda is not 1/midpoint; keep the latter
                r.exp_rate = 1.0 / lambda.value;
                r.rate = -lambda.value.ln();
                return r;
            }
        }
        EscapeRateResult {
            method,
            exp_rate: 1.0 / lambda.value,
            rate: -lambda.value.ln(),
            exp_rate_lo: 1.0 / lambda.hi,
            exp_rate_hi: if lambda.lo > 0.0 { 1.0 / lambda.lo } else { f64::INFINITY },
            enclosure: None,
            certified: lambda.certified,
            diagnostics,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.diagnostics.infinite
    }

    /// Agreement of two results: overlapping exact enclosures, or float
    /// values within `tol` (relative to `max(1, |value|)`).
    pub fn agrees_with(&self, other: &EscapeRateResult, tol: f64) -> bool {
        if self.is_infinite() || other.is_infinite() {
            return self.is_infinite() == other.is_infinite();
        }
        if let (Some(a), Some(b)) = (&self.enclosure, &other.enclosure) {
            if a.lo <= b.hi && b.lo <= a.hi {
                return true;
            }
        }
        let scale = self.exp_rate.abs().max(1.0);
        (self.exp_rate - other.exp_rate).abs() <= tol * scale
    }
}

/// `B_G` together with `B_G ∘ P_{r-1}`.
pub fn open_system<S: Scalar>(
    measure: &MarkovMeasure<S>,
    hole: &HoleSpec,
) -> Result<(OpenAdjacency, Matrix<S>)> {
    let open = OpenAdjacency::new(measure.model(), hole)?;
    let pn = block_matrix(measure, hole.r())?;
    let m = Matrix::from_fn(pn.rows(), pn.cols(), |i, j| {
        if open.b[(i, j)] == 1 {
            pn[(i, j)].clone()
        } else {
            S::zero()
        }
    });
    Ok((open, m))
}

/// `P_{r-1}`, or `P` itself when `r <= 2`.
fn block_matrix<S: Scalar>(measure: &MarkovMeasure<S>, r: usize) -> Result<Matrix<S>> {
    if r <= 2 {
        Ok(measure.p().clone())
    } else {
        Ok(measure.higher_block(r - 1)?.p)
    }
}

/// `exp(rho) = 1 / lambda(B_G ∘ P_{r-1})`.
pub fn escape_rate_spectral<S: Scalar>(
    measure: &MarkovMeasure<S>,
    hole: &HoleSpec,
    tol: &Tolerances,
) -> Result<EscapeRateResult> {
    let (open, m) = open_system(measure, hole)?;
    let width = if S::EXACT { tol.root_width } else { tol.power_spread };
    let lambda = spectral_radius(&m, width)?;
    let mut diag = Diagnostics::for_hole(hole);
    diag.index_size = open.len();
    diag.theta_bound = theta_upper_bound(measure, hole).map(|t| t.bound);
    Ok(EscapeRateResult::from_lambda(Method::Spectral, &lambda, diag))
}

/// Parry measure: `exp(rho) = lambda(A) / lambda(B_G)`, both Perron roots
/// of integer matrices and hence certified exactly.
pub fn escape_rate_parry(
    model: &SftModel,
    hole: &HoleSpec,
    tol: &Tolerances,
) -> Result<EscapeRateResult> {
    let open = OpenAdjacency::new(model, hole)?;
    let la = spectral_radius(&model.adjacency_as::<Rational>(), tol.root_width)?;
    let lb = spectral_radius(&open.b.map(|&x| Rational::from_integer(x.into())), tol.root_width)?;
    let mut diag = Diagnostics::for_hole(hole);
    diag.index_size = open.len();
    if lb.is_zero() {
        return Ok(EscapeRateResult::infinite(Method::Parry, diag));
    }
    let (a, b) = (la.exact.expect("exact"), lb.exact.expect("exact"));
    let iv = RootInterval {
        lo: &a.lo / &b.hi,
        hi: &a.hi / &b.lo,
    };
    let mut r = EscapeRateResult::from_exact(Method::Parry, iv, diag);
    r.exp_rate = la.value / lb.value;
    r.rate = la.value.ln() - lb.value.ln();
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pressures {
    pub closed: f64,
    pub open: f64,
}

impl Pressures {
    /// `rho = closed - open`.
    pub fn rate(&self) -> f64 {
        self.closed - self.open
    }
}

/// `ln lambda(P_{r-1})` and `ln lambda(B_G ∘ P_{r-1})`.
pub fn pressures<S: Scalar>(
    measure: &MarkovMeasure<S>,
    hole: &HoleSpec,
    tol: &Tolerances,
) -> Result<Pressures> {
    let width = if S::EXACT { tol.root_width } else { tol.power_spread };
    let closed = spectral_radius(&block_matrix(measure, hole.r())?, width)?;
    let (_, m) = open_system(measure, hole)?;
    let open = spectral_radius(&m, width)?;
    Ok(Pressures {
        closed: closed.value.ln(),
        open: open.value.ln(),
    })
}

/// Zero-potential pressures `ln lambda(A)` and `ln lambda(B_G)`.
pub fn topological_pressures(model: &SftModel, hole: &HoleSpec, tol: &Tolerances) -> Result<Pressures> {
    let open = OpenAdjacency::new(model, hole)?;
    let la = spectral_radius(&model.adjacency_as::<Rational>(), tol.root_width)?;
    let lb = spectral_radius(&open.b.map(|&x| Rational::from_integer(x.into())), tol.root_width)?;
    Ok(Pressures {
        closed: la.value.ln(),
        open: lb.value.ln(),
    })
}

/// Second largest positive real eigenvalue of `P`.
#[derive(Clone, Debug)]
pub struct Theta {
    pub value: f64,
    pub interval: RootInterval,
    /// `false` when `P` carries float weights (rationalized before isolation).
    pub certified: bool,
}

/// `None` when `P` has no positive real eigenvalue below 1, or when 1 is a
/// repeated eigenvalue.
pub fn theta<S: Scalar>(measure: &MarkovMeasure<S>) -> Option<Theta> {
    let p = measure.p().map(Scalar::to_rational);
    let c = char_poly(&p).ok()?;
    let linear = Polynomial::new(vec![-Rational::one(), Rational::one()]);
    let (q, rem) = c.div_rem(&linear);
    if !rem.is_zero() {
        // float weights can push the unit root off 1; deflate numerically
        return theta_float(&c);
    }
    if q.eval(&Rational::one()).is_zero() {
        return None;
    }
    let iv = isolate_largest_real_root(&q, &Rational::zero(), Some(Rational::one()), 1e-12)?;
    Some(Theta {
        value: iv.value(),
        interval: iv,
        certified: S::EXACT,
    })
}

fn theta_float(c: &Polynomial) -> Option<Theta> {
    // roots of c in (0, 1 - 1e-9]: the unit root sits just next to 1
    let cap = Rational::one() - Rational::new(1.into(), 1_000_000_000.into());
    let iv = isolate_largest_real_root(c, &Rational::zero(), Some(cap), 1e-12)?;
    Some(Theta {
        value: iv.value(),
        interval: iv,
        certified: false,
    })
}

#[derive(Clone, Debug)]
pub struct ThetaBound {
    pub theta: Theta,
    /// `-ln theta`, an upper bound on the escape rate.
    pub bound: f64,
}

/// The bound `rho <= -ln theta` for a single word or words sharing a symbol.
pub fn theta_upper_bound<S: Scalar>(measure: &MarkovMeasure<S>, hole: &HoleSpec) -> Option<ThetaBound> {
    if !hole.is_single_word() && hole.common_symbol().is_none() {
        return None;
    }
    let t = theta(measure)?;
    let bound = -rational_to_f64(&t.interval.lo).ln();
    Some(ThetaBound { theta: t, bound })
}

/// `Lambda_min sum (B∘P)^m` and, for `m >= r - 1`,
/// `Lambda_max sum (B∘P)^(m-r+1)`.
#[derive(Clone, Debug)]
pub struct Sandwich<S> {
    /// `Lambda_min * sum (B∘P_{r-1})^m`, the lower bound as usually stated.
    pub lower: S,
    /// `Lambda_min * sum (B∘P_{r-1})^{m+1}` when `r >= 2`, since a length
    /// `m + r` word is a path of `m + 1` edges on `L_{r-1}`. For `r = 1` the
    /// paths have `m` edges and start off the hole.
    pub lower_valid: S,
    /// `Lambda_max * sum (B∘P_{r-1})^{m-r+1}`, absent when `m + 1 < r`.
    pub upper: Option<S>,
}

pub fn sandwich_bounds<S: Scalar>(
    measure: &MarkovMeasure<S>,
    hole: &HoleSpec,
    m: usize,
) -> Result<Sandwich<S>> {
    let r = hole.r();
    let (_, bp) = open_system(measure, hole)?;
    let lambda: Vec<S> = if r <= 1 {
        measure.stationary().to_vec()
    } else {
        measure.higher_block(r - 1)?.lambda
    };
    let min = lambda.iter().cloned().reduce(|a, b| if b < a { b } else { a }).unwrap();
    let max = lambda.iter().cloned().reduce(|a, b| if b > a { b } else { a }).unwrap();
    let n = bp.rows();
    let total = |v: &[S]| v.iter().fold(S::zero(), |a, x| a + x.clone());
    // entry sums of (B∘P)^k for every k up to m
    let mut sums = Vec::with_capacity(m + 1);
    let mut v = vec![S::one(); n];
    sums.push(total(&v));
    for _ in 0..m {
        v = bp.mul_vec(&v);
        sums.push(total(&v));
    }
    let upper = (m + 1).checked_sub(r).map(|k| max.clone() * sums[k].clone());
    // paths start outside the hole; for r = 1 that excludes the hole symbols
    let edges = if r >= 2 { m + 1 } else { m };
    let holes = hole.symbols();
    let mut w: Vec<S> = (0..n)
        .map(|i| if r == 1 && holes.contains(&i) { S::zero() } else { S::one() })
        .collect();
    for _ in 0..edges {
        w = bp.mul_vec(&w);
    }
    Ok(Sandwich {
        lower: min.clone() * sums[m].clone(),
        lower_valid: min * total(&w),
        upper,
    })
}
