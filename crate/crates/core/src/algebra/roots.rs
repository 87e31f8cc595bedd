//! Certified real-root isolation with Sturm sequences and exact bisection.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::algebra::poly::Polynomial;
use crate::scalar::{rational_to_f64, Rational};

/// Interval `[lo, hi]` holding exactly one real root of a polynomial.
/// `lo == hi` when bisection landed on the root itself.
#[derive(Clone, Debug, PartialEq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn exact(x: Rational) -> Self {
        RootInterval { lo: x.clone(), hi: x }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn value(&self) -> f64 {
        rational_to_f64(&((&self.lo + &self.hi) / Rational::from_integer(2.into())))
    }

    pub fn lo_f64(&self) -> f64 {
        rational_to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        rational_to_f64(&self.hi)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

pub struct SturmSequence {
    chain: Vec<Polynomial>,
}

impl SturmSequence {
    /// Expects a square-free polynomial of positive degree.
    pub fn new(p: &Polynomial) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].div_rem(&chain[n - 1]).1;
            if r.is_zero() {
                break;
            }
            chain.push(-r);
        }
        SturmSequence { chain }
    }

    fn changes(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    pub fn sign_changes(&self, x: &Rational) -> usize {
        Self::changes(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    fn changes_at_infinity(&self, positive: bool) -> usize {
        Self::changes(self.chain.iter().map(|p| {
            let lead = p.leading().map_or(0, sign);
            let odd = p.degree().unwrap_or(0) % 2 == 1;
            if !positive && odd {
                -lead
            } else {
                lead
            }
        }))
    }

    /// Number of distinct real roots in `(a, b]`; `a` must not be a root.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.sign_changes(a).saturating_sub(self.sign_changes(b))
    }

    /// Number of distinct real roots.
    pub fn count_all(&self) -> usize {
        self.changes_at_infinity(false)
            .saturating_sub(self.changes_at_infinity(true))
    }
}

fn sign(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Upper end of a search interval; `None` is `+∞`.
pub type Bound = Option<Rational>;

#[derive(Clone, Copy, PartialEq)]
enum Target {
    Leftmost,
    Rightmost,
}

/// Leftmost real root of `p` in `(a, b]`, refined to width
/// `rel_width * max(1, |root|)`.
pub fn isolate_smallest_real_root(
    p: &Polynomial,
    a: &Rational,
    b: Bound,
    rel_width: f64,
) -> Option<RootInterval> {
    isolate(p, a, b, rel_width, Target::Leftmost)
}

/// Rightmost real root of `p` in `(a, b]`.
pub fn isolate_largest_real_root(
    p: &Polynomial,
    a: &Rational,
    b: Bound,
    rel_width: f64,
) -> Option<RootInterval> {
    isolate(p, a, b, rel_width, Target::Rightmost)
}

fn isolate(
    p: &Polynomial,
    a: &Rational,
    b: Bound,
    rel_width: f64,
    target: Target,
) -> Option<RootInterval> {
    let mut q = p.square_free();
    if q.degree().unwrap_or(0) == 0 {
        return None;
    }
    if q.eval(a).is_zero() {
        // the search interval is open at `a`
        let linear = Polynomial::new(vec![-a.clone(), Rational::one()]);
        q = q.div_rem(&linear).0;
        if q.degree().unwrap_or(0) == 0 {
            return None;
        }
    }
    let bound = q.cauchy_bound();
    let hi = match b {
        Some(b) if b < bound => b,
        _ => bound,
    };
    if &hi <= a {
        return None;
    }
    let sturm = SturmSequence::new(&q);
    if sturm.count(a, &hi) == 0 {
        return None;
    }
    let tol = Rational::from_float(rel_width.max(0.0)).unwrap_or_else(Rational::zero);
    Some(bisect(&q, &sturm, a.clone(), hi, &tol, target))
}

fn bisect(
    q: &Polynomial,
    sturm: &SturmSequence,
    mut lo: Rational,
    mut hi: Rational,
    tol: &Rational,
    target: Target,
) -> RootInterval {
    let two = Rational::from_integer(2.into());
    loop {
        let n = sturm.count(&lo, &hi);
        debug_assert!(n >= 1);
        if n == 1 {
            // rational roots with small denominators are caught exactly
            let guess = simplest_between(&lo, &hi);
            if q.eval(&guess).is_zero() {
                return RootInterval::exact(guess);
            }
            let scale = hi.abs().max(Rational::one());
            if &hi - &lo <= tol * &scale {
                return RootInterval { lo, hi };
            }
        }
        let mid = (&lo + &hi) / &two;
        let left = sturm.count(&lo, &mid);
        if q.eval(&mid).is_zero() {
            match target {
                Target::Leftmost if left == 1 => return RootInterval::exact(mid),
                Target::Leftmost => hi = mid,
                Target::Rightmost if n == left => return RootInterval::exact(mid),
                Target::Rightmost => {
                    // step just past `mid` onto a non-root with roots still above it
                    let mut step = (&hi - &mid) / &two;
                    loop {
                        let x = &mid + &step;
                        if !q.eval(&x).is_zero() && sturm.count(&x, &hi) >= 1 {
                            lo = x;
                            break;
                        }
                        step /= &two;
                    }
                }
            }
            continue;
        }
        match target {
            Target::Leftmost if left >= 1 => hi = mid,
            Target::Leftmost => lo = mid,
            Target::Rightmost if n > left => lo = mid,
            Target::Rightmost => hi = mid,
        }
    }
}

/// Rational with the smallest denominator in `[lo, hi]`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let up = &fl + Rational::one();
    if &up <= hi {
        return up;
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Exact order of the smallest real roots of `p` and `q` in `(a, inf)`.
/// `None` when either has no root there.
pub fn compare_smallest_roots(p: &Polynomial, q: &Polynomial, a: &Rational) -> Option<Ordering> {
    let mut width = 1e-6;
    let ip = isolate_smallest_real_root(p, a, None, width)?;
    let iq = isolate_smallest_real_root(q, a, None, width)?;
    let (sp, sq) = (SturmSequence::new(p), SturmSequence::new(q));
    // a shared smallest root must be the smallest common root
    let g = p.gcd(q);
    if let Some(mut ig) = isolate_smallest_real_root(&g, a, None, width) {
        loop {
            if ig.is_exact() {
                let z = &ig.lo;
                if p.eval(z).is_zero() && q.eval(z).is_zero() && sp.count(a, z) == 1 && sq.count(a, z) == 1 {
                    return Some(Ordering::Equal);
                }
                break;
            }
            if sp.count(&ig.lo, &ig.hi) == 1 && sq.count(&ig.lo, &ig.hi) == 1 {
                if sp.count(a, &ig.hi) == 1 && sq.count(a, &ig.hi) == 1 {
                    return Some(Ordering::Equal);
                }
                break;
            }
            width *= 1e-3;
            if width < 1e-280 {
                return None;
            }
            ig = isolate_smallest_real_root(&g, a, None, width)?;
        }
    }
    let (mut ip, mut iq) = (ip, iq);
    let mut width = 1e-6;
    loop {
        if ip.hi < iq.lo {
            return Some(Ordering::Less);
        }
        if iq.hi < ip.lo {
            return Some(Ordering::Greater);
        }
        width *= 1e-3;
        if width < 1e-280 {
            return None;
        }
        ip = isolate_smallest_real_root(p, a, None, width)?;
        iq = isolate_smallest_real_root(q, a, None, width)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn linear_root_is_hit_exactly() {
        let r = isolate_smallest_real_root(&p(&[-5, 1]), &int(1), None, 1e-12).unwrap();
        assert!(r.is_exact());
        assert_eq!(r.lo, int(5));
    }

    #[test]
    fn leftmost_of_two() {
        let f = &p(&[-2, 1]) * &p(&[-3, 1]);
        let r = isolate_smallest_real_root(&f, &int(1), None, 1e-12).unwrap();
        assert!(r.lo <= int(2) && int(2) <= r.hi);
        let r = isolate_largest_real_root(&f, &int(1), None, 1e-12).unwrap();
        assert!(r.lo <= int(3) && int(3) <= r.hi);
        assert!(isolate_smallest_real_root(&f, &int(3), None, 1e-12).is_none());
        assert!(isolate_smallest_real_root(&f, &int(0), Some(int(1)), 1e-12).is_none());
    }

    #[test]
    fn irrational_root_is_tight() {
        // z^2 - z - 1, golden ratio
        let f = p(&[-1, -1, 1]);
        let r = isolate_largest_real_root(&f, &int(0), None, 1e-12).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(r.lo_f64() <= phi + 1e-15 && phi - 1e-15 <= r.hi_f64());
        assert!(rational_to_f64(&r.width()) <= 1e-12 * phi);
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&frac(1, 3), &frac(1, 2)), frac(1, 2));
        assert_eq!(simplest_between(&frac(3, 10), &frac(7, 20)), frac(1, 3));
        assert_eq!(simplest_between(&frac(-7, 20), &frac(-3, 10)), frac(-1, 3));
        assert_eq!(simplest_between(&frac(-1, 2), &frac(3, 2)), int(0));
        assert_eq!(simplest_between(&frac(9, 4), &frac(11, 4)), frac(5, 2));
    }

    #[test]
    fn open_lower_end_skips_root() {
        // roots 1 and 2; search (1, inf) must return 2
        let f = &p(&[-1, 1]) * &p(&[-2, 1]);
        let r = isolate_smallest_real_root(&f, &int(1), None, 1e-9).unwrap();
        assert_eq!(r.lo, int(2));
    }

    #[test]
    fn repeated_roots() {
        // (z - 1/2)^3 (z + 4)
        let h = p(&[-1, 2]);
        let f = &(&(&h * &h) * &h) * &p(&[4, 1]);
        let r = isolate_largest_real_root(&f, &int(-10), None, 1e-12).unwrap();
        assert_eq!(r.lo, frac(1, 2));
        let r = isolate_smallest_real_root(&f, &int(-10), None, 1e-12).unwrap();
        assert!(r.lo <= int(-4) && int(-4) <= r.hi);
    }

    #[test]
    fn counts_distinct_real_roots() {
        // (z^2 + 1)(z - 1)(z + 2)^2 has two distinct real roots
        let f = &(&p(&[1, 0, 1]) * &p(&[-1, 1])) * &(&p(&[2, 1]) * &p(&[2, 1]));
        assert_eq!(SturmSequence::new(&f.square_free()).count_all(), 2);
        assert_eq!(SturmSequence::new(&p(&[1, 0, 1])).count_all(), 0);
    }

    #[test]
    fn root_comparison() {
        let one = int(1);
        let z = |c: &[i64]| Polynomial::new(c.iter().map(|&x| int(x)).collect());
        // z^2 - 2 against z^2 - 3
        assert_eq!(compare_smallest_roots(&z(&[-2, 0, 1]), &z(&[-3, 0, 1]), &one), Some(Ordering::Less));
        // shared irrational root, different cofactors
        let a = &z(&[-2, 0, 1]) * &z(&[-5, 1]);
        let b = &z(&[-2, 0, 1]) * &z(&[-7, 0, 1]);
        assert_eq!(compare_smallest_roots(&a, &b, &one), Some(Ordering::Equal));
        // common root that is not the smallest for one of them
        let c = &z(&[-3, 1]) * &z(&[-7, 1]);
        let d = &z(&[-2, 1]) * &z(&[-7, 1]);
        assert_eq!(compare_smallest_roots(&c, &d, &one), Some(Ordering::Greater));
        assert_eq!(compare_smallest_roots(&z(&[1, 1]), &d, &one), None);
    }
}
