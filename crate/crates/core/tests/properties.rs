mod common;

use common::*;
use escape_core::algebra::linalg::{det_one_minus_z, solve_poly_system, spectral_radius};
use escape_core::algebra::roots::SturmSequence;
use escape_core::genfun::{build_system, build_system_with_symbol_terms, solve_system};
use escape_core::oracle::{avoidance_table, survival_enumerate, survival_series};
use escape_core::spectral::open_system;
use escape_core::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn higher_block_structure(seed in any::<u64>(), n in 1usize..=4) {
        let mut g = rng(seed);
        let size = g.gen_range(2..=3);
        let m = random_measure(&mut g, size);
        let model = m.model();
        let hb = model.higher_block(n).unwrap();
        let a = hb.adjacency();
        let mut edges = 0;
        for (i, x) in hb.words().iter().enumerate() {
            let out: usize = (0..hb.len()).map(|j| usize::from(a[(i, j)])).sum();
            let ext = (0..size).filter(|&s| model.allows(x.last(), s)).count();
            prop_assert_eq!(out, ext);
            edges += out;
        }
        prop_assert_eq!(edges as u128, model.language_size(n + 1));
        prop_assert!(escape_core::algebra::linalg::is_irreducible(&a.map(|&x| int(i64::from(x)))));
    }

    #[test]
    fn measure_consistency(seed in any::<u64>()) {
        let mut g = rng(seed);
        let size = g.gen_range(2..=3);
        let m = random_measure(&mut g, size);
        for row in m.p().row_sums() {
            prop_assert_eq!(row, Rational::one());
        }
        let p = m.stationary().to_vec();
        prop_assert_eq!(m.p().vec_mul(&p), p);
        let base = det_one_minus_z(m.p()).unwrap();
        for n in 2..=3 {
            let hb = m.higher_block(n).unwrap();
            prop_assert_eq!(hb.p.vec_mul(&hb.lambda), hb.lambda.clone());
            prop_assert_eq!(det_one_minus_z(&hb.p).unwrap(), base.clone());
        }
        for n in 1..=5 {
            let total = m
                .model()
                .allowed_words(n)
                .unwrap()
                .iter()
                .fold(Rational::zero(), |a, w| a + m.cylinder_measure(w).unwrap());
            prop_assert_eq!(total, Rational::one());
        }
    }

    #[test]
    fn cylinder_measure_is_multiplicative(seed in any::<u64>()) {
        let mut g = rng(seed);
        let size = g.gen_range(2..=3);
        let m = random_measure(&mut g, size);
        let words = words_up_to(m.model(), 3);
        let u = &words[g.gen_range(0..words.len())];
        let v = &words[g.gen_range(0..words.len())];
        prop_assume!(m.model().allows(u.last(), v.first()));
        let joined = Word::new([u.symbols(), v.symbols()].concat()).unwrap();
        let across = m.p()[(u.last(), v.first())].clone();
        prop_assert_eq!(
            m.cylinder_measure(&joined).unwrap(),
            m.cylinder_measure(u).unwrap() * across * m.path_weight(v.symbols())
        );
    }

    #[test]
    fn sturm_counts_distinct_roots(roots in prop::collection::vec(-6i64..=6, 1..6), extra in 0u8..3) {
        let mut p = Polynomial::one();
        for &r in &roots {
            p = &p * &Polynomial::new(vec![int(-r), int(1)]);
        }
        // z^2 + 1 adds no real roots
        for _ in 0..extra {
            p = &p * &Polynomial::new(vec![int(1), int(0), int(1)]);
        }
        let mut distinct = roots.clone();
        distinct.sort();
        distinct.dedup();
        prop_assert_eq!(SturmSequence::new(&p).count_all(), distinct.len());
    }

    #[test]
    fn stochastic_spectral_radius_is_one(seed in any::<u64>()) {
        let mut g = rng(seed);
        let size = g.gen_range(2..=3);
        let m = random_measure(&mut g, size);
        let s = spectral_radius(m.p(), 1e-12).unwrap();
        prop_assert_eq!(s.exact, Some(RootInterval::exact(Rational::one())));
    }

    #[test]
    fn bareiss_matches_naive_elimination(coeffs in prop::collection::vec(-4i64..=4, 27), rhs in prop::collection::vec(-4i64..=4, 9)) {
        // 3x3 system with linear polynomial entries, rhs linear too
        let poly = |c: &[i64]| Polynomial::new(c.iter().map(|&x| int(x)).collect());
        let mut m: Matrix<Polynomial> = Matrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let k = 3 * (3 * i + j);
                m[(i, j)] = poly(&coeffs[k..k + 3]);
            }
        }
        let b: Vec<Polynomial> = (0..3).map(|i| poly(&rhs[3 * i..3 * i + 3])).collect();
        let naive = naive_solve(&m, &b);
        match solve_poly_system(&m, &b) {
            Ok(x) => {
                let naive = naive.expect("naive elimination found the system singular");
                for (a, c) in x.iter().zip(&naive) {
                    prop_assert_eq!(a, c);
                    prop_assert!(a.numerator().gcd(a.denominator()).is_constant());
                }
            }
            Err(_) => prop_assert!(naive.is_none()),
        }
    }

    #[test]
    fn open_adjacency_labels(seed in any::<u64>()) {
        let mut g = rng(seed);
        let size = g.gen_range(2..=3);
        let m = random_measure(&mut g, size);
        let h = random_hole(&mut g, m.model(), 3, 4);
        let open = OpenAdjacency::new(m.model(), &h).unwrap();
        for w in &open.removed {
            prop_assert!(h.hits(w.symbols()));
        }
        let n = open.len();
        for i in 0..n {
            for j in 0..n {
                if open.b[(i, j)] == 1 {
                    let x = &open.index[i];
                    let y = &open.index[j];
                    let label = if open.order == 1 {
                        Word::new(vec![x.first(), y.first()]).unwrap()
                    } else {
                        m.model().star(x, y).unwrap()
                    };
                    prop_assert!(!h.hits(label.symbols()));
                }
            }
        }
        if h.r() >= 2 {
            let e = equalize_lengths(m.model(), &h, h.r()).unwrap();
            prop_assert_eq!(OpenAdjacency::new(m.model(), &e).unwrap().b, open.b);
        }
    }

    #[test]
    fn hole_measure_sum_rule(seed in any::<u64>()) {
        let mut g = rng(seed);
        let size = g.gen_range(2..=3);
        let m = random_measure(&mut g, size);
        let h = random_hole(&mut g, m.model(), 3, 3);
        let r = h.r();
        let union = m
            .model()
            .allowed_words(r)
            .unwrap()
            .iter()
            .filter(|w| h.words().iter().any(|u| w.symbols().starts_with(u.symbols())))
            .fold(Rational::zero(), |a, w| a + m.cylinder_measure(w).unwrap());
        let sum = h
            .words()
            .iter()
            .fold(Rational::zero(), |a, u| a + m.cylinder_measure(u).unwrap());
        // a reduced collection never has one word as a prefix of another
        prop_assert_eq!(sum, union);
    }

    #[test]
    fn open_system_radius_bounds(seed in any::<u64>()) {
        let mut g = rng(seed);
        let size = g.gen_range(2..=3);
        let m = random_measure(&mut g, size);
        let h = random_hole(&mut g, m.model(), 2, 3);
        let (_, bp) = open_system(&m, &h).unwrap();
        let lam = spectral_radius(&bp, 1e-12).unwrap();
        prop_assert!(lam.hi < 1.0);
        let f = survivor_genfun(&m, &h).unwrap();
        prop_assert_eq!(lam.is_zero(), f.is_polynomial());

        // adding a word can only shrink the open system
        let extra = random_hole(&mut g, m.model(), 1, 3);
        let bigger = HoleSpec::reduce(m.model(), [h.words(), extra.words()].concat()).unwrap();
        let (_, bp2) = open_system(&m, &bigger).unwrap();
        let lam2 = spectral_radius(&bp2, 1e-12).unwrap();
        prop_assert!(lam2.value <= lam.value + 1e-12);
    }

    #[test]
    fn correlation_basics(seed in any::<u64>()) {
        let mut g = rng(seed);
        let size = g.gen_range(2..=3);
        let m = random_measure(&mut g, size);
        for n in 2..=4 {
            for u in m.model().allowed_words(n).unwrap() {
                let c = correlation(&m, &u, &u).unwrap();
                prop_assert_eq!(c.tau.coeff(0), Rational::one());
                prop_assert!(c.tau_tilde.eval(&Rational::one()) >= Rational::one());
            }
        }
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn generating_functions_count_avoiding_words(seed in any::<u64>()) {
        let mut g = rng(seed);
        let size = g.gen_range(2..=3);
        let m = random_measure(&mut g, size);
        let h = random_hole(&mut g, m.model(), 3, 3);
        let sys = build_system(&m, &h).unwrap();
        let sol = solve_system(&sys).unwrap();
        prop_assert!(!sol.survivor.denominator().eval(&Rational::one()).is_zero());
        let with_symbols = solve_system(&build_system_with_symbol_terms(&m, &h).unwrap()).unwrap();
        prop_assert_eq!(&with_symbols.survivor, &sol.survivor);

        let table = avoidance_table(&m, &h, 10).unwrap();
        let f: Vec<(usize, Vec<Rational>)> = sol
            .f
            .iter()
            .map(|(i, fi)| (*i, fi.taylor(11).unwrap()))
            .collect();
        let gs: Vec<(Word, Vec<Rational>)> = sol
            .g
            .iter()
            .map(|(u, gu)| (u.clone(), gu.taylor(11).unwrap()))
            .collect();
        for row in &table.rows {
            for (i, mu) in &row.mu {
                let series = &f.iter().find(|(j, _)| j == i).unwrap().1;
                prop_assert_eq!(&series[row.n], mu);
            }
            for (u, nu) in &row.nu {
                let series = &gs.iter().find(|(v, _)| v == u).unwrap().1;
                prop_assert_eq!(&series[row.n], nu);
            }
        }
        // one step of the recurrence behind the system
        let p = m.p();
        for w in table.rows.windows(2) {
            let (now, next) = (&w[0], &w[1]);
            for (i, mu_next) in &next.mu {
                let flow = now
                    .mu
                    .iter()
                    .fold(Rational::zero(), |a, (j, x)| a + x * &p[(*j, *i)]);
                let hit = next
                    .nu
                    .iter()
                    .filter(|(v, _)| v.last() == *i)
                    .fold(Rational::zero(), |a, (_, x)| a + x);
                prop_assert_eq!(mu_next + &hit, flow);
            }
        }
    }

    #[test]
    fn survival_dp_against_enumeration(seed in any::<u64>()) {
        let mut g = rng(seed);
        let size = g.gen_range(2..=3);
        let m = random_measure(&mut g, size);
        let h = random_hole(&mut g, m.model(), 3, 3);
        let s = survival_series(&m, &h, 6).unwrap();
        prop_assert!(s.is_monotone());
        for (k, v) in s.values.iter().enumerate() {
            prop_assert_eq!(v, &survival_enumerate(&m, &h, k).unwrap());
        }
        let sandwich_ok = (0..=6).all(|k| {
            let b = sandwich_bounds(&m, &h, k).unwrap();
            b.lower_valid <= s.values[k] && b.upper.is_none_or(|u| s.values[k] <= u)
        });
        prop_assert!(sandwich_ok);
    }

    #[test]
    fn theta_bound_for_single_cylinders(seed in any::<u64>()) {
        let mut g = rng(seed);
        let size = g.gen_range(2..=3);
        let m = random_measure(&mut g, size);
        let words = words_up_to(m.model(), 3);
        let u = words[g.gen_range(0..words.len())].clone();
        let h = HoleSpec::reduce(m.model(), vec![u]).unwrap();
        if let Some(b) = theta_upper_bound(&m, &h) {
            let r = escape_rate_spectral(&m, &h, &Tolerances::default()).unwrap();
            prop_assert!(r.rate <= b.bound + 1e-9);
        }
    }
}

#[test]
fn large_r_rates_decrease() {
    let m = uniform(2);
    let rates: Vec<f64> = (5..=8)
        .map(|r| {
            escape_rate_genfun(&m, &varying_r_hole(&m, r), &Tolerances::default())
                .unwrap()
                .exp_rate
        })
        .collect();
    assert!(rates.windows(2).all(|w| w[1] < w[0]), "{rates:?}");
    assert!(rates.iter().all(|&x| x > 1.0));
}

/// Gaussian elimination over rational functions, for comparison.
#[allow(clippy::needless_range_loop)]
fn naive_solve(m: &Matrix<Polynomial>, b: &[Polynomial]) -> Option<Vec<RationalFunction>> {
    let n = m.rows();
    let rf = |p: &Polynomial| RationalFunction::polynomial(p.clone());
    let div = |a: &RationalFunction, c: &RationalFunction| {
        RationalFunction::new(
            a.numerator() * c.denominator(),
            a.denominator() * c.numerator(),
        )
        .unwrap()
    };
    let mut a: Vec<Vec<RationalFunction>> = (0..n)
        .map(|i| (0..n).map(|j| rf(&m[(i, j)])).chain([rf(&b[i])]).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].numerator().is_zero())?;
        a.swap(col, pivot);
        for r in 0..n {
            if r == col || a[r][col].numerator().is_zero() {
                continue;
            }
            let factor = div(&a[r][col], &a[col][col]);
            let pivot_row = a[col].clone();
            for (x, y) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *x = &*x - &(&factor * y);
            }
        }
    }
    Some((0..n).map(|i| div(&a[i][n], &a[i][i])).collect())
}
