use std::sync::Arc;

use num_rational::Rational64;
use proptest::prelude::*;

use ddverify::discrete::{
    averaging_homotopy, coboundary_values, solve_elimination, solve_exhaustive, CoboundaryVerdict, FiniteGroupTable,
    ModCochain, EXHAUSTIVE_LIMIT,
};
use ddverify::manifold::{linear_combine, wedge, ChartedSpace, FormField, Point};
use ddverify::models;
use ddverify::sampling::{sample_frames, seeded};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `ℤ_a × ℤ_b` with `k` times the carry cocycle of the first factor plus
/// `δb`, all mod `n`. The class is trivial iff `gcd(a, n)` divides `k`.
fn carry_cocycle(a: usize, b: usize, n: usize, k: u64, shift: &[u64]) -> (FiniteGroupTable, ModCochain, bool) {
    let g = FiniteGroupTable::cyclic(a).product(&FiniteGroupTable::cyclic(b));
    let order = g.order();
    let m = n as u64;
    let mut shift = shift[..order].to_vec();
    shift[g.identity()] = 0;
    let delta = ModCochain::new(1, order, m, shift.iter().map(|s| s % m).collect()).coboundary(&g);
    let values = (0..order * order)
        .map(|i| {
            let (x, y) = (i / order, i % order);
            let carry = u64::from(x / b + y / b >= a);
            (k * carry + delta.values()[i]) % m
        })
        .collect();
    let trivial = k as usize % gcd(a, n) == 0;
    (g, ModCochain::new(2, order, m, values), trivial)
}

fn witness_holds(c: &ModCochain, g: &FiniteGroupTable, verdict: &CoboundaryVerdict) -> bool {
    match verdict {
        CoboundaryVerdict::Trivial(b) => b.coboundary(g) == *c,
        CoboundaryVerdict::Nontrivial => true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solvers_decide_the_carry_class(
        a in 2usize..5,
        b in 1usize..4,
        n in 2usize..7,
        k in 0u64..6,
        shift in prop::collection::vec(0u64..6, 16),
    ) {
        let (g, c, trivial) = carry_cocycle(a, b, n, k, &shift);
        prop_assert!(c.coboundary(&g).is_zero());
        let eliminated = solve_elimination(&c, &g).unwrap();
        prop_assert_eq!(eliminated.is_trivial(), trivial);
        prop_assert!(witness_holds(&c, &g, &eliminated));
        if g.order() <= EXHAUSTIVE_LIMIT {
            let exhaustive = solve_exhaustive(&c, &g);
            prop_assert_eq!(exhaustive.is_trivial(), trivial);
            prop_assert!(witness_holds(&c, &g, &exhaustive));
        }
    }

    #[test]
    fn coboundary_squares_to_zero(
        a in 1usize..4,
        b in 1usize..4,
        values in prop::collection::vec(-20i64..20, 144),
    ) {
        let g = FiniteGroupTable::cyclic(a).product(&FiniteGroupTable::cyclic(b));
        let n = g.order();
        let f: Vec<Rational64> = values[..n * n].iter().map(|&v| Rational64::from_integer(v)).collect();
        let zero = Rational64::from_integer(0);
        let ddf = coboundary_values(&coboundary_values(&f, 2, &g, zero), 3, &g, zero);
        prop_assert!(ddf.iter().all(|v| *v == zero));
    }

    #[test]
    fn averaging_contracts_real_cocycles(
        a in 1usize..4,
        b in 1usize..4,
        values in prop::collection::vec(-9i64..9, 12),
    ) {
        let g = FiniteGroupTable::cyclic(a).product(&FiniteGroupTable::cyclic(b));
        let n = g.order();
        let zero = Rational64::from_integer(0);
        let f: Vec<Rational64> = values[..n].iter().map(|&v| Rational64::new(v, 7)).collect();
        let c = coboundary_values(&f, 1, &g, zero);
        let h = averaging_homotopy(&c, 2, &g);
        prop_assert_eq!(coboundary_values(&h, 1, &g, zero), c);
    }

    #[test]
    fn section_change_moves_the_cocycle_by_a_coboundary(
        fixture in prop::sample::select(vec!["z4_over_z2", "q8_over_v4", "split_v4"]),
        shift in prop::collection::vec(0usize..4, 4),
    ) {
        let ext = models::finite(fixture).unwrap();
        let (g, h) = (ext.base(), ext.hat());
        let n = ext.modulus();
        let mut b: Vec<u64> = shift[..g.order()].iter().map(|&s| (s % n) as u64).collect();
        b[g.identity()] = 0;
        let section: Vec<usize> = (0..g.order())
            .map(|x| (0..b[x]).fold(ext.section(x), |y, _| h.mul(ext.generator(), y)))
            .collect();
        let c = ext.section_cocycle().unwrap();
        let c2 = ext.with_section(section).unwrap().section_cocycle().unwrap();
        let db = ModCochain::new(1, g.order(), n as u64, b).coboundary(g);
        let m = n as u64;
        for i in 0..c.values().len() {
            prop_assert_eq!((c2.values()[i] + m - c.values()[i]) % m, db.values()[i]);
        }
        prop_assert_eq!(
            solve_exhaustive(&c, g).is_trivial(),
            solve_exhaustive(&c2, g).is_trivial()
        );
    }

    #[test]
    fn wedge_is_graded_commutative(
        a in prop::collection::vec(-2.0f64..2.0, 3),
        b in prop::collection::vec(-2.0f64..2.0, 3),
        seed in 0u64..1000,
    ) {
        let s = ChartedSpace::euclidean("ℝ³", 3, 10.0, 2.0);
        let alpha = polynomial_one_form(&s, a.clone());
        let beta = polynomial_one_form(&s, b);
        let ab = wedge(&alpha, &beta).unwrap();
        let ba = wedge(&beta, &alpha).unwrap();
        let aa = wedge(&alpha, &alpha).unwrap();
        for sample in sample_frames(&s, 20, 2, &mut seeded(seed)).unwrap() {
            let x = ab.evaluate(&sample.point, &sample.frame).unwrap();
            let y = ba.evaluate(&sample.point, &sample.frame).unwrap();
            prop_assert!((x + y).abs() < 1e-12);
            prop_assert!(aa.evaluate(&sample.point, &sample.frame).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn linear_combination_is_pointwise(
        a in prop::collection::vec(-2.0f64..2.0, 3),
        b in prop::collection::vec(-2.0f64..2.0, 3),
        s1 in -3.0f64..3.0,
        s2 in -3.0f64..3.0,
    ) {
        let s = ChartedSpace::euclidean("ℝ³", 3, 10.0, 2.0);
        let (alpha, beta) = (polynomial_one_form(&s, a), polynomial_one_form(&s, b));
        let mix = linear_combine(&[s1, s2], &[alpha.clone(), beta.clone()]).unwrap();
        let p = Point::new(0, vec![0.3, -0.7, 1.1]);
        let v = [vec![0.5, 1.0, -2.0]];
        let direct = s1 * alpha.evaluate(&p, &v).unwrap() + s2 * beta.evaluate(&p, &v).unwrap();
        prop_assert!((mix.evaluate(&p, &v).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn horizontal_differential_squares_to_zero(coeffs in prop::collection::vec(-1.0f64..1.0, 4), seed in 0u64..1000) {
        let (model, _) = models::smooth(models::heisenberg::NAME).unwrap();
        let ng = model.ng();
        let g = ng.level(1).unwrap();
        let c = coeffs.clone();
        let omega = FormField::new("ω", 1, g, move |p, v| {
            let (x, y) = (p.coords[0], p.coords[1]);
            Ok((c[0] * x * y + c[1] * y.sin()) * v[0][0] + (c[2] * x * x + c[3]) * v[0][1])
        });
        let twice = ng.d_prime(2, &ng.d_prime(1, &omega).unwrap()).unwrap();
        for s in sample_frames(ng.level(3).unwrap(), 10, 1, &mut seeded(seed)).unwrap() {
            prop_assert!(twice.evaluate(&s.point, &s.frame).unwrap().abs() < 1e-9);
        }
    }
}

/// `Σ_i (a_i + x_{i+1}) dx_i` with indices mod 3.
fn polynomial_one_form(s: &Arc<ChartedSpace>, a: Vec<f64>) -> FormField {
    FormField::new("α", 1, s, move |p, v| {
        Ok((0..3).map(|i| (a[i] + p.coords[(i + 1) % 3]) * v[0][i]).sum())
    })
}
