mod common;

use chartdist::bisim::{
    bisimilar, bisimilarity, is_bisimulation, quotient, stratification, BisimOutcome,
};
use chartdist::chart::{Chart, Prechart};
use chartdist::expr::{substitute, Expr, Var};
use chartdist::metric::{bd_kleene, bd_stratified, expr_distance, phi, Dist, DistTable};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn bd(e: &Expr, f: &Expr) -> Dist {
    expr_distance(e, f, CAP).unwrap()
}

fn close_pair(r: &mut impl Rng, free: &[u32]) -> (Expr, Expr) {
    let e = random_expr(r, 5, free);
    let f = if r.gen_bool(0.7) { flip_letter(r, &e) } else { random_expr(r, 5, free) };
    (e, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn kleene_matches_the_naive_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c1 = random_chart(&mut r, 8);
        let c2 = if r.gen_bool(0.5) { perturb_chart(&mut r, &c1) } else { random_chart(&mut r, 8) };
        let (p, off) = Prechart::disjoint_union(c1.prechart(), c2.prechart());
        let k = bd_kleene(&p).unwrap();
        prop_assert!(k.iterations <= k.quotient_size * k.quotient_size + 1);
        let expected = naive_chart_bd(&c1, &c2);
        prop_assert_eq!(k.table.get(c1.start(), c2.start() + off), &expected);
        prop_assert_eq!(bd_stratified(&c1, &c2), expected.clone());
        prop_assert!(expected.is_zero() || expected.dyadic_exponent().is_some());
        prop_assert!(k.table.is_pseudometric());
    }

    #[test]
    fn witnesses_are_bisimulations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c1 = random_chart(&mut r, 6);
        let c2 = perturb_chart(&mut r, &c1);
        for (a, b) in [(&c1, &c1), (&c1, &c2)] {
            if let BisimOutcome::Bisimilar(rel) = bisimilar(a, b) {
                prop_assert!(rel.contains(&(a.start(), b.start())));
                prop_assert!(is_bisimulation(a.prechart(), b.prechart(), &rel));
            }
        }
    }

    #[test]
    fn stratification_decreases_to_bisimilarity(seed in any::<u64>()) {
        let c = random_chart(&mut rng(seed), 8);
        let chain = stratification(c.prechart());
        for w in chain.windows(2) {
            prop_assert!(w[1].refines(&w[0]));
        }
        let last = chain.last().unwrap();
        let bis = bisimilarity(c.prechart());
        prop_assert_eq!(last.blocks(), bis.blocks());
    }

    #[test]
    fn quotient_is_bisimilar(seed in any::<u64>()) {
        let c = random_chart(&mut rng(seed), 8);
        let (q, map) = quotient(c.prechart());
        let graph: Vec<(usize, usize)> = map.iter().copied().enumerate().collect();
        prop_assert!(is_bisimulation(c.prechart(), &q, &graph));
        let qc = Chart::new(q, map[c.start()]);
        prop_assert_eq!(qc.live_vars(), c.live_vars());
    }

    #[test]
    fn pseudometric_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, f) = close_pair(&mut r, &[1]);
        let g = flip_letter(&mut r, &f);
        prop_assert!(bd(&e, &e).is_zero());
        prop_assert_eq!(bd(&e, &f), bd(&f, &e));
        let sum = bd(&e, &f).add_unbounded(bd(&f, &g).as_rational());
        prop_assert!(bd(&e, &g).as_rational() <= &sum);
    }

    #[test]
    fn prefix_halves(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, f) = close_pair(&mut r, &[1]);
        let d = bd(&e, &f);
        let dp = bd(&Expr::prefix('a', e), &Expr::prefix('a', f));
        prop_assert!(dp <= d.half());
        if !d.is_zero() {
            prop_assert_eq!(dp, d.half());
        }
    }

    #[test]
    fn substitution_is_nonexpansive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (e, f) = close_pair(&mut r, &[1, 2]);
        let (g1, h1) = close_pair(&mut r, &[1]);
        let (g2, h2) = close_pair(&mut r, &[]);
        let sg = [(Var::new(1), g1.clone()), (Var::new(2), g2.clone())];
        let sh = [(Var::new(1), h1.clone()), (Var::new(2), h2.clone())];
        let lhs = bd(&substitute(&e, &sg), &substitute(&f, &sh));
        let rhs = bd(&e, &f).max(bd(&g1, &h1)).max(bd(&g2, &h2));
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn phi_is_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_chart(&mut r, 6);
        let n = c.prechart().len();
        let mut lo = DistTable::top(n);
        let mut hi = DistTable::top(n);
        for x in 0..n {
            for y in x + 1..n {
                let a = r.gen_range(0..=8);
                let b = r.gen_range(a..=8);
                lo.set(x, y, Dist::ratio(a, 8).unwrap());
                hi.set(x, y, Dist::ratio(b, 8).unwrap());
            }
        }
        prop_assert!(lo.below(&hi));
        prop_assert!(phi(c.prechart(), &lo).below(&phi(c.prechart(), &hi)));
    }
}
