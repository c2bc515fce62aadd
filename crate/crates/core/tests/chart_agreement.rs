mod common;

use chartdist::bisim::bisimilar;
use chartdist::chart::{parse_chart, Chart};
use chartdist::expr::{expand, substitute, Expr, Var};
use common::{random_chart, random_expr, rng, CAP};
use proptest::prelude::*;

fn same(a: &Chart, b: &Chart) -> bool {
    bisimilar(a, b).is_bisimilar()
}

fn ex(e: &Expr) -> Chart {
    expand(e, CAP).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn combinators_agree_with_expansion(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = random_expr(&mut r, 4, &[1, 2]);
        let f = random_expr(&mut r, 4, &[1, 2]);
        prop_assert!(same(&ex(&Expr::sum(e.clone(), f.clone())), &Chart::sum(&ex(&e), &ex(&f))));
        prop_assert!(same(&ex(&Expr::prefix('a', e.clone())), &Chart::prefix('a', &ex(&e))));
        let v = Var::new(1);
        prop_assert!(same(&ex(&Expr::mu(v, e.clone())), &Chart::rec(v, &ex(&e))));
        let closed_f = random_expr(&mut r, 3, &[2]);
        let sub = substitute(&e, &[(v, closed_f.clone())]);
        prop_assert!(same(&ex(&sub), &Chart::subst(&ex(&e), &[ex(&closed_f)], &[v])));
    }

    #[test]
    fn text_format_round_trips(seed in any::<u64>()) {
        let c = random_chart(&mut rng(seed), 8);
        let back = parse_chart(&c.to_text()).unwrap();
        prop_assert!(same(&c, &back));
        prop_assert_eq!(back.to_text(), c.to_text());
    }

    #[test]
    fn reachable_part_is_bisimilar(seed in any::<u64>()) {
        let c = random_chart(&mut rng(seed), 8);
        let r = c.reachable();
        prop_assert!(r.prechart().len() <= c.prechart().len());
        prop_assert!(same(&c, &r));
        prop_assert_eq!(c.live_vars(), r.live_vars());
    }
}

#[test]
fn basic_constructions() {
    assert!(same(&Chart::empty(), &ex(&Expr::zero())));
    assert!(same(&Chart::variable(Var::new(2)), &ex(&Expr::var(2))));
    let a_loop = Chart::rec(Var::new(1), &Chart::prefix('a', &Chart::variable(Var::new(1))));
    assert!(same(&a_loop, &ex(&chartdist::expr::parse("mu v1.a.a.v1").unwrap())));
}
