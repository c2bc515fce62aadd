mod common;

use chartdist::diagram::{
    bend, component, diagram_distance, interpret, parse_term, DiagTerm, Wire, WireWord,
};
use chartdist::metric::Dist;
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn sem_eq(a: &DiagTerm, b: &DiagTerm) -> bool {
    let (x, y) = (interpret(a).unwrap(), interpret(b).unwrap());
    x.dom() == y.dom() && x.cod() == y.cod() && x.payload().bisimilar(y.payload(), CAP).unwrap()
}

fn id_of(w: WireWord) -> DiagTerm {
    DiagTerm::Id(w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn monoidal_laws_hold_semantically(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(1..=2);
        let f = random_diagram(&mut r, 3, 1, k);
        let g = random_diagram(&mut r, 3, k, 1);
        let h = random_diagram(&mut r, 3, 1, 2);
        let s = DiagTerm::seq;
        let t = DiagTerm::tensor;
        prop_assert!(sem_eq(&s(s(f.clone(), g.clone()), h.clone()), &s(f.clone(), s(g.clone(), h.clone()))));
        prop_assert!(sem_eq(&t(t(f.clone(), g.clone()), h.clone()), &t(f.clone(), t(g.clone(), h.clone()))));
        let (dom, cod) = f.typecheck().unwrap();
        prop_assert!(sem_eq(&s(id_of(dom), f.clone()), &f));
        prop_assert!(sem_eq(&s(f.clone(), id_of(cod)), &f));
        prop_assert!(sem_eq(&t(f.clone(), id_of(WireWord::empty())), &f));
        // interchange
        let f2 = random_diagram(&mut r, 3, k, 2);
        let lhs = t(s(f.clone(), f2.clone()), s(h.clone(), random_id_like(2)));
        let rhs = s(t(f.clone(), h.clone()), t(f2.clone(), random_id_like(2)));
        prop_assert!(sem_eq(&lhs, &rhs));
        // naturality of the symmetry
        let x = f.typecheck().unwrap();
        let y = h.typecheck().unwrap();
        let lhs = s(t(f.clone(), h.clone()), DiagTerm::Sym(x.1.clone(), y.1.clone()));
        let rhs = s(DiagTerm::Sym(x.0.clone(), y.0.clone()), t(h.clone(), f.clone()));
        prop_assert!(sem_eq(&lhs, &rhs));
    }

    #[test]
    fn bending_preserves_distance(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = random_diagram_pair(&mut r);
        let left = || id_of(WireWord(vec![Wire::L]));
        let bf = DiagTerm::tensor(f.clone(), left());
        let bg = DiagTerm::tensor(g.clone(), left());
        let plain = interpret(&bf).unwrap().distance(&interpret(&bg).unwrap(), CAP).unwrap();
        let bent = interpret(&bend(&bf).unwrap())
            .unwrap()
            .distance(&interpret(&bend(&bg).unwrap()).unwrap(), CAP)
            .unwrap();
        prop_assert_eq!(&plain, &bent);
        prop_assert_eq!(&diagram_distance(&bf, &bg, CAP).unwrap(), &diagram_distance(&f, &g, CAP).unwrap());
    }

    #[test]
    fn distance_is_the_max_over_inputs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = random_diagram_pair(&mut r);
        let m = f.typecheck().unwrap().0.len();
        let whole = diagram_distance(&f, &g, CAP).unwrap();
        let mut max = Dist::zero();
        for i in 1..=m {
            let d = diagram_distance(&component(&f, i).unwrap(), &component(&g, i).unwrap(), CAP).unwrap();
            max = max.max(d);
        }
        prop_assert_eq!(whole, max);
    }
}

fn random_id_like(n: usize) -> DiagTerm {
    DiagTerm::Id(WireWord::rs(n))
}

#[test]
fn generators_check_types() {
    assert!(parse_term("copy ; copy").unwrap().typecheck().is_err());
    assert!(interpret(&parse_term("act(a) ; merge").unwrap()).is_err());
}
