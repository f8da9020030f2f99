use super::crt::delta_split;
use super::*;
use crate::cyclotomic::CyclotomicScalar;
use crate::padic::PadicCtx;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type G = GroupRingElem<PadicScalar>;

fn level(p: u64, n: u32, cap: u32) -> Arc<Level> {
    Level::new(&PadicCtx::new(p, cap).unwrap(), n).unwrap()
}

fn int(l: &Arc<Level>, x: i64) -> PadicScalar {
    PadicScalar::from_i64(l.ctx(), x)
}

fn gamma(l: &Arc<Level>, r: i64) -> G {
    G::monomial(l, l.ctx(), 0, r, int(l, 1))
}

fn poly(l: &Arc<Level>, coeffs: &[i64]) -> G {
    let mut v = vec![int(l, 0); l.gamma_order()];
    for (i, c) in coeffs.iter().enumerate() {
        v[i] = int(l, *c);
    }
    G::from_gamma_poly(l, l.ctx(), v).unwrap()
}

fn support(f: &G) -> Vec<(usize, usize)> {
    f.nonzero_terms().into_iter().map(|(s, r, _)| (s, r)).collect()
}

#[test]
fn convolution_examples() {
    let l = level(3, 2, 20);
    let f = poly(&l, &[1, 1]);
    assert_eq!(f.mul(&f).unwrap(), poly(&l, &[1, 2, 1]));
    assert_eq!(G::one(&l, l.ctx()).mul(&f).unwrap(), f);
    let l = level(3, 3, 20);
    let w = l.gamma_order() as i64;
    assert_eq!(gamma(&l, 1).mul(&gamma(&l, w - 1)).unwrap(), G::one(&l, l.ctx()));
}

#[test]
fn phi_examples() {
    let l = level(3, 3, 20);
    let f = G::phi(&l, l.ctx(), 1).unwrap();
    assert_eq!(support(&f), vec![(0, 0), (0, 1), (0, 2)]);
    let l = level(3, 2, 20);
    assert_eq!(G::phi(&l, l.ctx(), 2).unwrap(), G::constant(&l, l.ctx(), int(&l, 3)));
    let l = level(5, 3, 20);
    let f = G::phi(&l, l.ctx(), 2).unwrap();
    assert_eq!(support(&f), vec![(0, 0), (0, 5), (0, 10), (0, 15), (0, 20)]);
}

#[test]
fn twist_gamma_examples() {
    let l = level(3, 3, 4);
    let g = gamma(&l, 1);
    let t = g.twist_gamma(1);
    assert_eq!(t.coeff(0, 1), &int(&l, 61));
    assert_eq!(g.twist_gamma(0), g);
    assert_eq!(G::one(&l, l.ctx()).twist_gamma(5), G::one(&l, l.ctx()));
}

#[test]
fn twisted_phi_agrees_with_twisting_below_the_level() {
    let l = level(3, 4, 30);
    for m in 1..4 {
        for j in 0..3 {
            let a = G::phi(&l, l.ctx(), m).unwrap().twist_gamma(j);
            assert_eq!(a, G::phi_twisted(&l, l.ctx(), m, j).unwrap());
        }
    }
}

#[test]
fn twist_full_on_delta_generator() {
    let l = level(5, 2, 20);
    let delta = G::monomial(&l, l.ctx(), 1, 0, int(&l, 1));
    let t = delta.twist_full(3);
    assert_eq!(t, G::monomial(&l, l.ctx(), 1, 0, l.teich_g_pow(3).clone()));
}

#[test]
fn delta_component_of_single_group_element() {
    let l = level(5, 2, 20);
    let (a, r) = (2i64, 3i64);
    let f = G::monomial(&l, l.ctx(), a, r, int(&l, 1));
    for d in 0..4 {
        let v = f.delta_component(d);
        for (i, c) in v.iter().enumerate() {
            if i == r as usize {
                assert_eq!(c, l.teich_g_pow(a * d));
            } else {
                assert!(c.is_zero());
            }
        }
    }
    // trivial Δ-support: only component 0 survives after averaging
    let h = poly(&l, &[1, 2, 3]);
    let sum: G = (0..4)
        .map(|d| G::embed_delta_component(&l, l.ctx(), d, &h.delta_component(d)).unwrap())
        .fold(G::zero(&l, l.ctx()), |a, b| a.add(&b).unwrap());
    assert_eq!(sum, h);
}

#[test]
fn b_sum_examples() {
    let l = level(3, 3, 20);
    let t = G::one(&l, l.ctx()).b_sums(1).unwrap();
    assert_eq!(t.values[0][0], int(&l, 1));
    assert!(t.values[0][1..].iter().all(|c| c.is_zero()));
    let t = gamma(&l, 3).b_sums(1).unwrap();
    assert_eq!(t.values[0][0], int(&l, 1));
    let t = G::phi(&l, l.ctx(), 2).unwrap().b_sums(2).unwrap();
    for (r, c) in t.values[0].iter().enumerate() {
        let expect = if r % 3 == 0 { 1 } else { 0 };
        assert_eq!(c, &int(&l, expect), "r = {r}");
    }
    assert!(matches!(G::one(&l, l.ctx()).b_sums(3), Err(Error::BadLevel(_))));
}

#[test]
fn divisibility_examples() {
    let l = level(3, 4, 30);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in 1..4 {
        let phi = G::phi(&l, l.ctx(), m).unwrap();
        assert!(phi.divisible_by_phi(m).unwrap());
        assert!(!G::one(&l, l.ctx()).divisible_by_phi(m).unwrap());
        for _ in 0..20 {
            let g = G::random_small(&l, &mut rng, 9);
            assert!(phi.mul(&g).unwrap().divisible_by_phi(m).unwrap());
        }
    }
    let both = G::phi(&l, l.ctx(), 1)
        .unwrap()
        .mul(&G::phi(&l, l.ctx(), 3).unwrap())
        .unwrap();
    assert!(both.divisible_by_phi(1).unwrap() && both.divisible_by_phi(3).unwrap());
}

#[test]
fn plus_admissibility_examples() {
    let l = level(5, 2, 20);
    let flat = vec![vec![int(&l, 7); l.gamma_order()]; l.delta_order()];
    assert!(G::from_rows(&l, l.ctx(), flat).unwrap().is_plus_admissible());
    // a scalar sits on the identity of Δ only
    assert!(!G::constant(&l, l.ctx(), int(&l, 7)).is_plus_admissible());
    assert!(!G::monomial(&l, l.ctx(), 1, 0, int(&l, 1)).is_plus_admissible());
    let norm = (0..4).fold(G::zero(&l, l.ctx()), |a, s| {
        a.add(&G::monomial(&l, l.ctx(), s, 0, int(&l, 1))).unwrap()
    });
    let g = poly(&l, &[3, -1, 4, 1, 5]);
    assert!(norm.mul(&g).unwrap().is_plus_admissible());
}

#[test]
fn crt_examples() {
    let l = level(3, 3, 30);
    let c = G::one(&l, l.ctx()).crt_decompose();
    for m in 0..3 {
        assert!(c.slot(m)[0] == CyclotomicScalar::one(l.ctx(), 3, m));
    }
    for m in 1..3 {
        let c = G::phi(&l, l.ctx(), m).unwrap().crt_decompose();
        for slot in 0..3 {
            assert_eq!(c.slot_is_zero(slot), slot == m);
        }
    }
}

#[test]
fn divide_exact_examples() {
    let l = level(3, 3, 30);
    let phi2 = G::phi(&l, l.ctx(), 2).unwrap();
    let q = phi2.divide_exact(2).unwrap();
    let c = q.crt_decompose();
    assert!(c.slot_is_zero(2));
    for m in 0..2 {
        assert_eq!(c.slot(m)[0], CyclotomicScalar::one(l.ctx(), 3, m));
    }

    let f = poly(&l, &[1, 1]);
    let prod = phi2.mul(&f).unwrap();
    let q = prod.divide_exact(2).unwrap();
    let (cq, cf) = (q.crt_decompose(), f.crt_decompose());
    assert_eq!(cq.slot(0), cf.slot(0));
    assert_eq!(cq.slot(1), cf.slot(1));
    assert!(cq.slot_is_zero(2));
    assert_eq!(q.mul(&phi2).unwrap(), prod);

    let l = level(3, 2, 20);
    let f = poly(&l, &[2, 5, -1]);
    let q = f.scale_padic(&int(&l, 3)).divide_exact(2).unwrap();
    assert_eq!(q, f);

    let l = level(3, 3, 30);
    assert!(matches!(
        poly(&l, &[1, 1]).divide_exact(1),
        Err(Error::NotDivisible(_))
    ));
    let low = level(3, 3, 8);
    assert!(matches!(
        G::phi(&low, low.ctx(), 1).unwrap().divide_exact(1),
        Err(Error::BadPrecision(_))
    ));
}

#[test]
fn invert_unit_examples() {
    let l = level(3, 3, 30);
    let one = G::one(&l, l.ctx());
    assert_eq!(one.invert_unit().unwrap(), one);
    for m in 1..3 {
        let phi = G::phi(&l, l.ctx(), m).unwrap();
        assert!(matches!(phi.invert_unit(), Err(Error::NotAUnit(_))));
    }
    let l = level(3, 2, 30);
    let third = PadicScalar::p_power(l.ctx(), -1);
    let f = G::phi_twisted(&l, l.ctx(), 2, 1).unwrap().scale_padic(&third);
    let inv = f.invert_unit().unwrap();
    assert_eq!(f.mul(&inv).unwrap(), G::one(&l, l.ctx()));
}

#[test]
fn twisted_phi_past_the_level_is_p_times_a_unit() {
    let l = level(3, 3, 30);
    for m in 3..6 {
        for j in 1..4 {
            let f = G::phi_twisted(&l, l.ctx(), m, j).unwrap();
            let c = f.coeff(0, 0);
            assert_eq!(c.valuation(), Some(1), "m = {m}, j = {j}");
            assert!(f.nonzero_terms().len() == 1);
        }
    }
}

#[test]
fn reduction_mod_kept_slots_preserves_those_slots() {
    let l = level(3, 3, 30);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = G::random_small(&l, &mut rng, 5);
    let r = f.reduce_mod_kept_slots(&[2]);
    let (cf, cr) = (f.crt_decompose(), r.crt_decompose());
    assert_eq!(cf.slot(0), cr.slot(0));
    assert_eq!(cf.slot(1), cr.slot(1));
    assert!(r.row(0)[3..].iter().all(|c| c.is_zero()));
}

fn arb_elem(p: u64, n: u32, cap: u32) -> impl Strategy<Value = G> {
    let l = level(p, n, cap);
    let len = l.delta_order() * l.gamma_order();
    prop::collection::vec(-40i64..40, len).prop_map(move |v| {
        let rows = v
            .chunks(l.gamma_order())
            .map(|c| c.iter().map(|x| int(&l, *x)).collect())
            .collect();
        G::from_rows(&l, l.ctx(), rows).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn crt_round_trip(f in arb_elem(3, 4, 40)) {
        let back = G::crt_reconstruct(f.level(), f.ctx(), &f.crt_decompose()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn crt_is_multiplicative(f in arb_elem(5, 2, 30), g in arb_elem(5, 2, 30)) {
        // Δ-rows convolve, so compare after splitting by Δ-characters
        let (cf, cg, cfg) = (f.crt_decompose(), g.crt_decompose(), f.mul(&g).unwrap().crt_decompose());
        let l = f.level().clone();
        for m in 0..2u32 {
            let a = delta_split(&l, cf.slot(m));
            let b = delta_split(&l, cg.slot(m));
            let c = delta_split(&l, cfg.slot(m));
            for d in 0..4 {
                prop_assert_eq!(a[d].mul(&b[d]).unwrap(), c[d].clone());
            }
        }
    }

    #[test]
    fn b_sum_criterion_matches_crt(f in arb_elem(3, 3, 30), g in arb_elem(3, 3, 30), m in 1u32..3) {
        let phi = G::phi(f.level(), f.ctx(), m).unwrap();
        for h in [f.clone(), phi.mul(&g).unwrap()] {
            prop_assert_eq!(h.divisible_by_phi(m).unwrap(), h.crt_decompose().slot_is_zero(m));
        }
    }

    #[test]
    fn divide_exact_round_trip(g in arb_elem(3, 4, 40), m in 1u32..5) {
        let phi = G::phi(g.level(), g.ctx(), m).unwrap();
        let f = phi.mul(&g).unwrap();
        let q = f.divide_exact(m).unwrap();
        prop_assert_eq!(q.mul(&phi).unwrap(), f);
    }

    #[test]
    fn twist_gamma_inverts(f in arb_elem(3, 3, 30), j in -4i64..4) {
        prop_assert_eq!(f.twist_gamma(j).twist_gamma(-j), f);
    }

    #[test]
    fn twist_gamma_is_multiplicative_mod_p_to_the_n(f in arb_elem(3, 3, 30), g in arb_elem(3, 3, 30), j in -3i64..4) {
        let lhs = f.mul(&g).unwrap().twist_gamma(j);
        let rhs = f.twist_gamma(j).mul(&g.twist_gamma(j)).unwrap();
        let diff = lhs.sub(&rhs).unwrap();
        prop_assert!(diff.min_half_valuation().is_none_or(|v| v >= 2 * 3));
    }

    #[test]
    fn twist_full_composes(f in arb_elem(5, 2, 30)) {
        prop_assert_eq!(f.twist_full(1).twist_full(1), f.twist_full(2));
    }

    #[test]
    fn delta_components_resolve_identity(f in arb_elem(5, 2, 30)) {
        let l = f.level().clone();
        let sum = (0..4).fold(G::zero(&l, l.ctx()), |acc, d| {
            acc.add(&G::embed_delta_component(&l, l.ctx(), d, &f.delta_component(d)).unwrap()).unwrap()
        });
        prop_assert_eq!(sum, f);
    }
}

#[test]
fn twist_gamma_is_exact_without_wraparound() {
    let l = level(3, 3, 30);
    let f = poly(&l, &[1, 2, 0, 4]);
    let g = poly(&l, &[3, 0, 1, 1]);
    for j in -2..3 {
        let lhs = f.mul(&g).unwrap().twist_gamma(j);
        let rhs = f.twist_gamma(j).mul(&g.twist_gamma(j)).unwrap();
        assert_eq!(lhs, rhs);
    }
}
