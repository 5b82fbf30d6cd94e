use nehari_core::certificates::{build_construction, pair_sum_product};
use nehari_core::hankel::HankelSymbol;
use nehari_core::multiplicative_index::{divisors, MonomialId};
use nehari_core::poly_torus::{lp_norm_quadrature, Polynomial, DEFAULT_QUADRATURE_BUDGET};
use nehari_core::weak_factorization::{
    default_grid, section_is_complete, wf_cost, wf_norm_dual, wf_norm_primal, ExplicitFactorization, FactorizationGrid,
};
use nehari_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn reconstruction_error(f: &Polynomial, factorization: &ExplicitFactorization) -> f64 {
    let product = factorization.product(f.dim()).unwrap();
    let diff = product.add(&f.scale(Complex64::new(-1.0, 0.0))).unwrap();
    diff.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max)
}

#[test]
fn construction_d2_and_d4() {
    for (d, expected) in [(2, 2f64.sqrt()), (4, 2.0)] {
        let c = build_construction(d).unwrap();
        let grid = default_grid(&c.f).unwrap();
        let (result, factorization) = wf_norm_primal(&c.f, &grid, 1e-8).unwrap();
        assert!((result.upper - expected).abs() < 1e-6, "d = {d}: {}", result.upper);
        assert!((result.lower - expected).abs() < 1e-6);
        assert!(reconstruction_error(&c.f, &factorization) < 1e-8);
        assert!((wf_cost(&factorization) - result.upper).abs() < 1e-12);
        let dual = wf_norm_dual(&c.f, &c.psi, &grid).unwrap();
        assert!((dual - expected).abs() < 1e-9);
        assert!(section_is_complete(&c.psi, &grid).unwrap());
    }
}

#[test]
fn trivial_factorization_costs_l2() {
    let f = pair_sum_product(8).unwrap();
    let trivial = ExplicitFactorization::trivial(&f);
    assert!((wf_cost(&trivial) - 4.0).abs() < 1e-12);
    assert!(reconstruction_error(&f, &trivial) == 0.0);
}

#[test]
fn nested_grids_do_not_increase_the_value() {
    let d = 2;
    let f = Polynomial::from_terms(
        d,
        [(4, 1.0), (6, -0.5), (9, 0.75)].map(|(n, c)| (MonomialId::new(n).unwrap(), Complex64::new(c, 0.0))),
    )
    .unwrap();
    let small = default_grid(&f).unwrap();
    let mut rows: Vec<MonomialId> = small.rows().to_vec();
    rows.extend(divisors(MonomialId::new(36).unwrap(), d).unwrap());
    let large = FactorizationGrid::square(rows).unwrap();
    let (a, _) = wf_norm_primal(&f, &small, 1e-9).unwrap();
    let (b, _) = wf_norm_primal(&f, &large, 1e-9).unwrap();
    assert!(b.upper <= a.upper + 1e-6, "{} > {}", b.upper, a.upper);
}

#[test]
fn dual_with_custom_symbol() {
    let c = build_construction(2).unwrap();
    let grid = default_grid(&c.f).unwrap();
    let psi = HankelSymbol::new(c.f.scale(Complex64::new(0.0, 3.0)));
    let dual = wf_norm_dual(&c.f, &psi, &grid).unwrap();
    assert!((dual - 2f64.sqrt()).abs() < 1e-9);
}

fn small_poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(((0u32..=2, 0u32..=2), -2.0..2.0f64, -2.0..2.0f64), 1..5).prop_map(|terms| {
        Polynomial::from_terms(
            2,
            terms
                .into_iter()
                .map(|((a, b), re, im)| (MonomialId::new(2u64.pow(a) * 3u64.pow(b)).unwrap(), Complex64::new(re, im))),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bounds_are_ordered(f in small_poly()) {
        prop_assume!(f.h2_norm() > 1e-3);
        let grid = default_grid(&f).unwrap();
        let (upper, lower) = match wf_norm_primal(&f, &grid, 1e-9) {
            Ok((result, factorization)) => {
                prop_assert!(reconstruction_error(&f, &factorization) < 1e-6);
                prop_assert!((wf_cost(&factorization) - result.upper).abs() < 1e-9 * (1.0 + result.upper));
                (result.upper, result.lower)
            }
            Err(Error::SolverNotConverged { upper, lower, .. }) => (upper, lower),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let l1 = lp_norm_quadrature(&f, 1.0, 256, DEFAULT_QUADRATURE_BUDGET).unwrap().value;
        prop_assert!(upper >= l1 - 1e-3 * (1.0 + l1));
        prop_assert!(upper <= f.h2_norm() + 1e-6 * (1.0 + f.h2_norm()));
        prop_assert!(lower <= upper + 1e-6 * (1.0 + upper));
        let dual = wf_norm_dual(&f, &HankelSymbol::new(f.clone()), &grid).unwrap();
        prop_assert!(dual <= upper + 1e-6 * (1.0 + upper));
    }
}
