use std::collections::BTreeMap;

use nalgebra::DMatrix;
use nehari_core::certificates::build_construction;
use nehari_core::exact::Sqrt2Power;
use nehari_core::hankel::{
    build_matrix, helson_weights, largest_singular_value, operator_norm, power_iteration_norm, schur_bound,
    schur_bound_exact, tensor_norm_exact, HankelSymbol, NormMethod,
};
use nehari_core::multiplicative_index::MonomialId;
use nehari_core::poly_torus::Polynomial;
use nehari_core::Error;
use num_complex::Complex64;

fn ids(ns: &[u64]) -> Vec<MonomialId> {
    ns.iter().map(|&n| MonomialId::new(n).unwrap()).collect()
}

fn real(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    m.map(|z| {
        assert_eq!(z.im, 0.0);
        z.re
    })
}

#[test]
fn d2_matrix() {
    let c = build_construction(2).unwrap();
    let m = build_matrix(&c.psi, &ids(&[1, 2, 3])).unwrap();
    let expected = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    assert_eq!(real(&m.to_dense()), expected);
}

#[test]
fn schur_examples() {
    let c = build_construction(2).unwrap();
    let m = build_matrix(&c.psi, &c.j).unwrap();
    assert!((schur_bound(&m, &c.weights).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(schur_bound_exact(&m, &c.weights).unwrap(), Some(Sqrt2Power::pow_sqrt2(1)));

    let c = build_construction(12).unwrap();
    let m = build_matrix(&c.psi, &c.j).unwrap();
    assert_eq!(schur_bound_exact(&m, &c.weights).unwrap(), Some(Sqrt2Power::pow_sqrt2(6)));
    assert_eq!(tensor_norm_exact(12).unwrap(), Sqrt2Power::new(8, 0));

    let psi = HankelSymbol::new(
        Polynomial::from_terms(1, [(MonomialId::new(2).unwrap(), Complex64::new(-1.0, 0.0))]).unwrap(),
    );
    let m = build_matrix(&psi, &ids(&[1, 2])).unwrap();
    let w = helson_weights(2, &ids(&[1, 2])).unwrap();
    assert!(matches!(schur_bound(&m, &w), Err(Error::NegativeEntry { .. })));
    assert!(matches!(helson_weights(2, &ids(&[4])), Err(Error::OutsideDivisorClosure(4))));
}

#[test]
fn operator_norms_through_d12() {
    for d in (2..=12).step_by(2) {
        let c = build_construction(d).unwrap();
        let m = build_matrix(&c.psi, &c.j).unwrap();
        let r = operator_norm(&m, 1e-13).unwrap();
        assert!((r.value - 2f64.powf(d as f64 / 4.0)).abs() < 1e-9, "d = {d}: {}", r.value);
        let expected = if c.j.len() <= 512 { NormMethod::ExactSvd } else { NormMethod::PowerIteration };
        assert_eq!(r.method, expected);
    }
}

#[test]
fn power_iteration_agrees_with_svd() {
    for d in [4, 6, 8] {
        let c = build_construction(d).unwrap();
        let m = build_matrix(&c.psi, &c.j).unwrap();
        let svd = largest_singular_value(&m.to_dense());
        let power = power_iteration_norm(&m, 1e-14, 100_000).unwrap();
        assert!((svd - power.value).abs() < 1e-9, "d = {d}");
    }
}

/// Sorted singular values of the `(d/2)`-fold Kronecker power of the pair block.
fn kronecker_oracle(d: usize) -> Vec<f64> {
    let mut s: Vec<f64> = kron_entries(d).singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

#[test]
fn kronecker_structure() {
    for d in [2, 4, 6] {
        let c = build_construction(d).unwrap();
        let m = real(&build_matrix(&c.psi, &c.j).unwrap().to_dense());
        let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
        s.sort_by(f64::total_cmp);
        let oracle = kronecker_oracle(d);
        assert_eq!(s.len(), oracle.len());
        for (a, b) in s.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10, "d = {d}");
        }
        assert_eq!(nonzeros(&m), nonzeros(&kron_entries(d)));
    }
}

fn kron_entries(d: usize) -> DMatrix<f64> {
    let block = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    let mut k = DMatrix::from_element(1, 1, 1.0);
    for _ in 0..d / 2 {
        k = k.kronecker(&block);
    }
    k
}

fn nonzeros(m: &DMatrix<f64>) -> usize {
    m.iter().filter(|&&v| v != 0.0).count()
}

#[test]
fn entries_depend_only_on_products() {
    let psi = HankelSymbol::new(
        Polynomial::from_terms(
            3,
            [(6, 1.5), (10, -2.0), (30, 0.25), (5, 1.0)]
                .map(|(n, c)| (MonomialId::new(n).unwrap(), Complex64::new(c, 0.5))),
        )
        .unwrap(),
    );
    let index_set = ids(&[1, 2, 3, 5, 6, 10, 15, 30]);
    let m = build_matrix(&psi, &index_set).unwrap();
    let mut by_product: BTreeMap<u64, Complex64> = BTreeMap::new();
    for (i, j) in index_set.iter().enumerate() {
        for (k, l) in index_set.iter().enumerate() {
            let n = j.get() * l.get();
            let v = m.entry(i, k);
            assert_eq!(v, psi.polynomial().coeff(MonomialId::new(n).unwrap()));
            assert_eq!(*by_product.entry(n).or_insert(v), v);
        }
    }
}
