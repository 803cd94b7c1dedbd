//! Algebraic properties of the two scoring functions and the conversion
//! between them, checked against scores computed here from raw rows.

use num_complex::Complex64;
use proptest::prelude::*;

use holex::models::{converted_rank, hole_to_complex, ComplExModel, HolEModel};
use holex::spectral;

fn oracle_hole_score(r: &[f64], s: &[f64], o: &[f64]) -> f64 {
    let k = r.len();
    (0..k)
        .map(|shift| r[shift] * (0..k).map(|i| s[i] * o[(i + shift) % k]).sum::<f64>())
        .sum()
}

fn oracle_complex_score(r: &[Complex64], s: &[Complex64], o: &[Complex64]) -> f64 {
    r.iter().zip(s).zip(o).map(|((r, s), o)| (r * s * o.conj()).re).sum()
}

/// `|a − b|` relative to the sum of absolute product terms, so random draws
/// that happen to cancel to near zero do not inflate the error.
fn gap(a: f64, b: f64, magnitude: f64) -> f64 {
    if magnitude == 0.0 {
        (a - b).abs()
    } else {
        (a - b).abs() / magnitude
    }
}

fn abs_row(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.abs()).collect()
}

fn hole_models() -> impl Strategy<Value = HolEModel> {
    (1usize..=16, any::<u64>()).prop_map(|(k, seed)| HolEModel::init(4, 2, k, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn converted_scores_are_proportional(model in hole_models()) {
        let k = model.rank();
        let complex = hole_to_complex(&model).unwrap();
        prop_assert_eq!(complex.rank(), converted_rank(k));
        for p in 0..2 {
            for s in 0..4 {
                for o in 0..4 {
                    let (r, es, eo) = (model.relations.row(p), model.entities.row(s), model.entities.row(o));
                    let h = oracle_hole_score(r, es, eo);
                    let m = oracle_hole_score(&abs_row(r), &abs_row(es), &abs_row(eo));
                    let c = oracle_complex_score(&complex.relation(p), &complex.entity(s), &complex.entity(o));
                    prop_assert!(gap(h, 2.0 / k as f64 * c, m) <= 1e-9, "K={} {} vs {}", k, h, c);
                    prop_assert!(gap(h, model.score_direct(p, s, o), m) <= 1e-12);
                    prop_assert!(gap(h, model.score_fourier(p, s, o), m) <= 1e-9);
                    prop_assert!(gap(2.0 / k as f64 * c, 2.0 / k as f64 * complex.score(p, s, o), m) <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn converted_model_uses_the_same_memory_up_to_one_slot(model in hole_models()) {
        let k = model.rank();
        let complex = hole_to_complex(&model).unwrap();
        // Slot 0 (and slot 1 for even K) has an identically zero imaginary
        // part; the remaining reals number exactly K.
        let zero_slots = if k % 2 == 0 { 2 } else { 1 };
        prop_assert_eq!(2 * complex.rank() - zero_slots, k);
        for i in 0..4 {
            let row = complex.entity(i);
            prop_assert_eq!(row[0].im, 0.0);
            if k % 2 == 0 {
                prop_assert_eq!(row[1].im, 0.0);
            }
        }
    }

    #[test]
    fn imaginary_relations_are_antisymmetric_real_ones_symmetric(
        k in 1usize..=8,
        values in prop::collection::vec(-2.0..2.0f64, 48),
    ) {
        let entity = |i: usize| -> Vec<Complex64> {
            (0..k).map(|j| Complex64::new(values[(i * 2 * k + 2 * j) % 48], values[(i * 2 * k + 2 * j + 1) % 48])).collect()
        };
        let entities = vec![entity(0), entity(1), entity(2)];
        let imaginary: Vec<Complex64> = (0..k).map(|j| Complex64::new(0.0, values[(j + 7) % 48])).collect();
        let real: Vec<Complex64> = (0..k).map(|j| Complex64::new(values[(j + 11) % 48], 0.0)).collect();
        let model = ComplExModel::from_rows(&entities, &[imaginary, real]).unwrap();
        for s in 0..3 {
            for o in 0..3 {
                // Equal up to the association order of the products.
                prop_assert!((model.score(0, s, o) + model.score(0, o, s)).abs() <= 1e-12 * 8.0 * k as f64);
                prop_assert!((model.score(1, s, o) - model.score(1, o, s)).abs() <= 1e-12 * 8.0 * k as f64);
            }
        }
    }
}

#[test]
fn even_rank_conversion_has_one_extra_slot() {
    for k in 1usize..=16 {
        let expected = if k % 2 == 0 { k / 2 + 1 } else { k.div_ceil(2) };
        assert_eq!(converted_rank(k), expected);
    }
}

/// With standard basis entities, `φ_hole(r, e_i, e_j) = r[(j − i) mod K]`,
/// so symmetry over all pairs holds exactly when `r[d] = r[−d]`, which in
/// turn holds exactly when the spectrum of `r` is real.
#[test]
fn hole_symmetry_iff_real_relation_spectrum() {
    let relations: Vec<Vec<f64>> = vec![
        vec![1.0, 2.0, 3.0, 2.0],
        vec![1.0, 2.0, 3.0, 4.0],
        vec![0.5, -1.0, 0.25, 0.25, -1.0],
        vec![0.5, -1.0, 0.25, 0.3, -1.0],
        vec![3.0],
        vec![1.0, -2.0],
        vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
    ];
    for r in relations {
        let k = r.len();
        let basis: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        let model = HolEModel::from_rows(&basis, std::slice::from_ref(&r)).unwrap();
        let symmetric = (0..k).all(|s| (0..k).all(|o| (model.score_direct(0, s, o) - model.score_direct(0, o, s)).abs() < 1e-12));
        let spectrum = spectral::dft(&r).unwrap();
        let real_spectrum = spectrum.iter().all(|z| (z - z.conj()).norm() < 1e-9);
        assert_eq!(symmetric, real_spectrum, "r = {r:?}");
        for s in 0..k {
            for o in 0..k {
                assert_eq!(model.score_direct(0, s, o), r[(o + k - s) % k]);
            }
        }
    }
}

#[test]
fn real_spectrum_relation_makes_random_hole_entities_symmetric() {
    let model = HolEModel::init(6, 1, 7, 5).unwrap();
    let r = vec![0.3, -0.2, 0.9, 0.1, 0.1, 0.9, -0.2];
    let symmetric = HolEModel::from_rows(
        &model.entities.iter_rows().map(<[f64]>::to_vec).collect::<Vec<_>>(),
        &[r],
    )
    .unwrap();
    for s in 0..6 {
        for o in 0..6 {
            let gap = symmetric.score_direct(0, s, o) - symmetric.score_direct(0, o, s);
            assert!(gap.abs() < 1e-12);
        }
    }
}
