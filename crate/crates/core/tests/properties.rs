//! Cross-module properties over seeded random inputs.

use proptest::prelude::*;
use sral_core::families::{
    family_convolution, family_disjoint_union, family_power, family_product, family_sum, jsr_bracket,
    power_norm_table, tsr_bracket, tsr_bracket_with, BoundedFamily, JsrOptions, SummableFamily, TsrOptions,
};
use sral_core::linalg::spectrum::greedy_matching;
use sral_core::linalg::svd::singular_values;
use sral_core::linalg::{kron_lift, nilpotency_defect, op_norm, riesz_projection, schatten_norm, spectral_radius, spectrum, Contour};
use sral_core::radical::{algebra_closure, jacobson_radical, qmod_rate, tsr_mod_ideal, IdealSubspace};
use sral_core::sample;
use sral_core::{CMatrix, C64};

fn unit(i: usize, j: usize, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |r, c| if (r, c) == (i, j) { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

fn small_family(seed: u64, d: usize, k: usize, scale: f64) -> SummableFamily {
    let mut rng = sample::rng(seed);
    let members = (0..k).map(|_| sample::gaussian_matrix(&mut rng, d, d).scale_real(scale)).collect();
    SummableFamily::unit(members).unwrap()
}

/// Block upper triangular algebra on `C^4` with 2x2 diagonal blocks.
fn block_upper() -> Vec<CMatrix> {
    let mut units = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            if i / 2 <= j / 2 {
                units.push(unit(i, j, 4));
            }
        }
    }
    units
}

fn off_diagonal_block() -> Vec<CMatrix> {
    let mut units = Vec::new();
    for i in 0..2 {
        for j in 2..4 {
            units.push(unit(i, j, 4));
        }
    }
    units
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn op_norm_is_submultiplicative(seed in 0u64..10_000, m in 1usize..6, k in 1usize..6, n in 1usize..6) {
        let mut rng = sample::rng(seed);
        let a = sample::gaussian_matrix(&mut rng, m, k);
        let b = sample::gaussian_matrix(&mut rng, k, n);
        let bound = op_norm(&a) * op_norm(&b);
        prop_assert!(op_norm(&(&a * &b)) <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn schatten_p_triangle_and_ideal(seed in 0u64..10_000, n in 1usize..6, p in 0.05f64..=1.0) {
        let mut rng = sample::rng(seed);
        let x = sample::gaussian_matrix(&mut rng, n, n);
        let y = sample::gaussian_matrix(&mut rng, n, n);
        let sp = |z: &CMatrix| schatten_norm(z, p).unwrap();
        let lhs = sp(&(&x + &y)).powf(p);
        let rhs = sp(&x).powf(p) + sp(&y).powf(p);
        prop_assert!(lhs <= rhs * (1.0 + 1e-10));

        let a = sample::gaussian_matrix(&mut rng, n, n);
        let b = sample::gaussian_matrix(&mut rng, n, n);
        let axb = &(&a * &x) * &b;
        prop_assert!(sp(&axb) <= op_norm(&a) * sp(&x) * op_norm(&b) * (1.0 + 1e-10));
    }

    #[test]
    fn riesz_projection_is_a_spectral_idempotent(seed in 0u64..10_000, n in 2usize..7, inner in 1usize..6) {
        let inner = inner.min(n - 1);
        let mut rng = sample::rng(seed);
        // eigenvalues inside |z| < 0.5 for the first `inner`, in 2.5 < |z| < 3.5 after
        let mut t = sample::upper_triangular(&mut rng, n, true).scale_real(0.5);
        for i in 0..n {
            let r = if i < inner { sample::uniform(&mut rng, 0.0, 0.5) } else { sample::uniform(&mut rng, 2.5, 3.5) };
            t[(i, i)] = sample::unit_phase(&mut rng) * r;
        }
        let u = sample::unitary(&mut rng, n);
        let a = &(&u * &t) * &u.adjoint();
        let p = riesz_projection(&a, &Contour::circle(C64::new(0.0, 0.0), 1.5).unwrap()).unwrap();
        let scale = op_norm(&p).max(1.0);
        prop_assert!((&(&p * &p) - &p).max_abs() <= 1e-8 * scale);
        prop_assert!((&(&p * &a) - &(&a * &p)).max_abs() <= 1e-8 * scale * op_norm(&a));
        let q = &CMatrix::identity(n) - &p;
        let rank = |m: &CMatrix| singular_values(m).iter().filter(|&&s| s > 0.5).count();
        prop_assert_eq!(rank(&p), inner);
        prop_assert_eq!(rank(&p) + rank(&q), n);
    }

    #[test]
    fn kron_lift_spectrum_is_the_product_set(seed in 0u64..10_000, m in 1usize..5, n in 1usize..5) {
        let mut rng = sample::rng(seed);
        let a = sample::gaussian_matrix(&mut rng, m, m);
        let b = sample::gaussian_matrix(&mut rng, n, n);
        let lift = kron_lift(&a, &b, (m, n)).unwrap();
        let sa = spectrum(&a).unwrap().eigenvalues;
        let sb = spectrum(&b).unwrap().eigenvalues;
        let products: Vec<C64> = sa.iter().flat_map(|x| sb.iter().map(move |y| x * y)).collect();
        let d = greedy_matching(&spectrum(&lift).unwrap().eigenvalues, &products).unwrap();
        let scale = 1.0 + op_norm(&a) * op_norm(&b);
        prop_assert!(d <= 1e-7 * scale, "matching distance {}", d);
    }

    #[test]
    fn eta_is_submultiplicative(seed in 0u64..10_000, d in 1usize..4, k in 1usize..4) {
        let fam = small_family(seed, d, k, 0.5);
        let table = power_norm_table(&fam, 6).unwrap();
        prop_assert!(table.submultiplicativity_defect() <= 1e-12);
    }

    #[test]
    fn power_brackets_overlap(seed in 0u64..10_000, m in 2usize..4) {
        let fam = small_family(seed, 2, 2, 0.5);
        let b = tsr_bracket(&fam, 8).unwrap();
        let bm = tsr_bracket(&family_power(&fam, m).unwrap(), 3).unwrap();
        let e = m as i32;
        prop_assert!(b.lower.powi(e) <= bm.upper * (1.0 + 1e-12));
        prop_assert!(bm.lower <= b.upper.powi(e) * (1.0 + 1e-12));
    }

    #[test]
    fn convolution_and_sum_are_dominated(seed in 0u64..10_000, k in 1usize..5) {
        let m = small_family(seed, 2, 2, 0.6);
        let n = small_family(seed + 1, 2, 2, 0.6);
        let eta_k = |f: &SummableFamily| family_power(f, k).unwrap().eta();
        let conv = eta_k(&family_convolution(&m, &n).unwrap());
        let prod = eta_k(&family_product(&m, &n).unwrap());
        prop_assert!(conv <= prod * (1.0 + 1e-9));
        let sum = eta_k(&family_sum(&m, &n).unwrap());
        let union = eta_k(&family_disjoint_union(&m, &n).unwrap());
        prop_assert!(sum <= union * (1.0 + 1e-9));
    }

    #[test]
    fn combinations_are_bounded_by_the_joint_radius(seed in 0u64..10_000, k in 1usize..4) {
        let mut rng = sample::rng(seed);
        let members: Vec<CMatrix> = (0..k).map(|_| sample::gaussian_matrix(&mut rng, 2, 2)).collect();
        let jsr = jsr_bracket(&BoundedFamily::new(members.clone()).unwrap(), &JsrOptions { delta: 1e-2, budget: 200_000 }).unwrap();
        let mut combo = CMatrix::zeros(2, 2);
        let mut weight = 0.0;
        for a in &members {
            let l = sample::complex_normal(&mut rng);
            weight += l.norm();
            combo = &combo + &a.scale(l);
        }
        prop_assert!(spectral_radius(&combo).unwrap() <= weight * jsr.upper * (1.0 + 1e-9));
    }

    #[test]
    fn radical_is_nil(seed in 0u64..10_000) {
        let mut rng = sample::rng(seed);
        // upper triangular generators: the radical is the strictly upper part of the algebra
        let gens: Vec<CMatrix> = (0..2).map(|_| sample::upper_triangular(&mut rng, 3, false)).collect();
        let a = algebra_closure(&gens, true).unwrap();
        let rad = jacobson_radical(&a).unwrap();
        for _ in 0..100 {
            let mut x = CMatrix::zeros(3, 3);
            for b in rad.basis() {
                x = &x + &b.scale(sample::complex_normal(&mut rng));
            }
            prop_assert!(nilpotency_defect(&x) <= 1e-7);
        }
    }

    #[test]
    fn enlarging_the_ideal_lowers_rates(seed in 0u64..10_000) {
        let mut rng = sample::rng(seed);
        let alg = algebra_closure(&block_upper(), false).unwrap();
        let zero = IdealSubspace::zero(&alg);
        let j = IdealSubspace::generated(&alg, &off_diagonal_block()).unwrap();
        let mut a = CMatrix::zeros(4, 4);
        for b in block_upper() {
            a = &a + &b.scale(sample::complex_normal(&mut rng).scale(0.4));
        }
        let small = qmod_rate(&a, &zero, 30).unwrap();
        let large = qmod_rate(&a, &j, 30).unwrap();
        for (x, y) in large.rates.iter().zip(&small.rates) {
            prop_assert!(*x <= y * (1.0 + 1e-12));
        }
    }

    #[test]
    fn quotient_bracket_sits_below_the_full_one(seed in 0u64..10_000) {
        let mut rng = sample::rng(seed);
        let alg = algebra_closure(&block_upper(), false).unwrap();
        let j = IdealSubspace::generated(&alg, &off_diagonal_block()).unwrap();
        let members: Vec<CMatrix> = (0..2)
            .map(|_| {
                let mut a = CMatrix::zeros(4, 4);
                for b in block_upper() {
                    a = &a + &b.scale(sample::complex_normal(&mut rng).scale(0.3));
                }
                a
            })
            .collect();
        let fam = SummableFamily::unit(members).unwrap();
        let opts = TsrOptions::default();
        let q = tsr_mod_ideal(&fam, &j, 6, &opts).unwrap();
        let full = tsr_bracket_with(&fam, 6, &opts).unwrap();
        prop_assert!(q.lower >= 0.0);
        prop_assert!(q.upper <= full.upper + 1e-9);
        prop_assert!(q.intersects(&full, 1e-9));
    }
}
