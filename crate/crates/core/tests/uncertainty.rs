use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roi_core::blw::{correlation, retrieved_x, retrieving_joint, uncertainty_sum, w2_sq, worst_case_delta_sq, BinaryDist};
use roi_core::linalg::born_prob;
use roi_core::measurements::noisy_z;
use roi_core::states::{from_bloch, Projector};
use roi_core::photonic::tomography_prob;
use roi_core::{BinaryPovm, JointPovm, Outcome, PolKet};

fn random_pure(rng: &mut impl Rng) -> PolKet {
    let z: f64 = rng.random_range(-1.0..1.0);
    PolKet::from_angles(z.acos() / 2.0, rng.random_range(0.0..std::f64::consts::TAU))
}

fn random_mixed(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [0, 1, 2].map(|_| rng.random_range(-1.0..1.0));
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

fn dist(p: &BinaryPovm, rho: &roi_core::CMatrix) -> BinaryDist {
    BinaryDist::new(born_prob(p.plus(), rho).unwrap()).unwrap()
}

#[test]
fn spectral_worst_case_matches_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let states: Vec<_> = (0..10_000).map(|_| random_pure(&mut rng).density()).collect();
    for gamma in [0.1, FRAC_PI_8, 0.6] {
        let a = noisy_z(gamma).unwrap();
        let b = retrieved_x(gamma).unwrap();
        for (p, q) in [(&a, BinaryPovm::sharp_z()), (&b, BinaryPovm::sharp_x())] {
            let sampled = states.iter().map(|r| w2_sq(dist(p, r), dist(&q, r))).fold(0.0, f64::max);
            let spectral = worst_case_delta_sq(p, &q).unwrap();
            assert!(sampled <= spectral + 1e-12);
            assert!(spectral - sampled < 1e-3, "gamma {gamma}: {spectral} vs {sampled}");
        }
    }
}

#[test]
fn two_branch_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10_000 {
        let rho = from_bloch(random_mixed(&mut rng));
        let gamma = rng.random_range(0.0..=FRAC_PI_4);
        let s = uncertainty_sum(gamma, &rho).unwrap();
        let bound = if gamma <= FRAC_PI_8 {
            2.0 - (2.0 * gamma).cos().powi(2)
        } else {
            2.0 - (2.0 * gamma).sin().powi(2)
        };
        assert!(s >= bound - 1e-12);
    }
}

#[test]
fn state_dependent_distance_sum_is_bounded() {
    let a = noisy_z(FRAC_PI_8).unwrap();
    let b = retrieved_x(FRAC_PI_8).unwrap();
    let (z, x) = (BinaryPovm::sharp_z(), BinaryPovm::sharp_x());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let r = random_mixed(&mut rng);
        let rho = from_bloch(r);
        let sum = w2_sq(dist(&a, &rho), dist(&z, &rho)) + w2_sq(dist(&b, &rho), dist(&x, &rho));
        assert!((sum - (2.0 - SQRT_2) * (r[0].abs() + r[2].abs())).abs() < 1e-12);
        assert!(sum <= 2.0 * (SQRT_2 - 1.0) + 1e-12);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rho = from_bloch([s, 0.0, s]);
    let sum = w2_sq(dist(&a, &rho), dist(&z, &rho)) + w2_sq(dist(&b, &rho), dist(&x, &rho));
    assert!((sum - 2.0 * (SQRT_2 - 1.0)).abs() < 1e-12);
}

#[test]
fn relabelling_one_margin_flips_the_correlation() {
    let g = retrieving_joint(0.3).unwrap();
    let e = g.effects();
    let flipped = JointPovm::new([e[1].clone(), e[0].clone()]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let rho = from_bloch(random_mixed(&mut rng));
        let (c, f) = (correlation(&g, &rho), correlation(&flipped, &rho));
        if let (Ok(c), Ok(f)) = (c, f) {
            assert!((c + f).abs() < 1e-12);
        }
    }
}

#[test]
fn tomography_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let ket = random_pure(&mut rng);
        let gamma = rng.random_range(0.0..=FRAC_PI_4);
        let mut z_plus = 0.0;
        for a in Outcome::BOTH {
            let all: f64 = Projector::ALL.iter().map(|p| tomography_prob(&ket, gamma, a, &p.ket()).unwrap()).sum();
            let outcome = born_prob(noisy_z(gamma).unwrap().effect(a), &ket.density()).unwrap();
            assert!((all - 3.0 * outcome).abs() < 1e-12);
            z_plus += tomography_prob(&ket, gamma, a, &Projector::ZPlus.ket()).unwrap();
        }
        assert!((z_plus - ket.h.norm_sqr()).abs() < 1e-12);
    }
}
