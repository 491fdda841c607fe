use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::matcore::{random, rotation_2q, Axis};

fn da(theta: f64) -> BasisGate {
    BasisGate::from_template("da", TemplateClass::Da(theta)).unwrap()
}

fn db(x: f64, y: f64) -> BasisGate {
    BasisGate::from_template("db", TemplateClass::Db(x, y)).unwrap()
}

fn dc(x: f64, y: f64, z: f64) -> BasisGate {
    BasisGate::from_template("dc", TemplateClass::Dc(x, y, z)).unwrap()
}

fn check(target: &C4x4, basis: &BasisGate) -> SynthesisPlan {
    let plan = compile_2q(target, basis).unwrap_or_else(|e| panic!("{e} for {:?}", basis.template));
    assert!(plan.assemble().distance_up_to_phase(target) < PLAN_TOL);
    assert_eq!(plan.basis_count, plan.invocations().iter().sum::<usize>());
    plan
}

#[test]
fn named_counts() {
    let cx = da(FRAC_PI_4);
    assert_eq!(check(&gates::cx(), &cx).basis_count, 1);
    assert_eq!(check(&rotation_2q(Axis::Z, FRAC_PI_8), &cx).basis_count, 2);
    assert_eq!(check(&gates::swap(), &cx).basis_count, 3);
    assert_eq!(check(&gates::swap(), &BasisGate::cx()).basis_count, 3);
    assert_eq!(check(&gates::i4(), &cx).basis_count, 0);
    assert_eq!(check(&gates::swap(), &db(FRAC_PI_4, FRAC_PI_8)).basis_count, 2);
}

#[test]
fn padding_counts() {
    let t = CartanCoordinate::new(0.7, 0.5, 0.2);
    assert_eq!(pad_rotations(&t, &da(PI / 16.0)).invocations, 6);
    assert_eq!(pad_rotations(&CartanCoordinate::new(0.0, 0.0, 0.0), &da(PI / 16.0)).invocations, 0);
    let p = pad_rotations(&CartanCoordinate::new(FRAC_PI_4, FRAC_PI_8, 0.0), &db(FRAC_PI_4, FRAC_PI_8));
    assert_eq!(p.invocations, 1);
    assert!(p.residual.iter().all(|r| r.abs() < 1e-12));
}

#[test]
fn bound_examples() {
    let swap = CartanCoordinate::new(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4);
    assert_eq!(lower_bound(&swap, &da(PI / 28.0)).n_lower, 7);
    assert_eq!(lower_bound(&CartanCoordinate::new(0.0, 0.0, 0.0), &da(0.3)).n_lower, 0);
    assert_eq!(lower_bound(&CartanCoordinate::new(FRAC_PI_8, 0.0, 0.0), &da(PI / 16.0)).n_lower, 2);
}

#[test]
fn doubled_dc() {
    assert!((eq18_angle([FRAC_PI_8, PI / 16.0, PI / 32.0]) - FRAC_PI_4).abs() < 1e-15);
    let g = dc(FRAC_PI_8, PI / 16.0, PI / 32.0);
    let e = doubled_primitive(&g, 0).unwrap();
    assert!((e.coord[0] - FRAC_PI_4).abs() < 1e-9 && e.coord[1].abs() < 1e-9);
}

#[test]
fn random_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..60 {
        let target = random::u4(&mut rng);
        let basis = match i % 3 {
            0 => da(rng.random_range(0.05..FRAC_PI_4)),
            1 => {
                let x = rng.random_range(0.1..FRAC_PI_4);
                db(x, rng.random_range(0.02..x))
            }
            _ => {
                let x = rng.random_range(0.1..FRAC_PI_4);
                let y = rng.random_range(0.05..x);
                dc(x, y, rng.random_range(-y..y))
            }
        };
        let plan = check(&target, &basis);
        assert!(plan.basis_count >= lower_bound(&plan.target_coord, &basis).n_lower);
    }
}

#[test]
fn residual_stays_small_for_da() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let target = random::u4(&mut rng);
        let basis = da(PI / 16.0);
        let kak = kak_decompose(&target).unwrap();
        let padding = pad_rotations(&kak.coord, &basis);
        let plan = synth_residual_da(&target, &padding, &basis).unwrap();
        assert!(plan.basis_count - padding.invocations <= 3, "{:?}", kak.coord);
    }
}

#[test]
fn dc_residual_is_even() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let basis = dc(0.3, 0.2, 0.1);
    for _ in 0..20 {
        let target = random::u4(&mut rng);
        let kak = kak_decompose(&target).unwrap();
        let padding = pad_rotations(&kak.coord, &basis);
        let plan = synth_residual_dc(&target, &padding, &basis).unwrap();
        assert_eq!((plan.basis_count - padding.invocations) % 2, 0);
    }
}

#[test]
fn mixed_prefers_small_angle() {
    let model = HardwareModel::default();
    let bases = [da(FRAC_PI_4), da(PI / 16.0)];
    let target = rotation_2q(Axis::Z, PI / 32.0);
    let plan = compile_2q_mixed(&target, &bases, Objective::MaxFidelity, &model).unwrap();
    assert_eq!(plan.invocations(), vec![0, 2]);
    assert!(plan.residual_achieved < PLAN_TOL);
}

