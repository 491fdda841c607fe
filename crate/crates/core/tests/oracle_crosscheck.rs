use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use cartan_synth::kak::TemplateClass;
use cartan_synth::matcore::random;
use cartan_synth::oracle::{brute_force_min_count, numeric_refine, CandidateTemplate, FEASIBLE_TOL};
use cartan_synth::synth::{compile_2q, BasisGate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// The invariant-based search and the full-matrix refiner agree on where a
// depth becomes feasible.
#[test]
fn search_agrees_with_full_refinement() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let basis = TemplateClass::Da(FRAC_PI_8).coord().to_matrix();
    for i in 0..3 {
        let t = random::u4(&mut rng);
        let n = brute_force_min_count(&t, &basis, 6, 8).unwrap().expect("feasible within 6");
        let below = numeric_refine(&CandidateTemplate::repeated(&basis, n - 1), &t, 20_000, 8, i).distance;
        let at = numeric_refine(&CandidateTemplate::repeated(&basis, n), &t, 20_000, 8, i).distance;
        assert!(below > 1e-3, "depth {} reached {below:e}", n - 1);
        assert!(at < FEASIBLE_TOL, "depth {n} only reached {at:e}");
    }
}

#[test]
fn search_is_monotone_in_depth() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let basis = TemplateClass::Da(FRAC_PI_4).coord().to_matrix();
    let t = random::u4(&mut rng);
    let n = brute_force_min_count(&t, &basis, 6, 8).unwrap().unwrap();
    for m in n..=n + 2 {
        let r = numeric_refine(&CandidateTemplate::repeated(&basis, m), &t, 20_000, 8, m as u64);
        assert!(r.distance < FEASIBLE_TOL, "depth {m}: {:e}", r.distance);
    }
}

#[test]
fn compiled_counts_never_beat_the_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let b = BasisGate::from_template("db", TemplateClass::Db(FRAC_PI_4, FRAC_PI_8)).unwrap();
    for _ in 0..10 {
        let t = random::u4(&mut rng);
        let plan = compile_2q(&t, &b).unwrap();
        let best = brute_force_min_count(&t, &b.matrix, 6, 8).unwrap().unwrap();
        assert!(plan.basis_count >= best);
    }
}
