mod common;

use common::{apply_dense, dense_exp, superposition};
use nalgebra::DMatrix;
use vibsim::dynamics::{evolve, observable_trajectory, EvolutionPlan, TermOrder};
use vibsim::encoding::{encode_operator, single_op};
use vibsim::hamiltonian::build_default;
use vibsim::{build_qubit_hamiltonian, EncodingScheme, ForceField, LadderKind, ModeBasis, PauliSum, StateVector};

fn h2o_d2() -> PauliSum {
    build_default(&ForceField::h2o(), &EncodingScheme::compact(2, 3).unwrap()).unwrap().qubit_form
}

fn trotter_error(h: &PauliSum, s0: &StateVector, t: f64, n: usize) -> f64 {
    let plan = EvolutionPlan::new(h, t, n, &TermOrder::Canonical).unwrap();
    let approx = evolve(s0, &plan).unwrap();
    approx.distance(&apply_dense(&dense_exp(h, t), s0)).unwrap()
}

#[test]
fn first_order_error_scaling() {
    let h = h2o_d2();
    let s0 = superposition(3, &[0, 1, 2, 4, 7]);
    let ns = [32usize, 64, 128, 256];
    let errors: Vec<f64> = ns.iter().map(|&n| trotter_error(&h, &s0, 5.0, n)).collect();
    let xs: Vec<f64> = ns.iter().map(|&n| (1.0 / n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope - 1.0).abs() <= 0.2, "slope {slope}, errors {errors:?}");
    let ratio = errors[1] / errors[2];
    assert!((1.5..=2.5).contains(&ratio), "{errors:?}");
}

#[test]
fn commuting_terms_are_exact_at_one_step() {
    let h = common::sum(&[(0.4, "ZIZ"), (-0.3, "IZI"), (0.25, "ZZZ"), (1.1, "III")]);
    let s0 = superposition(3, &[1, 3, 6]);
    let plan = EvolutionPlan::new(&h, 2.7, 1, &TermOrder::Canonical).unwrap();
    let got = evolve(&s0, &plan).unwrap();
    assert!(got.distance(&apply_dense(&dense_exp(&h, 2.7), &s0)).unwrap() < 1e-12);
}

#[test]
fn norm_is_preserved() {
    let h = h2o_d2();
    let plan = EvolutionPlan::new(&h, 10.0, 100, &TermOrder::Canonical).unwrap();
    let s = evolve(&superposition(3, &[0, 5]), &plan).unwrap();
    assert!((s.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn reversed_backward_evolution_returns() {
    let h = h2o_d2();
    let s0 = superposition(3, &[0, 3, 6]);
    let forward = EvolutionPlan::new(&h, 5.0, 256, &TermOrder::Canonical).unwrap();
    let backward = EvolutionPlan::new(&h, -5.0, 256, &TermOrder::Reversed).unwrap();
    let back = evolve(&evolve(&s0, &forward).unwrap(), &backward).unwrap();
    assert!(back.fidelity(&s0).unwrap() >= 1.0 - 1e-8);
}

#[test]
fn energy_is_conserved() {
    for ff in [ForceField::h2o(), ForceField::so2()] {
        let h = build_default(&ff, &EncodingScheme::compact(2, 3).unwrap()).unwrap().qubit_form;
        let s0 = superposition(3, &[0, 1, 2, 4]);
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 2.5).collect();
        let tr =
            observable_trajectory(&s0, &h, std::slice::from_ref(&h), &times, 256.0, &TermOrder::Canonical).unwrap();
        let e0 = tr.values[0][0];
        for row in &tr.values {
            assert!((row[0] - e0).abs() <= 1e-6 * e0.abs(), "{}", ff.label);
        }
    }
}

#[test]
fn harmonic_eigenstate_is_stationary() {
    let ff = ForceField::from_frequencies("one", &[0.7]).unwrap();
    let scheme = EncodingScheme::compact(4, 1).unwrap();
    let h = build_default(&ff, &scheme).unwrap();
    let n = encode_operator(&single_op(LadderKind::Number, 0), &scheme).unwrap();
    let times: Vec<f64> = (0..10).map(|k| k as f64).collect();
    let tr =
        observable_trajectory(&h.basis_state(&[1]).unwrap(), &h.qubit_form, &[n], &times, 20.0, &TermOrder::Canonical)
            .unwrap();
    assert!(tr.values.iter().all(|v| (v[0] - 1.0).abs() < 1e-12));
}

/// Time of the first local minimum after `after`, refined by a parabola.
fn first_minimum(times: &[f64], values: &[f64], after: f64) -> f64 {
    for k in 1..values.len() - 1 {
        if times[k] > after && values[k] <= values[k - 1] && values[k] <= values[k + 1] {
            let (a, b, c) = (values[k - 1], values[k], values[k + 1]);
            let h = times[k] - times[k - 1];
            return times[k] + 0.5 * h * (a - c) / (a - 2.0 * b + c);
        }
    }
    panic!("no minimum found");
}

#[test]
fn localized_population_transfer_period() {
    let (w1, w2) = (1.0, 1.2);
    let ff = ForceField::from_frequencies("pair", &[w1, w2]).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let u = DMatrix::from_row_slice(2, 2, &[r, -r, r, r]);
    let scheme = EncodingScheme::compact(4, 2).unwrap();
    let h = build_qubit_hamiltonian(&ff, &scheme, &ModeBasis::Localized(u), &Default::default()).unwrap();
    let n0 = encode_operator(&single_op(LadderKind::Number, 0), &scheme).unwrap();
    let s0 = h.basis_state(&[1, 0]).unwrap();
    let times: Vec<f64> = (0..=800).map(|k| k as f64 * 0.05).collect();
    let tr = observable_trajectory(&s0, &h.qubit_form, std::slice::from_ref(&n0), &times, 64.0, &TermOrder::Canonical)
        .unwrap();
    let trotter: Vec<f64> = tr.values.iter().map(|v| v[0]).collect();
    let oracle: Vec<f64> =
        times.iter().map(|&t| apply_dense(&dense_exp(&h.qubit_form, t), &s0).expectation(&n0).unwrap()).collect();
    assert!(trotter.iter().cloned().fold(f64::INFINITY, f64::min) < 0.2);
    let period = 2.0 * first_minimum(&times, &trotter, 1.0);
    let reference = 2.0 * first_minimum(&times, &oracle, 1.0);
    assert!((period - reference).abs() / reference < 0.01, "{period} vs {reference}");
    let beat = 2.0 * std::f64::consts::PI / (w2 - w1);
    assert!((reference - beat).abs() / beat < 0.01, "{reference} vs {beat}");
}
