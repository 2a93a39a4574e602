//! Exact-value checks of the RPROP update rule.

mod common;

use originnet_core::backprop::Gradient;
use originnet_core::network::{zero_layers, Architecture, Mlp};
use originnet_core::rprop::{rprop_step, train_rprop, update_weight, RpropCase, RpropConfig, RpropState, WeightMemory};
use proptest::prelude::*;

fn cfg() -> RpropConfig {
    RpropConfig::default()
}

fn mem(delta: f64, prev_gradient: f64, prev_step: f64) -> WeightMemory {
    WeightMemory {
        delta,
        prev_gradient,
        prev_step,
    }
}

#[test]
fn published_parameters_are_defaults() {
    let c = cfg();
    assert_eq!(c.eta_plus, 1.2);
    assert_eq!(c.eta_minus, 0.5);
    assert_eq!(c.delta_max, 50.0);
    assert_eq!(c.delta_min, 1e-6);
    assert_eq!(c.delta_init, 0.1);
    assert_eq!(c.max_epochs, 5000);
    assert_eq!(c.error_target, 1e-3);
}

#[test]
fn same_sign_grows_update_and_steps_against_gradient() {
    let mut w = 3.0;
    let mut m = mem(1.0, 1.0, -1.0);
    assert_eq!(update_weight(&mut w, 1.0, &mut m, &cfg()), RpropCase::SameSign);
    assert_eq!(m.delta, 1.2);
    assert_eq!(w, 3.0 - 1.2);
    assert_eq!(m.prev_gradient, 1.0);
    assert_eq!(m.prev_step, -1.2);

    let mut w = 3.0;
    let mut m = mem(1.0, -2.0, 1.0);
    update_weight(&mut w, -0.5, &mut m, &cfg());
    assert_eq!(w, 3.0 + 1.2);
}

#[test]
fn sign_change_shrinks_update_and_reverts_previous_step() {
    let mut w = 2.0;
    let mut m = mem(1.0, 1.0, -1.0);
    assert_eq!(update_weight(&mut w, -1.0, &mut m, &cfg()), RpropCase::SignChange);
    assert_eq!(m.delta, 0.5);
    assert_eq!(w, 3.0);
    assert_eq!(m.prev_gradient, 0.0);
}

#[test]
fn no_comparison_steps_with_unchanged_update() {
    let mut w = 0.0;
    let mut m = mem(0.1, 0.0, 0.0);
    assert_eq!(update_weight(&mut w, 4.0, &mut m, &cfg()), RpropCase::NoComparison);
    assert_eq!(m.delta, 0.1);
    assert_eq!(w, -0.1);
    assert_eq!(m.prev_gradient, 4.0);

    let mut w = 0.0;
    let mut m = mem(0.1, 0.0, 0.0);
    update_weight(&mut w, -4.0, &mut m, &cfg());
    assert_eq!(w, 0.1);
}

#[test]
fn update_value_clamps_at_upper_limit() {
    let mut w = 0.0;
    let mut m = mem(49.0, 1.0, -49.0);
    update_weight(&mut w, 1.0, &mut m, &cfg());
    assert_eq!(m.delta, 50.0);
    assert_eq!(w, -50.0);
    update_weight(&mut w, 1.0, &mut m, &cfg());
    assert_eq!(m.delta, 50.0);
}

#[test]
fn update_value_clamps_at_lower_limit() {
    let mut w = 0.0;
    let mut m = mem(1e-6, 1.0, -1e-6);
    update_weight(&mut w, -1.0, &mut m, &cfg());
    assert_eq!(m.delta, 1e-6);
    assert_eq!(w, 1e-6);
}

#[test]
fn backtracking_suppresses_adaptation_next_step() {
    let mut w = 0.0;
    let mut m = mem(1.0, 1.0, -1.0);
    update_weight(&mut w, -1.0, &mut m, &cfg());
    assert_eq!(m.delta, 0.5);
    // The gradient flips again, but the stored zero forces the no-comparison branch.
    let case = update_weight(&mut w, 1.0, &mut m, &cfg());
    assert_eq!(case, RpropCase::NoComparison);
    assert_eq!(m.delta, 0.5);
    assert_eq!(w, 1.0 - 0.5);
}

#[test]
fn first_epoch_is_uniformly_no_comparison() {
    let arch: Architecture = "3-2-2".parse().unwrap();
    let mut net = Mlp::from_layers(arch.clone(), zero_layers(&arch), 1.0).unwrap();
    let mut g = Gradient::zeros_like(&net);
    let signs = [1.0, -2.0, 0.5, -0.25];
    for (i, v) in g.layers.iter_mut().flat_map(|l| l.params_mut()).enumerate() {
        *v = signs[i % 4];
    }
    let mut st = RpropState::new(&net, cfg()).unwrap();
    rprop_step(&mut net, &g, &mut st).unwrap();
    for (w, gi) in net.layers().iter().flat_map(|l| l.params()).zip(g.iter()) {
        assert_eq!(*w, if *gi > 0.0 { -0.1 } else { 0.1 });
    }
    assert!(st.memory.iter().all(|m| m.delta == 0.1));
}

#[test]
fn rprop_step_rejects_wrong_state_size() {
    let arch: Architecture = "3-2".parse().unwrap();
    let other: Architecture = "2-2".parse().unwrap();
    let mut net = Mlp::from_layers(arch.clone(), zero_layers(&arch), 1.0).unwrap();
    let small = Mlp::from_layers(other.clone(), zero_layers(&other), 1.0).unwrap();
    let mut st = RpropState::new(&small, cfg()).unwrap();
    let g = Gradient::zeros_like(&net);
    assert!(rprop_step(&mut net, &g, &mut st).is_err());
}

#[test]
fn training_is_deterministic_and_ignores_backprop_settings() {
    let arch: Architecture = "2-3-1".parse().unwrap();
    let data = common::xor();
    let start = Mlp::init_weights(&arch, 17, 0.5, 1.0).unwrap();
    let c = RpropConfig {
        max_epochs: 200,
        ..cfg()
    };
    let mut a = start.clone();
    let mut b = start.clone();
    let ha = train_rprop(&mut a, &data, &c).unwrap();
    let hb = train_rprop(&mut b, &data, &c).unwrap();
    assert_eq!(a, b);
    assert_eq!(ha, hb);
    assert!(ha.history.iter().all(|r| r.mean_delta.is_some() || r.epoch == ha.epochs_used));
}

proptest! {
    /// Clamps hold and step magnitudes equal Δ (or the reverted step) exactly.
    #[test]
    fn update_invariants(gradients in proptest::collection::vec(-3i32..=3, 1..60)) {
        let c = cfg();
        let mut w = 0.0f64;
        let mut m = mem(c.delta_init, 0.0, 0.0);
        let mut prev_case = None;
        for gi in gradients {
            let g = f64::from(gi);
            let before_w = w;
            let before = m;
            let case = update_weight(&mut w, g, &mut m, &c);
            prop_assert!(m.delta >= c.delta_min && m.delta <= c.delta_max && m.delta > 0.0);
            match case {
                RpropCase::SameSign | RpropCase::NoComparison => {
                    let expect = if g == 0.0 { 0.0 } else { m.delta };
                    prop_assert_eq!(m.prev_step.abs(), expect);
                    prop_assert_eq!(w, before_w + m.prev_step);
                }
                RpropCase::SignChange => {
                    prop_assert_eq!(m.prev_step, -before.prev_step);
                    prop_assert_eq!(w, before_w - before.prev_step);
                    prop_assert_eq!(m.prev_gradient, 0.0);
                }
            }
            if prev_case == Some(RpropCase::SignChange) {
                prop_assert_eq!(case, RpropCase::NoComparison);
            }
            prev_case = Some(case);
        }
    }
}
