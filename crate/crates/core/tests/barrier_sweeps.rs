mod common;

use common::ExactProfile;
use qklab_core::barriers::{self, BarrierName};
use qklab_core::picard;
use qklab_core::shoot::{self, IntegrationConfig, SlopeField};

#[test]
fn dense_grids_hold_for_all_barriers() {
    for n in 2..=8 {
        let grid = barriers::uniform_grid(n, 10_000);
        for check in barriers::check_all(n, &grid).unwrap() {
            assert!(check.passed, "n={n} {:?} worst {:?}", check.name, check.worst());
            assert_eq!(check.margins.len(), 10_000);
        }
    }
}

#[test]
fn w0_margin_vanishes_at_axis_and_w2_at_edge() {
    let n = 4;
    let c0 = barriers::check_w0(n, &[1e-8]).unwrap();
    assert!(c0.margins[0].abs() < 1e-13 && c0.passed);
    let c2 = barriers::check_w2(n, &barriers::uniform_grid(n, 100)).unwrap();
    assert_eq!(c2.name, BarrierName::W2Sub);
    assert!(c2.margins.last().unwrap().abs() < 1e-5);
    // r -> 0 limit of the w2 inequality is 1/n
    let c = barriers::check_w2(n, &[1e-12]).unwrap();
    assert!((c.margins[0] - 0.25).abs() < 1e-9);
}

#[test]
fn shooting_solutions_are_sandwiched() {
    for n in 2..=6 {
        let (curve, _) = shoot::integrate(&SlopeField::extremal(n).unwrap(), &IntegrationConfig::default()).unwrap();
        let rep = barriers::sandwich_verify(&curve).unwrap();
        assert!(rep.passed(), "n={n} {:?}", rep.checks);
        // the logarithmic lower bound does not order with the solution
        let w2 = rep.check("u_lower_w2").unwrap();
        assert!(w2.informational && !w2.passed);
    }
}

#[test]
fn oracle_profile_is_sandwiched_near_edge() {
    for n in 3..=6 {
        let ex = ExactProfile { n };
        let edge = 1.0 / n as f64;
        for i in 1..=50 {
            let r = edge * (1.0 - 1e-6) * i as f64 / 50.0;
            let v = ex.v(r);
            assert!(v >= n as f64 * r - 1e-12);
            assert!(v <= barriers::w1(n, r));
        }
    }
}

#[test]
fn no_height_blow_up_before_one_over_n() {
    for n in 3..=6 {
        let (curve, rep) = shoot::integrate(&SlopeField::extremal(n).unwrap(), &IntegrationConfig::default()).unwrap();
        assert_eq!(barriers::blow_up_certificate(&curve, 10.0), None, "n={n}");
        // the height passes 10 only beyond 1/n, near the singular radius
        let r10 = curve.samples.iter().find(|s| s.u >= 10.0).unwrap().r;
        assert!(r10 > 1.0 / n as f64 && r10 < rep.radius_estimate);
    }
}

#[test]
fn picard_grid_curve_is_sandwiched() {
    let w = picard::shrink_to_contraction(3).unwrap();
    let ex = ExactProfile { n: 3 };
    let nodes: Vec<f64> = w.grid().iter().map(|&r| ex.v(r)).collect();
    let curve = picard::curve_from_nodes(&w, &nodes).unwrap();
    assert!(barriers::sandwich_verify(&curve).unwrap().passed());
}
