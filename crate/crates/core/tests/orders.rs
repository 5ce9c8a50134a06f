use cmmb::calibrate::chain_table;
use cmmb::cmb::{self, DiscretePmf};
use cmmb::geometry::{limit_pmf, Direction};
use cmmb::orders::{
    cmmb, cx_dominates, exchangeable_from_sum, is_supermodular, na_check_exhaustive,
    pairwise_covariance, sign_changes, sm_dominates_lp, stop_loss,
};
use cmmb::{CmbParams, Error, MultiAffinePmf};
use proptest::prelude::*;

fn calibrated(nu: f64) -> DiscretePmf {
    let row = chain_table(9, 1.0 / 3.0, &[nu]).unwrap()[0];
    cmb::pmf(&CmbParams::new(9, row.r, nu).unwrap())
}

fn half(d: usize, nu: f64) -> MultiAffinePmf {
    cmmb(&CmbParams::new(d, 0.5, nu).unwrap()).expand().unwrap()
}

#[test]
fn calibrated_chain_is_cx_decreasing() {
    let laws: Vec<DiscretePmf> = (1..=5).map(|nu| calibrated(nu as f64)).collect();
    for i in 0..5 {
        for j in i + 1..5 {
            // the calibrated means agree to twice the solver tolerance
            assert!(cx_dominates(&laws[i], &laws[j], 1e-9).unwrap(), "nu {} vs {}", i + 1, j + 1);
            assert!(!cx_dominates(&laws[j], &laws[i], 1e-9).unwrap());
            let s = sign_changes(&laws[i], &laws[j]).unwrap();
            assert_eq!(s.changes(), 2, "nu {} vs {}", i + 1, j + 1);
            assert_eq!(s.signs, vec![1, -1, 1]);
        }
    }
    assert!(laws.windows(2).all(|w| w[1].variance() < w[0].variance()));
}

#[test]
fn stop_loss_matches_binomial_value() {
    // E[(W - 3)_+] for Binomial(9, 1/3), summed in exact rationals offline
    let binomial = cmb::pmf(&CmbParams::new(9, 1.0 / 3.0, 1.0).unwrap());
    assert!((stop_loss(&binomial, 3.0) - 0.546_258_192_348_727_3).abs() < 1e-12);
}

#[test]
fn plus_inf_limit_is_cx_minimal() {
    let limit = limit_pmf(9, Direction::PlusInf).unwrap();
    for nu in 1..=5 {
        let f = cmb::pmf(&CmbParams::new(9, 0.5, nu as f64).unwrap());
        assert!(cx_dominates(&f, &limit, 1e-12).unwrap());
    }
    let spread = limit_pmf(9, Direction::MinusInf).unwrap();
    assert!(cx_dominates(&spread, &limit, 1e-12).unwrap());
}

#[test]
fn cx_mean_mismatch_is_domain_error() {
    let a = cmb::pmf(&CmbParams::new(9, 0.3, 1.0).unwrap());
    let b = cmb::pmf(&CmbParams::new(9, 0.4, 1.0).unwrap());
    assert!(matches!(cx_dominates(&a, &b, 1e-12), Err(Error::Domain(_))));
}

#[test]
fn supermodular_chain_at_d3() {
    let (nu1, nu2) = (half(3, 1.0), half(3, 2.0));
    let v = sm_dominates_lp(&nu2, &nu1).unwrap();
    assert!(v.dominates && v.witness.is_none());
    let back = sm_dominates_lp(&nu1, &nu2).unwrap();
    assert!(!back.dominates && back.gap > 1e-6);
    let phi = back.witness.expect("witness");
    assert!(is_supermodular(&phi, 3, 1e-9));
    assert!(nu1.expectation(&phi) > nu2.expectation(&phi));

    let indep = MultiAffinePmf::independent(&[0.5; 3]).unwrap();
    let upper = MultiAffinePmf::upper_frechet(3, 0.5).unwrap();
    assert!(sm_dominates_lp(&indep, &upper).unwrap().dominates);
    assert!(!sm_dominates_lp(&upper, &indep).unwrap().dominates);
    assert!(sm_dominates_lp(&upper, &upper).unwrap().dominates);
}

#[test]
fn supermodular_rejects_margin_mismatch() {
    let a = MultiAffinePmf::independent(&[0.5, 0.5, 0.5]).unwrap();
    let b = MultiAffinePmf::independent(&[0.5, 0.4, 0.5]).unwrap();
    assert!(matches!(sm_dominates_lp(&a, &b), Err(Error::Domain(_))));
    let c = MultiAffinePmf::independent(&[0.5; 5]).unwrap();
    assert!(matches!(sm_dominates_lp(&c, &c), Err(Error::Capacity { .. })));
}

proptest! {
    // In two dimensions with fixed margins a law is determined by P(1,1),
    // and the supermodular order is the order of that entry.
    #[test]
    fn lp_matches_bivariate_rule(p1 in 0.1f64..0.9, p2 in 0.1f64..0.9, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let lo_bound = (p1 + p2 - 1.0).max(0.0);
        let hi_bound = p1.min(p2);
        let law = |q: f64| {
            MultiAffinePmf::new(2, vec![1.0 - p1 - p2 + q, p1 - q, p2 - q, q]).unwrap()
        };
        let (qa, qb) = (lo_bound + s * (hi_bound - lo_bound), lo_bound + t * (hi_bound - lo_bound));
        prop_assume!((qa - qb).abs() > 1e-6);
        let v = sm_dominates_lp(&law(qa), &law(qb)).unwrap();
        prop_assert_eq!(v.dominates, qa < qb);
    }
}

#[test]
fn sr_laws_are_negatively_associated() {
    for d in [3, 4] {
        for nu in [1.0, 2.0, 3.0] {
            assert!(na_check_exhaustive(&half(d, nu)).unwrap().is_none(), "d={d} nu={nu}");
        }
        let w = na_check_exhaustive(&MultiAffinePmf::upper_frechet(d, 0.5).unwrap())
            .unwrap()
            .expect("witness");
        assert_eq!((w.block1, w.block2), (vec![1], vec![2]));
        assert_eq!((w.h1, w.h2), (vec!["1".to_string()], vec!["1".to_string()]));
    }
}

#[test]
fn positively_dependent_exchangeable_law_is_not_na() {
    let w = na_check_exhaustive(&half(4, 0.3)).unwrap().expect("witness");
    assert!(w.covariance > 0.0);
}

#[test]
fn pairwise_covariance_matches_joint_table() {
    for nu in [-1.0, 0.5, 1.0, 2.5] {
        let e = cmmb(&CmbParams::new(5, 0.3, nu).unwrap());
        let joint = e.expand().unwrap();
        for (a, b) in [(0, 1), (1, 4), (2, 3)] {
            assert!((pairwise_covariance(&e).unwrap() - joint.covariance(a, b)).abs() < 1e-14);
        }
        assert!((e.marginal_mean() - joint.marginal_means()[3]).abs() < 1e-15);
    }
    let upper = exchangeable_from_sum(DiscretePmf::new(vec![0.5, 0.0, 0.0, 0.5]).unwrap());
    assert!((pairwise_covariance(&upper).unwrap() - 0.25).abs() < 1e-15);
}
