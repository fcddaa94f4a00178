//! Each side of a coupled pair must have the law of an uncoupled sample at
//! its own parameters.

use chasesim_core::couplings::{complete_coupling, jumpchain_coupling, star_coupling, tree_alpha_coupling, tree_passage_sample};
use chasesim_core::graph::{build_regular_tree, RootDegree};
use chasesim_core::harness::{distribution_compare, run_replicas, Workers};
use chasesim_core::process::validate_params;
use chasesim_core::reductions::{complete_sample_x, sample_x_via_jump_chain, star_sample_x};

const N: usize = 60_000;

fn assert_same_law(name: &str, a: &[u64], b: &[u64]) {
    let r = distribution_compare(a, b, 5).unwrap();
    assert!(r.pass, "{name}: {r:?}");
}

fn split(pairs: Vec<(u64, u64)>) -> (Vec<u64>, Vec<u64>) {
    pairs.into_iter().unzip()
}

#[test]
fn jumpchain_coupling_marginals() {
    let w = Workers::new(1);
    for (k, &(l, lp, a, ap)) in [(2.0, 1.0, 0.5, 1.0), (1.0, 1.0, 1.0, 3.0), (1.5, 0.7, 0.4, 0.4)]
        .iter()
        .enumerate()
    {
        let (x, xp) = split(run_replicas(N, 100 + k as u64, &w, |_, rng| {
            let c = jumpchain_coupling(l, lp, a, ap, rng).unwrap();
            (c.pair.x_large, c.pair.x_small)
        }));
        let p = validate_params(l, a).unwrap();
        let pp = validate_params(lp, ap).unwrap();
        let free = run_replicas(N, 200 + k as u64, &w, |_, rng| sample_x_via_jump_chain(&p, rng).unwrap());
        let free_p = run_replicas(N, 300 + k as u64, &w, |_, rng| sample_x_via_jump_chain(&pp, rng).unwrap());
        assert_same_law(&format!("dominant side {k}"), &x, &free);
        assert_same_law(&format!("dominated side {k}"), &xp, &free_p);
    }
}

#[test]
fn tree_coupling_marginals() {
    let g = build_regular_tree(2, 4, RootDegree::Rooted).unwrap();
    let w = Workers::new(1);
    let (x, xp) = split(run_replicas(N, 1, &w, |_, rng| {
        let c = tree_alpha_coupling(&g, 1.0, 0.5, 2.0, rng).unwrap();
        (c.pair.x_large, c.pair.x_small)
    }));
    let p = validate_params(1.0, 0.5).unwrap();
    let pp = validate_params(1.0, 2.0).unwrap();
    let free = run_replicas(N, 2, &w, |_, rng| tree_passage_sample(&g, &p, rng).unwrap().x);
    let free_p = run_replicas(N, 3, &w, |_, rng| tree_passage_sample(&g, &pp, rng).unwrap().x);
    assert_same_law("tree dominant", &x, &free);
    assert_same_law("tree dominated", &xp, &free_p);
}

#[test]
fn star_and_complete_coupling_marginals() {
    let w = Workers::new(1);
    let p = validate_params(2.0, 0.5).unwrap();
    let pp = validate_params(1.0, 1.0).unwrap();

    let (x, xp) = split(run_replicas(N, 4, &w, |_, rng| {
        let c = star_coupling(10, 5, 2.0, 1.0, 0.5, 1.0, rng).unwrap();
        (c.pair.x_large, c.pair.x_small)
    }));
    assert_same_law("star dominant", &x, &run_replicas(N, 5, &w, |_, rng| star_sample_x(10, &p, rng)));
    assert_same_law("star dominated", &xp, &run_replicas(N, 6, &w, |_, rng| star_sample_x(5, &pp, rng)));

    let (x, xp) = split(run_replicas(N, 7, &w, |_, rng| {
        let c = complete_coupling(10, 5, 2.0, 1.0, 0.5, 1.0, rng).unwrap();
        (c.pair.x_large, c.pair.x_small)
    }));
    assert_same_law(
        "complete dominant",
        &x,
        &run_replicas(N, 8, &w, |_, rng| complete_sample_x(10, &p, rng).unwrap()),
    );
    assert_same_law(
        "complete dominated",
        &xp,
        &run_replicas(N, 9, &w, |_, rng| complete_sample_x(5, &pp, rng).unwrap()),
    );
}
