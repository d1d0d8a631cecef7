#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use scnpp::linops::{LinearOp, Vector};
use scnpp::mappings::{ConvexSet, MonotoneMap};
use scnpp::problems::ScnppInstance;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn vector(rng: &mut StdRng, n: usize, r: f64) -> Vector {
    (0..n).map(|_| rng.gen_range(-r..r)).collect::<Vec<_>>().into()
}

pub fn matrix(rng: &mut StdRng, rows: usize, cols: usize) -> LinearOp {
    LinearOp::new(rows, cols, (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// Box or halfspace through a neighbourhood of `u`.
pub fn set_around(rng: &mut StdRng, u: &Vector) -> ConvexSet {
    let n = u.dim();
    if rng.gen_bool(0.5) {
        let w = vector(rng, n, 1.0).map(|v| v.abs() + 0.05);
        ConvexSet::boxed(u.add_scaled(-1.0, &w), u.add_scaled(1.0, &w))
    } else {
        let a = loop {
            let a = vector(rng, n, 1.0);
            if a.norm() > 0.2 {
                break a.scale(1.0 / a.norm());
            }
        };
        ConvexSet::halfspace(a.clone(), a.dot(u) + rng.gen_range(0.0..0.3))
    }
}

/// (1,1) feasibility instance in R^n with a certified common point.
pub fn pair(rng: &mut StdRng, n: usize) -> ScnppInstance {
    let u = vector(rng, n, 1.0);
    let m = rng.gen_range(1..=n);
    let a = matrix(rng, m, n);
    let au = a.apply(&u).unwrap();
    let b = MonotoneMap::normal_cone(set_around(rng, &u));
    let f = MonotoneMap::normal_cone(set_around(rng, &au));
    ScnppInstance::two_mapping(b, f, a).with_solution(u)
}

/// Odd (1,1) instance; the origin solves it.
pub fn odd_pair(rng: &mut StdRng, n: usize) -> ScnppInstance {
    let m = rng.gen_range(1..=n);
    let a = matrix(rng, m, n);
    let h = vector(rng, n, 1.0).map(|v| v.abs() + 0.1);
    let b = if rng.gen_bool(0.5) {
        MonotoneMap::normal_cone(ConvexSet::boxed(-&h, h))
    } else {
        MonotoneMap::subdiff_l1(n, rng.gen_range(0.1..1.0))
    };
    let f = MonotoneMap::normal_cone(ConvexSet::ball(Vector::zeros(m), rng.gen_range(0.1..1.0)));
    ScnppInstance::two_mapping(b.with_odd(true), f.with_odd(true), a).with_solution(Vector::zeros(n))
}
