#![allow(dead_code)]

use std::collections::BTreeSet;

use pcm_core::operator::{FiniteOperator, PointPair};
use pcm_core::rational::{parse_rational, QVector};

/// Parses `"a,b"` with rational coordinates.
pub fn v(s: &str) -> QVector {
    s.parse().expect("valid vector literal")
}

pub fn pp(x: &str, xs: &str) -> PointPair {
    PointPair::new(v(x), v(xs)).expect("matching dims")
}

pub fn op(pairs: &[(&str, &str)]) -> FiniteOperator {
    FiniteOperator::from_pairs(pairs.iter().map(|(x, xs)| pp(x, xs))).expect("valid operator")
}

pub fn vset(items: &[&str]) -> BTreeSet<QVector> {
    items.iter().map(|s| v(s)).collect()
}

pub fn q(s: &str) -> pcm_core::Rational {
    parse_rational(s).expect("valid rational")
}

pub fn bw_seed() -> FiniteOperator {
    op(&[
        ("1,0", "0,1"),
        ("0,1", "-1,0"),
        ("-1,0", "-1,-2"),
        ("0,-1", "0,-1"),
    ])
}

pub fn bw_final() -> FiniteOperator {
    op(&[
        ("1,0", "0,-1"),
        ("1,0", "0,1"),
        ("0,1", "-1,0"),
        ("-1,0", "-1,0"),
        ("-1,0", "-1,-2"),
        ("0,-1", "0,-1"),
    ])
}

pub fn r3_seed() -> FiniteOperator {
    op(&[
        ("-1,-1,-1", "-8,-8,16"),
        ("1,0,0", "8,12,0"),
        ("0,1,0", "-12,8,0"),
        ("0,0,1", "0,0,16"),
    ])
}

/// Final operator of the three-dimensional example in chain order.
pub fn r3_chain() -> Vec<PointPair> {
    vec![
        pp("1,0,0", "-4,0,12"),
        pp("0,1,0", "-5,-1,11"),
        pp("-1,-1,-1", "-6,-2,14"),
        pp("0,0,1", "-3,-3,13"),
    ]
}

pub fn mx3_seed() -> FiniteOperator {
    op(&[
        ("1,0", "1,1"),
        ("1,1", "0,2"),
        ("0,1", "-1,1"),
        ("-1,0", "-1,-1"),
        ("0,-1", "1,-1"),
    ])
}

/// Final operator of the 3-cyclic example in chain order.
pub fn mx3_chain() -> Vec<PointPair> {
    vec![
        pp("1,0", "0,0"),
        pp("1,0", "2,2"),
        pp("1,1", "0,2"),
        pp("0,1", "0,2"),
        pp("0,1", "-1,1"),
        pp("-1,0", "-1,1"),
        pp("-1,0", "-1,-1"),
        pp("0,-1", "0,0"),
    ]
}

pub fn bwp_seed() -> FiniteOperator {
    op(&[
        ("1,0", "0,1"),
        ("0,1", "-1,0"),
        ("-1,0", "-2,-2"),
        ("0,-1", "0,-1"),
    ])
}

pub fn bwp_final() -> FiniteOperator {
    op(&[
        ("1,0", "-1/2,-1/2"),
        ("1,0", "-1/2,1/2"),
        ("0,1", "-1,0"),
        ("0,1", "-2,0"),
        ("-1,0", "-3/2,-1/2"),
        ("-1,0", "-3/2,-3/2"),
        ("0,-1", "-1,-1"),
        ("0,-1", "0,-1"),
    ])
}

/// Seed of the last example with `x_4* = (-2,-2)`, as in its figure and
/// its final fibers.
pub fn bizarre_seed() -> FiniteOperator {
    op(&[
        ("0,0", "-1,-1/2"),
        ("1,0", "0,1"),
        ("0,1", "-1,0"),
        ("-1,0", "-2,-2"),
        ("0,-1", "0,-1"),
    ])
}

/// The same seed with `x_4* = (-2,2)` as printed; it is not monotone.
pub fn bizarre_seed_printed() -> FiniteOperator {
    op(&[
        ("0,0", "-1,-1/2"),
        ("1,0", "0,1"),
        ("0,1", "-1,0"),
        ("-1,0", "-2,2"),
        ("0,-1", "0,-1"),
    ])
}

/// Processing orders following the indexing `x_1, ..., x_n` of each example.
pub fn bw_order() -> Vec<QVector> {
    vec![v("1,0"), v("0,1"), v("-1,0"), v("0,-1")]
}

pub fn r3_order() -> Vec<QVector> {
    vec![v("-1,-1,-1"), v("1,0,0"), v("0,1,0"), v("0,0,1")]
}

pub fn mx3_order() -> Vec<QVector> {
    vec![v("1,0"), v("1,1"), v("0,1"), v("-1,0"), v("0,-1")]
}

pub fn bizarre_order() -> Vec<QVector> {
    vec![v("0,0"), v("1,0"), v("0,1"), v("-1,0"), v("0,-1")]
}

pub fn bizarre_final() -> FiniteOperator {
    op(&[
        ("0,0", "-1,-1"),
        ("0,0", "-1,0"),
        ("1,0", "0,-1"),
        ("1,0", "0,1"),
        ("0,1", "-1,0"),
        ("0,1", "-2,0"),
        ("-1,0", "-2,0"),
        ("-1,0", "-2,-2"),
        ("0,-1", "-1,-1"),
        ("0,-1", "0,-1"),
    ])
}

/// The ten-node perpendicular chain certifying the last example.
pub fn w10() -> Vec<PointPair> {
    vec![
        pp("1,0", "0,-1"),
        pp("1,0", "0,1"),
        pp("1/2,1/2", "-1,0"),
        pp("0,1", "-1,0"),
        pp("0,1", "-2,0"),
        pp("-1,0", "-2,0"),
        pp("-1,0", "-2,-2"),
        pp("-1/2,-1/2", "-1,-1"),
        pp("0,-1", "-1,-1"),
        pp("0,-1", "0,-1"),
    ]
}

/// `{-1, -9/10, ..., 1}^2`.
pub fn grid_441() -> Vec<QVector> {
    let ticks: Vec<pcm_core::Rational> = (-10..=10)
        .map(|i| pcm_core::Rational::new(i.into(), 10.into()))
        .collect();
    let mut out = Vec::with_capacity(441);
    for a in &ticks {
        for b in &ticks {
            out.push(QVector::new(vec![a.clone(), b.clone()]));
        }
    }
    out
}
