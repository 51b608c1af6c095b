//! Named Monge-form fixtures, one per singularity class.

use crate::geom::{MongeGraph, SurfaceModel};
use crate::scalar::Real;

/// `(name, k1, k2, coefficients)` for every named fixture.
pub const FIXTURES: &[(&str, f64, f64, &[((usize, usize), f64)])] = &[
    ("S-A2", 2.0, 1.0, &[((3, 0), 1.0)]),
    ("S-SW", 2.0, 1.0, &[((2, 1), 1.0), ((4, 0), 0.0)]),
    ("S-CBF", 2.0, 1.0, &[((2, 1), 1.0), ((1, 2), 1.0), ((4, 0), 21.0), ((5, 0), 1.0)]),
    ("S-LIPS", 2.0, 1.0, &[]),
    ("S-BKS", 2.0, 1.0, &[((2, 2), 4.0)]),
    ("S-ELL", 1.0, 1.0, &[((3, 0), 1.0), ((1, 2), -1.0)]),
    ("S-HYP", 1.0, 1.0, &[((3, 0), 1.0), ((1, 2), 2.0)]),
    ("S-HYPRA", 1.0, 1.0, &[((3, 0), 1.0), ((1, 2), 1.0)]),
];

pub fn fixture<T: Real>(name: &str) -> Option<SurfaceModel<T>> {
    FIXTURES.iter().find(|f| f.0.eq_ignore_ascii_case(name)).map(|&(_, k1, k2, a)| {
        let a = a.iter().map(|&(ij, x)| (ij, T::lit(x)));
        SurfaceModel::Monge(MongeGraph::new(T::lit(k1), T::lit(k2), a).expect("fixture coefficients"))
    })
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|f| f.0)
}
