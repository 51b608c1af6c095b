//! Reduction of a surface germ to Monge form in a principal frame.

use serde::{Deserialize, Serialize};

use crate::curvature::{FundamentalForms, PrincipalData, Sheet};
use crate::error::{Error, Result};
use crate::geom::{MongeGraph, SurfaceModel, JET_ORDER};
use crate::scalar::{lit, negligible, Real};
use crate::series::{monomials, Series2};
use crate::vec3::{add, cross, dot, normalize, scale, V3};

/// Orthonormal frame at a surface point; `e3` is the unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Frame<T> {
    pub origin: V3<T>,
    pub e1: V3<T>,
    pub e2: V3<T>,
    pub e3: V3<T>,
}

impl<T: Real> Frame<T> {
    pub fn standard() -> Self {
        let (o, l) = (T::zero(), T::one());
        Self { origin: [o; 3], e1: [l, o, o], e2: [o, l, o], e3: [o, o, l] }
    }

    /// World coordinates of the frame point `(x, y, z)`.
    pub fn to_world(&self, local: V3<T>) -> V3<T> {
        let mut w = self.origin;
        for (axis, c) in [self.e1, self.e2, self.e3].into_iter().zip(local) {
            w = add(w, scale(axis, c));
        }
        w
    }
}

/// Height function `h(x, y) = k1 x^2/2 + k2 y^2/2 + sum a_ij x^i y^j/(i! j!)`, `3 <= i+j <= 5`,
/// of the surface over the tangent plane of a principal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MongeJet<T> {
    pub point: [T; 2],
    pub frame: Frame<T>,
    pub k1: T,
    pub k2: T,
    pub umbilic: bool,
    height: Series2<T>,
}

impl<T: Real> MongeJet<T> {
    pub fn from_coefficients(k1: T, k2: T, a: &[((usize, usize), T)]) -> Self {
        let graph = MongeGraph::new(k1, k2, a.iter().copied()).expect("valid Monge coefficients");
        Self::from_graph(&graph)
    }

    pub fn from_graph(g: &MongeGraph<T>) -> Self {
        Self {
            point: [T::zero(); 2],
            frame: Frame::standard(),
            k1: g.k1,
            k2: g.k2,
            umbilic: negligible(g.k1 - g.k2, g.k1.abs().max(g.k2.abs())),
            height: g.height(),
        }
    }

    /// Taylor coefficient `a_ij` (`k1`, `0`, `k2` for the quadratic terms).
    pub fn a(&self, i: usize, j: usize) -> T {
        self.height.taylor(i, j)
    }

    pub fn height(&self) -> &Series2<T> {
        &self.height
    }

    pub fn kappa(&self, s: Sheet) -> T {
        match s {
            Sheet::Blue => self.k1,
            Sheet::Red => self.k2,
        }
    }

    /// The same germ as a Monge graph in frame coordinates.
    pub fn graph(&self) -> MongeGraph<T> {
        let a = monomials(JET_ORDER).filter(|&(i, j)| i + j >= 3).map(|(i, j)| ((i, j), self.a(i, j)));
        MongeGraph::new(self.k1, self.k2, a).expect("orders 3..=5")
    }

    pub fn surface(&self) -> SurfaceModel<T> {
        SurfaceModel::Monge(self.graph())
    }

    /// Rotates the tangent frame by `theta`; only meaningful at an umbilic, where
    /// every orthonormal tangent frame is principal.
    pub fn rotated(&self, theta: T) -> Result<Self> {
        if !self.umbilic {
            return Err(Error::NotUmbilic);
        }
        let (s, c) = theta.sin_cos();
        let f = &self.frame;
        let frame = Frame {
            origin: f.origin,
            e1: add(scale(f.e1, c), scale(f.e2, s)),
            e2: add(scale(f.e1, -s), scale(f.e2, c)),
            e3: f.e3,
        };
        Ok(Self { frame, height: self.height.rotated(theta), ..self.clone() })
    }
}

/// Monge form of `surface` at `p`, with `e1` along the first principal direction.
pub fn to_monge<T: Real>(surface: &SurfaceModel<T>, p: [T; 2]) -> Result<MongeJet<T>> {
    let jet = surface.eval_jet(p, JET_ORDER)?;
    let forms = FundamentalForms::from_jet(&jet);
    let pd = PrincipalData::from_forms(&forms);
    let (gu, gv) = (jet.d(1, 0), jet.d(0, 1));
    let e3 = forms.normal;
    let e1 = if pd.umbilic {
        normalize(gu)
    } else {
        let v = pd.dirs[0];
        normalize(add(scale(gu, v[0]), scale(gv, v[1])))
    };
    let e2 = cross(e3, e1);
    let frame = Frame { origin: jet.position(), e1, e2, e3 };

    let coords: Vec<Series2<T>> = (0..3).map(|k| jet.coordinate_series(k)).collect();
    let project = |axis: V3<T>| {
        let mut s = Series2::zero(JET_ORDER);
        for (k, c) in coords.iter().enumerate() {
            s = &s + &c.scale(axis[k]);
        }
        s
    };
    let (xs, ys, zs) = (project(e1), project(e2), project(e3));

    // Invert (s, t) -> (X, Y) as a series in (x, y) by fixed-point iteration.
    let (a11, a12, a21, a22) = (xs.get(1, 0), xs.get(0, 1), ys.get(1, 0), ys.get(0, 1));
    let det = a11 * a22 - a12 * a21;
    let x = Series2::u(JET_ORDER);
    let y = Series2::v(JET_ORDER);
    let solve = |rx: &Series2<T>, ry: &Series2<T>| {
        let s = &rx.scale(a22 / det) - &ry.scale(a12 / det);
        let t = &ry.scale(a11 / det) - &rx.scale(a21 / det);
        (s, t)
    };
    let (nx, ny) = (xs.drop_below(2), ys.drop_below(2));
    let (mut s, mut t) = solve(&x, &y);
    for _ in 0..JET_ORDER + 1 {
        let rx = &x - &nx.compose(&s, &t, JET_ORDER);
        let ry = &y - &ny.compose(&s, &t, JET_ORDER);
        (s, t) = solve(&rx, &ry);
    }
    let back_x = &xs.compose(&s, &t, JET_ORDER) - &x;
    let back_y = &ys.compose(&s, &t, JET_ORDER) - &y;
    let residual = back_x.max_abs().max(back_y.max_abs());
    let size = T::one().max(xs.max_abs()).max(ys.max_abs());
    if !(residual <= lit::<T>(1e-8) * size) {
        return Err(Error::NumericQuality { what: "Monge series inversion", residual: residual.to_f64_lossy() });
    }
    let mut height = zs.compose(&s, &t, JET_ORDER);
    for (i, j) in [(0, 0), (1, 0), (0, 1)] {
        height.set(i, j, T::zero());
    }
    let two = lit::<T>(2.0);
    let (k1, k2) = (two * height.get(2, 0), two * height.get(0, 2));
    let cross_term = height.get(1, 1);
    let kscale = k1.abs().max(k2.abs());
    if !negligible(cross_term, kscale) && !pd.umbilic {
        return Err(Error::NumericQuality { what: "principal frame diagonalization", residual: cross_term.to_f64_lossy() });
    }
    let (k1, k2) = if pd.umbilic {
        let k = (k1 + k2) / two;
        (k, k)
    } else {
        (k1, k2)
    };
    height.set(2, 0, k1 / two);
    height.set(0, 2, k2 / two);
    height.set(1, 1, T::zero());
    debug_assert!(dot(e1, e3).abs() < lit(1e-8));
    Ok(MongeJet { point: p, frame, k1, k2, umbilic: pd.umbilic, height })
}
