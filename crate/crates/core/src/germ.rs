//! Distance-squared germs at focal points and their A_k / D4 recognition.

use serde::{Deserialize, Serialize};

use crate::curvature::{LocalCurvature, Sheet};
use crate::error::{Error, Result};
use crate::front::{match_sheet, SheetMatch};
use crate::geom::SurfaceModel;
use crate::linalg::det_with_scale;
use crate::monge::{to_monge, MongeJet};
use crate::scalar::{factorial, lit, negligible, Real};
use crate::series::{monomials, Series2};
use crate::vec3::V3;

/// Degree to which germ series are carried.
pub const GERM_DEGREE: usize = 6;

/// Partial derivatives, at the base point, of the unfolding parameters of
/// `Phi(u, v, x, y, z, t) = -|g(u, v) - (x, y, z)|^2 / 2 (+ t^2/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unfolding<T> {
    pub phi_x: Series2<T>,
    pub phi_y: Series2<T>,
    pub phi_z: Series2<T>,
    /// Constant `Phi_t = t0`.
    pub phi_t: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GermJet<T> {
    /// `phi(u, v) = sum c_ij u^i v^j / (i! j!)`, stored as plain coefficients.
    pub series: Series2<T>,
    pub unfolding: Option<Unfolding<T>>,
    /// Focal point in world coordinates, when built from a surface.
    pub focal_point: Option<V3<T>>,
    pub t0: Option<T>,
    pub sheet: Option<SheetMatch>,
}

impl<T: Real> GermJet<T> {
    /// Germ from Taylor coefficients `c_ij`, without unfolding data.
    pub fn from_taylor(c: &[((usize, usize), T)]) -> Self {
        let series = Series2::from_taylor(GERM_DEGREE, |i, j| {
            c.iter().find(|(ij, _)| *ij == (i, j)).map(|&(_, x)| x).unwrap_or_else(T::zero)
        });
        Self::from_series(series)
    }

    pub fn from_series(series: Series2<T>) -> Self {
        Self { series: series.truncate(GERM_DEGREE), unfolding: None, focal_point: None, t0: None, sheet: None }
    }

    pub fn c(&self, i: usize, j: usize) -> T {
        self.series.taylor(i, j)
    }

    /// `(k_hat_1, k_hat_2) = (c20, c02)` for germs built in a principal frame.
    pub fn k_hat(&self) -> [T; 2] {
        [self.c(2, 0), self.c(0, 2)]
    }

    /// Germ in coordinates rotated by `theta`; unfolding rows rotate along.
    pub fn rotated(&self, theta: T) -> Self {
        Self {
            series: self.series.rotated(theta),
            unfolding: self.unfolding.as_ref().map(|u| Unfolding {
                phi_x: u.phi_x.rotated(theta),
                phi_y: u.phi_y.rotated(theta),
                phi_z: u.phi_z.rotated(theta),
                phi_t: u.phi_t,
            }),
            ..self.clone()
        }
    }
}

/// `phi = z0 f - (u^2 + v^2)/2 - f^2/2` at `q = (0, 0, z0)` of the Monge frame, `z0 = 1/kappa`.
pub fn germ_from_monge<T: Real>(jet: &MongeJet<T>, sheet: Sheet) -> Result<GermJet<T>> {
    let k = if jet.umbilic { jet.k1 } else { jet.kappa(sheet) };
    if k == T::zero() || negligible(k, T::one()) {
        return Err(Error::NoFocalPoint);
    }
    let z0 = T::one() / k;
    let d = GERM_DEGREE;
    let f = jet.height().truncate(d);
    let half = lit::<T>(0.5);
    let (u, v) = (Series2::u(d), Series2::v(d));
    let quad = &(&u * &u) + &(&v * &v);
    let phi = &(&f.scale(z0) - &quad.scale(half)) - &(&f * &f).scale(half);
    let unfolding = Unfolding { phi_x: u, phi_y: v, phi_z: &f - &Series2::constant(d, z0), phi_t: z0 };
    Ok(GermJet {
        series: phi,
        unfolding: Some(unfolding),
        focal_point: Some(jet.frame.to_world([T::zero(), T::zero(), z0])),
        t0: Some(z0),
        sheet: Some(if jet.umbilic { SheetMatch::Umbilic } else { sheet.into() }),
    })
}

/// Germ of the distance-squared function at the focal point of `sheet` over `p`.
pub fn germ_from_surface<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], sheet: Sheet) -> Result<GermJet<T>> {
    let jet = to_monge(surface, p)?;
    germ_from_monge(&jet, sheet)
}

/// Germ at the focal point at distance `t`, matching the sheet automatically.
pub fn germ_at_distance<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], t: T) -> Result<GermJet<T>> {
    let lc = LocalCurvature::at(surface, p)?;
    let sheet = match_sheet(&lc, t)?.sheet().unwrap_or(Sheet::Blue);
    germ_from_surface(surface, p, sheet)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct KernelData<T> {
    pub lambda: T,
    pub mu: T,
    pub s: T,
    /// Max-norm of `H - s [[mu^2, -lambda mu], [-lambda mu, lambda^2]]`.
    pub residual: T,
}

/// Kernel `(lambda, mu)` (unit, first nonzero component positive) and factor `s` of a rank-1 Hessian.
pub fn hessian_kernel<T: Real>(c20: T, c11: T, c02: T) -> Result<KernelData<T>> {
    let scale = c20.abs().max(c02.abs()).max(c11.abs());
    if negligible(scale, T::one()) {
        return Err(Error::KernelRank(0));
    }
    let det = c20 * c02 - c11 * c11;
    if !negligible(det, scale * scale) {
        return Err(Error::KernelRank(2));
    }
    // kernel from whichever row of H is larger
    let (x, y) = if c20.abs() >= c02.abs() { (-c11, c20) } else { (c02, -c11) };
    let norm = x.hypot(y);
    let (mut lambda, mut mu) = (x / norm, y / norm);
    let lead = if lambda != T::zero() { lambda } else { mu };
    if lead < T::zero() {
        lambda = -lambda;
        mu = -mu;
    }
    let s = c20 + c02;
    let residual = (c20 - s * mu * mu).abs().max((c11 + s * lambda * mu).abs()).max((c02 - s * lambda * lambda).abs());
    Ok(KernelData { lambda, mu, s, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GermClass {
    A1,
    A2,
    A3,
    A4,
    D4Plus,
    D4Minus,
    Worse,
}

impl GermClass {
    pub fn name(self) -> &'static str {
        match self {
            GermClass::A1 => "A1",
            GermClass::A2 => "A2",
            GermClass::A3 => "A3",
            GermClass::A4 => "A4",
            GermClass::D4Plus => "D4Plus",
            GermClass::D4Minus => "D4Minus",
            GermClass::Worse => "Worse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GermWitnesses<T> {
    pub c3: Option<T>,
    pub c4_hat: Option<T>,
    /// Quintic combination of the branch used (`a` when `|lambda| >= |mu|`).
    pub quintic: Option<T>,
    pub d4_determinant: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GermClassification<T> {
    pub class: GermClass,
    pub kernel: Option<KernelData<T>>,
    pub witnesses: GermWitnesses<T>,
}

/// Homogeneous form `c_n` of a germ and its partial derivatives, evaluated at a direction.
struct Forms<'a, T> {
    germ: &'a GermJet<T>,
}

impl<'a, T: Real> Forms<'a, T> {
    /// `d^p/du^p d^q/dv^q c_n` at `(x, y)` and the sum of absolute terms.
    fn eval(&self, n: usize, p: usize, q: usize, x: T, y: T) -> (T, T) {
        let mut acc = T::zero();
        let mut abs = T::zero();
        for (i, j) in monomials(n).filter(|&(i, j)| i + j == n) {
            if i < p || j < q {
                continue;
            }
            let term = self.germ.c(i, j) / (factorial::<T>(i - p) * factorial::<T>(j - q))
                * x.powi((i - p) as i32)
                * y.powi((j - q) as i32);
            acc = acc + term;
            abs = abs + term.abs();
        }
        (acc, abs)
    }
}

/// Branch (a) of the quintic A4 criterion, or branch (b) with the roles of `u`, `v` exchanged.
pub fn quintic_branch<T: Real>(germ: &GermJet<T>, k: &KernelData<T>, branch_a: bool) -> (T, T) {
    let f = Forms { germ };
    let (l, m, s) = (k.lambda, k.mu, k.s);
    let (c5, a5) = f.eval(5, 0, 0, l, m);
    let (d1, d2, pivot) = if branch_a { ((0, 1), (0, 2), l) } else { ((1, 0), (2, 0), m) };
    let (c4d, a4d) = f.eval(4, d1.0, d1.1, l, m);
    let (c3d, a3d) = f.eval(3, d1.0, d1.1, l, m);
    let (c3dd, a3dd) = f.eval(3, d2.0, d2.1, l, m);
    let p2 = pivot * pivot;
    let t2 = c4d * c3d / (s * p2);
    let t3 = c3d * c3d * c3dd / (lit::<T>(2.0) * s * s * p2 * p2);
    let value = c5 - t2 + t3;
    let scale = a5 + (a4d * a3d / (s * p2)).abs() + (a3d * a3d * a3dd / (lit::<T>(2.0) * s * s * p2 * p2)).abs();
    (value, scale)
}

/// The 3x3 kernel-cubic determinant `|(mu^2, -lambda mu, lambda^2); (c30, c21, c12); (c21, c12, c03)|`.
pub fn kernel_cubic_determinant<T: Real>(germ: &GermJet<T>, k: &KernelData<T>) -> (T, T) {
    let (l, m) = (k.lambda, k.mu);
    let rows = vec![
        vec![m * m, -l * m, l * l],
        vec![germ.c(3, 0), germ.c(2, 1), germ.c(1, 2)],
        vec![germ.c(2, 1), germ.c(1, 2), germ.c(0, 3)],
    ];
    det_with_scale(&rows)
}

/// The 4x4 cubic discriminant determinant (`-48` times the discriminant of `c_3`).
pub fn d4_determinant<T: Real>(germ: &GermJet<T>) -> (T, T) {
    let (c30, c21, c12, c03) = (germ.c(3, 0), germ.c(2, 1), germ.c(1, 2), germ.c(0, 3));
    let two = lit::<T>(2.0);
    let z = T::zero();
    det_with_scale(&[
        vec![c30, two * c21, c12, z],
        vec![z, c30, two * c21, c12],
        vec![c21, two * c12, c03, z],
        vec![z, c21, two * c12, c03],
    ])
}

/// `c_3`, `c_{3v}`, `c_{3vv}` at the kernel direction (used by identity checks and the germ route).
pub fn cubic_kernel_values<T: Real>(germ: &GermJet<T>, k: &KernelData<T>) -> [T; 3] {
    let f = Forms { germ };
    [f.eval(3, 0, 0, k.lambda, k.mu).0, f.eval(3, 0, 1, k.lambda, k.mu).0, f.eval(3, 0, 2, k.lambda, k.mu).0]
}

/// A_k / D4 recognition from Taylor coefficients.
pub fn classify_germ<T: Real>(germ: &GermJet<T>) -> Result<GermClassification<T>> {
    let (c10, c01) = (germ.c(1, 0), germ.c(0, 1));
    let scale = T::one().max(germ.series.max_abs());
    if !negligible(c10, scale) || !negligible(c01, scale) {
        return Err(Error::RegularGerm);
    }
    let (c20, c11, c02) = (germ.c(2, 0), germ.c(1, 1), germ.c(0, 2));
    let mut w = GermWitnesses::default();
    let kernel = match hessian_kernel(c20, c11, c02) {
        Ok(k) => k,
        Err(Error::KernelRank(2)) => return Ok(GermClassification { class: GermClass::A1, kernel: None, witnesses: w }),
        Err(Error::KernelRank(_)) => {
            let (det, dscale) = d4_determinant(germ);
            w.d4_determinant = Some(det);
            let class = if negligible(det, dscale) {
                GermClass::Worse
            } else if det > T::zero() {
                GermClass::D4Plus
            } else {
                GermClass::D4Minus
            };
            return Ok(GermClassification { class, kernel: None, witnesses: w });
        }
        Err(e) => return Err(e),
    };
    let f = Forms { germ };
    let (l, m) = (kernel.lambda, kernel.mu);
    let (c3, a3) = f.eval(3, 0, 0, l, m);
    w.c3 = Some(c3);
    let done = |class, w| Ok(GermClassification { class, kernel: Some(kernel), witnesses: w });
    if !negligible(c3, a3) {
        return done(GermClass::A2, w);
    }
    let (c4, a4) = f.eval(4, 0, 0, l, m);
    let (det, dscale) = kernel_cubic_determinant(germ, &kernel);
    let eighth_s = lit::<T>(8.0) * kernel.s;
    let c4_hat = c4 + det / eighth_s;
    w.c4_hat = Some(c4_hat);
    if !negligible(c4_hat, a4 + (dscale / eighth_s).abs()) {
        return done(GermClass::A3, w);
    }
    let (q, qscale) = quintic_branch(germ, &kernel, l.abs() >= m.abs());
    w.quintic = Some(q);
    if !negligible(q, qscale) {
        return done(GermClass::A4, w);
    }
    done(GermClass::Worse, w)
}
