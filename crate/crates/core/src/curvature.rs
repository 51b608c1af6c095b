//! Fundamental forms, principal curvatures and their directional derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Jet, SurfaceModel};
use crate::scalar::{lit, Estimate, Real};
use crate::vec3::{cross, dot, norm, scale, sub, V3};

/// One of the two principal sheets: `Blue` carries `kappa1 >= kappa2`, `Red` carries `kappa2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    Blue,
    Red,
}

impl Sheet {
    pub fn index(self) -> usize {
        match self {
            Sheet::Blue => 0,
            Sheet::Red => 1,
        }
    }

    pub fn other(self) -> Sheet {
        match self {
            Sheet::Blue => Sheet::Red,
            Sheet::Red => Sheet::Blue,
        }
    }

    /// Sheet numbered 1 (blue) or 2 (red).
    pub fn from_number(n: u8) -> Option<Sheet> {
        match n {
            1 => Some(Sheet::Blue),
            2 => Some(Sheet::Red),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sheet::Blue => "blue",
            Sheet::Red => "red",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms<T> {
    pub e: T,
    pub f: T,
    pub g: T,
    pub l: T,
    pub m: T,
    pub n: T,
    pub normal: V3<T>,
}

impl<T: Real> FundamentalForms<T> {
    pub fn from_jet(jet: &Jet<T>) -> Self {
        let (gu, gv) = (jet.d(1, 0), jet.d(0, 1));
        let normal = crate::vec3::normalize(cross(gu, gv));
        Self {
            e: dot(gu, gu),
            f: dot(gu, gv),
            g: dot(gv, gv),
            l: dot(jet.d(2, 0), normal),
            m: dot(jet.d(1, 1), normal),
            n: dot(jet.d(0, 2), normal),
            normal,
        }
    }

    pub fn metric_det(&self) -> T {
        self.e * self.g - self.f * self.f
    }

    pub fn gaussian(&self) -> T {
        (self.l * self.n - self.m * self.m) / self.metric_det()
    }

    pub fn mean(&self) -> T {
        (self.e * self.n + self.g * self.l - lit::<T>(2.0) * self.f * self.m) / (lit::<T>(2.0) * self.metric_det())
    }

    /// Shape operator `I^-1 II` in parameter coordinates.
    pub fn weingarten(&self) -> [[T; 2]; 2] {
        let det = self.metric_det();
        [
            [(self.g * self.l - self.f * self.m) / det, (self.g * self.m - self.f * self.n) / det],
            [(self.e * self.m - self.f * self.l) / det, (self.e * self.n - self.f * self.m) / det],
        ]
    }

    pub fn first_form(&self, a: [T; 2], b: [T; 2]) -> T {
        self.e * a[0] * b[0] + self.f * (a[0] * b[1] + a[1] * b[0]) + self.g * a[1] * b[1]
    }
}

/// Principal curvatures `kappa[0] >= kappa[1]` and metric-unit principal vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalData<T> {
    pub kappa: [T; 2],
    pub dirs: [[T; 2]; 2],
    pub umbilic: bool,
}

impl<T: Real> PrincipalData<T> {
    pub fn from_forms(ff: &FundamentalForms<T>) -> Self {
        let two = lit::<T>(2.0);
        // I = R^T R with R upper triangular; S = R^-T II R^-1 is symmetric.
        let r11 = ff.e.sqrt();
        let r12 = ff.f / r11;
        let r22 = (ff.g - r12 * r12).sqrt();
        let s11 = ff.l / (r11 * r11);
        let s12 = (ff.m - r12 * s11 * r11) / (r11 * r22);
        let s22 = (ff.n - two * r12 * ff.m / r11 + r12 * r12 * ff.l / (r11 * r11)) / (r22 * r22);
        let mean = (s11 + s22) / two;
        let half = (s11 - s22) / two;
        let radius = half.hypot(s12);
        let alpha = (two * s12).atan2(s11 - s22) / two;
        let w1 = [alpha.cos(), alpha.sin()];
        let w2 = [-alpha.sin(), alpha.cos()];
        let back = |w: [T; 2]| {
            let y = w[1] / r22;
            let x = (w[0] - r12 * y) / r11;
            tie_break([x, y])
        };
        let scale = T::one().max(mean.abs() + radius);
        Self {
            kappa: [mean + radius, mean - radius],
            dirs: [back(w1), back(w2)],
            umbilic: two * radius < T::zero_tol() * scale,
        }
    }

    pub fn gap(&self) -> T {
        self.kappa[0] - self.kappa[1]
    }
}

fn tie_break<T: Real>(v: [T; 2]) -> [T; 2] {
    let tiny = lit::<T>(1e-12) * v[0].abs().max(v[1].abs());
    let lead = if v[0].abs() > tiny { v[0] } else { v[1] };
    if lead < T::zero() {
        [-v[0], -v[1]]
    } else {
        v
    }
}

pub fn dot2<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[0] + a[1] * b[1]
}

/// Returns `v` flipped if needed so that it points along `reference`.
pub fn align<T: Real>(v: [T; 2], reference: [T; 2]) -> [T; 2] {
    if dot2(v, reference) < T::zero() {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Derivatives `n_u`, `n_v` of the unit normal.
pub fn normal_derivatives<T: Real>(jet: &Jet<T>) -> [V3<T>; 2] {
    let (gu, gv) = (jet.d(1, 0), jet.d(0, 1));
    let big_n = cross(gu, gv);
    let len = norm(big_n);
    let n = scale(big_n, T::one() / len);
    let nu = crate::vec3::add(cross(jet.d(2, 0), gv), cross(gu, jet.d(1, 1)));
    let nv = crate::vec3::add(cross(jet.d(1, 1), gv), cross(gu, jet.d(0, 2)));
    let proj = |x: V3<T>| scale(sub(x, scale(n, dot(n, x))), T::one() / len);
    [proj(nu), proj(nv)]
}

/// Curvature data at one point, including the analytic gradients of both principal curvatures.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCurvature<T> {
    pub point: [T; 2],
    pub forms: FundamentalForms<T>,
    pub principal: PrincipalData<T>,
    /// `grad[i] = (d kappa_i/du, d kappa_i/dv)`; `None` at an umbilic or from a jet below order 3.
    pub grad: Option<[[T; 2]; 2]>,
}

impl<T: Real> LocalCurvature<T> {
    pub fn at(surface: &SurfaceModel<T>, p: [T; 2]) -> Result<Self> {
        let jet = surface.eval_jet(p, 3)?;
        Ok(Self::from_jet(&jet))
    }

    pub fn from_jet(jet: &Jet<T>) -> Self {
        let forms = FundamentalForms::from_jet(jet);
        let principal = PrincipalData::from_forms(&forms);
        let grad = if principal.umbilic || jet.order < 3 { None } else { Some(kappa_gradients(jet, &forms, &principal)) };
        Self { point: jet.point, forms, principal, grad }
    }

    pub fn kappa(&self, s: Sheet) -> T {
        self.principal.kappa[s.index()]
    }

    pub fn dir(&self, s: Sheet) -> [T; 2] {
        self.principal.dirs[s.index()]
    }

    pub fn grad(&self, s: Sheet) -> Result<[T; 2]> {
        self.grad.map(|g| g[s.index()]).ok_or(Error::Umbilic)
    }

    /// `v_i kappa_i` with `v_i` as returned (tie-broken orientation).
    pub fn ridge_value(&self, s: Sheet) -> Result<T> {
        Ok(dot2(self.grad(s)?, self.dir(s)))
    }

    /// `v_i kappa_j`, `j` the other sheet.
    pub fn cross_value(&self, s: Sheet) -> Result<T> {
        Ok(dot2(self.grad(s.other())?, self.dir(s)))
    }

    /// `(kappa1 - c)(kappa2 - c) = K - 2cH + c^2`, smooth across umbilics.
    pub fn cpc_product(&self, c: T) -> T {
        let (k, h) = (self.forms.gaussian(), self.forms.mean());
        k - lit::<T>(2.0) * c * h + c * c
    }

    /// Characteristic length used to size finite-difference stencils.
    pub fn feature_scale(&self) -> T {
        let k = self.principal.kappa[0].abs().max(self.principal.kappa[1].abs());
        T::one() / T::one().max(k)
    }

    /// Estimated parameter distance to the nearest umbilic from the curvature gap.
    pub fn umbilic_distance(&self) -> T {
        match self.grad {
            None => T::zero(),
            Some(g) => {
                let dg = [g[0][0] - g[1][0], g[0][1] - g[1][1]];
                let slope = dg[0].hypot(dg[1]);
                if slope == T::zero() {
                    T::infinity()
                } else {
                    self.principal.gap() / slope
                }
            }
        }
    }
}

/// `d kappa = v^T (dII - kappa dI) v` for metric-unit principal vectors.
fn kappa_gradients<T: Real>(jet: &Jet<T>, ff: &FundamentalForms<T>, pd: &PrincipalData<T>) -> [[T; 2]; 2] {
    let two = lit::<T>(2.0);
    let (gu, gv) = (jet.d(1, 0), jet.d(0, 1));
    let nd = normal_derivatives(jet);
    let n = ff.normal;
    let mut out = [[T::zero(); 2]; 2];
    for (a, (ga_u, ga_v)) in [(jet.d(2, 0), jet.d(1, 1)), (jet.d(1, 1), jet.d(0, 2))].into_iter().enumerate() {
        let (guu_a, guv_a, gvv_a) = if a == 0 {
            (jet.d(3, 0), jet.d(2, 1), jet.d(1, 2))
        } else {
            (jet.d(2, 1), jet.d(1, 2), jet.d(0, 3))
        };
        let de = two * dot(ga_u, gu);
        let df = dot(ga_u, gv) + dot(gu, ga_v);
        let dg = two * dot(ga_v, gv);
        let dl = dot(guu_a, n) + dot(jet.d(2, 0), nd[a]);
        let dm = dot(guv_a, n) + dot(jet.d(1, 1), nd[a]);
        let dn = dot(gvv_a, n) + dot(jet.d(0, 2), nd[a]);
        for i in 0..2 {
            let v = pd.dirs[i];
            let k = pd.kappa[i];
            let quad = |x: T, y: T, z: T| x * v[0] * v[0] + two * y * v[0] * v[1] + z * v[1] * v[1];
            out[i][a] = quad(dl, dm, dn) - k * quad(de, df, dg);
        }
    }
    out
}

/// Nested central difference `X_1(X_2(...X_m f))(p)` with step `h`; returns the
/// value and the sum of absolute contributions (for roundoff bounds).
pub(crate) fn nested_difference<T: Real>(
    p: [T; 2],
    h: T,
    dirs: &[&dyn Fn([T; 2]) -> Result<[T; 2]>],
    leaf: &dyn Fn([T; 2]) -> Result<T>,
) -> Result<(T, T)> {
    match dirs.split_first() {
        None => {
            let x = leaf(p)?;
            Ok((x, x.abs()))
        }
        Some((first, rest)) => {
            let x = first(p)?;
            let plus = nested_difference([p[0] + h * x[0], p[1] + h * x[1]], h, rest, leaf)?;
            let minus = nested_difference([p[0] - h * x[0], p[1] - h * x[1]], h, rest, leaf)?;
            let w = lit::<T>(2.0) * h;
            Ok(((plus.0 - minus.0) / w, (plus.1 + minus.1) / w))
        }
    }
}

/// One Richardson step on a stencil of even error expansion; the error bound
/// compares against a second Richardson value at half the step and adds roundoff.
pub(crate) fn richardson<T: Real>(h: T, stencil: impl Fn(T) -> Result<(T, T)>) -> Result<Estimate<T>> {
    let two = lit::<T>(2.0);
    let (d1, a1) = stencil(h)?;
    let (d2, a2) = stencil(h / two)?;
    let (d4, a4) = stencil(h / (two * two))?;
    let three = lit::<T>(3.0);
    let four = lit::<T>(4.0);
    let r1 = (four * d2 - d1) / three;
    let r2 = (four * d4 - d2) / three;
    let roundoff = lit::<T>(8.0) * T::epsilon() * (a1 + four * a2 + four * a4 + a2) / three;
    Ok(Estimate { value: r1, error: (r1 - r2).abs() + roundoff, scale: d1.abs().max(d2.abs()) })
}

/// Principal vector field of a sheet, oriented to agree with `reference`.
pub(crate) fn aligned_dir<T: Real>(surface: &SurfaceModel<T>, s: Sheet, reference: [T; 2], q: [T; 2]) -> Result<[T; 2]> {
    let lc = LocalCurvature::at(surface, q)?;
    if lc.principal.umbilic {
        return Err(Error::Umbilic);
    }
    Ok(align(lc.dir(s), reference))
}

/// Finite-difference context at a non-umbilic point.
pub struct CurvatureProbe<'a, T> {
    pub surface: &'a SurfaceModel<T>,
    pub base: LocalCurvature<T>,
    pub h: T,
}

impl<'a, T: Real> CurvatureProbe<'a, T> {
    /// Refuses points closer to an umbilic than ten stencil steps.
    pub fn new(surface: &'a SurfaceModel<T>, p: [T; 2]) -> Result<Self> {
        let base = LocalCurvature::at(surface, p)?;
        if base.principal.umbilic {
            return Err(Error::Umbilic);
        }
        let h = T::fd_step() * base.feature_scale();
        let radius = lit::<T>(10.0) * h;
        let dist = base.umbilic_distance();
        if dist < radius {
            return Err(Error::NearUmbilic { distance: dist.to_f64_lossy(), radius: radius.to_f64_lossy() });
        }
        Ok(Self { surface, base, h })
    }

    pub fn point(&self) -> [T; 2] {
        self.base.point
    }

    /// `X_1 ... X_m (v_along kappa_of)` where every `X` is `v_dir`.
    pub fn iterated(&self, dirs: &[Sheet], along: Sheet, of: Sheet) -> Result<Estimate<T>> {
        let surface = self.surface;
        let refs = [self.base.dir(Sheet::Blue), self.base.dir(Sheet::Red)];
        let leaf = move |q: [T; 2]| -> Result<T> {
            let lc = LocalCurvature::at(surface, q)?;
            let v = align(lc.dir(along), refs[along.index()]);
            Ok(dot2(lc.grad(of)?, v))
        };
        if dirs.is_empty() {
            let x = leaf(self.point())?;
            return Ok(Estimate { value: x, error: lit::<T>(64.0) * T::epsilon() * x.abs().max(T::one()), scale: x.abs() });
        }
        let fields: Vec<Box<dyn Fn([T; 2]) -> Result<[T; 2]>>> = dirs
            .iter()
            .map(|&d| {
                let r = refs[d.index()];
                Box::new(move |q: [T; 2]| aligned_dir(surface, d, r, q)) as Box<dyn Fn([T; 2]) -> Result<[T; 2]>>
            })
            .collect();
        let field_refs: Vec<&dyn Fn([T; 2]) -> Result<[T; 2]>> = fields.iter().map(|b| b.as_ref()).collect();
        richardson(self.h, |h| nested_difference(self.point(), h, &field_refs, &leaf))
    }

    /// `[v_i kappa_i, v_i^2 kappa_i, ..., v_i^order kappa_i]`.
    pub fn along(&self, s: Sheet, order: usize) -> Result<Vec<Estimate<T>>> {
        (1..=order).map(|m| self.iterated(&vec![s; m - 1], s, s)).collect()
    }

    /// `v_i kappa_j`, `j` the other sheet.
    pub fn cross(&self, s: Sheet) -> Result<Estimate<T>> {
        self.iterated(&[], s, s.other())
    }

    /// Symmetrized `[[v1 v1 k, v1 v2 k], [v2 v1 k, v2 v2 k]]` for `k = kappa_of`.
    pub fn hessian(&self, of: Sheet) -> Result<[[Estimate<T>; 2]; 2]> {
        let h11 = self.iterated(&[Sheet::Blue], Sheet::Blue, of)?;
        let h22 = self.iterated(&[Sheet::Red], Sheet::Red, of)?;
        let h12 = self.iterated(&[Sheet::Blue], Sheet::Red, of)?;
        let h21 = self.iterated(&[Sheet::Red], Sheet::Blue, of)?;
        let half = lit::<T>(0.5);
        let off = Estimate {
            value: half * (h12.value + h21.value),
            error: half * (h12.error + h21.error) + half * (h12.value - h21.value).abs(),
            scale: h12.scale.max(h21.scale),
        };
        Ok([[h11, off], [off, h22]])
    }

    pub fn hessian_det(&self, of: Sheet) -> Result<Estimate<T>> {
        let h = self.hessian(of)?;
        let value = h[0][0].value * h[1][1].value - h[0][1].value * h[1][0].value;
        let error = h[0][0].error * h[1][1].value.abs()
            + h[1][1].error * h[0][0].value.abs()
            + lit::<T>(2.0) * h[0][1].error * h[0][1].value.abs()
            + h[0][0].error * h[1][1].error;
        let scale = (h[0][0].value * h[1][1].value).abs() + (h[0][1].value * h[0][1].value).abs();
        Ok(Estimate { value, error, scale })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monge(k1: f64, k2: f64, a: &[((usize, usize), f64)]) -> SurfaceModel<f64> {
        SurfaceModel::monge(k1, k2, a)
    }

    #[test]
    fn principal_data_at_monge_origin() {
        let s = monge(2.0, 1.0, &[((3, 0), 1.0)]);
        let lc = LocalCurvature::at(&s, [0.0, 0.0]).unwrap();
        assert!((lc.kappa(Sheet::Blue) - 2.0).abs() < 1e-15);
        assert!((lc.kappa(Sheet::Red) - 1.0).abs() < 1e-15);
        assert_eq!(lc.dir(Sheet::Blue), [1.0, 0.0]);
        assert!((lc.dir(Sheet::Red)[1] - 1.0).abs() < 1e-15);
        assert!(!lc.principal.umbilic);
        let g = lc.grad.unwrap();
        assert!((g[0][0] - 1.0).abs() < 1e-14 && g[0][1].abs() < 1e-14);
    }

    #[test]
    fn umbilic_flagged_on_sphere_apex() {
        let s = monge(1.0, 1.0, &[((3, 0), 1.0), ((1, 2), -1.0)]);
        let lc = LocalCurvature::at(&s, [0.0, 0.0]).unwrap();
        assert!(lc.principal.umbilic);
        assert!(lc.grad.is_none());
        assert_eq!(lc.ridge_value(Sheet::Blue), Err(Error::Umbilic));
        assert!(matches!(CurvatureProbe::new(&s, [1e-4, 0.0]), Err(Error::NearUmbilic { .. })));
    }

    #[test]
    fn principal_vectors_are_metric_unit_eigenvectors() {
        let s = monge(2.0, -0.3, &[((3, 0), 1.0), ((2, 1), -1.5), ((1, 2), 0.7), ((0, 3), 0.4), ((2, 2), 1.0)]);
        let lc = LocalCurvature::at(&s, [0.21, -0.17]).unwrap();
        let ff = lc.forms;
        for i in 0..2 {
            let v = lc.principal.dirs[i];
            let k = lc.principal.kappa[i];
            assert!((ff.first_form(v, v) - 1.0).abs() < 1e-13);
            let r0 = (ff.l - k * ff.e) * v[0] + (ff.m - k * ff.f) * v[1];
            let r1 = (ff.m - k * ff.f) * v[0] + (ff.n - k * ff.g) * v[1];
            assert!(r0.abs() < 1e-12 && r1.abs() < 1e-12);
        }
        assert!(lc.principal.kappa[0] >= lc.principal.kappa[1]);
        assert!(ff.first_form(lc.principal.dirs[0], lc.principal.dirs[1]).abs() < 1e-13);
    }

    #[test]
    fn analytic_gradient_matches_central_difference() {
        let s = monge(2.0, 0.5, &[((3, 0), 1.0), ((2, 1), 2.0), ((0, 3), -1.0), ((3, 1), 0.5), ((0, 5), 1.0)]);
        let p = [0.13, 0.08];
        let lc = LocalCurvature::at(&s, p).unwrap();
        let h = 1e-6;
        for i in 0..2 {
            for a in 0..2 {
                let mut q1 = p;
                let mut q2 = p;
                q1[a] += h;
                q2[a] -= h;
                let k1 = LocalCurvature::at(&s, q1).unwrap().principal.kappa[i];
                let k2 = LocalCurvature::at(&s, q2).unwrap().principal.kappa[i];
                let fd = (k1 - k2) / (2.0 * h);
                assert!((fd - lc.grad.unwrap()[i][a]).abs() < 1e-7, "i={i} a={a}");
            }
        }
    }

    #[test]
    fn iterated_derivative_of_blue_ridge_fixture() {
        // a21 = 1, a40 = 0 with k1 = 2, k2 = 1: v1^2 kappa1 = 3 + (0 - 24) = -21.
        let s = monge(2.0, 1.0, &[((2, 1), 1.0)]);
        let probe = CurvatureProbe::new(&s, [0.0, 0.0]).unwrap();
        let d = probe.along(Sheet::Blue, 2).unwrap();
        assert!(d[0].is_zero());
        assert!((d[1].value + 21.0).abs() < 1e-6, "{:?}", d[1]);
        assert!(d[1].error < 1e-6);
    }
}
