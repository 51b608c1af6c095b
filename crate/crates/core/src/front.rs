//! Parallel surfaces, the discriminant function and the front / geometric classifications.

use serde::{Deserialize, Serialize};

use crate::curvature::{aligned_dir, nested_difference, richardson, CurvatureProbe, LocalCurvature, Sheet};
use crate::error::{Error, Result};
use crate::geom::SurfaceModel;
use crate::linalg::sym2_eigen;
use crate::loci::{classify_umbilic, ridge_info_with, subparabolic_info_with, RidgeInfo, RidgeOrder, SubparabolicInfo, UmbilicClass, UmbilicReport};
use crate::monge::to_monge;
use crate::scalar::{lit, Estimate, Real};
use crate::vec3::{add, det3, norm, scale, V3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SingularityType {
    Regular,
    CuspidalEdge,
    Swallowtail,
    CuspidalButterfly,
    CuspidalLips,
    CuspidalBeaks,
    D4Plus3D,
    D4Minus3D,
    Unclassified,
}

impl SingularityType {
    pub const ALL: [SingularityType; 9] = [
        SingularityType::Regular,
        SingularityType::CuspidalEdge,
        SingularityType::Swallowtail,
        SingularityType::CuspidalButterfly,
        SingularityType::CuspidalLips,
        SingularityType::CuspidalBeaks,
        SingularityType::D4Plus3D,
        SingularityType::D4Minus3D,
        SingularityType::Unclassified,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SingularityType::Regular => "Regular",
            SingularityType::CuspidalEdge => "CuspidalEdge",
            SingularityType::Swallowtail => "Swallowtail",
            SingularityType::CuspidalButterfly => "CuspidalButterfly",
            SingularityType::CuspidalLips => "CuspidalLips",
            SingularityType::CuspidalBeaks => "CuspidalBeaks",
            SingularityType::D4Plus3D => "D4Plus3D",
            SingularityType::D4Minus3D => "D4Minus3D",
            SingularityType::Unclassified => "Unclassified",
        }
    }
}

/// Differential of `g^t = g + t n` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelJacobian<T> {
    /// Columns `g^t_u`, `g^t_v`.
    pub columns: [V3<T>; 2],
    /// `det(g^t_u, g^t_v, n)`.
    pub lambda: T,
    pub singular_values: [T; 2],
    pub rank: usize,
}

/// Closed form `J_{g^t} = J_g (I - t I^-1 II)`.
pub fn parallel_jacobian<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], t: T) -> Result<ParallelJacobian<T>> {
    let jet = surface.eval_jet(p, 2)?;
    let lc = LocalCurvature::from_jet(&jet);
    let w = lc.forms.weingarten();
    let (gu, gv) = (jet.d(1, 0), jet.d(0, 1));
    let m = [[T::one() - t * w[0][0], -t * w[0][1]], [-t * w[1][0], T::one() - t * w[1][1]]];
    let columns = [add(scale(gu, m[0][0]), scale(gv, m[1][0])), add(scale(gu, m[0][1]), scale(gv, m[1][1]))];
    let lambda = det3(columns[0], columns[1], lc.forms.normal);
    let gram = |a: V3<T>, b: V3<T>| crate::vec3::dot(a, b);
    let (ev, _) = sym2_eigen(gram(columns[0], columns[0]), gram(columns[0], columns[1]), gram(columns[1], columns[1]));
    let sv = [ev[0].max(T::zero()).sqrt(), ev[1].max(T::zero()).sqrt()];
    let base = norm(gu).max(norm(gv));
    let tol = lit::<T>(1e-8) * base;
    let rank = sv.iter().filter(|&&s| s > tol).count();
    Ok(ParallelJacobian { columns, lambda, singular_values: sv, rank })
}

/// Central-difference differential of `g^t`, used to cross-check the closed form.
pub fn parallel_jacobian_fd<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], t: T, h: T) -> Result<[V3<T>; 2]> {
    let gt = |q: [T; 2]| -> Result<V3<T>> {
        let jet = surface.eval_jet(q, 1)?;
        let n = crate::vec3::normalize(crate::vec3::cross(jet.d(1, 0), jet.d(0, 1)));
        Ok(add(jet.position(), scale(n, t)))
    };
    let mut cols = [[T::zero(); 3]; 2];
    for (a, col) in cols.iter_mut().enumerate() {
        let mut qp = p;
        let mut qm = p;
        qp[a] = qp[a] + h;
        qm[a] = qm[a] - h;
        let (fp, fm) = (gt(qp)?, gt(qm)?);
        for k in 0..3 {
            col[k] = (fp[k] - fm[k]) / (lit::<T>(2.0) * h);
        }
    }
    Ok(cols)
}

pub fn parallel_point<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], t: T) -> Result<V3<T>> {
    let jet = surface.eval_jet(p, 1)?;
    let n = crate::vec3::normalize(crate::vec3::cross(jet.d(1, 0), jet.d(0, 1)));
    Ok(add(jet.position(), scale(n, t)))
}

/// Discriminant function `lambda = det(g^t_u, g^t_v, n)`.
pub fn lambda<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], t: T) -> Result<T> {
    Ok(parallel_jacobian(surface, p, t)?.lambda)
}

/// Which principal sheet has its focal point at distance `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SheetMatch {
    Blue,
    Red,
    Umbilic,
}

impl SheetMatch {
    pub fn sheet(self) -> Option<Sheet> {
        match self {
            SheetMatch::Blue => Some(Sheet::Blue),
            SheetMatch::Red => Some(Sheet::Red),
            SheetMatch::Umbilic => None,
        }
    }
}

impl From<Sheet> for SheetMatch {
    fn from(s: Sheet) -> Self {
        match s {
            Sheet::Blue => SheetMatch::Blue,
            Sheet::Red => SheetMatch::Red,
        }
    }
}

/// Matches `t` against `1/kappa_1`, `1/kappa_2` at `p`.
pub fn match_sheet<T: Real>(lc: &LocalCurvature<T>, t: T) -> Result<SheetMatch> {
    let tol = lit::<T>(1e-6);
    let hit = |k: T| (t * k - T::one()).abs() < tol;
    let (k1, k2) = (lc.principal.kappa[0], lc.principal.kappa[1]);
    if lc.principal.umbilic {
        if hit(k1) {
            return Ok(SheetMatch::Umbilic);
        }
    } else if hit(k1) {
        return Ok(SheetMatch::Blue);
    } else if hit(k2) {
        return Ok(SheetMatch::Red);
    }
    Err(Error::SheetMismatch {
        t: t.to_f64_lossy(),
        inv_k1: (T::one() / k1).to_f64_lossy(),
        inv_k2: (T::one() / k2).to_f64_lossy(),
    })
}

/// Focal distance `1/kappa` of a sheet, or the umbilic curvature radius.
pub fn focal_distance<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], sheet: Sheet) -> Result<T> {
    let lc = LocalCurvature::at(surface, p)?;
    let k = lc.kappa(sheet);
    if k == T::zero() || crate::scalar::negligible(k, T::one()) {
        return Err(Error::NoFocalPoint);
    }
    Ok(T::one() / k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DiscriminantProbe<T> {
    pub point: [T; 2],
    pub t: T,
    pub sheet: SheetMatch,
    pub lambda: T,
    pub rank: usize,
    pub gradient: [Estimate<T>; 2],
    pub hessian: [[Estimate<T>; 2]; 2],
    pub hessian_det: Estimate<T>,
    /// Null vector field `eta` at the point; absent at an umbilic.
    pub eta: Option<[T; 2]>,
    /// `[eta lambda, eta^2 lambda, eta^3 lambda]`.
    pub eta_derivatives: Option<[Estimate<T>; 3]>,
}

/// Finite-difference data of `lambda` at a singular point of `g^t`.
pub fn discriminant_probe<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], t: T) -> Result<DiscriminantProbe<T>> {
    let lc = LocalCurvature::at(surface, p)?;
    let sheet = match_sheet(&lc, t)?;
    let jac = parallel_jacobian(surface, p, t)?;
    let scale_l = norm(jac.columns[0]).max(norm(jac.columns[1])).max(T::one());
    if !crate::scalar::negligible(jac.lambda, scale_l) {
        return Err(Error::NotSingular(jac.lambda.to_f64_lossy()));
    }
    let h = T::fd_step() * lc.feature_scale();
    let lam = |q: [T; 2]| lambda(surface, q, t);
    let axis_u = |_: [T; 2]| -> Result<[T; 2]> { Ok([T::one(), T::zero()]) };
    let axis_v = |_: [T; 2]| -> Result<[T; 2]> { Ok([T::zero(), T::one()]) };
    let axes: [&dyn Fn([T; 2]) -> Result<[T; 2]>; 2] = [&axis_u, &axis_v];
    let mut gradient = [Estimate::exact(T::zero()); 2];
    for a in 0..2 {
        gradient[a] = richardson(h, |h| nested_difference(p, h, &[axes[a]], &lam))?;
    }
    let mut hessian = [[Estimate::exact(T::zero()); 2]; 2];
    for a in 0..2 {
        for b in a..2 {
            let e = richardson(h, |h| nested_difference(p, h, &[axes[a], axes[b]], &lam))?;
            hessian[a][b] = e;
            hessian[b][a] = e;
        }
    }
    let det_value = hessian[0][0].value * hessian[1][1].value - hessian[0][1].value * hessian[0][1].value;
    let hessian_det = Estimate {
        value: det_value,
        error: hessian[0][0].error * hessian[1][1].value.abs()
            + hessian[1][1].error * hessian[0][0].value.abs()
            + lit::<T>(2.0) * hessian[0][1].error * hessian[0][1].value.abs()
            + hessian[0][0].error * hessian[1][1].error,
        scale: (hessian[0][0].value * hessian[1][1].value).abs() + hessian[0][1].value.powi(2),
    };
    let (eta, eta_derivatives) = match sheet.sheet() {
        Some(s) => {
            let reference = lc.dir(s);
            let field = move |q: [T; 2]| aligned_dir(surface, s, reference, q);
            let mut out = [Estimate::exact(T::zero()); 3];
            for (m, slot) in out.iter_mut().enumerate() {
                let dirs: Vec<&dyn Fn([T; 2]) -> Result<[T; 2]>> = vec![&field; m + 1];
                *slot = richardson(h, |h| nested_difference(p, h, &dirs, &lam))?;
            }
            (Some(reference), Some(out))
        }
        None => (None, None),
    };
    Ok(DiscriminantProbe {
        point: p,
        t,
        sheet,
        lambda: jac.lambda,
        rank: jac.rank,
        gradient,
        hessian,
        hessian_det,
        eta,
        eta_derivatives,
    })
}

/// Front criteria on the discriminant function.
pub fn classify_front<T: Real>(probe: &DiscriminantProbe<T>) -> SingularityType {
    let nondegenerate = !(probe.gradient[0].is_zero() && probe.gradient[1].is_zero());
    let eta = probe.eta_derivatives;
    if nondegenerate {
        let Some(e) = eta else { return SingularityType::Unclassified };
        return if !e[0].is_zero() {
            SingularityType::CuspidalEdge
        } else if !e[1].is_zero() {
            SingularityType::Swallowtail
        } else if !e[2].is_zero() {
            SingularityType::CuspidalButterfly
        } else {
            SingularityType::Unclassified
        };
    }
    let det = probe.hessian_det;
    match probe.rank {
        1 => {
            if det.sign() > 0 {
                SingularityType::CuspidalLips
            } else if det.sign() < 0 && eta.is_some_and(|e| !e[1].is_zero()) {
                SingularityType::CuspidalBeaks
            } else {
                SingularityType::Unclassified
            }
        }
        0 => match det.sign() {
            -1 => SingularityType::D4Plus3D,
            1 => SingularityType::D4Minus3D,
            _ => SingularityType::Unclassified,
        },
        _ => SingularityType::Unclassified,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GeometricEvidence<T> {
    pub sheet: SheetMatch,
    pub ridge: Option<RidgeInfo<T>>,
    /// Sub-parabolic test relative to the other principal vector.
    pub subparabolic: Option<SubparabolicInfo<T>>,
    pub hessian_det_kappa: Option<Estimate<T>>,
    pub umbilic: Option<UmbilicReport<T>>,
    pub verdict: SingularityType,
}

/// Geometric criteria: ridge order, sub-parabolic flag and umbilic class.
pub fn classify_geometric<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], sheet: SheetMatch) -> Result<GeometricEvidence<T>> {
    let Some(s) = sheet.sheet() else {
        let jet = to_monge(surface, p)?;
        let report = classify_umbilic(&jet)?;
        let verdict = match report.class {
            UmbilicClass::Elliptic => SingularityType::D4Minus3D,
            UmbilicClass::Hyperbolic | UmbilicClass::RightAngledHyperbolic => SingularityType::D4Plus3D,
            UmbilicClass::Degenerate => SingularityType::Unclassified,
        };
        return Ok(GeometricEvidence { sheet, ridge: None, subparabolic: None, hessian_det_kappa: None, umbilic: Some(report), verdict });
    };
    let probe = CurvatureProbe::new(surface, p)?;
    let ridge = ridge_info_with(&probe, s)?;
    let sp = subparabolic_info_with(&probe, s.other())?;
    let mut hess = None;
    let verdict = match (ridge.order, sp.subparabolic) {
        (RidgeOrder::NotRidge, _) => SingularityType::CuspidalEdge,
        (RidgeOrder::First, false) => SingularityType::Swallowtail,
        (RidgeOrder::Second, false) => SingularityType::CuspidalButterfly,
        (RidgeOrder::Higher, false) => SingularityType::Unclassified,
        (order, true) => {
            let det = probe.hessian_det(s)?;
            hess = Some(det);
            match det.sign() {
                1 => SingularityType::CuspidalLips,
                -1 if order == RidgeOrder::First => SingularityType::CuspidalBeaks,
                _ => SingularityType::Unclassified,
            }
        }
    };
    Ok(GeometricEvidence { sheet, ridge: Some(ridge), subparabolic: Some(sp), hessian_det_kappa: hess, umbilic: None, verdict })
}
