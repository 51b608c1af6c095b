//! Ridges, sub-parabolic points and umbilics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{align, aligned_dir, dot2, nested_difference, richardson, CurvatureProbe, LocalCurvature, Sheet};
use crate::error::{Error, Result};
use crate::geom::{Region, SurfaceModel};
use crate::linalg::det_with_scale;
use crate::monge::MongeJet;
use crate::scalar::{lit, negligible, Estimate, Real};
use crate::vec3::V3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RidgeOrder {
    NotRidge,
    First,
    Second,
    /// Third order or higher.
    Higher,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RidgeInfo<T> {
    pub sheet: Sheet,
    pub order: RidgeOrder,
    /// `[v kappa, v^2 kappa, v^3 kappa]` along the sheet's principal field.
    pub witnesses: Vec<Estimate<T>>,
}

/// Ridge order of `p` relative to the given sheet.
pub fn ridge_info<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], sheet: Sheet) -> Result<RidgeInfo<T>> {
    let probe = CurvatureProbe::new(surface, p)?;
    ridge_info_with(&probe, sheet)
}

pub fn ridge_info_with<T: Real>(probe: &CurvatureProbe<'_, T>, sheet: Sheet) -> Result<RidgeInfo<T>> {
    let witnesses = probe.along(sheet, 3)?;
    let order = if !witnesses[0].is_zero() {
        RidgeOrder::NotRidge
    } else if !witnesses[1].is_zero() {
        RidgeOrder::First
    } else if !witnesses[2].is_zero() {
        RidgeOrder::Second
    } else {
        RidgeOrder::Higher
    };
    Ok(RidgeInfo { sheet, order, witnesses })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SubparabolicInfo<T> {
    /// Sheet whose principal vector differentiates: `v_sheet kappa_other`.
    pub sheet: Sheet,
    pub witness: Estimate<T>,
    pub subparabolic: bool,
}

/// Whether `p` is sub-parabolic relative to `v_sheet`, i.e. `v_sheet kappa_other = 0`.
pub fn subparabolic_info<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], sheet: Sheet) -> Result<SubparabolicInfo<T>> {
    let probe = CurvatureProbe::new(surface, p)?;
    subparabolic_info_with(&probe, sheet)
}

pub fn subparabolic_info_with<T: Real>(probe: &CurvatureProbe<'_, T>, sheet: Sheet) -> Result<SubparabolicInfo<T>> {
    let witness = probe.cross(sheet)?;
    Ok(SubparabolicInfo { sheet, witness, subparabolic: witness.is_zero() })
}

pub fn is_subparabolic<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], sheet: Sheet) -> Result<bool> {
    Ok(subparabolic_info(surface, p, sheet)?.subparabolic)
}

/// Coordinate gradient of the oriented field `v_along kappa_of`.
pub fn field_gradient<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], along: Sheet, of: Sheet) -> Result<[Estimate<T>; 2]> {
    let probe = CurvatureProbe::new(surface, p)?;
    let reference = probe.base.dir(along);
    let leaf = |q: [T; 2]| -> Result<T> {
        let lc = LocalCurvature::at(surface, q)?;
        Ok(dot2(lc.grad(of)?, align(lc.dir(along), reference)))
    };
    let mut out = [Estimate::exact(T::zero()); 2];
    for (a, slot) in out.iter_mut().enumerate() {
        let e = if a == 0 { [T::one(), T::zero()] } else { [T::zero(), T::one()] };
        let axis = move |_: [T; 2]| -> Result<[T; 2]> { Ok(e) };
        *slot = richardson(probe.h, |h| nested_difference(p, h, &[&axis], &leaf))?;
    }
    Ok(out)
}

/// Angle between the constant principal curvature line through `p` and the ridge line of the sheet.
pub fn ridge_cpc_angle<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], sheet: Sheet) -> Result<T> {
    let lc = LocalCurvature::at(surface, p)?;
    let gk = lc.grad(sheet)?;
    let gr = field_gradient(surface, p, sheet, sheet)?;
    let gr = [gr[0].value, gr[1].value];
    let c = dot2(gk, gr) / (gk[0].hypot(gk[1]) * gr[0].hypot(gr[1]));
    let angle = c.abs().min(T::one()).acos();
    Ok(angle)
}

/// True when the field gradient of `v_sheet kappa_sheet` vanishes (singular ridge line).
pub fn ridge_line_singular<T: Real>(surface: &SurfaceModel<T>, p: [T; 2], sheet: Sheet) -> Result<bool> {
    let g = field_gradient(surface, p, sheet, sheet)?;
    Ok(g[0].is_zero() && g[1].is_zero())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UmbilicClass {
    Elliptic,
    Hyperbolic,
    RightAngledHyperbolic,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct UmbilicReport<T> {
    pub gamma: T,
    pub gamma_prime: T,
    pub class: UmbilicClass,
}

/// Cubic-part determinants of an umbilic Monge jet and the resulting class.
pub fn classify_umbilic<T: Real>(jet: &MongeJet<T>) -> Result<UmbilicReport<T>> {
    if !jet.umbilic {
        return Err(Error::NotUmbilic);
    }
    let (a30, a21, a12, a03) = (jet.a(3, 0), jet.a(2, 1), jet.a(1, 2), jet.a(0, 3));
    let two = lit::<T>(2.0);
    let z = T::zero();
    let gamma_m = vec![
        vec![a30, two * a21, a12, z],
        vec![z, a30, two * a21, a12],
        vec![a21, two * a12, a03, z],
        vec![z, a21, two * a12, a03],
    ];
    let prime_m = vec![vec![T::one(), z, T::one()], vec![a30, a21, a12], vec![a21, a12, a03]];
    let (gamma, gscale) = det_with_scale(&gamma_m);
    let (gamma_prime, pscale) = det_with_scale(&prime_m);
    let class = if negligible(gamma, gscale) {
        UmbilicClass::Degenerate
    } else if gamma < T::zero() {
        UmbilicClass::Elliptic
    } else if negligible(gamma_prime, pscale) {
        UmbilicClass::RightAngledHyperbolic
    } else {
        UmbilicClass::Hyperbolic
    };
    Ok(UmbilicReport { gamma, gamma_prime, class })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct UmbilicPoint<T> {
    pub param: [T; 2],
    pub position: V3<T>,
    pub kappa: T,
    /// Residual of the umbilic equations after refinement.
    pub residual: T,
}

fn umbilic_residual<T: Real>(surface: &SurfaceModel<T>, p: [T; 2]) -> Option<[T; 3]> {
    let lc = LocalCurvature::at(surface, p).ok()?;
    let w = lc.forms.weingarten();
    Some([w[0][0] - w[1][1], w[0][1], w[1][0]])
}

/// Gauss-Newton refinement of an umbilic from a nearby start.
pub fn refine_umbilic<T: Real>(surface: &SurfaceModel<T>, start: [T; 2]) -> Option<UmbilicPoint<T>> {
    let mut p = start;
    for _ in 0..60 {
        let r = umbilic_residual(surface, p)?;
        let h = lit::<T>(1e-7) * (T::one() + p[0].abs().max(p[1].abs()));
        let mut jac = [[T::zero(); 2]; 3];
        for a in 0..2 {
            let mut qp = p;
            let mut qm = p;
            qp[a] = qp[a] + h;
            qm[a] = qm[a] - h;
            let (rp, rm) = (umbilic_residual(surface, qp)?, umbilic_residual(surface, qm)?);
            for k in 0..3 {
                jac[k][a] = (rp[k] - rm[k]) / (lit::<T>(2.0) * h);
            }
        }
        let mut ata = [[T::zero(); 2]; 2];
        let mut atr = [T::zero(); 2];
        for k in 0..3 {
            for a in 0..2 {
                atr[a] = atr[a] + jac[k][a] * r[k];
                for b in 0..2 {
                    ata[a][b] = ata[a][b] + jac[k][a] * jac[k][b];
                }
            }
        }
        let step = crate::linalg::solve2(ata, atr)?;
        p = [p[0] - step[0], p[1] - step[1]];
        if step[0].hypot(step[1]) < lit::<T>(1e-15) * (T::one() + p[0].abs().max(p[1].abs())) {
            break;
        }
    }
    let r = umbilic_residual(surface, p)?;
    let lc = LocalCurvature::at(surface, p).ok()?;
    let residual = r.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let scale = T::one().max(lc.principal.kappa[0].abs());
    if residual > lit::<T>(1e-9) * scale || !lc.principal.umbilic {
        return None;
    }
    Some(UmbilicPoint {
        param: p,
        position: surface.position(p).ok()?,
        kappa: lc.principal.kappa[0],
        residual,
    })
}

/// Umbilics inside `region`: grid scan of the curvature gap, then refinement.
pub fn find_umbilics<T: Real>(surface: &SurfaceModel<T>, region: &Region<T>, n: usize) -> Vec<UmbilicPoint<T>> {
    let gaps: Vec<Option<T>> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let p = region.node(k % n, k / n, n);
            LocalCurvature::at(surface, p).ok().map(|lc| lc.principal.gap())
        })
        .collect();
    let at = |i: usize, j: usize| gaps[j * n + i];
    let mut starts = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let Some(g) = at(i, j) else { continue };
            let mut is_min = true;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || ii < 0 || jj < 0 || ii >= n as i64 || jj >= n as i64 {
                        continue;
                    }
                    if let Some(h) = at(ii as usize, jj as usize) {
                        if h < g {
                            is_min = false;
                        }
                    }
                }
            }
            if is_min {
                starts.push(region.node(i, j, n));
            }
        }
    }
    let refined: Vec<UmbilicPoint<T>> = starts.par_iter().filter_map(|&s| refine_umbilic(surface, s)).collect();
    let mut out: Vec<UmbilicPoint<T>> = Vec::new();
    for u in refined {
        if !region.contains(u.param) {
            continue;
        }
        let close = |o: &UmbilicPoint<T>| {
            let d = crate::vec3::norm(crate::vec3::sub(o.position, u.position));
            d < lit::<T>(1e-6) * (T::one() + crate::vec3::norm(u.position))
        };
        if !out.iter().any(close) {
            out.push(u);
        }
    }
    out.sort_by(|a, b| {
        (a.param[0], a.param[1]).partial_cmp(&(b.param[0], b.param[1])).unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}

/// Principal field of a sheet at `q`, oriented along `reference` (helper for tracers).
pub fn principal_field<T: Real>(surface: &SurfaceModel<T>, s: Sheet, reference: [T; 2], q: [T; 2]) -> Result<[T; 2]> {
    aligned_dir(surface, s, reference, q)
}
