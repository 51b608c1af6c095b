//! K-versality of the distance-squared unfoldings by the jet-space spanning test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::germ::{classify_germ, GermClass, GermJet};
use crate::linalg::eliminate;
use crate::scalar::{lit, Real};
use crate::series::{monomial_count, monomials, Series2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `Phi^t`: unfolding parameters `(x, y, z)`.
    PhiT,
    /// `Phi`: unfolding parameters `(x, y, z, t)`.
    Phi,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::PhiT => "PhiT",
            Family::Phi => "Phi",
        }
    }
}

/// Degree up to which a germ of the given class is determined.
pub fn determinacy(class: GermClass) -> Result<usize> {
    match class {
        GermClass::A1 => Ok(2),
        GermClass::A2 | GermClass::D4Plus | GermClass::D4Minus => Ok(3),
        GermClass::A3 => Ok(4),
        GermClass::A4 => Ok(5),
        GermClass::Worse => Err(Error::UnsupportedDeterminacy(class.name().into())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VersalityProblem<T> {
    pub family: Family,
    pub class: GermClass,
    pub degree: usize,
    /// One row per unfolding direction, in monomial order up to `degree`.
    pub unfolding_rows: Vec<Vec<T>>,
    /// Rows `m phi_u`, `m phi_v`, `m phi` for monomials `m` of degree below `degree`.
    pub ideal_rows: Vec<Vec<T>>,
}

impl<T: Real> VersalityProblem<T> {
    pub fn columns(&self) -> usize {
        monomial_count(self.degree)
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<T>> {
        self.unfolding_rows.iter().chain(&self.ideal_rows)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersalityVerdict {
    pub family: Family,
    pub versal: bool,
    pub rank: usize,
    pub required: usize,
    /// Monomials `u^i v^j` without a pivot.
    pub missing: Vec<(usize, usize)>,
}

fn row<T: Real>(s: &Series2<T>, degree: usize) -> Vec<T> {
    monomials(degree).map(|(i, j)| s.get(i, j)).collect()
}

pub fn build_versality_matrix<T: Real>(germ: &GermJet<T>, family: Family) -> Result<VersalityProblem<T>> {
    let unfolding = germ.unfolding.as_ref().ok_or(Error::MissingUnfolding)?;
    let class = classify_germ(germ)?.class;
    let degree = determinacy(class)?;
    let mut unfolding_rows = vec![
        row(&unfolding.phi_x, degree),
        row(&unfolding.phi_y, degree),
        row(&unfolding.phi_z, degree),
    ];
    if family == Family::Phi {
        unfolding_rows.push(row(&Series2::constant(degree, unfolding.phi_t), degree));
    }
    let phi = germ.series.truncate(degree + 1);
    let generators = [phi.du(), phi.dv(), phi.truncate(degree)];
    let mut ideal_rows = Vec::new();
    for (i, j) in monomials(degree - 1) {
        let mut m = Series2::zero(degree);
        m.set(i, j, T::one());
        for g in &generators {
            ideal_rows.push(row(&m.mul_trunc(g, degree), degree));
        }
    }
    Ok(VersalityProblem { family, class, degree, unfolding_rows, ideal_rows })
}

/// Relative pivot threshold of the rank test.
pub fn rank_threshold<T: Real>() -> T {
    T::zero_tol() * lit(1e-2)
}

pub fn is_k_versal<T: Real>(problem: &VersalityProblem<T>) -> VersalityVerdict {
    let rows: Vec<Vec<T>> = problem.rows().cloned().collect();
    let e = eliminate(&rows, rank_threshold::<T>());
    let required = problem.columns();
    let missing = monomials(problem.degree)
        .enumerate()
        .filter(|(c, _)| !e.pivot_cols.contains(c))
        .map(|(_, ij)| ij)
        .collect();
    VersalityVerdict { family: problem.family, versal: e.rank == required, rank: e.rank, required, missing }
}

pub fn versality<T: Real>(germ: &GermJet<T>, family: Family) -> Result<VersalityVerdict> {
    Ok(is_k_versal(&build_versality_matrix(germ, family)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::Sheet;
    use crate::fixtures::fixture;
    use crate::germ::germ_from_surface;

    fn verdict(name: &str, family: Family) -> VersalityVerdict {
        let g = germ_from_surface(&fixture::<f64>(name).unwrap(), [0.0, 0.0], Sheet::Blue).unwrap();
        versality(&g, family).unwrap()
    }

    #[test]
    fn hyp_matrix_layout() {
        let g = germ_from_surface(&fixture::<f64>("S-HYP").unwrap(), [0.0, 0.0], Sheet::Blue).unwrap();
        let p = build_versality_matrix(&g, Family::Phi).unwrap();
        assert_eq!(p.unfolding_rows.len(), 4);
        assert_eq!(p.columns(), 10);
        assert!(p.rows().all(|r| r.len() == 10));
    }

    #[test]
    fn fixture_verdicts() {
        let cases = [
            ("S-A2", Family::PhiT, true),
            ("S-SW", Family::PhiT, true),
            ("S-CBF", Family::PhiT, false),
            ("S-CBF", Family::Phi, true),
            ("S-LIPS", Family::PhiT, false),
            ("S-BKS", Family::PhiT, false),
            ("S-HYP", Family::Phi, true),
            ("S-HYPRA", Family::Phi, false),
            ("S-ELL", Family::Phi, true),
        ];
        for (name, family, versal) in cases {
            let v = verdict(name, family);
            assert_eq!(v.versal, versal, "{name} {family:?} {v:?}");
            assert_eq!(v.versal, v.missing.is_empty());
        }
    }

    #[test]
    fn worse_is_unsupported() {
        let g = GermJet::<f64>::from_taylor(&[((6, 0), 720.0), ((0, 2), 2.0)]);
        assert_eq!(determinacy(classify_germ(&g).unwrap().class), Err(Error::UnsupportedDeterminacy("Worse".into())));
        assert_eq!(versality(&g, Family::Phi), Err(Error::MissingUnfolding));
    }
}
