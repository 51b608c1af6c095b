//! Truncated bivariate power series `sum p_ij u^i v^j`, `i + j <= degree`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{factorial, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Series2<T> {
    degree: usize,
    coef: Vec<T>,
}

/// Position of `u^i v^j` in degree-major order `1, u, v, u^2, uv, v^2, ...`.
pub fn monomial_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Number of monomials of degree at most `degree`.
pub fn monomial_count(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Exponents `(i, j)` in degree-major order.
pub fn monomials(degree: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=degree).flat_map(|d| (0..=d).map(move |j| (d - j, j)))
}

impl<T: Real> Series2<T> {
    pub fn zero(degree: usize) -> Self {
        Self { degree, coef: vec![T::zero(); monomial_count(degree)] }
    }

    pub fn constant(degree: usize, c: T) -> Self {
        let mut s = Self::zero(degree);
        s.coef[0] = c;
        s
    }

    pub fn u(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        if degree >= 1 {
            s.set(1, 0, T::one());
        }
        s
    }

    pub fn v(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        if degree >= 1 {
            s.set(0, 1, T::one());
        }
        s
    }

    /// Builds from plain coefficients `p_ij` of `u^i v^j`.
    pub fn from_fn(degree: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let coef = monomials(degree).map(|(i, j)| f(i, j)).collect();
        Self { degree, coef }
    }

    /// Builds from Taylor coefficients `c_ij`, meaning `sum c_ij u^i v^j / (i! j!)`.
    pub fn from_taylor(degree: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        Self::from_fn(degree, |i, j| f(i, j) / (factorial::<T>(i) * factorial::<T>(j)))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i + j > self.degree {
            T::zero()
        } else {
            self.coef[monomial_index(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        assert!(i + j <= self.degree, "monomial beyond truncation degree");
        self.coef[monomial_index(i, j)] = value;
    }

    /// Taylor coefficient `c_ij = i! j! p_ij`.
    pub fn taylor(&self, i: usize, j: usize) -> T {
        self.get(i, j) * factorial::<T>(i) * factorial::<T>(j)
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coef
    }

    pub fn truncate(&self, degree: usize) -> Self {
        Self::from_fn(degree, |i, j| self.get(i, j))
    }

    /// Part of total degree exactly `d`.
    pub fn homogeneous(&self, d: usize) -> Self {
        Self::from_fn(self.degree, |i, j| if i + j == d { self.get(i, j) } else { T::zero() })
    }

    /// Removes the terms of total degree below `d`.
    pub fn drop_below(&self, d: usize) -> Self {
        Self::from_fn(self.degree, |i, j| if i + j < d { T::zero() } else { self.get(i, j) })
    }

    pub fn scale(&self, k: T) -> Self {
        Self { degree: self.degree, coef: self.coef.iter().map(|&c| c * k).collect() }
    }

    pub fn max_abs(&self) -> T {
        self.coef.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, u: T, v: T) -> T {
        let mut acc = T::zero();
        for (i, j) in monomials(self.degree) {
            let c = self.get(i, j);
            if c != T::zero() {
                acc = acc + c * u.powi(i as i32) * v.powi(j as i32);
            }
        }
        acc
    }

    /// Partial derivative in `u`, truncated one degree lower.
    pub fn du(&self) -> Self {
        let d = self.degree.saturating_sub(1);
        Self::from_fn(d, |i, j| self.get(i + 1, j) * T::lit((i + 1) as f64))
    }

    /// Partial derivative in `v`, truncated one degree lower.
    pub fn dv(&self) -> Self {
        let d = self.degree.saturating_sub(1);
        Self::from_fn(d, |i, j| self.get(i, j + 1) * T::lit((j + 1) as f64))
    }

    pub fn mul_trunc(&self, other: &Self, degree: usize) -> Self {
        let mut out = Self::zero(degree);
        for (i, j) in monomials(self.degree) {
            let a = self.get(i, j);
            if a == T::zero() {
                continue;
            }
            for (k, l) in monomials(other.degree) {
                if i + j + k + l > degree {
                    continue;
                }
                let b = other.get(k, l);
                if b != T::zero() {
                    let idx = monomial_index(i + k, j + l);
                    out.coef[idx] = out.coef[idx] + a * b;
                }
            }
        }
        out
    }

    /// Substitutes `u -> p(u, v)`, `v -> q(u, v)`; `p`, `q` should have no constant term.
    pub fn compose(&self, p: &Self, q: &Self, degree: usize) -> Self {
        let pow = |s: &Self, n: usize| {
            let mut out = vec![Self::constant(degree, T::one())];
            for k in 1..=n {
                let next = out[k - 1].mul_trunc(s, degree);
                out.push(next);
            }
            out
        };
        let pp = pow(p, self.degree);
        let qp = pow(q, self.degree);
        let mut out = Self::zero(degree);
        for (i, j) in monomials(self.degree) {
            let c = self.get(i, j);
            if c == T::zero() {
                continue;
            }
            let term = pp[i].mul_trunc(&qp[j], degree).scale(c);
            out = &out + &term;
        }
        out
    }

    /// Expresses the series in coordinates rotated by `theta`:
    /// returns `s(cos t u' - sin t v', sin t u' + cos t v')`.
    pub fn rotated(&self, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        let d = self.degree;
        let p = &Self::u(d).scale(c) - &Self::v(d).scale(s);
        let q = &Self::u(d).scale(s) + &Self::v(d).scale(c);
        self.compose(&p, &q, d)
    }
}

impl<T: Real> Add for &Series2<T> {
    type Output = Series2<T>;
    fn add(self, rhs: Self) -> Series2<T> {
        let d = self.degree.max(rhs.degree);
        Series2::from_fn(d, |i, j| self.get(i, j) + rhs.get(i, j))
    }
}

impl<T: Real> Sub for &Series2<T> {
    type Output = Series2<T>;
    fn sub(self, rhs: Self) -> Series2<T> {
        let d = self.degree.max(rhs.degree);
        Series2::from_fn(d, |i, j| self.get(i, j) - rhs.get(i, j))
    }
}

impl<T: Real> Mul for &Series2<T> {
    type Output = Series2<T>;
    fn mul(self, rhs: Self) -> Series2<T> {
        self.mul_trunc(rhs, self.degree.min(rhs.degree))
    }
}

impl<T: Real> Neg for &Series2<T> {
    type Output = Series2<T>;
    fn neg(self) -> Series2<T> {
        self.scale(-T::one())
    }
}
