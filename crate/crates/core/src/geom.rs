//! Parametrized surfaces and their derivative jets.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{factorial, lit, Real};
use crate::series::{monomial_count, monomial_index, monomials, Series2};
use crate::vec3::{cross, norm, V3};

/// Highest derivative order carried by a [`Jet`].
pub const JET_ORDER: usize = 5;

/// Partial derivatives `d^(i+j) g / du^i dv^j` of a parametrization at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T> {
    pub point: [T; 2],
    pub order: usize,
    d: Vec<V3<T>>,
}

impl<T: Real> Jet<T> {
    pub fn d(&self, i: usize, j: usize) -> V3<T> {
        assert!(i + j <= self.order, "derivative order {} beyond jet order {}", i + j, self.order);
        self.d[monomial_index(i, j)]
    }

    pub fn position(&self) -> V3<T> {
        self.d(0, 0)
    }

    /// Taylor series of coordinate `k` of `g(p + (s, t)) - g(p)`.
    pub fn coordinate_series(&self, k: usize) -> Series2<T> {
        Series2::from_fn(self.order, |i, j| {
            if i + j == 0 {
                T::zero()
            } else {
                self.d(i, j)[k] / (factorial::<T>(i) * factorial::<T>(j))
            }
        })
    }
}

/// `z = k1 u^2/2 + k2 v^2/2 + sum a_ij u^i v^j/(i! j!)` with `3 <= i + j <= 5`.
#[derive(Debug, Clone, PartialEq)]
pub struct MongeGraph<T> {
    pub k1: T,
    pub k2: T,
    pub a: BTreeMap<(usize, usize), T>,
}

/// `z = sum p_ij u^i v^j` for an arbitrary coefficient map.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialGraph<T> {
    pub coeffs: BTreeMap<(usize, usize), T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceModel<T> {
    Monge(MongeGraph<T>),
    Polynomial(PolynomialGraph<T>),
    /// Chart `(latitude, longitude)`, semi-axes along x, y, z.
    Ellipsoid { axes: [T; 3] },
    /// Chart `(tube angle, revolution angle)`.
    Torus { major: T, minor: T },
}

impl<T: Real> MongeGraph<T> {
    pub fn new(k1: T, k2: T, a: impl IntoIterator<Item = ((usize, usize), T)>) -> Result<Self> {
        let a: BTreeMap<_, _> = a.into_iter().collect();
        for &(i, j) in a.keys() {
            if !(3..=JET_ORDER).contains(&(i + j)) {
                return Err(Error::Invalid(format!("Monge coefficient a{i}{j} must have order 3..=5")));
            }
        }
        Ok(Self { k1, k2, a })
    }

    pub fn coef(&self, i: usize, j: usize) -> T {
        self.a.get(&(i, j)).copied().unwrap_or_else(T::zero)
    }

    pub fn height(&self) -> Series2<T> {
        Series2::from_taylor(JET_ORDER, |i, j| match (i, j) {
            (2, 0) => self.k1,
            (0, 2) => self.k2,
            _ if i + j >= 3 => self.coef(i, j),
            _ => T::zero(),
        })
    }
}

impl<T: Real> PolynomialGraph<T> {
    pub fn new(coeffs: impl IntoIterator<Item = ((usize, usize), T)>) -> Self {
        Self { coeffs: coeffs.into_iter().collect() }
    }

    fn derivative(&self, i: usize, j: usize, u: T, v: T) -> T {
        let mut acc = T::zero();
        for (&(k, l), &c) in &self.coeffs {
            if k < i || l < j || c == T::zero() {
                continue;
            }
            let fk = factorial::<T>(k) / factorial::<T>(k - i);
            let fl = factorial::<T>(l) / factorial::<T>(l - j);
            acc = acc + c * fk * fl * u.powi((k - i) as i32) * v.powi((l - j) as i32);
        }
        acc
    }
}

fn graph_jet<T: Real>(p: [T; 2], order: usize, f: impl Fn(usize, usize) -> T) -> Vec<V3<T>> {
    monomials(order)
        .map(|(i, j)| {
            let x = match (i, j) {
                (0, 0) => p[0],
                (1, 0) => T::one(),
                _ => T::zero(),
            };
            let y = match (i, j) {
                (0, 0) => p[1],
                (0, 1) => T::one(),
                _ => T::zero(),
            };
            [x, y, f(i, j)]
        })
        .collect()
}

/// `d^n/dx^n cos(x) = cos(x + n pi/2)`.
fn cos_n<T: Real>(x: T, n: usize) -> T {
    match n % 4 {
        0 => x.cos(),
        1 => -x.sin(),
        2 => -x.cos(),
        _ => x.sin(),
    }
}

fn sin_n<T: Real>(x: T, n: usize) -> T {
    match n % 4 {
        0 => x.sin(),
        1 => x.cos(),
        2 => -x.sin(),
        _ => -x.cos(),
    }
}

impl<T: Real> SurfaceModel<T> {
    pub fn monge(k1: T, k2: T, a: &[((usize, usize), T)]) -> Self {
        SurfaceModel::Monge(MongeGraph::new(k1, k2, a.iter().copied()).expect("valid Monge coefficients"))
    }

    pub fn chart_name(&self) -> &'static str {
        match self {
            SurfaceModel::Monge(_) => "monge",
            SurfaceModel::Polynomial(_) => "polygraph",
            SurfaceModel::Ellipsoid { .. } => "ellipsoid (latitude, longitude)",
            SurfaceModel::Torus { .. } => "torus (tube angle, revolution angle)",
        }
    }

    /// Derivatives of the parametrization up to `order` (at most 5) at `p`.
    pub fn eval_jet(&self, p: [T; 2], order: usize) -> Result<Jet<T>> {
        assert!(order <= JET_ORDER);
        if !(p[0].is_finite() && p[1].is_finite()) {
            return Err(Error::Domain { chart: self.chart_name(), detail: "non-finite parameters".into() });
        }
        let d = match self {
            SurfaceModel::Monge(m) => {
                let h = m.height();
                graph_jet(p, order, |i, j| {
                    let mut acc = T::zero();
                    for (k, l) in monomials(JET_ORDER) {
                        if k < i || l < j {
                            continue;
                        }
                        let c = h.get(k, l);
                        if c == T::zero() {
                            continue;
                        }
                        let fk = factorial::<T>(k) / factorial::<T>(k - i);
                        let fl = factorial::<T>(l) / factorial::<T>(l - j);
                        acc = acc + c * fk * fl * p[0].powi((k - i) as i32) * p[1].powi((l - j) as i32);
                    }
                    acc
                })
            }
            SurfaceModel::Polynomial(g) => graph_jet(p, order, |i, j| g.derivative(i, j, p[0], p[1])),
            SurfaceModel::Ellipsoid { axes: [a, b, c] } => {
                let (th, ph) = (p[0], p[1]);
                if th.cos() <= lit(1e-6) {
                    return Err(Error::Domain {
                        chart: self.chart_name(),
                        detail: format!("latitude {} at or beyond a pole", th),
                    });
                }
                monomials(order)
                    .map(|(i, j)| {
                        let z = if j == 0 { *c * sin_n(th, i) } else { T::zero() };
                        [*a * cos_n(th, i) * cos_n(ph, j), *b * cos_n(th, i) * sin_n(ph, j), z]
                    })
                    .collect()
            }
            SurfaceModel::Torus { major, minor } => {
                let (th, ph) = (p[0], p[1]);
                monomials(order)
                    .map(|(i, j)| {
                        let radial = if i == 0 { *major + *minor * th.cos() } else { *minor * cos_n(th, i) };
                        let z = if j == 0 { *minor * sin_n(th, i) } else { T::zero() };
                        [radial * cos_n(ph, j), radial * sin_n(ph, j), z]
                    })
                    .collect()
            }
        };
        debug_assert_eq!(d.len(), monomial_count(order));
        let jet = Jet { point: p, order, d };
        if order >= 1 {
            let gu = jet.d(1, 0);
            let gv = jet.d(0, 1);
            let area = norm(cross(gu, gv));
            if !(area > lit::<T>(1e-12) * (norm(gu) * norm(gv)).max(T::min_positive_value())) {
                return Err(Error::NotRegular(area.to_f64_lossy()));
            }
        }
        Ok(jet)
    }

    pub fn position(&self, p: [T; 2]) -> Result<V3<T>> {
        Ok(self.eval_jet(p, 0)?.position())
    }

    /// Parses the JSON surface descriptor.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value.as_object().ok_or_else(|| Error::Invalid("surface must be a JSON object".into()))?;
        let kind = obj
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Invalid("missing string field \"type\"".into()))?;
        let allowed: &[&str] = match kind {
            "monge" => &["type", "k1", "k2", "a"],
            "polygraph" => &["type", "coeffs"],
            "ellipsoid" => &["type", "axes"],
            "torus" => &["type", "R", "r"],
            other => return Err(Error::Invalid(format!("unknown surface type {other:?}"))),
        };
        if let Some(key) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Invalid(format!("unknown key {key:?} for surface type {kind:?}")));
        }
        let num = |key: &str| -> Result<T> {
            obj.get(key)
                .and_then(Value::as_f64)
                .map(T::lit)
                .ok_or_else(|| Error::Invalid(format!("missing numeric field {key:?}")))
        };
        match kind {
            "monge" => {
                let mut a = Vec::new();
                if let Some(map) = obj.get("a") {
                    let map = map.as_object().ok_or_else(|| Error::Invalid("\"a\" must be an object".into()))?;
                    for (key, v) in map {
                        let idx = parse_digit_pair(key)?;
                        let x = v.as_f64().ok_or_else(|| Error::Invalid(format!("a[{key:?}] is not a number")))?;
                        a.push((idx, T::lit(x)));
                    }
                }
                Ok(SurfaceModel::Monge(MongeGraph::new(num("k1")?, num("k2")?, a)?))
            }
            "polygraph" => {
                let map = obj
                    .get("coeffs")
                    .and_then(Value::as_object)
                    .ok_or_else(|| Error::Invalid("\"coeffs\" must be an object".into()))?;
                let mut coeffs = BTreeMap::new();
                for (key, v) in map {
                    let (i, j) = key
                        .split_once(',')
                        .and_then(|(i, j)| Some((i.trim().parse().ok()?, j.trim().parse().ok()?)))
                        .ok_or_else(|| Error::Invalid(format!("coefficient key {key:?} is not \"i,j\"")))?;
                    let x = v.as_f64().ok_or_else(|| Error::Invalid(format!("coeffs[{key:?}] is not a number")))?;
                    coeffs.insert((i, j), T::lit(x));
                }
                Ok(SurfaceModel::Polynomial(PolynomialGraph { coeffs }))
            }
            "ellipsoid" => {
                let axes = obj
                    .get("axes")
                    .and_then(Value::as_array)
                    .filter(|a| a.len() == 3)
                    .ok_or_else(|| Error::Invalid("\"axes\" must be an array of three numbers".into()))?;
                let mut out = [T::zero(); 3];
                for (slot, v) in out.iter_mut().zip(axes) {
                    let x = v.as_f64().filter(|x| *x > 0.0);
                    *slot = T::lit(x.ok_or_else(|| Error::Invalid("ellipsoid axes must be positive".into()))?);
                }
                Ok(SurfaceModel::Ellipsoid { axes: out })
            }
            _ => {
                let (major, minor) = (num("R")?, num("r")?);
                if !(minor > T::zero() && major > minor) {
                    return Err(Error::Invalid("torus requires R > r > 0".into()));
                }
                Ok(SurfaceModel::Torus { major, minor })
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let f = |x: T| Value::from(x.to_f64_lossy());
        match self {
            SurfaceModel::Monge(m) => {
                let a: serde_json::Map<String, Value> =
                    m.a.iter().map(|(&(i, j), &c)| (format!("{i}{j}"), f(c))).collect();
                serde_json::json!({"type": "monge", "k1": f(m.k1), "k2": f(m.k2), "a": a})
            }
            SurfaceModel::Polynomial(g) => {
                let c: serde_json::Map<String, Value> =
                    g.coeffs.iter().map(|(&(i, j), &c)| (format!("{i},{j}"), f(c))).collect();
                serde_json::json!({"type": "polygraph", "coeffs": c})
            }
            SurfaceModel::Ellipsoid { axes } => {
                serde_json::json!({"type": "ellipsoid", "axes": axes.iter().map(|&x| f(x)).collect::<Vec<_>>()})
            }
            SurfaceModel::Torus { major, minor } => serde_json::json!({"type": "torus", "R": f(*major), "r": f(*minor)}),
        }
    }
}

fn parse_digit_pair(key: &str) -> Result<(usize, usize)> {
    let digits: Vec<usize> = key.chars().filter_map(|c| c.to_digit(10).map(|d| d as usize)).collect();
    if digits.len() != 2 || key.len() != 2 {
        return Err(Error::Invalid(format!("Monge coefficient key {key:?} must be two digits like \"30\"")));
    }
    Ok((digits[0], digits[1]))
}

/// Axis-aligned parameter rectangle `[u0, u1] x [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(bound = "T: Real")]
pub struct Region<T> {
    pub u: [T; 2],
    pub v: [T; 2],
}

impl<T: Real> Region<T> {
    pub fn new(u: [T; 2], v: [T; 2]) -> Result<Self> {
        if !(u[0] < u[1] && v[0] < v[1]) {
            return Err(Error::Invalid("region bounds must be increasing".into()));
        }
        Ok(Self { u, v })
    }

    pub fn square(half: T) -> Self {
        Self { u: [-half, half], v: [-half, half] }
    }

    /// Parses `u0:u1,v0:v1`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("region {text:?} is not of the form u0:u1,v0:v1"));
        let (a, b) = text.split_once(',').ok_or_else(bad)?;
        let range = |s: &str| -> Result<[T; 2]> {
            let (x, y) = s.split_once(':').ok_or_else(bad)?;
            let x: f64 = x.trim().parse().map_err(|_| bad())?;
            let y: f64 = y.trim().parse().map_err(|_| bad())?;
            Ok([T::lit(x), T::lit(y)])
        };
        Self::new(range(a)?, range(b)?)
    }

    /// Grid node `(i, j)` of an `n x n` sampling including the boundary.
    pub fn node(&self, i: usize, j: usize, n: usize) -> [T; 2] {
        let [du, dv] = self.spacing(n);
        [self.u[0] + du * lit(i as f64), self.v[0] + dv * lit(j as f64)]
    }

    pub fn spacing(&self, n: usize) -> [T; 2] {
        let m = lit::<T>((n.max(2) - 1) as f64);
        [(self.u[1] - self.u[0]) / m, (self.v[1] - self.v[0]) / m]
    }

    pub fn contains(&self, p: [T; 2]) -> bool {
        p[0] >= self.u[0] && p[0] <= self.u[1] && p[1] >= self.v[0] && p[1] <= self.v[1]
    }
}
