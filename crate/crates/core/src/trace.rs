//! Marching-squares tracing of curvature loci with Morse-type singular point detection.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{align, dot2, LocalCurvature, Sheet};
use crate::geom::{Region, SurfaceModel};
use crate::linalg::solve2;
use crate::scalar::{lit, negligible, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Topology {
    SmoothArc,
    IsolatedPoint,
    Crossing,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::SmoothArc => "smooth_arc",
            Topology::IsolatedPoint => "isolated_point",
            Topology::Crossing => "crossing",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Polyline<T> {
    pub points: Vec<[T; 2]>,
    pub closed: bool,
    /// `None` for loci belonging to both sheets (an umbilic).
    pub color: Option<Sheet>,
    pub topology: Topology,
}

/// Field value with an optional orientation vector; the value changes sign with the vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<T> {
    pub value: T,
    pub orient: Option<[T; 2]>,
}

impl<T: Real> Sample<T> {
    pub fn plain(value: T) -> Self {
        Self { value, orient: None }
    }

    /// Value expressed relative to the orientation of `reference`.
    fn relative_to(&self, reference: &Sample<T>) -> T {
        match (self.orient, reference.orient) {
            (Some(a), Some(b)) if dot2(a, b) < T::zero() => -self.value,
            _ => self.value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SingularPoint<T> {
    pub point: [T; 2],
    pub value: T,
    pub hessian_det: T,
    pub topology: Topology,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TraceResult<T> {
    pub polylines: Vec<Polyline<T>>,
    pub singular: Vec<SingularPoint<T>>,
    /// Cells skipped because the field could not be evaluated at a corner.
    pub flagged_cells: usize,
}

/// Field samples on an `n x n` node grid.
pub struct SampledField<T> {
    pub region: Region<T>,
    pub n: usize,
    samples: Vec<Option<Sample<T>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    /// Coarse edge: 0 horizontal `(i,j)-(i+1,j)`, 1 vertical `(i,j)-(i,j+1)`.
    Edge(u8, usize, usize),
    /// Interior edge of a subdivided cell.
    Sub(usize, u8, usize, usize),
    Center(usize, usize, usize),
}

const SUBDIVISION: usize = 8;

fn lerp<T: Real>(a: [T; 2], b: [T; 2], t: T) -> [T; 2] {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
}

fn edge_crossing<T: Real>(pa: [T; 2], a: &Sample<T>, pb: [T; 2], b: &Sample<T>) -> Option<[T; 2]> {
    let fa = a.value;
    let fb = b.relative_to(a);
    if (fa < T::zero()) == (fb < T::zero()) {
        return None;
    }
    Some(lerp(pa, pb, fa / (fa - fb)))
}

/// Crossings on the four edges (bottom, right, top, left) of a cell with corners
/// `c0=(0,0), c1=(1,0), c2=(1,1), c3=(0,1)`.
fn cell_crossings<T: Real>(p: [[T; 2]; 4], s: [&Sample<T>; 4]) -> [Option<[T; 2]>; 4] {
    [
        edge_crossing(p[0], s[0], p[1], s[1]),
        edge_crossing(p[1], s[1], p[2], s[2]),
        edge_crossing(p[3], s[3], p[2], s[2]),
        edge_crossing(p[0], s[0], p[3], s[3]),
    ]
}

/// Pairs the crossings of a cell; `None` entries of the result mean "connect to the centre".
fn pair_crossings<T: Real>(
    crossings: &[Option<[T; 2]>; 4],
    corners: [&Sample<T>; 4],
    center: Option<Sample<T>>,
) -> Option<Vec<(usize, usize)>> {
    let present: Vec<usize> = (0..4).filter(|&e| crossings[e].is_some()).collect();
    match present.len() {
        0 => Some(vec![]),
        2 => Some(vec![(present[0], present[1])]),
        4 => {
            let c0 = corners[0].value;
            let mid = center.map(|c| c.relative_to(corners[0])).unwrap_or(T::zero());
            if (mid < T::zero()) == (c0 < T::zero()) {
                Some(vec![(0, 1), (2, 3)])
            } else {
                Some(vec![(3, 0), (1, 2)])
            }
        }
        _ => None,
    }
}

struct Segments<T> {
    segs: Vec<(Node, Node)>,
    pos: BTreeMap<Node, [T; 2]>,
}

impl<T: Real> Segments<T> {
    fn new() -> Self {
        Self { segs: Vec::new(), pos: BTreeMap::new() }
    }

    fn push(&mut self, a: (Node, [T; 2]), b: (Node, [T; 2])) {
        self.pos.entry(a.0).or_insert(a.1);
        self.pos.entry(b.0).or_insert(b.1);
        self.segs.push((a.0, b.0));
    }

    fn extend(&mut self, other: Segments<T>) {
        for (k, p) in other.pos {
            self.pos.entry(k).or_insert(p);
        }
        self.segs.extend(other.segs);
    }
}

impl<T: Real> SampledField<T> {
    pub fn sample<F>(field: &F, region: Region<T>, n: usize) -> Self
    where
        F: Fn([T; 2]) -> Option<Sample<T>> + Sync,
    {
        let samples = (0..n * n).into_par_iter().map(|k| field(region.node(k % n, k / n, n))).collect();
        Self { region, n, samples }
    }

    pub fn at(&self, i: usize, j: usize) -> Option<&Sample<T>> {
        self.samples[j * self.n + i].as_ref()
    }

    fn cell_diagonal(&self) -> T {
        let [du, dv] = self.region.spacing(self.n);
        du.hypot(dv)
    }

    /// Zero set of the sampled field as polylines (uncoloured, smooth topology).
    pub fn contours<F>(&self, field: &F) -> (Vec<Polyline<T>>, usize)
    where
        F: Fn([T; 2]) -> Option<Sample<T>> + Sync,
    {
        let n = self.n;
        let rows: Vec<(Segments<T>, usize)> = (0..n.saturating_sub(1))
            .into_par_iter()
            .map(|j| {
                let mut segs = Segments::new();
                let mut flagged = 0;
                for i in 0..n - 1 {
                    if !self.cell(field, i, j, &mut segs) {
                        flagged += 1;
                    }
                }
                (segs, flagged)
            })
            .collect();
        let mut all = Segments::new();
        let mut flagged = 0;
        for (s, f) in rows {
            all.extend(s);
            flagged += f;
        }
        (link(&all), flagged)
    }

    fn cell<F>(&self, field: &F, i: usize, j: usize, out: &mut Segments<T>) -> bool
    where
        F: Fn([T; 2]) -> Option<Sample<T>> + Sync,
    {
        let idx = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
        let mut corners = Vec::with_capacity(4);
        for &(a, b) in &idx {
            match self.at(a, b) {
                Some(s) => corners.push(s),
                None => return false,
            }
        }
        let corners = [corners[0], corners[1], corners[2], corners[3]];
        let pts = idx.map(|(a, b)| self.region.node(a, b, self.n));
        let crossings = cell_crossings(pts, corners);
        let keys = [Node::Edge(0, i, j), Node::Edge(1, i + 1, j), Node::Edge(0, i, j + 1), Node::Edge(1, i, j)];
        let count = crossings.iter().filter(|c| c.is_some()).count();
        let cell_id = j * self.n + i;
        if count == 4 && self.subdivide(field, cell_id, pts, corners, &crossings, &keys, out) {
            return true;
        }
        let center = lerp(pts[0], pts[2], lit(0.5));
        let center_sample = if count == 4 { field(center) } else { None };
        match pair_crossings(&crossings, corners, center_sample) {
            Some(pairs) => {
                for (a, b) in pairs {
                    out.push((keys[a], crossings[a].unwrap()), (keys[b], crossings[b].unwrap()));
                }
            }
            None => {
                let c = Node::Center(cell_id, 0, 0);
                for e in 0..4 {
                    if let Some(p) = crossings[e] {
                        out.push((keys[e], p), (c, center));
                    }
                }
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn subdivide<F>(
        &self,
        field: &F,
        cell_id: usize,
        pts: [[T; 2]; 4],
        corners: [&Sample<T>; 4],
        coarse: &[Option<[T; 2]>; 4],
        keys: &[Node; 4],
        out: &mut Segments<T>,
    ) -> bool
    where
        F: Fn([T; 2]) -> Option<Sample<T>> + Sync,
    {
        let m = SUBDIVISION;
        let node = |a: usize, b: usize| {
            let (x, y) = (lit::<T>(a as f64 / m as f64), lit::<T>(b as f64 / m as f64));
            [pts[0][0] + (pts[1][0] - pts[0][0]) * x, pts[0][1] + (pts[3][1] - pts[0][1]) * y]
        };
        let mut grid = Vec::with_capacity((m + 1) * (m + 1));
        for b in 0..=m {
            for a in 0..=m {
                let s = match (a, b) {
                    (0, 0) => Some(*corners[0]),
                    (x, 0) if x == m => Some(*corners[1]),
                    (x, y) if x == m && y == m => Some(*corners[2]),
                    (0, y) if y == m => Some(*corners[3]),
                    _ => field(node(a, b)),
                };
                match s {
                    Some(s) => grid.push(s),
                    None => return false,
                }
            }
        }
        let g = |a: usize, b: usize| &grid[b * (m + 1) + a];
        let mut local = Segments::new();
        // boundary crossings per coarse side: (sub node, position)
        let mut sides: [Vec<Node>; 4] = Default::default();
        for b in 0..m {
            for a in 0..m {
                let sp = [node(a, b), node(a + 1, b), node(a + 1, b + 1), node(a, b + 1)];
                let sc = [g(a, b), g(a + 1, b), g(a + 1, b + 1), g(a, b + 1)];
                let cr = cell_crossings(sp, sc);
                let sk = [
                    Node::Sub(cell_id, 0, a, b),
                    Node::Sub(cell_id, 1, a + 1, b),
                    Node::Sub(cell_id, 0, a, b + 1),
                    Node::Sub(cell_id, 1, a, b),
                ];
                for e in 0..4 {
                    if cr[e].is_none() {
                        continue;
                    }
                    let side = match (e, a, b) {
                        (0, _, 0) => Some(0),
                        (1, x, _) if x + 1 == m => Some(1),
                        (2, _, y) if y + 1 == m => Some(2),
                        (3, 0, _) => Some(3),
                        _ => None,
                    };
                    if let Some(sd) = side {
                        if !sides[sd].contains(&sk[e]) {
                            sides[sd].push(sk[e]);
                        }
                    }
                }
                let mid = lerp(sp[0], sp[2], lit(0.5));
                let count = cr.iter().filter(|c| c.is_some()).count();
                let center_sample = if count == 4 { field(mid) } else { None };
                match pair_crossings(&cr, sc, center_sample) {
                    Some(pairs) => {
                        for (x, y) in pairs {
                            local.push((sk[x], cr[x].unwrap()), (sk[y], cr[y].unwrap()));
                        }
                    }
                    None => {
                        let c = Node::Center(cell_id, a + 1, b + 1);
                        for e in 0..4 {
                            if let Some(p) = cr[e] {
                                local.push((sk[e], p), (c, mid));
                            }
                        }
                    }
                }
            }
        }
        // Snap single boundary crossings onto the shared coarse edge node.
        let mut rename = BTreeMap::new();
        for sd in 0..4 {
            if sides[sd].len() == 1 && coarse[sd].is_some() {
                rename.insert(sides[sd][0], keys[sd]);
            }
        }
        for (a, b) in local.segs {
            let ra = rename.get(&a).copied().unwrap_or(a);
            let rb = rename.get(&b).copied().unwrap_or(b);
            let pa = if ra != a { coarse[side_of(keys, ra)].unwrap() } else { local.pos[&a] };
            let pb = if rb != b { coarse[side_of(keys, rb)].unwrap() } else { local.pos[&b] };
            out.push((ra, pa), (rb, pb));
        }
        true
    }

    /// Critical points of the field lying on (or unresolvably close to) its zero set.
    pub fn singular_points<F>(&self, field: &F) -> Vec<SingularPoint<T>>
    where
        F: Fn([T; 2]) -> Option<Sample<T>> + Sync,
    {
        let n = self.n;
        if n < 3 {
            return Vec::new();
        }
        let [du, dv] = self.region.spacing(n);
        let grads: Vec<Option<[T; 2]>> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k % n, k / n);
                if i == 0 || j == 0 || i + 1 == n || j + 1 == n {
                    return None;
                }
                let c = self.at(i, j)?;
                let f = |a: usize, b: usize| self.at(a, b).map(|s| s.relative_to(c));
                Some([
                    (f(i + 1, j)? - f(i - 1, j)?) / (lit::<T>(2.0) * du),
                    (f(i, j + 1)? - f(i, j - 1)?) / (lit::<T>(2.0) * dv),
                ])
            })
            .collect();
        let candidates: Vec<(usize, usize)> = (0..(n - 1) * (n - 1))
            .filter_map(|k| {
                let (i, j) = (k % (n - 1), k / (n - 1));
                let gs = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)].map(|(a, b)| grads[b * n + a]);
                if gs.iter().any(Option::is_none) {
                    return None;
                }
                let gs = gs.map(Option::unwrap);
                let c0 = self.at(i, j)?;
                // gradients transform like values under orientation flips
                let sign = |a: usize, b: usize| {
                    let s = self.at(a, b).unwrap();
                    if s.relative_to(c0) == s.value { T::one() } else { -T::one() }
                };
                let signs = [sign(i, j), sign(i + 1, j), sign(i + 1, j + 1), sign(i, j + 1)];
                for comp in 0..2 {
                    let vals: Vec<T> = (0..4).map(|q| gs[q][comp] * signs[q]).collect();
                    let lo = vals.iter().fold(T::infinity(), |m, &x| m.min(x));
                    let hi = vals.iter().fold(T::neg_infinity(), |m, &x| m.max(x));
                    if lo > T::zero() || hi < T::zero() {
                        return None;
                    }
                }
                Some((i, j))
            })
            .collect();
        let found: Vec<SingularPoint<T>> = candidates
            .par_iter()
            .filter_map(|&(i, j)| {
                let start = lerp(self.region.node(i, j, n), self.region.node(i + 1, j + 1, n), lit(0.5));
                let (p, value, hess) = newton_critical(field, start, [du, dv])?;
                let near = |x: T, lo: T, d: T| x >= lo - d && x <= lo + lit::<T>(2.0) * d;
                let cell0 = self.region.node(i, j, n);
                if !(near(p[0], cell0[0], du) && near(p[1], cell0[1], dv)) || !self.region.contains(p) {
                    return None;
                }
                let norm = hess[0][0].abs().max(hess[1][1].abs()).max(hess[0][1].abs());
                let unresolved = lit::<T>(0.125) * norm * (du * du + dv * dv);
                if value.abs() > unresolved {
                    return None;
                }
                let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
                let topology = if det > T::zero() && !negligible(det, norm * norm) {
                    Topology::IsolatedPoint
                } else {
                    Topology::Crossing
                };
                Some(SingularPoint { point: p, value, hessian_det: det, topology })
            })
            .collect();
        let radius = lit::<T>(2.0) * self.cell_diagonal();
        let mut out: Vec<SingularPoint<T>> = Vec::new();
        for s in found {
            if !out.iter().any(|o| distance(o.point, s.point) < radius) {
                out.push(s);
            }
        }
        out
    }
}

fn side_of(keys: &[Node; 4], k: Node) -> usize {
    keys.iter().position(|&x| x == k).expect("renamed node is a coarse edge")
}

pub fn distance<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Newton iteration on the gradient with a 9-point stencil; returns the point, value and Hessian.
fn newton_critical<T: Real, F>(field: &F, start: [T; 2], cell: [T; 2]) -> Option<([T; 2], T, [[T; 2]; 2])>
where
    F: Fn([T; 2]) -> Option<Sample<T>> + Sync,
{
    let d = cell[0].min(cell[1]) / lit(8.0);
    let mut p = start;
    let stencil = |p: [T; 2]| -> Option<(T, [T; 2], [[T; 2]; 2])> {
        let c = field(p)?;
        let f = |a: T, b: T| field([p[0] + a * d, p[1] + b * d]).map(|s| s.relative_to(&c));
        let (o, l) = (T::zero(), T::one());
        let (fp0, fm0, f0p, f0m) = (f(l, o)?, f(-l, o)?, f(o, l)?, f(o, -l)?);
        let (fpp, fpm, fmp, fmm) = (f(l, l)?, f(l, -l)?, f(-l, l)?, f(-l, -l)?);
        let two = lit::<T>(2.0);
        let g = [(fp0 - fm0) / (two * d), (f0p - f0m) / (two * d)];
        let huu = (fp0 - two * c.value + fm0) / (d * d);
        let hvv = (f0p - two * c.value + f0m) / (d * d);
        let huv = (fpp - fpm - fmp + fmm) / (lit::<T>(4.0) * d * d);
        Some((c.value, g, [[huu, huv], [huv, hvv]]))
    };
    for _ in 0..30 {
        let (_, g, h) = stencil(p)?;
        let step = solve2(h, g)?;
        p = [p[0] - step[0], p[1] - step[1]];
        if step[0].hypot(step[1]) < lit::<T>(1e-10) * cell[0].max(cell[1]) {
            break;
        }
        if distance(p, start) > lit::<T>(4.0) * cell[0].hypot(cell[1]) {
            return None;
        }
    }
    let (v, _, h) = stencil(p)?;
    Some((p, v, h))
}

/// Joins segments sharing nodes into maximal polylines.
fn link<T: Real>(s: &Segments<T>) -> Vec<Polyline<T>> {
    let mut adj: BTreeMap<Node, Vec<usize>> = BTreeMap::new();
    for (k, &(a, b)) in s.segs.iter().enumerate() {
        if a == b {
            continue;
        }
        adj.entry(a).or_default().push(k);
        adj.entry(b).or_default().push(k);
    }
    let mut used = vec![false; s.segs.len()];
    let mut lines = Vec::new();
    let other = |k: usize, from: Node| {
        let (a, b) = s.segs[k];
        if a == from { b } else { a }
    };
    let walk = |start: Node, first: usize, used: &mut Vec<bool>| -> (Vec<Node>, bool) {
        let mut nodes = vec![start];
        let mut cur = start;
        let mut seg = first;
        loop {
            used[seg] = true;
            let next = other(seg, cur);
            nodes.push(next);
            if next == start {
                return (nodes, true);
            }
            let nbrs = &adj[&next];
            if nbrs.len() != 2 {
                return (nodes, false);
            }
            match nbrs.iter().copied().find(|&k| !used[k]) {
                Some(k) => {
                    cur = next;
                    seg = k;
                }
                None => return (nodes, false),
            }
        }
    };
    let ends: Vec<Node> = adj.iter().filter(|(_, v)| v.len() != 2).map(|(k, _)| *k).collect();
    for start in ends {
        for &k in &adj[&start].clone() {
            if !used[k] {
                let (nodes, closed) = walk(start, k, &mut used);
                lines.push((nodes, closed));
            }
        }
    }
    let starts: Vec<Node> = adj.keys().copied().collect();
    for start in starts {
        for &k in &adj[&start].clone() {
            if !used[k] {
                let (nodes, closed) = walk(start, k, &mut used);
                lines.push((nodes, closed));
            }
        }
    }
    lines
        .into_iter()
        .map(|(nodes, closed)| {
            let mut points: Vec<[T; 2]> = nodes.iter().map(|k| s.pos[k]).collect();
            if closed {
                points.pop();
            }
            Polyline { points, closed, color: None, topology: Topology::SmoothArc }
        })
        .collect()
}

/// Locus selector for [`trace_locus`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Locus<T> {
    /// Constant principal curvature lines `kappa_i = c` of both sheets.
    Cpc(T),
    Ridge(Sheet),
    /// Sub-parabolic line relative to `v_sheet` (`v_sheet kappa_other = 0`).
    Subparabolic(Sheet),
}

fn cpc_field<T: Real>(surface: &SurfaceModel<T>, sheet: Sheet, c: T) -> impl Fn([T; 2]) -> Option<Sample<T>> + Sync + '_ {
    move |q| LocalCurvature::at(surface, q).ok().map(|lc| Sample::plain(lc.kappa(sheet) - c))
}

fn product_field<T: Real>(surface: &SurfaceModel<T>, c: T) -> impl Fn([T; 2]) -> Option<Sample<T>> + Sync + '_ {
    move |q| LocalCurvature::at(surface, q).ok().map(|lc| Sample::plain(lc.cpc_product(c)))
}

/// Oriented field `v_along kappa_of`.
pub fn derivative_field<T: Real>(
    surface: &SurfaceModel<T>,
    along: Sheet,
    of: Sheet,
) -> impl Fn([T; 2]) -> Option<Sample<T>> + Sync + '_ {
    move |q| {
        let lc = LocalCurvature::at(surface, q).ok()?;
        let v = lc.dir(along);
        let g = lc.grad(of).ok()?;
        Some(Sample { value: dot2(g, v), orient: Some(v) })
    }
}

fn tag_crossings<T: Real>(lines: &mut [Polyline<T>], at: [T; 2], radius: T, color: Option<Sheet>) {
    for l in lines.iter_mut() {
        if color.is_some() && l.color != color {
            continue;
        }
        if l.points.iter().any(|&q| distance(q, at) < radius) {
            l.topology = Topology::Crossing;
        }
    }
}

/// Traces a locus over `region` sampled on an `n x n` grid.
pub fn trace_locus<T: Real>(surface: &SurfaceModel<T>, locus: Locus<T>, region: &Region<T>, n: usize) -> TraceResult<T> {
    let radius = {
        let [du, dv] = region.spacing(n);
        lit::<T>(2.0) * du.hypot(dv)
    };
    match locus {
        Locus::Cpc(c) => {
            let mut polylines = Vec::new();
            let mut flagged_cells = 0;
            for sheet in [Sheet::Blue, Sheet::Red] {
                let f = cpc_field(surface, sheet, c);
                let grid = SampledField::sample(&f, *region, n);
                let (mut lines, flagged) = grid.contours(&f);
                for l in &mut lines {
                    l.color = Some(sheet);
                }
                polylines.extend(lines);
                flagged_cells += flagged;
            }
            let pf = product_field(surface, c);
            let pgrid = SampledField::sample(&pf, *region, n);
            let singular = pgrid.singular_points(&pf);
            for s in &singular {
                let color = LocalCurvature::at(surface, s.point).ok().and_then(|lc| {
                    let tol = lit::<T>(1e-6) * T::one().max(c.abs());
                    if lc.principal.gap() < tol {
                        None
                    } else if (lc.kappa(Sheet::Blue) - c).abs() <= (lc.kappa(Sheet::Red) - c).abs() {
                        Some(Sheet::Blue)
                    } else {
                        Some(Sheet::Red)
                    }
                });
                match s.topology {
                    Topology::IsolatedPoint => polylines.push(Polyline {
                        points: vec![s.point],
                        closed: false,
                        color,
                        topology: Topology::IsolatedPoint,
                    }),
                    _ => tag_crossings(&mut polylines, s.point, radius, color),
                }
            }
            TraceResult { polylines, singular, flagged_cells }
        }
        Locus::Ridge(sheet) | Locus::Subparabolic(sheet) => {
            let of = if matches!(locus, Locus::Ridge(_)) { sheet } else { sheet.other() };
            let f = derivative_field(surface, sheet, of);
            let grid = SampledField::sample(&f, *region, n);
            let (mut polylines, flagged_cells) = grid.contours(&f);
            for l in &mut polylines {
                l.color = Some(sheet);
            }
            let singular = grid.singular_points(&f);
            for s in &singular {
                match s.topology {
                    Topology::IsolatedPoint => polylines.push(Polyline {
                        points: vec![s.point],
                        closed: false,
                        color: Some(sheet),
                        topology: Topology::IsolatedPoint,
                    }),
                    _ => tag_crossings(&mut polylines, s.point, radius, Some(sheet)),
                }
            }
            TraceResult { polylines, singular, flagged_cells }
        }
    }
}

fn segment_intersection<T: Real>(p1: [T; 2], p2: [T; 2], q1: [T; 2], q2: [T; 2]) -> Option<[T; 2]> {
    let r = [p2[0] - p1[0], p2[1] - p1[1]];
    let s = [q2[0] - q1[0], q2[1] - q1[1]];
    let denom = r[0] * s[1] - r[1] * s[0];
    if denom == T::zero() {
        return None;
    }
    let w = [q1[0] - p1[0], q1[1] - p1[1]];
    let t = (w[0] * s[1] - w[1] * s[0]) / denom;
    let u = (w[0] * r[1] - w[1] * r[0]) / denom;
    let (o, l) = (T::zero(), T::one());
    if t >= o && t <= l && u >= o && u <= l {
        Some([p1[0] + t * r[0], p1[1] + t * r[1]])
    } else {
        None
    }
}

fn segments_of<T: Real>(lines: &[Polyline<T>]) -> Vec<([T; 2], [T; 2])> {
    let mut out = Vec::new();
    for l in lines {
        let k = l.points.len();
        if k < 2 {
            continue;
        }
        let m = if l.closed { k } else { k - 1 };
        for a in 0..m {
            out.push((l.points[a], l.points[(a + 1) % k]));
        }
    }
    out
}

/// Intersection points of two polyline sets, merged within `merge_radius`.
pub fn polyline_intersections<T: Real>(a: &[Polyline<T>], b: &[Polyline<T>], merge_radius: T) -> Vec<[T; 2]> {
    let sa = segments_of(a);
    let sb = segments_of(b);
    let bucket = merge_radius.max(T::min_positive_value());
    let key = |p: [T; 2]| ((p[0] / bucket).floor().to_i64().unwrap_or(0), (p[1] / bucket).floor().to_i64().unwrap_or(0));
    let mut grid: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (k, &(p, q)) in sb.iter().enumerate() {
        let (k0, k1) = (key(p), key(q));
        for x in k0.0.min(k1.0)..=k0.0.max(k1.0) {
            for y in k0.1.min(k1.1)..=k0.1.max(k1.1) {
                grid.entry((x, y)).or_default().push(k);
            }
        }
    }
    let mut hits = Vec::new();
    for &(p, q) in &sa {
        let (k0, k1) = (key(p), key(q));
        let mut seen = Vec::new();
        for x in k0.0.min(k1.0)..=k0.0.max(k1.0) {
            for y in k0.1.min(k1.1)..=k0.1.max(k1.1) {
                if let Some(list) = grid.get(&(x, y)) {
                    for &k in list {
                        if seen.contains(&k) {
                            continue;
                        }
                        seen.push(k);
                        if let Some(x) = segment_intersection(p, q, sb[k].0, sb[k].1) {
                            hits.push(x);
                        }
                    }
                }
            }
        }
    }
    let mut merged: Vec<[T; 2]> = Vec::new();
    for h in hits {
        if !merged.iter().any(|&m| distance(m, h) < merge_radius) {
            merged.push(h);
        }
    }
    merged
}

/// Points where the constant principal curvature line `kappa_sheet = c` meets the ridge of the same sheet.
pub fn cpc_ridge_intersections<T: Real>(
    surface: &SurfaceModel<T>,
    c: T,
    sheet: Sheet,
    region: &Region<T>,
    n: usize,
) -> Vec<[T; 2]> {
    let f = cpc_field(surface, sheet, c);
    let (cpc, _) = SampledField::sample(&f, *region, n).contours(&f);
    let r = derivative_field(surface, sheet, sheet);
    let (ridges, _) = SampledField::sample(&r, *region, n).contours(&r);
    let [du, dv] = region.spacing(n);
    polyline_intersections(&cpc, &ridges, lit::<T>(2.0) * du.hypot(dv))
}

/// Value of the oriented field `v_along kappa_of` at `q`, aligned with `reference`.
pub fn aligned_field_value<T: Real>(surface: &SurfaceModel<T>, along: Sheet, of: Sheet, reference: [T; 2], q: [T; 2]) -> Option<T> {
    let lc = LocalCurvature::at(surface, q).ok()?;
    Some(dot2(lc.grad(of).ok()?, align(lc.dir(along), reference)))
}
