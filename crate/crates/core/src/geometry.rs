//! Domains (convex polygons and disks), corner cones, potential
//! specifications with admissibility checks, quadrature grids over the
//! domain, and the shrinking-ball vanishing indicator.

use crate::quad::gauss_legendre;
use crate::{Complex64, Error, Result, Vec2};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const MAX_GRID_NODES: usize = 400_000;

/// Strictly convex polygon with counter-clockwise vertices.
#[derive(Clone, Debug)]
pub struct PolygonDomain {
    vertices: Vec<Vec2>,
    diameter: f64,
}

impl PolygonDomain {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        let poly = Self::new_unvalidated(vertices);
        if poly.vertices.len() < 3 {
            return Err(Error::Invariant("polygon needs at least 3 vertices".into()));
        }
        if !poly.is_strictly_convex() {
            return Err(Error::Invariant(
                "polygon must be strictly convex with counter-clockwise vertices".into(),
            ));
        }
        Ok(poly)
    }

    /// Skips the convexity invariant; used only to feed the admissibility
    /// diagnostic with deliberately bad geometry.
    pub fn new_unvalidated(vertices: Vec<Vec2>) -> Self {
        let mut diameter = 0.0_f64;
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                diameter = diameter.max((vertices[i] - vertices[j]).norm());
            }
        }
        PolygonDomain { vertices, diameter }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn is_strictly_convex(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            let cross = (b - a).perp(&(c - b));
            if cross <= 1e-14 * self.diameter * self.diameter {
                return false;
            }
        }
        true
    }

    pub fn area(&self) -> f64 {
        shoelace_area(&self.vertices)
    }

    pub fn centroid(&self) -> Vec2 {
        polygon_centroid(&self.vertices)
    }

    pub fn contains(&self, x: Vec2) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (b - a).perp(&(x - a)) < 0.0 {
                return false;
            }
        }
        true
    }

    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        let v = self.vertices[i];
        let to_next = (self.vertices[(i + 1) % n] - v).normalize();
        let to_prev = (self.vertices[(i + n - 1) % n] - v).normalize();
        to_next.dot(&to_prev).clamp(-1.0, 1.0).acos()
    }

    /// Outward unit normal of edge i (from vertex i to vertex i+1).
    pub fn edge_normal(&self, i: usize) -> Vec2 {
        let n = self.vertices.len();
        let e = self.vertices[(i + 1) % n] - self.vertices[i];
        Vec2::new(e.y, -e.x).normalize()
    }
}

#[derive(Clone, Debug)]
pub enum Domain {
    Polygon(PolygonDomain),
    Disk { center: Vec2, radius: f64 },
}

impl Domain {
    pub fn disk(center: Vec2, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::Invariant("disk radius must be positive".into()));
        }
        Ok(Domain::Disk { center, radius })
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain::Polygon(p) => p.area(),
            Domain::Disk { radius, .. } => PI * radius * radius,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Polygon(p) => p.diameter(),
            Domain::Disk { radius, .. } => 2.0 * radius,
        }
    }

    pub fn contains(&self, x: Vec2) -> bool {
        match self {
            Domain::Polygon(p) => p.contains(x),
            Domain::Disk { center, radius } => (x - center).norm() <= *radius,
        }
    }

    /// Largest t such that the segment {c + s w : 0 <= s <= t} stays in the
    /// closed domain, for a start point c in the closure. Returns 0 for rays
    /// that leave immediately.
    pub fn ray_exit(&self, c: Vec2, w: Vec2) -> f64 {
        match self {
            Domain::Polygon(p) => {
                let n = p.vertices.len();
                let mut t_hi = f64::INFINITY;
                for i in 0..n {
                    let nrm = p.edge_normal(i);
                    let a = w.dot(&nrm);
                    let b = (p.vertices[i] - c).dot(&nrm);
                    if a > 1e-14 {
                        t_hi = t_hi.min((b / a).max(0.0));
                    } else if b < -1e-12 * p.diameter() {
                        return 0.0; // start point outside this half-plane
                    }
                }
                t_hi
            }
            Domain::Disk { center, radius } => {
                let d = c - center;
                let beta = d.dot(&w);
                let disc = beta * beta + radius * radius - d.norm_squared();
                if disc <= 0.0 {
                    return 0.0;
                }
                (-beta + disc.sqrt()).max(0.0)
            }
        }
    }
}

/// Open cone generated by the polygon at one of its vertices.
#[derive(Clone, Debug)]
pub struct ConeAtVertex {
    pub apex: Vec2,
    pub edge_dirs: [Vec2; 2],
    pub half_angle: f64,
    pub axis: Vec2,
}

pub fn cone_at_vertex(domain: &PolygonDomain, vertex_index: usize) -> Result<ConeAtVertex> {
    let n = domain.vertices().len();
    if vertex_index >= n {
        return Err(Error::Domain(format!(
            "vertex index {vertex_index} out of range for {n}-gon"
        )));
    }
    let v = domain.vertices()[vertex_index];
    let d_next = (domain.vertices()[(vertex_index + 1) % n] - v).normalize();
    let d_prev = (domain.vertices()[(vertex_index + n - 1) % n] - v).normalize();
    let angle = domain.interior_angle(vertex_index);
    if angle >= PI - 1e-12 {
        return Err(Error::Invariant(format!(
            "straight or reflex angle {angle} at vertex {vertex_index}"
        )));
    }
    let axis = (d_next + d_prev).normalize();
    Ok(ConeAtVertex {
        apex: v,
        edge_dirs: [d_next, d_prev],
        half_angle: 0.5 * angle,
        axis,
    })
}

/// h(Omega): minimum over vertices and non-adjacent edges of the
/// point-segment distance.
pub fn min_vertex_edge_distance(domain: &PolygonDomain) -> f64 {
    let n = domain.vertices().len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for e in 0..n {
            // edges e and e+1 (mod n) are adjacent to vertex i when e == i or e+1 == i
            if e == i || (e + 1) % n == i {
                continue;
            }
            let d = point_segment_distance(
                domain.vertices()[i],
                domain.vertices()[e],
                domain.vertices()[(e + 1) % n],
            );
            best = best.min(d);
        }
    }
    best
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}

fn shoelace_area(v: &[Vec2]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| v[i].perp(&v[(i + 1) % n]))
        .sum::<f64>()
}

fn polygon_centroid(v: &[Vec2]) -> Vec2 {
    let n = v.len();
    let a = shoelace_area(v);
    let mut c = Vec2::zeros();
    for i in 0..n {
        let cross = v[i].perp(&v[(i + 1) % n]);
        c += (v[i] + v[(i + 1) % n]) * cross;
    }
    c / (6.0 * a)
}

/// Contrast function phi. Constant is the fast path; expressions come from a
/// small registered set so configurations stay serializable.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Contrast {
    Constant { value: f64 },
    Expression { name: String },
}

pub const REGISTERED_EXPRESSIONS: [&str; 3] = ["dist_to_origin", "gaussian", "one_plus_half_x"];

impl Contrast {
    pub fn constant(value: f64) -> Self {
        Contrast::Constant { value }
    }

    pub fn expression(name: &str) -> Result<Self> {
        if REGISTERED_EXPRESSIONS.contains(&name) {
            Ok(Contrast::Expression { name: name.into() })
        } else {
            Err(Error::Config(format!(
                "unknown contrast expression '{name}'; registered: {REGISTERED_EXPRESSIONS:?}"
            )))
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Contrast::Constant { value } => {
                if value.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Config("contrast constant must be finite".into()))
                }
            }
            Contrast::Expression { name } => Self::expression(name).map(|_| ()),
        }
    }

    pub fn eval(&self, x: Vec2) -> Complex64 {
        match self {
            Contrast::Constant { value } => Complex64::new(*value, 0.0),
            Contrast::Expression { name } => {
                let v = match name.as_str() {
                    "dist_to_origin" => x.norm(),
                    "gaussian" => (-2.0 * x.norm_squared()).exp(),
                    "one_plus_half_x" => 1.0 + 0.5 * x.x,
                    other => panic!("unregistered contrast expression '{other}'"),
                };
                Complex64::new(v, 0.0)
            }
        }
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self {
            Contrast::Constant { value } => Some(*value),
            _ => None,
        }
    }
}

/// V = chi_Omega phi with Hoelder metadata.
#[derive(Clone, Debug)]
pub struct PotentialSpec {
    pub domain: Domain,
    pub contrast: Contrast,
    pub hoelder_alpha: f64,
}

impl PotentialSpec {
    pub fn new(domain: Domain, contrast: Contrast, hoelder_alpha: f64) -> Result<Self> {
        contrast.validate()?;
        Ok(PotentialSpec {
            domain,
            contrast,
            hoelder_alpha,
        })
    }

    /// V(x) = chi_Omega(x) phi(x).
    pub fn potential(&self, x: Vec2) -> Complex64 {
        if self.domain.contains(x) {
            self.contrast.eval(x)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

/// Per-condition admissibility diagnostic for the corner-scattering theorems.
#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    /// (1) V = chi_Omega phi with phi bounded on the domain of interest
    pub cond_bounded_form: bool,
    /// (2) Omega is an open convex polygon contained in B_R
    pub cond_convex_polygon: bool,
    /// (3) phi Hoelder with alpha > 0
    pub cond_hoelder: bool,
    /// (4) phi != 0 at some vertex
    pub cond_vertex_nonzero: bool,
    /// vertex indices witnessing condition (4)
    pub witnesses: Vec<usize>,
    pub admissible: bool,
}

pub const DOMAIN_OF_INTEREST_RADIUS: f64 = 10.0;

pub fn check_admissibility(spec: &PotentialSpec) -> AdmissibilityReport {
    let cond_bounded_form = match &spec.domain {
        Domain::Polygon(p) => p
            .vertices()
            .iter()
            .chain(std::iter::once(&p.centroid()))
            .all(|&x| spec.contrast.eval(x).norm().is_finite()),
        Domain::Disk { center, .. } => spec.contrast.eval(*center).norm().is_finite(),
    };
    let (cond_convex_polygon, mut witnesses) = match &spec.domain {
        Domain::Polygon(p) => {
            let inside_br = p
                .vertices()
                .iter()
                .all(|v| v.norm() < DOMAIN_OF_INTEREST_RADIUS);
            (p.is_strictly_convex() && inside_br, Vec::new())
        }
        Domain::Disk { .. } => (false, Vec::new()),
    };
    let cond_hoelder = spec.hoelder_alpha > 0.0;
    let cond_vertex_nonzero = match &spec.domain {
        Domain::Polygon(p) => {
            for (i, &v) in p.vertices().iter().enumerate() {
                if spec.contrast.eval(v).norm() > 1e-14 {
                    witnesses.push(i);
                }
            }
            !witnesses.is_empty()
        }
        Domain::Disk { .. } => false,
    };
    AdmissibilityReport {
        cond_bounded_form,
        cond_convex_polygon,
        cond_hoelder,
        cond_vertex_nonzero,
        witnesses: witnesses.clone(),
        admissible: cond_bounded_form && cond_convex_polygon && cond_hoelder && cond_vertex_nonzero,
    }
}

/// Quadrature nodes and positive weights covering the domain; weights sum to
/// the domain area (exactly for polygons via cell clipping, to the polar
/// midpoint rule for disks).
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub nodes: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub h: f64,
}

impl QuadratureGrid {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn build_grid(domain: &Domain, target_h: f64) -> Result<QuadratureGrid> {
    if target_h <= 0.0 || target_h >= domain.diameter() {
        return Err(Error::Domain(format!(
            "target cell size {target_h} must lie in (0, diameter = {})",
            domain.diameter()
        )));
    }
    let estimate = (domain.area() / (target_h * target_h)).ceil() as usize;
    if estimate > MAX_GRID_NODES {
        return Err(Error::Resource(format!(
            "grid would need ~{estimate} nodes (cap {MAX_GRID_NODES})"
        )));
    }
    match domain {
        Domain::Polygon(p) => build_polygon_grid(p, target_h),
        Domain::Disk { center, radius } => Ok(build_disk_grid(*center, *radius, target_h)),
    }
}

fn build_polygon_grid(poly: &PolygonDomain, h: f64) -> Result<QuadratureGrid> {
    let (mut xmin, mut ymin) = (f64::INFINITY, f64::INFINITY);
    let (mut xmax, mut ymax) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in poly.vertices() {
        xmin = xmin.min(v.x);
        ymin = ymin.min(v.y);
        xmax = xmax.max(v.x);
        ymax = ymax.max(v.y);
    }
    let nx = ((xmax - xmin) / h).ceil() as usize;
    let ny = ((ymax - ymin) / h).ceil() as usize;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let x0 = xmin + ix as f64 * h;
            let y0 = ymin + iy as f64 * h;
            let cell = vec![
                Vec2::new(x0, y0),
                Vec2::new(x0 + h, y0),
                Vec2::new(x0 + h, y0 + h),
                Vec2::new(x0, y0 + h),
            ];
            let clipped = clip_polygon(&cell, poly);
            if clipped.len() < 3 {
                continue;
            }
            let area = shoelace_area(&clipped);
            if area <= 1e-14 * h * h {
                continue;
            }
            nodes.push(polygon_centroid(&clipped));
            weights.push(area);
            if nodes.len() > MAX_GRID_NODES {
                return Err(Error::Resource(format!(
                    "grid node cap {MAX_GRID_NODES} exceeded"
                )));
            }
        }
    }
    Ok(QuadratureGrid { nodes, weights, h })
}

/// Sutherland-Hodgman clipping of `subject` against the convex polygon.
fn clip_polygon(subject: &[Vec2], clip: &PolygonDomain) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = subject.to_vec();
    let n = clip.vertices().len();
    for i in 0..n {
        let a = clip.vertices()[i];
        let b = clip.vertices()[(i + 1) % n];
        let edge = b - a;
        let input = std::mem::take(&mut out);
        if input.is_empty() {
            break;
        }
        let inside = |p: Vec2| edge.perp(&(p - a)) >= 0.0;
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let cur_in = inside(cur);
            let prev_in = inside(prev);
            if cur_in {
                if !prev_in {
                    out.push(line_intersection(prev, cur, a, b));
                }
                out.push(cur);
            } else if prev_in {
                out.push(line_intersection(prev, cur, a, b));
            }
        }
    }
    out
}

fn line_intersection(p: Vec2, q: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let d1 = q - p;
    let d2 = b - a;
    // p + t (q - p) with t from the cross-product form of the 2x2 system
    let t = d2.perp(&(p - a)) / d1.perp(&d2);
    p + t * d1
}

/// Polar midpoint grid; ring weights sum exactly to the disk area.
fn build_disk_grid(center: Vec2, radius: f64, h: f64) -> QuadratureGrid {
    let n_r = (radius / h).ceil().max(2.0) as usize;
    let dr = radius / n_r as f64;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for i in 0..n_r {
        let r = (i as f64 + 0.5) * dr;
        let n_t = ((2.0 * PI * r / h).ceil() as usize).max(8);
        let dt = 2.0 * PI / n_t as f64;
        for j in 0..n_t {
            let t = (j as f64 + 0.5) * dt;
            nodes.push(center + r * Vec2::new(t.cos(), t.sin()));
            weights.push(r * dr * dt);
        }
    }
    QuadratureGrid {
        nodes,
        weights,
        h: dr,
    }
}

/// Result of the shrinking-ball indicator: mean of |v| over the full ball
/// measure, with v extended by zero outside the domain.
#[derive(Clone, Copy, Debug)]
pub struct BallAverage {
    pub value: f64,
    /// set when r exceeds the distance from the center to the opposite side
    pub radius_warning: bool,
}

/// (1/m(B(x_c,r))) \int_{B(x_c,r)} |v| dx with v zero-extended outside the
/// domain. Integration is polar about x_c with exact ray clipping against
/// the domain, so the only quadrature error comes from the smooth integrand.
pub fn ball_average<F: Fn(Vec2) -> Complex64>(
    domain: &Domain,
    center: Vec2,
    r: f64,
    field: F,
) -> Result<BallAverage> {
    if r <= 0.0 {
        return Err(Error::Domain(format!("ball radius {r} must be positive")));
    }
    let n_rays = 256;
    let (gl_x, gl_w) = gauss_legendre(24);
    let mut integral = 0.0;
    for s in 0..n_rays {
        let theta = 2.0 * PI * (s as f64 + 0.5) / n_rays as f64;
        let w = Vec2::new(theta.cos(), theta.sin());
        let t_up = domain.ray_exit(center, w).min(r);
        if t_up <= 0.0 {
            continue;
        }
        let mut ray = 0.0;
        for (x, wt) in gl_x.iter().zip(&gl_w) {
            let t = 0.5 * t_up * (x + 1.0);
            ray += wt * field(center + t * w).norm() * t;
        }
        integral += ray * 0.5 * t_up * (2.0 * PI / n_rays as f64);
    }
    let radius_warning = r > opposite_side_distance(domain, center);
    Ok(BallAverage {
        value: integral / (PI * r * r),
        radius_warning,
    })
}

fn opposite_side_distance(domain: &Domain, c: Vec2) -> f64 {
    match domain {
        Domain::Polygon(p) => {
            let n = p.vertices().len();
            let mut best = f64::INFINITY;
            for e in 0..n {
                let a = p.vertices()[e];
                let b = p.vertices()[(e + 1) % n];
                let d = point_segment_distance(c, a, b);
                if d > 1e-9 * p.diameter() {
                    best = best.min(d);
                }
            }
            best
        }
        Domain::Disk { radius, .. } => 2.0 * radius,
    }
}

/// JSON configuration for a potential, matching the documented schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialConfig {
    pub domain: DomainConfig,
    pub contrast: Contrast,
    #[serde(default = "default_alpha")]
    pub hoelder_alpha: f64,
}

fn default_alpha() -> f64 {
    1.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainConfig {
    Polygon { vertices: Vec<[f64; 2]> },
    Disk { center: [f64; 2], radius: f64 },
}

impl PotentialConfig {
    pub fn build(&self) -> Result<PotentialSpec> {
        let domain = match &self.domain {
            DomainConfig::Polygon { vertices } => Domain::Polygon(PolygonDomain::new(
                vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect(),
            )?),
            DomainConfig::Disk { center, radius } => {
                Domain::disk(Vec2::new(center[0], center[1]), *radius)?
            }
        };
        PotentialSpec::new(domain, self.contrast.clone(), self.hoelder_alpha)
    }
}

pub fn unit_square() -> PolygonDomain {
    PolygonDomain::new(vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(1.0, 1.0),
        Vec2::new(0.0, 1.0),
    ])
    .expect("unit square is convex")
}
