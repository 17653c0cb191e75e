//! Bounded domains in R^3 and their sampling lattices.
//!
//! A domain is a closed box or a closed ball together with a grid spacing
//! `h`. Its nodes are the points of an axis-aligned lattice of spacing `h`
//! that lie in the closed domain; each node is either interior or boundary.
//! Ball lattices are centred on the ball centre, box lattices start at the
//! lower corner.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaternion::norm3;

pub const DEFAULT_DEGREE_CAP: u32 = 16;

/// Largest lattice (bounding-box node count) a domain may allocate.
const MAX_LATTICE: usize = 64_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    Box { min: [f64; 3], max: [f64; 3] },
    Ball { center: [f64; 3], radius: f64 },
}

/// JSON-facing description of a domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(flatten)]
    pub shape: Shape,
    pub h: f64,
    /// Cap on the total degree of polynomial fields living on the domain.
    #[serde(default = "default_degree_cap")]
    pub degree_cap: u32,
}

fn default_degree_cap() -> u32 {
    DEFAULT_DEGREE_CAP
}

impl DomainSpec {
    pub fn cube(min: f64, max: f64, h: f64) -> Self {
        Self::with_shape(Shape::Box { min: [min; 3], max: [max; 3] }, h)
    }

    pub fn ball(center: [f64; 3], radius: f64, h: f64) -> Self {
        Self::with_shape(Shape::Ball { center, radius }, h)
    }

    pub fn unit_ball(h: f64) -> Self {
        Self::ball([0.0; 3], 1.0, h)
    }

    pub fn with_shape(shape: Shape, h: f64) -> Self {
        Self { shape, h, degree_cap: DEFAULT_DEGREE_CAP }
    }

    /// Same shape with a different grid spacing.
    pub fn with_h(&self, h: f64) -> Self {
        Self { h, ..self.clone() }
    }
}

#[derive(Debug)]
pub struct Domain {
    spec: DomainSpec,
    origin: [f64; 3],
    dims: [usize; 3],
    /// Lattice slot -> node number, `u32::MAX` when the slot is outside.
    slot_to_node: Vec<u32>,
    lattice_index: Vec<[u32; 3]>,
    points: Vec<[f64; 3]>,
    boundary: Vec<bool>,
    depth: Vec<f64>,
}

const NO_NODE: u32 = u32::MAX;

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Domain {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        let h = spec.h;
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidDomain(format!("grid spacing must be positive, got {h}")));
        }
        let (origin, dims) = match &spec.shape {
            Shape::Box { min, max } => {
                let mut dims = [0; 3];
                for i in 0..3 {
                    if !(min[i].is_finite() && max[i].is_finite() && max[i] > min[i]) {
                        return Err(Error::InvalidDomain(format!(
                            "box needs max > min on every axis (axis {i}: {} .. {})",
                            min[i], max[i]
                        )));
                    }
                    dims[i] = ((max[i] - min[i]) / h + 1e-9).floor() as usize + 1;
                }
                (*min, dims)
            }
            Shape::Ball { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0 && center.iter().all(|c| c.is_finite())) {
                    return Err(Error::InvalidDomain(format!("ball radius must be positive, got {radius}")));
                }
                let n = (radius / h + 1e-9).floor() as usize;
                let origin = std::array::from_fn(|i| center[i] - n as f64 * h);
                (origin, [2 * n + 1; 3])
            }
        };
        let total = dims.iter().try_fold(1usize, |acc, d| acc.checked_mul(*d));
        match total {
            Some(t) if t <= MAX_LATTICE => {}
            _ => return Err(Error::InvalidDomain(format!("lattice {dims:?} is too large"))),
        }

        let mut domain = Domain {
            spec,
            origin,
            dims,
            slot_to_node: vec![NO_NODE; dims[0] * dims[1] * dims[2]],
            lattice_index: Vec::new(),
            points: Vec::new(),
            boundary: Vec::new(),
            depth: Vec::new(),
        };
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    let idx = [i as u32, j as u32, k as u32];
                    let x = domain.lattice_point(idx);
                    let Some((depth, on_boundary)) = domain.classify(idx, &x) else {
                        continue;
                    };
                    let slot = domain.slot(idx);
                    domain.slot_to_node[slot] = domain.points.len() as u32;
                    domain.lattice_index.push(idx);
                    domain.points.push(x);
                    domain.boundary.push(on_boundary);
                    domain.depth.push(depth);
                }
            }
        }
        Ok(domain)
    }

    /// Depth below the boundary and boundary flag, or `None` outside.
    fn classify(&self, idx: [u32; 3], x: &[f64; 3]) -> Option<(f64, bool)> {
        let h = self.spec.h;
        match &self.spec.shape {
            Shape::Box { min, max } => {
                let depth = (0..3)
                    .map(|i| (x[i] - min[i]).min(max[i] - x[i]).max(0.0))
                    .fold(f64::INFINITY, f64::min);
                let face = (0..3).any(|i| idx[i] == 0 || idx[i] as usize == self.dims[i] - 1);
                Some((depth, face))
            }
            Shape::Ball { center, radius } => {
                let r = norm3(&sub(x, center));
                if r > radius + 1e-9 * h {
                    return None;
                }
                let depth = (radius - r).max(0.0);
                Some((depth, r > radius - h + 1e-9 * h))
            }
        }
    }

    fn slot(&self, idx: [u32; 3]) -> usize {
        (idx[0] as usize * self.dims[1] + idx[1] as usize) * self.dims[2] + idx[2] as usize
    }

    fn lattice_point(&self, idx: [u32; 3]) -> [f64; 3] {
        std::array::from_fn(|i| self.origin[i] + idx[i] as f64 * self.spec.h)
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn shape(&self) -> &Shape {
        &self.spec.shape
    }

    pub fn h(&self) -> f64 {
        self.spec.h
    }

    pub fn degree_cap(&self) -> u32 {
        self.spec.degree_cap
    }

    pub fn node_count(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn point(&self, node: usize) -> [f64; 3] {
        self.points[node]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    /// Euclidean depth of a node below the boundary surface.
    pub fn depth(&self, node: usize) -> f64 {
        self.depth[node]
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&n| self.boundary[n])
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&n| !self.boundary[n])
    }

    /// Nodes at depth at least `margin` below the boundary.
    pub fn nodes_at_depth(&self, margin: f64) -> Vec<usize> {
        let slack = 1e-9 * self.spec.h;
        (0..self.node_count()).filter(|&n| self.depth[n] + slack >= margin).collect()
    }

    /// The evaluation set used for residual measurements: depth `>= 2h`.
    pub fn evaluation_nodes(&self) -> Vec<usize> {
        self.nodes_at_depth(2.0 * self.spec.h)
    }

    /// Neighbour of `node` displaced by `step` lattice units along `axis`.
    pub fn neighbor(&self, node: usize, axis: usize, step: i32) -> Option<usize> {
        let mut idx = self.lattice_index[node];
        let moved = idx[axis] as i64 + step as i64;
        if moved < 0 || moved as usize >= self.dims[axis] {
            return None;
        }
        idx[axis] = moved as u32;
        match self.slot_to_node[self.slot(idx)] {
            NO_NODE => None,
            n => Some(n as usize),
        }
    }

    fn node_at(&self, idx: [i64; 3]) -> Option<usize> {
        if (0..3).any(|i| idx[i] < 0 || idx[i] as usize >= self.dims[i]) {
            return None;
        }
        match self.slot_to_node[self.slot([idx[0] as u32, idx[1] as u32, idx[2] as u32])] {
            NO_NODE => None,
            n => Some(n as usize),
        }
    }

    pub fn center(&self) -> [f64; 3] {
        match &self.spec.shape {
            Shape::Box { min, max } => std::array::from_fn(|i| 0.5 * (min[i] + max[i])),
            Shape::Ball { center, .. } => *center,
        }
    }

    /// Euclidean distance from `x` to the closed domain (0 inside).
    pub fn distance_to(&self, x: &[f64; 3]) -> f64 {
        match &self.spec.shape {
            Shape::Box { min, max } => {
                let d: [f64; 3] = std::array::from_fn(|i| (min[i] - x[i]).max(x[i] - max[i]).max(0.0));
                norm3(&d)
            }
            Shape::Ball { center, radius } => (norm3(&sub(x, center)) - radius).max(0.0),
        }
    }

    pub fn contains(&self, x: &[f64; 3], tol: f64) -> bool {
        self.distance_to(x) <= tol
    }

    /// Largest distance from `from` to a point of the closed domain.
    pub fn max_distance_from(&self, from: &[f64; 3]) -> f64 {
        match &self.spec.shape {
            Shape::Box { min, max } => {
                let d: [f64; 3] =
                    std::array::from_fn(|i| (from[i] - min[i]).abs().max((max[i] - from[i]).abs()));
                norm3(&d)
            }
            Shape::Ball { center, radius } => norm3(&sub(from, center)) + radius,
        }
    }

    /// Trilinear interpolation weights for `x` over the nodes of its lattice cell.
    ///
    /// Cell corners that are not domain nodes (possible near a curved
    /// boundary) are dropped and the remaining weights renormalised; if no
    /// corner carries weight the nearest node is used.
    pub fn interpolation_weights(&self, x: &[f64; 3]) -> Result<Vec<(usize, f64)>> {
        if !self.contains(x, 0.5 * self.spec.h) {
            return Err(Error::OutsideDomain(x[0], x[1], x[2]));
        }
        let h = self.spec.h;
        let mut base = [0i64; 3];
        let mut frac = [0.0; 3];
        for i in 0..3 {
            let t = (x[i] - self.origin[i]) / h;
            let cell = t.floor().clamp(0.0, (self.dims[i].max(2) - 2) as f64) as i64;
            base[i] = cell;
            frac[i] = (t - cell as f64).clamp(0.0, 1.0);
        }
        let mut weights = Vec::with_capacity(8);
        let mut total = 0.0;
        for corner in 0..8 {
            let offs = [corner & 1, (corner >> 1) & 1, (corner >> 2) & 1];
            let w: f64 = (0..3)
                .map(|i| if offs[i] == 1 { frac[i] } else { 1.0 - frac[i] })
                .product();
            if w == 0.0 {
                continue;
            }
            let idx = [base[0] + offs[0] as i64, base[1] + offs[1] as i64, base[2] + offs[2] as i64];
            if let Some(n) = self.node_at(idx) {
                weights.push((n, w));
                total += w;
            }
        }
        if total > 0.0 {
            for (_, w) in &mut weights {
                *w /= total;
            }
            return Ok(weights);
        }
        let nearest = (0..self.node_count())
            .min_by(|&a, &b| {
                let da = norm3(&sub(&self.points[a], x));
                let db = norm3(&sub(&self.points[b], x));
                da.total_cmp(&db)
            })
            .ok_or(Error::OutsideDomain(x[0], x[1], x[2]))?;
        Ok(vec![(nearest, 1.0)])
    }
}

pub(crate) fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
