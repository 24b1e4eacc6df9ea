//! Kuhn triangulation of the rotated half cube `R·((0,1)^{n-1} × (-1,0))`.
//!
//! The top face `y_n = 0` is Γ, with outward normal `R e_n = ρ`. Each of the
//! `h^n` grid cubes is split into `n!` simplices along coordinate orderings;
//! all cubes are translates, so barycentric gradients are stored once per
//! ordering.

use crate::error::{Error, Result};
use crate::minors::{complete_rotation, BoundaryFrame, Matrix};

/// Which boundary vertices carry the zero condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Zero on `∂Ω∖Γ`; values on the open face Γ are free.
    FreeOnGamma,
    /// Zero on all of `∂Ω`.
    Clamped,
}

#[derive(Clone, Debug)]
pub struct StandardDomainMesh {
    n: usize,
    h: usize,
    frame: BoundaryFrame,
    grid: Vec<Vec<usize>>,
    coords: Vec<Vec<f64>>,
    simplices: Vec<Vec<usize>>,
    simplex_shape: Vec<usize>,
    shape_grads: Vec<Vec<Vec<f64>>>,
    simplex_volume: f64,
    gamma_faces: Vec<Vec<usize>>,
    gamma_area: f64,
    on_boundary: Vec<bool>,
    on_gamma: Vec<bool>,
}

/// Mapping from free vertices to unknown slots.
#[derive(Clone, Debug)]
pub struct Dofs {
    pub bc: BoundaryCondition,
    pub free_vertices: Vec<usize>,
    pub slot: Vec<Option<usize>>,
}

impl Dofs {
    pub fn len(&self) -> usize {
        self.free_vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free_vertices.is_empty()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

pub const SUPPORTED_DIMS: [usize; 3] = [2, 3, 4];

impl StandardDomainMesh {
    /// `h` divisions per edge; `normal` must be a unit vector in `R^n`.
    pub fn new(n: usize, normal: &[f64], h: usize) -> Result<Self> {
        if !SUPPORTED_DIMS.contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if normal.len() != n {
            return Err(Error::invalid(format!("normal has dimension {}, mesh has {n}", normal.len())));
        }
        if h < 2 {
            return Err(Error::invalid("mesh resolution must be at least 2"));
        }
        let frame = complete_rotation(normal)?;
        let side = h + 1;
        let nv = side.pow(n as u32);
        let hf = h as f64;

        let mut grid = Vec::with_capacity(nv);
        let mut coords = Vec::with_capacity(nv);
        let mut on_boundary = Vec::with_capacity(nv);
        let mut on_gamma = Vec::with_capacity(nv);
        for id in 0..nv {
            let idx: Vec<usize> = (0..n).map(|k| (id / side.pow(k as u32)) % side).collect();
            let mut y: Vec<f64> = idx.iter().map(|&i| i as f64 / hf).collect();
            y[n - 1] -= 1.0;
            let x = frame.rotation.mul_vec(&y)?;
            let boundary = idx.iter().any(|&i| i == 0 || i == h);
            let gamma = idx[n - 1] == h && idx[..n - 1].iter().all(|&i| i > 0 && i < h);
            grid.push(idx);
            coords.push(x);
            on_boundary.push(boundary);
            on_gamma.push(gamma);
        }

        let perms = permutations(n);
        let mut shape_grads = Vec::with_capacity(perms.len());
        for p in &perms {
            // column k is x_{k+1} - x_0 = h^{-1} R (e_{p[0]} + ... + e_{p[k]})
            let d = Matrix::from_vec(
                n,
                n,
                (0..n * n)
                    .map(|t| (0..=t % n).map(|l| frame.rotation.get(t / n, p[l])).sum::<f64>() / hf)
                    .collect(),
            )?;
            let inv = crate::minors::inverse(&d)?
                .ok_or_else(|| Error::invalid("degenerate Kuhn simplex"))?;
            let mut grads = vec![vec![0.0; n]; n + 1];
            for k in 1..=n {
                grads[k] = inv.row(k - 1);
            }
            grads[0] = (0..n).map(|j| -(1..=n).map(|k| grads[k][j]).sum::<f64>()).collect();
            shape_grads.push(grads);
        }

        let id_of = |idx: &[usize]| -> usize { idx.iter().enumerate().map(|(k, &i)| i * side.pow(k as u32)).sum() };
        let ncubes = h.pow(n as u32);
        let mut simplices = Vec::with_capacity(ncubes * perms.len());
        let mut simplex_shape = Vec::with_capacity(ncubes * perms.len());
        let mut gamma_faces = Vec::new();
        for c in 0..ncubes {
            let base: Vec<usize> = (0..n).map(|k| (c / h.pow(k as u32)) % h).collect();
            for (s, p) in perms.iter().enumerate() {
                let mut v = base.clone();
                let mut verts = vec![id_of(&v)];
                for &axis in p {
                    v[axis] += 1;
                    verts.push(id_of(&v));
                }
                let top: Vec<usize> = verts.iter().copied().filter(|&u| grid[u][n - 1] == h).collect();
                if top.len() == n {
                    gamma_faces.push(top);
                }
                simplices.push(verts);
                simplex_shape.push(s);
            }
        }

        Ok(StandardDomainMesh {
            n,
            h,
            frame,
            grid,
            coords,
            simplices,
            simplex_shape,
            shape_grads,
            simplex_volume: 1.0 / (hf.powi(n as i32) * factorial(n) as f64),
            gamma_faces,
            gamma_area: 1.0 / (hf.powi(n as i32 - 1) * factorial(n - 1) as f64),
            on_boundary,
            on_gamma,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.h
    }

    pub fn frame(&self) -> &BoundaryFrame {
        &self.frame
    }

    pub fn normal(&self) -> &[f64] {
        &self.frame.normal
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.len()
    }

    pub fn num_gamma_faces(&self) -> usize {
        self.gamma_faces.len()
    }

    pub fn vertex(&self, v: usize) -> &[f64] {
        &self.coords[v]
    }

    /// Reference coordinates in `(0,1)^{n-1} × (-1,0)`.
    pub fn reference_vertex(&self, v: usize) -> Vec<f64> {
        let hf = self.h as f64;
        let mut y: Vec<f64> = self.grid[v].iter().map(|&i| i as f64 / hf).collect();
        y[self.n - 1] -= 1.0;
        y
    }

    pub fn grid_index(&self, v: usize) -> &[usize] {
        &self.grid[v]
    }

    pub fn vertex_id(&self, idx: &[usize]) -> usize {
        let side = self.h + 1;
        idx.iter().enumerate().map(|(k, &i)| i * side.pow(k as u32)).sum()
    }

    pub fn simplex(&self, t: usize) -> &[usize] {
        &self.simplices[t]
    }

    /// Gradients of the barycentric coordinates of simplex `t`, one per vertex.
    pub fn barycentric_gradients(&self, t: usize) -> &[Vec<f64>] {
        &self.shape_grads[self.simplex_shape[t]]
    }

    pub fn simplex_volume(&self) -> f64 {
        self.simplex_volume
    }

    pub fn volume(&self) -> f64 {
        self.simplex_volume * self.simplices.len() as f64
    }

    pub fn gamma_face(&self, f: usize) -> &[usize] {
        &self.gamma_faces[f]
    }

    pub fn gamma_face_area(&self) -> f64 {
        self.gamma_area
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    /// Vertex in the open face Γ.
    pub fn is_gamma(&self, v: usize) -> bool {
        self.on_gamma[v]
    }

    pub fn is_dirichlet(&self, v: usize, bc: BoundaryCondition) -> bool {
        match bc {
            BoundaryCondition::FreeOnGamma => self.on_boundary[v] && !self.on_gamma[v],
            BoundaryCondition::Clamped => self.on_boundary[v],
        }
    }

    pub fn dirichlet_vertices(&self, bc: BoundaryCondition) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&v| self.is_dirichlet(v, bc)).collect()
    }

    pub fn dofs(&self, bc: BoundaryCondition) -> Dofs {
        let mut slot = vec![None; self.num_vertices()];
        let mut free_vertices = Vec::new();
        for v in 0..self.num_vertices() {
            if !self.is_dirichlet(v, bc) {
                slot[v] = Some(free_vertices.len());
                free_vertices.push(v);
            }
        }
        Dofs { bc, free_vertices, slot }
    }

    /// Verifies the mesh invariants from vertex coordinates; returns the
    /// largest deviation found.
    pub fn check_invariants(&self) -> Result<f64> {
        let n = self.n;
        let mut worst: f64 = 0.0;
        let mut total = 0.0;
        for t in 0..self.num_simplices() {
            let verts = self.simplex(t);
            let x0 = self.vertex(verts[0]);
            let d = Matrix::from_vec(
                n,
                n,
                (0..n * n)
                    .map(|k| self.vertex(verts[k % n + 1])[k / n] - x0[k / n])
                    .collect(),
            )?;
            let vol = d.det()?.abs() / factorial(n) as f64;
            if vol <= 0.0 {
                return Err(Error::invalid(format!("simplex {t} is degenerate")));
            }
            worst = worst.max((vol - self.simplex_volume).abs());
            total += vol;
        }
        worst = worst.max((total - 1.0).abs());
        let rho = self.normal();
        let mut area = 0.0;
        for f in 0..self.num_gamma_faces() {
            let face = self.gamma_face(f);
            let x0 = self.vertex(face[0]);
            for &v in &face[1..] {
                let e: f64 = self.vertex(v).iter().zip(x0).zip(rho).map(|((a, b), r)| (a - b) * r).sum();
                worst = worst.max(e.abs());
            }
            // the plane of Γ passes through the origin and the body lies below it
            let offset: f64 = x0.iter().zip(rho).map(|(a, r)| a * r).sum();
            worst = worst.max(offset.abs());
            area += self.gamma_area;
        }
        worst = worst.max((area - 1.0).abs());
        let below = (0..self.num_vertices())
            .map(|v| self.vertex(v).iter().zip(rho).map(|(a, r)| a * r).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(below.max(0.0));
        for v in 0..self.num_vertices() {
            if self.on_boundary[v] && !(self.on_gamma[v] || self.is_dirichlet(v, BoundaryCondition::FreeOnGamma)) {
                return Err(Error::invalid(format!("boundary vertex {v} is neither on Γ nor Dirichlet")));
            }
        }
        Ok(worst)
    }
}
