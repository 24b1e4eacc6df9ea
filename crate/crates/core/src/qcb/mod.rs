//! Numerical quasiconvexity tests on standard boundary domains.
//!
//! Test fields are continuous piecewise affine, so `∇u` is constant on each
//! simplex and polynomial energies are integrated exactly. The reference
//! domain has unit volume.

mod mesh;
mod optim;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::minors::Matrix;
use crate::poly::{CompiledPoly, PolyMatrixFn};

pub use mesh::{BoundaryCondition, Dofs, StandardDomainMesh, SUPPORTED_DIMS};
pub use optim::{minimize, OptimOptions, OptimOutcome};

/// Nodal values of an `R^m`-valued P1 field, `m` per vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct P1Field {
    pub m: usize,
    pub values: Vec<f64>,
}

impl P1Field {
    pub fn zero(mesh: &StandardDomainMesh, m: usize) -> Self {
        P1Field {
            m,
            values: vec![0.0; mesh.num_vertices() * m],
        }
    }

    /// Interpolates `w(y)` given in reference coordinates, zeroing Dirichlet vertices.
    pub fn interpolate(
        mesh: &StandardDomainMesh,
        bc: BoundaryCondition,
        m: usize,
        w: impl Fn(&[f64]) -> Vec<f64>,
    ) -> Self {
        let mut field = Self::zero(mesh, m);
        for v in 0..mesh.num_vertices() {
            if mesh.is_dirichlet(v, bc) {
                continue;
            }
            let val = w(&mesh.reference_vertex(v));
            field.values[v * m..(v + 1) * m].copy_from_slice(&val[..m]);
        }
        field
    }

    /// Builds the field from reduced unknowns.
    pub fn from_unknowns(mesh: &StandardDomainMesh, dofs: &Dofs, m: usize, x: &[f64]) -> Self {
        let mut field = Self::zero(mesh, m);
        for (k, &v) in dofs.free_vertices.iter().enumerate() {
            field.values[v * m..(v + 1) * m].copy_from_slice(&x[k * m..(k + 1) * m]);
        }
        field
    }

    pub fn to_unknowns(&self, dofs: &Dofs) -> Vec<f64> {
        let m = self.m;
        dofs.free_vertices
            .iter()
            .flat_map(|&v| self.values[v * m..(v + 1) * m].iter().copied())
            .collect()
    }

    pub fn scale(&self, t: f64) -> Self {
        P1Field {
            m: self.m,
            values: self.values.iter().map(|x| x * t).collect(),
        }
    }

    pub fn vertex_value(&self, v: usize) -> &[f64] {
        &self.values[v * self.m..(v + 1) * self.m]
    }

    /// Largest magnitude at vertices where the condition demands zero.
    pub fn boundary_violation(&self, mesh: &StandardDomainMesh, bc: BoundaryCondition) -> f64 {
        mesh.dirichlet_vertices(bc)
            .iter()
            .flat_map(|&v| self.vertex_value(v).iter())
            .fold(0.0, |a, b| a.max(b.abs()))
    }

    /// Exact transfer to a nested refinement (fine resolution a multiple of the coarse one).
    pub fn prolong(&self, coarse: &StandardDomainMesh, fine: &StandardDomainMesh) -> Result<Self> {
        let (hc, hf) = (coarse.resolution(), fine.resolution());
        if coarse.dim() != fine.dim() || hf % hc != 0 || coarse.normal() != fine.normal() {
            return Err(Error::invalid("meshes are not nested refinements of each other"));
        }
        let r = hf / hc;
        let n = coarse.dim();
        let m = self.m;
        let mut out = Self::zero(fine, m);
        for v in 0..fine.num_vertices() {
            let idx = fine.grid_index(v);
            let base: Vec<usize> = idx.iter().map(|&i| (i / r).min(hc - 1)).collect();
            let t: Vec<f64> = idx.iter().zip(&base).map(|(&i, &c)| (i - r * c) as f64 / r as f64).collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| t[b].total_cmp(&t[a]).then(a.cmp(&b)));
            let mut corner = base.clone();
            let mut acc = vec![0.0; m];
            let mut add = |corner: &[usize], w: f64| {
                if w != 0.0 {
                    let cv = coarse.vertex_id(corner);
                    for (a, x) in acc.iter_mut().zip(self.vertex_value(cv)) {
                        *a += w * x;
                    }
                }
            };
            add(&corner, 1.0 - t[order[0]]);
            for k in 0..n {
                corner[order[k]] += 1;
                let next = if k + 1 < n { t[order[k + 1]] } else { 0.0 };
                add(&corner, t[order[k]] - next);
            }
            out.values[v * m..(v + 1) * m].copy_from_slice(&acc);
        }
        Ok(out)
    }
}

fn check_shape(mesh: &StandardDomainMesh, v: &PolyMatrixFn, f: &Matrix<f64>, field: &P1Field) -> Result<()> {
    let (m, n) = v.shape();
    if n != mesh.dim() || f.shape() != (m, n) || field.m != m || field.values.len() != mesh.num_vertices() * m {
        return Err(Error::invalid(format!(
            "inconsistent shapes: polynomial {m}x{n}, F {}x{}, mesh dimension {}, field components {}",
            f.rows(),
            f.cols(),
            mesh.dim(),
            field.m
        )));
    }
    Ok(())
}

/// `∇u` on simplex `t`, row-major `m×n`, added to `base`.
fn simplex_gradient(mesh: &StandardDomainMesh, field: &[f64], m: usize, t: usize, base: &[f64], out: &mut [f64]) {
    let n = mesh.dim();
    out.copy_from_slice(base);
    for (&v, g) in mesh.simplex(t).iter().zip(mesh.barycentric_gradients(t)) {
        let u = &field[v * m..(v + 1) * m];
        for i in 0..m {
            if u[i] != 0.0 {
                for j in 0..n {
                    out[i * n + j] += u[i] * g[j];
                }
            }
        }
    }
}

/// `Σ_T |T| v(F + ∇u|_T)`.
pub fn energy(mesh: &StandardDomainMesh, v: &PolyMatrixFn, f: &Matrix<f64>, field: &P1Field) -> Result<f64> {
    check_shape(mesh, v, f, field)?;
    let compiled = v.compile();
    Ok(energy_compiled(mesh, &compiled, f.as_slice(), field))
}

fn energy_compiled(mesh: &StandardDomainMesh, v: &CompiledPoly, f: &[f64], field: &P1Field) -> f64 {
    let mut grad = vec![0.0; f.len()];
    let mut acc = 0.0;
    for t in 0..mesh.num_simplices() {
        simplex_gradient(mesh, &field.values, field.m, t, f, &mut grad);
        acc += v.value(&grad);
    }
    acc * mesh.simplex_volume()
}

/// `∫_Γ q·u dS`, exact for the affine trace.
pub fn gamma_term(mesh: &StandardDomainMesh, q: &[f64], field: &P1Field) -> Result<f64> {
    if q.len() != field.m {
        return Err(Error::invalid("q and the field have different numbers of components"));
    }
    let n = mesh.dim() as f64;
    let mut acc = 0.0;
    for face in 0..mesh.num_gamma_faces() {
        for &v in mesh.gamma_face(face) {
            acc += q.iter().zip(field.vertex_value(v)).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    Ok(acc * mesh.gamma_face_area() / n)
}

/// `∫ v(F + ∇u) − v(F)|Ω|`; vanishes for every admissible field exactly when
/// `v` is a null Lagrangian at the boundary (up to rounding).
pub fn null_identity_defect(mesh: &StandardDomainMesh, v: &PolyMatrixFn, f: &Matrix<f64>, field: &P1Field) -> Result<f64> {
    Ok(energy(mesh, v, f, field)? - v.evaluate(f)? * mesh.volume())
}

/// Which functional a run minimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `∫v(F+∇u) − ∫_Γ q·u − v(F)|Ω|` with `q = ∇v(F)ρ`.
    BoundaryDeficit,
    /// `(1/|Ω|)∫v(∇u)`, reported as `min(0, ·)`.
    Envelope0,
    /// `∫v(F+∇φ) − v(F)|Ω|` with `φ = 0` on all of `∂Ω`.
    InteriorDeficit,
}

/// Reduced objective over free unknowns.
pub struct Objective<'a> {
    mesh: &'a StandardDomainMesh,
    dofs: Dofs,
    m: usize,
    v: CompiledPoly,
    f: Vec<f64>,
    q: Vec<f64>,
    offset: f64,
    weight: f64,
}

impl<'a> Objective<'a> {
    pub fn new(mesh: &'a StandardDomainMesh, v: &PolyMatrixFn, f: &Matrix<f64>, kind: Functional) -> Result<Self> {
        let (m, n) = v.shape();
        check_shape(mesh, v, f, &P1Field::zero(mesh, m))?;
        let (bc, q, offset, weight) = match kind {
            Functional::BoundaryDeficit => {
                let q = v.gradient_at(f)?.mul_vec(mesh.normal())?;
                (BoundaryCondition::FreeOnGamma, q, v.evaluate(f)? * mesh.volume(), 1.0)
            }
            Functional::Envelope0 => (BoundaryCondition::FreeOnGamma, vec![0.0; m], 0.0, 1.0 / mesh.volume()),
            Functional::InteriorDeficit => (BoundaryCondition::Clamped, vec![0.0; m], v.evaluate(f)? * mesh.volume(), 1.0),
        };
        debug_assert_eq!(n, mesh.dim());
        Ok(Objective {
            mesh,
            dofs: mesh.dofs(bc),
            m,
            v: v.compile(),
            f: f.as_slice().to_vec(),
            q,
            offset,
            weight,
        })
    }

    pub fn dofs(&self) -> &Dofs {
        &self.dofs
    }

    pub fn num_unknowns(&self) -> usize {
        self.dofs.len() * self.m
    }

    /// Value on a full field.
    pub fn value(&self, field: &P1Field) -> f64 {
        let e = energy_compiled(self.mesh, &self.v, &self.f, field);
        let g = gamma_term(self.mesh, &self.q, field).expect("component count checked");
        self.weight * (e - g - self.offset)
    }

    /// Value and gradient with respect to the reduced unknowns.
    pub fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let mesh = self.mesh;
        let (m, n) = (self.m, mesh.dim());
        let field = P1Field::from_unknowns(mesh, &self.dofs, m, x);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut local = vec![0.0; m * n];
        let mut dv = vec![0.0; m * n];
        let vol = mesh.simplex_volume();
        let mut e = 0.0;
        for t in 0..mesh.num_simplices() {
            simplex_gradient(mesh, &field.values, m, t, &self.f, &mut local);
            e += self.v.value_and_gradient(&local, &mut dv);
            for (&vtx, lg) in mesh.simplex(t).iter().zip(mesh.barycentric_gradients(t)) {
                if let Some(k) = self.dofs.slot[vtx] {
                    for i in 0..m {
                        let s: f64 = (0..n).map(|j| dv[i * n + j] * lg[j]).sum();
                        grad[k * m + i] += vol * s;
                    }
                }
            }
        }
        e *= vol;
        let mut gsum = 0.0;
        if self.q.iter().any(|&x| x != 0.0) {
            let w = mesh.gamma_face_area() / n as f64;
            for face in 0..mesh.num_gamma_faces() {
                for &vtx in mesh.gamma_face(face) {
                    gsum += self.q.iter().zip(field.vertex_value(vtx)).map(|(a, b)| a * b).sum::<f64>();
                    if let Some(k) = self.dofs.slot[vtx] {
                        for i in 0..m {
                            grad[k * m + i] -= w * self.q[i];
                        }
                    }
                }
            }
            gsum *= w;
        }
        if self.weight != 1.0 {
            grad.iter_mut().for_each(|g| *g *= self.weight);
        }
        self.weight * (e - gsum - self.offset)
    }
}

#[derive(Clone, Debug)]
pub struct QcbOptions {
    pub h: usize,
    pub trials: usize,
    pub seed: u64,
    pub optim: OptimOptions,
}

impl Default for QcbOptions {
    fn default() -> Self {
        QcbOptions {
            h: 8,
            trials: 8,
            seed: 0,
            optim: OptimOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QcbReport {
    pub functional: Functional,
    pub estimate: f64,
    /// Best value found before any sign clipping.
    pub best_value: f64,
    pub certificate: P1Field,
    pub trials: usize,
    pub converged_trials: usize,
    pub diverged_trials: usize,
    /// Trial index of the certificate; `trials` denotes the warm start.
    pub best_trial: Option<usize>,
    pub mesh_resolution: usize,
    pub n: usize,
    pub m: usize,
    pub box_bound: f64,
}

struct Trial {
    index: usize,
    outcome: OptimOutcome,
}

/// Multistart minimization on a given mesh; `warm` adds one extra trial
/// started from the given field.
pub fn minimize_functional(
    mesh: &StandardDomainMesh,
    v: &PolyMatrixFn,
    f: &Matrix<f64>,
    kind: Functional,
    opts: &QcbOptions,
    warm: Option<&P1Field>,
) -> Result<QcbReport> {
    if opts.trials == 0 && warm.is_none() {
        return Err(Error::invalid("at least one trial is required"));
    }
    let obj = Objective::new(mesh, v, f, kind)?;
    let len = obj.num_unknowns();
    let scale = 1.0 / mesh.resolution() as f64;
    let mut starts: Vec<(usize, Vec<f64>)> = (0..opts.trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(t as u64);
            (t, (0..len).map(|_| rng.gen_range(-1.0..=1.0) * scale).collect())
        })
        .collect();
    if let Some(w) = warm {
        starts.push((opts.trials, w.to_unknowns(obj.dofs())));
    }
    let results: Vec<Trial> = starts
        .into_par_iter()
        .map(|(index, x0)| Trial {
            index,
            outcome: minimize(|x, g| obj.value_and_gradient(x, g), &x0, &opts.optim),
        })
        .collect();
    let diverged = results.iter().filter(|t| t.outcome.diverged || !t.outcome.value.is_finite()).count();
    let converged = results.iter().filter(|t| t.outcome.converged).count();
    let best = results
        .iter()
        .filter(|t| !t.outcome.diverged && t.outcome.value.is_finite())
        .min_by(|a, b| a.outcome.value.total_cmp(&b.outcome.value).then(a.index.cmp(&b.index)))
        .ok_or_else(|| Error::OptimizationFailure(format!("all {} trials diverged", results.len())))?;
    let field = P1Field::from_unknowns(mesh, obj.dofs(), v.rows(), &best.outcome.x);
    // re-evaluate through the full-field path so the report is self-consistent
    let best_value = obj.value(&field);
    let (estimate, certificate) = match kind {
        Functional::Envelope0 if best_value >= 0.0 => (0.0, P1Field::zero(mesh, v.rows())),
        _ => (best_value, field),
    };
    Ok(QcbReport {
        functional: kind,
        estimate,
        best_value,
        certificate,
        trials: results.len(),
        converged_trials: converged,
        diverged_trials: diverged,
        best_trial: Some(best.index),
        mesh_resolution: mesh.resolution(),
        n: mesh.dim(),
        m: v.rows(),
        box_bound: opts.optim.bound,
    })
}

/// Estimates `inf_u ∫v(F+∇u) − ∫_Γ q·u − v(F)|Ω|`; negative means `v` is not
/// quasiconvex at the boundary at `(F, ρ)`.
pub fn qcb_deficit(v: &PolyMatrixFn, f: &Matrix<f64>, normal: &[f64], opts: &QcbOptions) -> Result<QcbReport> {
    let mesh = StandardDomainMesh::new(v.cols(), normal, opts.h)?;
    minimize_functional(&mesh, v, f, Functional::BoundaryDeficit, opts, None)
}

/// Sign certificate for the envelope at `0` of a positively homogeneous `v`:
/// `0` when no negative direction is found, negative (envelope `= −∞`) otherwise.
pub fn qcb_envelope0(v: &PolyMatrixFn, normal: &[f64], opts: &QcbOptions) -> Result<QcbReport> {
    match v.homogeneous_degree() {
        Some(p) if p >= 1 || v.is_zero() => {}
        _ => return Err(Error::invalid("envelope at 0 needs a positively homogeneous polynomial of degree >= 1")),
    }
    let mesh = StandardDomainMesh::new(v.cols(), normal, opts.h)?;
    let zero = Matrix::zeros(v.rows(), v.cols());
    minimize_functional(&mesh, v, &zero, Functional::Envelope0, opts, None)
}

/// Estimates `Qv(F) − v(F)` with fields vanishing on the whole boundary.
pub fn interior_qc_deficit(v: &PolyMatrixFn, f: &Matrix<f64>, opts: &QcbOptions) -> Result<QcbReport> {
    let n = v.cols();
    let mut e_n = vec![0.0; n];
    e_n[n - 1] = 1.0;
    let mesh = StandardDomainMesh::new(n, &e_n, opts.h)?;
    minimize_functional(&mesh, v, f, Functional::InteriorDeficit, opts, None)
}

/// Random admissible field with values uniform in `[-scale, scale]`.
pub fn random_field<R: Rng>(rng: &mut R, mesh: &StandardDomainMesh, bc: BoundaryCondition, m: usize, scale: f64) -> P1Field {
    let dofs = mesh.dofs(bc);
    let x: Vec<f64> = (0..dofs.len() * m).map(|_| rng.gen_range(-scale..=scale)).collect();
    P1Field::from_unknowns(mesh, &dofs, m, &x)
}

/// The trigonometric field on the reference half square,
/// `w = (sin(πx)(1+y), −sin(2πx)(1+y))`, with `∫det∇w = −4/3`.
pub fn det_certificate(y: &[f64]) -> Vec<f64> {
    use std::f64::consts::PI;
    let t = 1.0 + y[1];
    vec![(PI * y[0]).sin() * t, -(2.0 * PI * y[0]).sin() * t]
}
