//! Eigenform classes and their residuals.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::context::{MeshContext, Thresholds};
use crate::error::{Error, Result};
use crate::field::{Basis, FieldVector};
use crate::operator::MassSolver;
use crate::sparse::{dot, CsrMatrix};
use crate::spectral::SpectrumResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    Harmonic,
    Killing,
    ConformalKilling,
    ProjectiveKilling,
    Iht,
}

impl Tag {
    pub const ALL: [Tag; 5] = [
        Tag::Harmonic,
        Tag::Killing,
        Tag::ConformalKilling,
        Tag::ProjectiveKilling,
        Tag::Iht,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Harmonic => "harmonic",
            Tag::Killing => "killing",
            Tag::ConformalKilling => "conformal-killing",
            Tag::ProjectiveKilling => "projective-killing",
            Tag::Iht => "iht",
        }
    }
}

impl std::fmt::Display for Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub lambda: f64,
    pub tags: BTreeSet<Tag>,
    /// relative `M`-norm residual per class
    pub residuals: BTreeMap<Tag, f64>,
    /// `‖δω‖ / ‖ω‖`
    pub divergence: f64,
    pub thresholds: Thresholds,
}

impl Classification {
    /// Tags follow from the stored residuals alone.
    pub fn from_residuals(lambda: f64, residuals: BTreeMap<Tag, f64>, divergence: f64, thresholds: Thresholds) -> Self {
        let tags = residuals
            .iter()
            .filter(|(_, &r)| r <= thresholds.class)
            .map(|(&t, _)| t)
            .collect();
        Self {
            lambda,
            tags,
            residuals,
            divergence,
            thresholds,
        }
    }

    pub fn has(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }
}

/// A Δ_sym eigenpair in the classification basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedPair {
    /// Rayleigh quotient in the rotated basis
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub class: Classification,
}

/// `sqrt(rᵀ M⁻¹ r)`
fn dual_norm(mass: &MassSolver, r: &[f64]) -> f64 {
    dot(r, &mass.solve(r)).max(0.0).sqrt()
}

fn combo(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// Residuals of `ω` (vertex-tangent, `‖ω‖_M = 1`) for every class.
pub fn classify(omega: &FieldVector, lambda: f64, ctx: &MeshContext) -> Result<Classification> {
    classify_with(omega, lambda, ctx, ctx.thresholds()?)
}

pub fn classify_with(omega: &FieldVector, lambda: f64, ctx: &MeshContext, thresholds: Thresholds) -> Result<Classification> {
    if omega.basis() != Basis::VertexTangent || omega.len() != ctx.asm.yano.dim() {
        return Err(Error::Basis(format!("classify expects a vertex-tangent field, got {:?}", omega.basis())));
    }
    let x = omega.coeffs();
    let asm = &ctx.asm;
    let norm = asm.yano.mass.bilinear(x, x).sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(norm));
    }
    let n = 2.0;
    let mass = ctx.mass_solver();
    let ky = asm.yano.stiffness.mul_vec(x);
    let wx = ctx.weak_dstar_delta().mul_vec(x);
    let div = div_norm(&asm.sym_grad.codiff, &asm.sym_grad.scalar_mass, x);
    let iht = dual_norm(mass, &ky);
    let mut residuals = BTreeMap::new();
    residuals.insert(Tag::Harmonic, dual_norm(mass, &asm.hodge_vec.stiffness.mul_vec(x)));
    residuals.insert(Tag::Iht, iht);
    residuals.insert(Tag::Killing, iht.max(div));
    residuals.insert(Tag::ConformalKilling, dual_norm(mass, &combo(&ky, 1.0 - 2.0 / n, &wx)));
    residuals.insert(Tag::ProjectiveKilling, dual_norm(mass, &combo(&ky, -2.0 / (n + 1.0), &wx)));
    Ok(Classification::from_residuals(lambda, residuals, div, thresholds))
}

fn div_norm(codiff: &CsrMatrix, area: &[f64], x: &[f64]) -> f64 {
    codiff
        .mul_vec(x)
        .iter()
        .zip(area)
        .map(|(d, a)| a * d * d)
        .sum::<f64>()
        .sqrt()
}

/// Groups of pair indices that may be rotated into each other: the kernel
/// band as one group, then the remaining clusters.
pub fn degenerate_groups(spec: &SpectrumResult, kernel: f64) -> Vec<Vec<usize>> {
    let kernel_group: Vec<usize> = (0..spec.len()).filter(|&i| spec.pairs[i].lambda.abs() <= kernel).collect();
    let mut groups = Vec::new();
    if !kernel_group.is_empty() {
        groups.push(kernel_group.clone());
    }
    for c in &spec.clusters {
        let rest: Vec<usize> = c.iter().copied().filter(|i| !kernel_group.contains(i)).collect();
        if !rest.is_empty() {
            groups.push(rest);
        }
    }
    groups.sort_by_key(|g| g[0]);
    groups
}

/// Rotates each degenerate group to diagonalize `⟨δω, δω⟩`, then classifies.
pub fn classify_spectrum(ctx: &MeshContext, spec: &SpectrumResult, thresholds: Thresholds) -> Result<Vec<ClassifiedPair>> {
    let w = ctx.weak_dstar_delta();
    let yano = &ctx.asm.yano;
    let shape = crate::field::MeshShape::of(&ctx.asm.mesh);
    let mut out = Vec::with_capacity(spec.len());
    for group in degenerate_groups(spec, thresholds.kernel) {
        let k = group.len();
        let vecs: Vec<&[f64]> = group.iter().map(|&i| spec.pairs[i].vector.as_slice()).collect();
        let wv: Vec<Vec<f64>> = vecs.iter().map(|v| w.mul_vec(v)).collect();
        let g = DMatrix::from_fn(k, k, |i, j| 0.5 * (dot(vecs[i], &wv[j]) + dot(vecs[j], &wv[i])));
        let eig = g.symmetric_eigen();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        for c in order {
            let mut v = vec![0.0; vecs[0].len()];
            for (j, src) in vecs.iter().enumerate() {
                crate::sparse::axpy(eig.eigenvectors[(j, c)], src, &mut v);
            }
            let nrm = yano.mass.bilinear(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= nrm);
            normalize_sign(&mut v);
            let lambda = yano.rayleigh(&v);
            let field = FieldVector::new(Basis::VertexTangent, shape, v)?;
            let class = classify_with(&field, lambda, ctx, thresholds)?;
            out.push(ClassifiedPair {
                lambda,
                vector: field.into_coeffs(),
                class,
            });
        }
    }
    Ok(out)
}

/// Makes the largest-magnitude entry positive.
fn normalize_sign(v: &mut [f64]) {
    let big = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if big < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// `k1`: kernel eigenforms whose codifferential is below the class threshold.
pub fn killing_number(ctx: &MeshContext) -> Result<usize> {
    let th = ctx.thresholds()?;
    Ok(ctx
        .classified()?
        .iter()
        .filter(|p| p.lambda.abs() <= th.kernel && p.class.divergence <= th.class)
        .count())
}
