//! Hodge decomposition of Whitney 1-forms and the spectrum of the Hodge
//! Laplacian restricted to coclosed forms.

use std::collections::VecDeque;

use super::eigen::{eig_with, Constraint, SolverOptions, SpectrumResult};
use crate::discretization::dec::DecComplex;
use crate::error::{Error, Result};
use crate::field::{Basis, FieldVector, MeshShape};
use crate::ldlt::Ldlt;
use crate::mesh::IntrinsicMesh;
use crate::sparse::{axpy, dot};

/// Solves `L0 α = b` for the cotangent Laplacian with vertex 0 pinned.
#[derive(Debug, Clone)]
pub struct PinnedPoisson {
    factor: Ldlt,
    n: usize,
}

impl PinnedPoisson {
    pub fn new(dec: &DecComplex) -> Result<Self> {
        let l0 = &dec.laplace0.stiffness;
        let n = l0.nrows();
        let keep: Vec<usize> = (1..n).collect();
        let factor = Ldlt::factor(&l0.principal_submatrix(&keep))
            .map_err(|e| Error::Factorization(format!("vertex Poisson system: {e}")))?;
        Ok(Self { factor, n })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let reduced = self.factor.solve(&b[1..]);
        let mut out = Vec::with_capacity(self.n);
        out.push(0.0);
        out.extend(reduced);
        out
    }
}

/// `M1`-orthogonal projector onto coclosed 1-forms: `x − d0 L0⁻¹ d0ᵀ M1 x`.
#[derive(Debug, Clone)]
pub struct CoclosedProjector<'a> {
    dec: &'a DecComplex,
    poisson: PinnedPoisson,
}

impl<'a> CoclosedProjector<'a> {
    pub fn new(dec: &'a DecComplex) -> Result<Self> {
        Ok(Self {
            dec,
            poisson: PinnedPoisson::new(dec)?,
        })
    }

    /// Potential `α` of the exact part of `x`.
    pub fn potential(&self, x: &[f64]) -> Vec<f64> {
        let rhs = self.dec.d0.transpose().mul_vec(&self.dec.m1.mul_vec(x));
        self.poisson.solve(&rhs)
    }
}

impl Constraint for CoclosedProjector<'_> {
    fn project(&self, x: &mut [f64]) {
        let alpha = self.potential(x);
        let exact = self.dec.d0.mul_vec(&alpha);
        axpy(-1.0, &exact, x);
    }
}

/// Closed 1-cochains whose classes span `H¹`, built from a tree–cotree
/// decomposition: one per edge outside both the primal spanning tree and the
/// dual spanning cotree.
pub fn cohomology_generators(mesh: &IntrinsicMesh) -> Vec<Vec<f64>> {
    let ne = mesh.n_edges();
    let nv = mesh.n_vertices();
    let nf = mesh.n_faces();

    // primal BFS tree
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (e, &[lo, hi]) in mesh.edges().iter().enumerate() {
        adj[lo].push((hi, e));
        adj[hi].push((lo, e));
    }
    let mut in_tree = vec![false; ne];
    let mut seen = vec![false; nv];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, e) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                in_tree[e] = true;
                queue.push_back(w);
            }
        }
    }

    // dual BFS cotree avoiding tree edges; parent edge recorded per face
    let mut parent_edge = vec![usize::MAX; nf];
    let mut order = Vec::with_capacity(nf);
    let mut in_cotree = vec![false; ne];
    let mut fseen = vec![false; nf];
    let mut queue = VecDeque::from([0usize]);
    fseen[0] = true;
    while let Some(f) = queue.pop_front() {
        order.push(f);
        for &e in &mesh.face_edges()[f] {
            if in_tree[e] {
                continue;
            }
            for &g in mesh.edge_faces(e) {
                if !fseen[g] {
                    fseen[g] = true;
                    in_cotree[e] = true;
                    parent_edge[g] = e;
                    queue.push_back(g);
                }
            }
        }
    }

    let generators: Vec<usize> = (0..ne).filter(|&e| !in_tree[e] && !in_cotree[e]).collect();
    generators
        .iter()
        .map(|&gen| {
            let mut z = vec![0.0; ne];
            z[gen] = 1.0;
            // leaves first: each face fixes its parent cotree edge so that
            // the face sum vanishes; the root face closes automatically
            for &f in order.iter().rev() {
                let pe = parent_edge[f];
                if pe == usize::MAX {
                    continue;
                }
                let fe = mesh.face_edges()[f];
                let fs = mesh.face_edge_signs()[f];
                let mut sum = 0.0;
                let mut sign_pe = 0.0;
                for c in 0..3 {
                    if fe[c] == pe {
                        sign_pe = fs[c] as f64;
                    } else {
                        sum += fs[c] as f64 * z[fe[c]];
                    }
                }
                z[pe] = -sum / sign_pe;
            }
            z
        })
        .collect()
}

/// `M1`-orthonormal basis of the discrete harmonic 1-forms.
pub fn harmonic_basis(mesh: &IntrinsicMesh, dec: &DecComplex) -> Result<Vec<Vec<f64>>> {
    let proj = CoclosedProjector::new(dec)?;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut mbasis: Vec<Vec<f64>> = Vec::new();
    for mut z in cohomology_generators(mesh) {
        proj.project(&mut z);
        for _ in 0..2 {
            for (h, mh) in basis.iter().zip(&mbasis) {
                let c = dot(&z, mh);
                axpy(-c, h, &mut z);
            }
        }
        let mz = dec.m1.mul_vec(&z);
        let nrm = dot(&z, &mz).sqrt();
        if !(nrm > 0.0) {
            return Err(Error::Assembly("dependent cohomology generator".into()));
        }
        basis.push(z.iter().map(|v| v / nrm).collect());
        mbasis.push(mz.iter().map(|v| v / nrm).collect());
    }
    Ok(basis)
}

#[derive(Debug, Clone)]
pub struct HodgeParts {
    pub exact: FieldVector,
    pub coexact: FieldVector,
    pub harmonic: FieldVector,
    /// vertex potential of the exact part
    pub potential: Vec<f64>,
}

/// Splits a Whitney 1-form into `d0 α`, a harmonic part and the coexact
/// remainder; the three are `M1`-orthogonal.
pub fn hodge_decompose(mesh: &IntrinsicMesh, dec: &DecComplex, omega: &FieldVector) -> Result<HodgeParts> {
    let shape = MeshShape::of(mesh);
    if omega.basis() != Basis::WhitneyEdge || omega.shape() != shape {
        return Err(Error::Basis(format!("hodge_decompose needs a Whitney edge field, got {:?}", omega.basis())));
    }
    let proj = CoclosedProjector::new(dec)?;
    let x = omega.coeffs();
    let potential = proj.potential(x);
    let exact = dec.d0.mul_vec(&potential);
    let mut rest: Vec<f64> = x.iter().zip(&exact).map(|(a, b)| a - b).collect();
    let mut harmonic = vec![0.0; x.len()];
    let mrest = dec.m1.mul_vec(&rest);
    for h in harmonic_basis(mesh, dec)? {
        let c = dot(&h, &mrest);
        axpy(c, &h, &mut harmonic);
    }
    axpy(-1.0, &harmonic, &mut rest);
    Ok(HodgeParts {
        exact: FieldVector::new(Basis::WhitneyEdge, shape, exact)?,
        coexact: FieldVector::new(Basis::WhitneyEdge, shape, rest)?,
        harmonic: FieldVector::new(Basis::WhitneyEdge, shape, harmonic)?,
        potential,
    })
}

/// Lowest eigenpairs of the Hodge Laplacian on coclosed 1-forms.
pub fn coclosed_spectrum(dec: &DecComplex, count: usize, opts: &SolverOptions) -> Result<SpectrumResult> {
    let proj = CoclosedProjector::new(dec)?;
    eig_with(&dec.hodge_l1, count, opts, Some(&proj))
}

/// `‖δω‖ / ‖ω‖` for a Whitney 1-form, with `δω = −M0⁻¹ d0ᵀ M1 ω`.
pub fn codifferential_ratio(dec: &DecComplex, x: &[f64]) -> f64 {
    let mx = dec.m1.mul_vec(x);
    let div = dec.d0.transpose().mul_vec(&mx);
    let num: f64 = div.iter().zip(&dec.m0).map(|(d, a)| d * d / a).sum();
    (num / dot(x, &mx)).sqrt()
}
