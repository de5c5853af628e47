//! Conversion between Whitney edge 1-forms and vertex-tangent fields.
//!
//! Vertex to edge integrates the tangential component along each edge with
//! the trapezoid rule, which is exact for the linear interpolant. Edge to
//! vertex is the `M1`-weighted least-squares inverse of that map.
//!
//! The integration map can have a kernel: on even torus grids an alternating
//! mode integrates to zero along every edge. The normal equations are
//! therefore factored with a small multiple of the Bochner form added and
//! the unshifted system solved by conjugate gradients preconditioned with it; the result is the
//! least-squares solution of least Bochner energy.

use super::connection::ConnectionData;
use crate::operator::OperatorPair;
use crate::error::{Error, Result};
use crate::field::{Basis, FieldVector, MeshShape};
use crate::ldlt::Ldlt;
use crate::mesh::IntrinsicMesh;
use crate::sparse::{axpy, dot, CsrMatrix, TripletBuilder};

/// size of the Bochner shift relative to the normal matrix
const REGULARIZATION: f64 = 1e-6;
const MAX_REFINE: usize = 40;

#[derive(Debug, Clone)]
pub struct Resampler {
    /// `E × 2V` edge-integration map
    pub integrate: CsrMatrix,
    m1: CsrMatrix,
    normal: CsrMatrix,
    factor: Ldlt,
    shape: MeshShape,
}

impl Resampler {
    /// `bochner` selects the solution when the integration map has a kernel.
    pub fn new(mesh: &IntrinsicMesh, conn: &ConnectionData, m1: &CsrMatrix, bochner: &OperatorPair) -> Result<Self> {
        let ne = mesh.n_edges();
        let mut b = TripletBuilder::with_capacity(ne, 2 * mesh.n_vertices(), 4 * ne);
        for (e, (&[lo, hi], &[at_lo, at_hi])) in mesh.edges().iter().zip(&conn.edge_frame_angles).enumerate() {
            let half = 0.5 * mesh.lengths()[e];
            // direction lo -> hi is at_lo at lo and at_hi + π at hi
            b.push(e, 2 * lo, half * at_lo.cos());
            b.push(e, 2 * lo + 1, half * at_lo.sin());
            b.push(e, 2 * hi, -half * at_hi.cos());
            b.push(e, 2 * hi + 1, -half * at_hi.sin());
        }
        let integrate = b.build();
        let normal = integrate.transpose().matmul(&m1.matmul(&integrate)?)?.symmetrized();
        // B + M/h² has the same scaling as the normal matrix up to a constant
        let h2 = mesh.lengths().iter().map(|l| l * l).sum::<f64>() / mesh.n_edges() as f64;
        let reg = bochner.stiffness.add_scaled(&bochner.mass, 1.0 / h2)?;
        let trace = |m: &CsrMatrix| m.diag().iter().sum::<f64>();
        let scale = REGULARIZATION * trace(&normal) / trace(&reg);
        let shifted = normal.add_scaled(&reg, scale)?;
        let factor = Ldlt::factor(&shifted)
            .map_err(|e| Error::Assembly(format!("edge-to-vertex normal equations: {e}")))?;
        Ok(Self {
            integrate,
            m1: m1.clone(),
            normal,
            factor,
            shape: MeshShape::of(mesh),
        })
    }

    pub fn to_edge(&self, xi: &FieldVector) -> Result<FieldVector> {
        if xi.basis() != Basis::VertexTangent || xi.shape() != self.shape {
            return Err(Error::Basis(format!("expected vertex-tangent field, got {:?}", xi.basis())));
        }
        FieldVector::new(Basis::WhitneyEdge, self.shape, self.integrate.mul_vec(xi.coeffs()))
    }

    pub fn to_vertex(&self, omega: &FieldVector) -> Result<FieldVector> {
        if omega.basis() != Basis::WhitneyEdge || omega.shape() != self.shape {
            return Err(Error::Basis(format!("expected Whitney edge field, got {:?}", omega.basis())));
        }
        let rhs = self.integrate.transpose().mul_vec(&self.m1.mul_vec(omega.coeffs()));
        FieldVector::new(Basis::VertexTangent, self.shape, self.solve_normal(&rhs))
    }

    /// Conjugate gradients on the unshifted normal equations, preconditioned
    /// by the shifted factorization.
    fn solve_normal(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = self.factor.solve(rhs);
        let mut r = rhs.to_vec();
        axpy(-1.0, &self.normal.mul_vec(&x), &mut r);
        let mut z = self.factor.solve(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let stop = 1e-28 * dot(rhs, &self.factor.solve(rhs));
        for _ in 0..MAX_REFINE {
            if rz <= stop {
                break;
            }
            let np = self.normal.mul_vec(&p);
            let pnp = dot(&p, &np);
            if pnp <= 0.0 {
                break;
            }
            let alpha = rz / pnp;
            axpy(alpha, &p, &mut x);
            axpy(-alpha, &np, &mut r);
            z = self.factor.solve(&r);
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for (pi, zi) in p.iter_mut().zip(&z) {
                *pi = zi + beta * *pi;
            }
        }
        x
    }

    /// Converts `field` into `to`; a no-op when it is already there.
    pub fn resample(&self, field: &FieldVector, to: Basis) -> Result<FieldVector> {
        match (field.basis(), to) {
            (a, b) if a == b => Ok(field.clone()),
            (Basis::VertexTangent, Basis::WhitneyEdge) => self.to_edge(field),
            (Basis::WhitneyEdge, Basis::VertexTangent) => self.to_vertex(field),
            (a, b) => Err(Error::Basis(format!("cannot resample {a:?} into {b:?}"))),
        }
    }
}
