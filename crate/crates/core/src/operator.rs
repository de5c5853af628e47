//! Stiffness/mass pairs defining generalized eigenproblems `K x = λ M x`.

use crate::error::{Error, Result};
use crate::field::Basis;
use crate::ldlt::Ldlt;
use crate::sparse::{dot, CsrMatrix};

/// Symmetric tolerance for stored operators, relative to the largest entry.
pub const SYMMETRY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct OperatorPair {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub basis: Basis,
    pub label: String,
}

/// Applies `M⁻¹`, exploiting diagonal masses.
#[derive(Debug, Clone)]
pub enum MassSolver {
    Diagonal(Vec<f64>),
    Factored(Ldlt),
}

impl MassSolver {
    pub fn new(mass: &CsrMatrix) -> Result<Self> {
        let diagonal = (0..mass.nrows()).all(|r| mass.row(r).all(|(c, v)| c == r || v == 0.0));
        if diagonal {
            let d = mass.diag();
            if let Some(i) = d.iter().position(|&x| !(x > 0.0)) {
                return Err(Error::Factorization(format!("mass diagonal {i} is not positive")));
            }
            return Ok(MassSolver::Diagonal(d));
        }
        let f = Ldlt::factor(mass)?;
        if f.negative_pivots() > 0 {
            return Err(Error::Factorization(format!(
                "mass matrix has {} negative pivots",
                f.negative_pivots()
            )));
        }
        Ok(MassSolver::Factored(f))
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            MassSolver::Diagonal(d) => b.iter().zip(d).map(|(x, m)| x / m).collect(),
            MassSolver::Factored(f) => f.solve(b),
        }
    }
}

impl OperatorPair {
    pub fn new(stiffness: CsrMatrix, mass: CsrMatrix, basis: Basis, label: impl Into<String>) -> Result<Self> {
        let n = stiffness.nrows();
        if stiffness.ncols() != n || mass.nrows() != n || mass.ncols() != n {
            return Err(Error::Dimension(format!(
                "stiffness {}x{} vs mass {}x{}",
                stiffness.nrows(),
                stiffness.ncols(),
                mass.nrows(),
                mass.ncols()
            )));
        }
        for (name, m) in [("stiffness", &stiffness), ("mass", &mass)] {
            let a = m.asymmetry();
            if a > SYMMETRY_RTOL {
                return Err(Error::Assembly(format!("{name} asymmetric ({a:e})")));
            }
        }
        Ok(Self {
            stiffness,
            mass,
            basis,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.stiffness.nrows()
    }

    /// Verifies that the mass matrix is positive definite.
    pub fn check_mass(&self) -> Result<MassSolver> {
        MassSolver::new(&self.mass)
    }

    /// Same pair with a different stiffness (used for `K ± K'` combinations).
    pub fn with_stiffness(&self, stiffness: CsrMatrix, label: impl Into<String>) -> Result<Self> {
        Self::new(stiffness, self.mass.clone(), self.basis, label)
    }

    /// `xᵀ K x / xᵀ M x`
    pub fn rayleigh(&self, x: &[f64]) -> f64 {
        self.stiffness.bilinear(x, x) / self.mass.bilinear(x, x)
    }

    /// Pencil norm `max |λ|` estimated with 8 power iterations on `M⁻¹K`.
    pub fn norm_estimate(&self, mass: &MassSolver) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 0.0;
        }
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 13) as f64 / 13.0).collect();
        let mut est: f64 = 0.0;
        for _ in 0..8 {
            let mx = self.mass.mul_vec(&x);
            let xm = dot(&x, &mx).sqrt();
            if xm == 0.0 {
                break;
            }
            x.iter_mut().for_each(|v| *v /= xm);
            let kx = self.stiffness.mul_vec(&x);
            let y = mass.solve(&kx);
            let my = self.mass.mul_vec(&y);
            est = dot(&y, &my).sqrt();
            x = y;
        }
        est
    }
}
