//! Per-mesh state shared by the checks: the assembly plus lazily solved
//! spectra.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::classify::{classify_spectrum, ClassifiedPair};
use crate::discretization::{Assembly, Resampler};
use crate::error::{Error, Result};
use crate::mesh::IntrinsicMesh;
use crate::models::MeshRecipe;
use crate::operator::{MassSolver, OperatorPair};
use crate::sparse::CsrMatrix;
use crate::spectral::hodge::harmonic_basis;
use crate::spectral::{coclosed_spectrum, eig_with, Ordering, SolverOptions, SpectrumResult, DEFAULT_TOL};

/// Settings shared by every check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub tol: f64,
    /// eigenpairs per operator
    pub count: usize,
    /// smallest `|λ|` band treated as zero, before operator-norm scaling
    pub kernel_floor: f64,
    /// smallest class residual threshold (relative `M`-norm)
    pub class_floor: f64,
    /// relative tolerance for equality cases at default resolution
    pub equality: f64,
    /// the same, one refinement level coarser
    pub coarse_equality: f64,
    /// largest `|K_v − K̄|` for which a mesh counts as Einstein
    pub einstein_tol: f64,
    pub random_fields: usize,
    pub inequality_fields: usize,
    pub seed_label: String,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            count: 12,
            kernel_floor: 0.05,
            class_floor: 0.05,
            equality: 0.05,
            coarse_equality: 0.10,
            einstein_tol: 0.2,
            random_fields: 20,
            inequality_fields: 1000,
            seed_label: "symlap".into(),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tol", self.tol),
            ("kernel_floor", self.kernel_floor),
            ("class_floor", self.class_floor),
            ("equality", self.equality),
            ("coarse_equality", self.coarse_equality),
            ("einstein_tol", self.einstein_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::OutOfRange(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("kernel_floor", self.kernel_floor), ("class_floor", self.class_floor)] {
            if v < self.tol {
                return Err(Error::OutOfRange(format!("{name} {v} is below the solver tolerance")));
            }
        }
        if self.count == 0 {
            return Err(Error::OutOfRange("eigenpair count must be >= 1".into()));
        }
        Ok(())
    }
}

/// Thresholds in effect for one operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub kernel: f64,
    pub class: f64,
    pub equality: f64,
}

impl Thresholds {
    pub fn new(cfg: &VerifyConfig, norm: f64, equality: f64) -> Self {
        Self {
            kernel: (1e-8 * norm).max(10.0 * cfg.tol).max(cfg.kernel_floor),
            class: (10.0 * cfg.tol * norm).max(cfg.class_floor),
            equality,
        }
    }
}

type Cached<T> = OnceLock<std::result::Result<T, String>>;

fn cached<'a, T>(cell: &'a Cached<T>, f: impl FnOnce() -> Result<T>) -> Result<&'a T> {
    cell.get_or_init(|| f().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::Solver(e.clone()))
}

pub struct MeshContext {
    pub name: String,
    pub recipe: Option<MeshRecipe>,
    pub asm: Assembly,
    pub cfg: VerifyConfig,
    mass_solver: MassSolver,
    weak_dd: CsrMatrix,
    yano: Cached<SpectrumResult>,
    classified: Cached<Vec<ClassifiedPair>>,
    hodge_vec: Cached<SpectrumResult>,
    dec: Cached<SpectrumResult>,
    coclosed: Cached<SpectrumResult>,
    resampler: Cached<Resampler>,
    harmonic: Cached<Vec<Vec<f64>>>,
}

impl std::fmt::Debug for MeshContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MeshContext").field("name", &self.name).finish_non_exhaustive()
    }
}

impl MeshContext {
    pub fn new(name: impl Into<String>, mesh: IntrinsicMesh, recipe: Option<MeshRecipe>, cfg: VerifyConfig) -> Result<Self> {
        cfg.validate()?;
        let asm = Assembly::new(mesh)?;
        let mass_solver = asm.yano.check_mass()?;
        let weak_dd = asm.sym_grad.dstar_delta_weak()?;
        Ok(Self {
            name: name.into(),
            recipe,
            asm,
            cfg,
            mass_solver,
            weak_dd,
            yano: OnceLock::new(),
            classified: OnceLock::new(),
            hodge_vec: OnceLock::new(),
            dec: OnceLock::new(),
            coclosed: OnceLock::new(),
            resampler: OnceLock::new(),
            harmonic: OnceLock::new(),
        })
    }

    pub fn from_recipe(recipe: &MeshRecipe, cfg: VerifyConfig) -> Result<Self> {
        Self::new(recipe.to_string(), recipe.build()?, Some(recipe.clone()), cfg)
    }

    /// Tolerance for equality cases at this mesh's resolution.
    pub fn equality_tol(&self) -> f64 {
        match &self.recipe {
            Some(r) if !r.is_default_resolution() => self.cfg.coarse_equality,
            _ => self.cfg.equality,
        }
    }

    pub fn mass_solver(&self) -> &MassSolver {
        &self.mass_solver
    }

    /// `⟨δω, δη⟩` on vertex-tangent fields.
    pub fn weak_dstar_delta(&self) -> &CsrMatrix {
        &self.weak_dd
    }

    pub fn options(&self, op: &OperatorPair) -> SolverOptions {
        SolverOptions {
            tol: self.cfg.tol,
            seed_label: Some(format!("{}/{}", self.cfg.seed_label, op.label)),
            ordering: Ordering::Magnitude,
            ..Default::default()
        }
    }

    fn solve(&self, op: &OperatorPair, count: usize) -> Result<SpectrumResult> {
        eig_with(op, count.min(op.dim()), &self.options(op), None)
    }

    pub fn yano_spectrum(&self) -> Result<&SpectrumResult> {
        cached(&self.yano, || self.solve(&self.asm.yano, self.cfg.count))
    }

    pub fn hodge_vec_spectrum(&self) -> Result<&SpectrumResult> {
        cached(&self.hodge_vec, || self.solve(&self.asm.hodge_vec, self.cfg.count))
    }

    pub fn dec_spectrum(&self) -> Result<&SpectrumResult> {
        cached(&self.dec, || self.solve(&self.asm.dec.hodge_l1, self.cfg.count))
    }

    pub fn coclosed_spectrum(&self) -> Result<&SpectrumResult> {
        cached(&self.coclosed, || {
            let opts = self.options(&self.asm.dec.hodge_l1);
            coclosed_spectrum(&self.asm.dec, 6.min(self.cfg.count.max(4)), &opts)
        })
    }

    pub fn resampler(&self) -> Result<&Resampler> {
        cached(&self.resampler, || self.asm.resampler())
    }

    /// `M1`-orthonormal DEC-harmonic forms.
    pub fn harmonic_forms(&self) -> Result<&Vec<Vec<f64>>> {
        cached(&self.harmonic, || harmonic_basis(&self.asm.mesh, &self.asm.dec))
    }

    /// Spectra solved so far, in a fixed order.
    pub fn computed_spectra(&self) -> Vec<&SpectrumResult> {
        [&self.yano, &self.hodge_vec, &self.dec, &self.coclosed]
            .into_iter()
            .filter_map(|c| c.get().and_then(|r| r.as_ref().ok()))
            .collect()
    }

    /// Thresholds for the Δ_sym spectrum.
    pub fn thresholds(&self) -> Result<Thresholds> {
        let spec = self.yano_spectrum()?;
        Ok(Thresholds::new(&self.cfg, spec.norm_estimate, self.equality_tol()))
    }

    /// Δ_sym eigenpairs rotated to diagonalize `⟨δω, δω⟩` inside degenerate
    /// groups, each with its classification.
    pub fn classified(&self) -> Result<&Vec<ClassifiedPair>> {
        cached(&self.classified, || {
            let spec = self.yano_spectrum()?;
            classify_spectrum(self, spec, self.thresholds()?)
        })
    }

    /// Dimension of the DEC Hodge kernel: eigenvalues below `1e−6` times the
    /// first clearly nonzero one.
    pub fn dec_kernel_dim(&self) -> Result<usize> {
        let spec = self.dec_spectrum()?;
        let floor = 1e-8 * spec.norm_estimate.max(1.0);
        let first = spec.pairs.iter().map(|p| p.lambda.abs()).find(|l| *l > floor);
        let Some(first) = first else {
            return Err(Error::Solver(format!(
                "no nonzero DEC eigenvalue among the lowest {}",
                spec.len()
            )));
        };
        Ok(spec.pairs.iter().filter(|p| p.lambda.abs() <= 1e-6 * first).count())
    }
}
