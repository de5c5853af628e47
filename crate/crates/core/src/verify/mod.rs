//! Eigenform classification and the theorem suite.

pub mod checks;
pub mod classify;
pub mod context;
pub mod report;

pub use checks::{
    check_corollary, check_eq41, check_lemma, check_s3_analytic, check_s3_mesh, check_t2, check_t3, check_t4,
    check_t5, check_t6,
};
pub use classify::{classify, killing_number, Classification, ClassifiedPair, Tag};
pub use context::{MeshContext, Thresholds, VerifyConfig};
pub use report::{ReportDocument, SpectrumSummary, Status, TheoremReport, CHECK_IDS};

use rayon::prelude::*;
use serde_json::Value;

use crate::manifold::{ManifoldKind, ManifoldSummary};
use crate::mesh::IntrinsicMesh;
use crate::models::MeshRecipe;

/// A manifold handed to the suite.
#[derive(Debug, Clone)]
pub enum ManifoldInput {
    Recipe(MeshRecipe),
    Mesh { name: String, mesh: IntrinsicMesh },
}

impl ManifoldInput {
    pub fn name(&self) -> String {
        match self {
            ManifoldInput::Recipe(r) => r.to_string(),
            ManifoldInput::Mesh { name, .. } => name.clone(),
        }
    }

    fn context(&self, cfg: &VerifyConfig) -> crate::Result<MeshContext> {
        match self {
            ManifoldInput::Recipe(r) => MeshContext::from_recipe(r, cfg.clone()),
            ManifoldInput::Mesh { name, mesh } => MeshContext::new(name.clone(), mesh.clone(), None, cfg.clone()),
        }
    }
}

/// The default manifold set: flat torus, round sphere, hyperbolic genus 2.
pub fn default_suite() -> Vec<ManifoldInput> {
    ["torus-grid:64", "icosphere:4", "hyperbolic-genus2:4"]
        .iter()
        .map(|s| ManifoldInput::Recipe(s.parse().expect("valid built-in recipe")))
        .collect()
}

/// Every mesh check on one context, keyed by id.
pub fn mesh_checks(ctx: &MeshContext) -> Vec<TheoremReport> {
    let mut out = vec![check_lemma(ctx)];
    out.extend(check_t2(ctx));
    out.push(check_t3(ctx));
    out.extend(check_t4(ctx));
    out.push(check_t5(ctx));
    out.push(check_corollary(ctx));
    out.push(check_t6(ctx));
    out.extend(check_s3_mesh(ctx));
    out.push(check_eq41(ctx));
    out
}

fn summary(ctx: &MeshContext) -> ManifoldSummary {
    let m = &ctx.asm.mesh;
    ManifoldSummary {
        name: ctx.name.clone(),
        kind: ManifoldKind::Mesh,
        dimension: 2,
        vertices: Some(m.n_vertices()),
        edges: Some(m.n_edges()),
        faces: Some(m.n_faces()),
        euler_characteristic: Some(m.euler_characteristic()),
        radius: None,
        lattice: None,
    }
}

/// Runs every applicable check on every manifold and merges the results
/// into one entry per check id. An empty manifold set gives an empty report.
pub fn full_report(inputs: &[ManifoldInput], cfg: &VerifyConfig, config: Value) -> ReportDocument {
    let mut doc = ReportDocument {
        config,
        manifolds: Vec::new(),
        spectra: Vec::new(),
        checks: Vec::new(),
    };
    if inputs.is_empty() {
        return doc;
    }
    let per_manifold: Vec<(String, crate::Result<MeshContext>, Vec<TheoremReport>)> = inputs
        .par_iter()
        .map(|input| {
            let name = input.name();
            match input.context(cfg) {
                Ok(ctx) => {
                    let reports = mesh_checks(&ctx);
                    (name, Ok(ctx), reports)
                }
                Err(e) => {
                    let reports = CHECK_IDS
                        .iter()
                        .map(|id| TheoremReport::new(id, &name).errored(format!("assembly failed: {e}")))
                        .collect();
                    (name, Err(e), reports)
                }
            }
        })
        .collect();

    let mut by_id: Vec<Vec<TheoremReport>> = vec![Vec::new(); CHECK_IDS.len()];
    let [conf, proj] = check_s3_analytic();
    for rep in [conf, proj] {
        let i = CHECK_IDS.iter().position(|id| *id == rep.id).expect("known id");
        by_id[i].push(rep);
    }
    for (name, ctx, reports) in per_manifold {
        for rep in reports {
            let i = CHECK_IDS.iter().position(|id| *id == rep.id).expect("known id");
            by_id[i].push(rep);
        }
        match ctx {
            Ok(ctx) => {
                doc.manifolds.push(summary(&ctx));
                doc.spectra.extend(ctx.computed_spectra().into_iter().map(|s| SpectrumSummary::new(&name, s)));
            }
            Err(_) => doc.manifolds.push(ManifoldSummary {
                name,
                kind: ManifoldKind::Mesh,
                dimension: 2,
                vertices: None,
                edges: None,
                faces: None,
                euler_characteristic: None,
                radius: None,
                lattice: None,
            }),
        }
    }
    doc.checks = CHECK_IDS
        .iter()
        .zip(by_id)
        .map(|(id, parts)| TheoremReport::merge(id, parts))
        .collect();
    doc
}
