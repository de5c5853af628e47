use std::sync::OnceLock;

use serde_json::json;
use symlap_core::discretization::Assembly;
use symlap_core::models::MeshRecipe;
use symlap_core::spectral::{eig_with, Ordering, SolverOptions};
use symlap_core::verify::{
    check_corollary, check_lemma, check_s3_analytic, check_t2, check_t4, check_t5, check_t6, classify,
    full_report, killing_number, ManifoldInput, MeshContext, Status, Tag, VerifyConfig, CHECK_IDS,
};
use symlap_core::{Basis, FieldVector, IntrinsicMesh, MeshShape};

fn ctx(recipe: &str) -> MeshContext {
    MeshContext::from_recipe(&recipe.parse().unwrap(), VerifyConfig::default()).unwrap()
}

fn ico4() -> &'static MeshContext {
    static C: OnceLock<MeshContext> = OnceLock::new();
    C.get_or_init(|| ctx("icosphere:4"))
}

fn genus2() -> &'static MeshContext {
    static C: OnceLock<MeshContext> = OnceLock::new();
    C.get_or_init(|| ctx("hyperbolic-genus2:4"))
}

fn torus() -> &'static MeshContext {
    static C: OnceLock<MeshContext> = OnceLock::new();
    C.get_or_init(|| ctx("torus-grid:32"))
}

fn tags(list: &[Tag]) -> std::collections::BTreeSet<Tag> {
    list.iter().copied().collect()
}

#[test]
fn icosphere_kernel_classification() {
    let pairs = ico4().classified().unwrap();
    let kernel: Vec<_> = pairs.iter().filter(|p| p.lambda.abs() <= 0.5).collect();
    assert_eq!(kernel.len(), 6);
    let killing = tags(&[Tag::Killing, Tag::Iht, Tag::ConformalKilling, Tag::ProjectiveKilling]);
    let conformal = tags(&[Tag::Iht, Tag::ConformalKilling]);
    assert_eq!(kernel.iter().filter(|p| p.class.tags == killing).count(), 3);
    assert_eq!(kernel.iter().filter(|p| p.class.tags == conformal).count(), 3);
    for p in kernel.iter().filter(|p| !p.class.has(Tag::Killing)) {
        assert!(p.class.divergence > 1.0);
    }
}

#[test]
fn genus2_lowest_forms_are_harmonic_only() {
    let pairs = genus2().classified().unwrap();
    for p in &pairs[..4] {
        assert!((p.lambda / 2.0 - 1.0).abs() < 0.05);
        assert_eq!(p.class.tags, tags(&[Tag::Harmonic]), "{:?}", p.class.residuals);
    }
}

#[test]
fn killing_implies_iht_and_tags_follow_residuals() {
    for c in [ico4(), genus2(), torus()] {
        for p in c.classified().unwrap() {
            if p.class.has(Tag::Killing) {
                assert!(p.class.has(Tag::Iht));
            }
            let again = symlap_core::verify::Classification::from_residuals(
                p.class.lambda,
                p.class.residuals.clone(),
                p.class.divergence,
                p.class.thresholds,
            );
            assert_eq!(again.tags, p.class.tags);
        }
    }
}

#[test]
fn classification_is_deterministic() {
    let c = ico4();
    let spec = c.yano_spectrum().unwrap();
    let shape = MeshShape::of(&c.asm.mesh);
    for p in &spec.pairs {
        let f = FieldVector::new(Basis::VertexTangent, shape, p.vector.clone()).unwrap();
        let a = classify(&f, p.lambda, c).unwrap();
        let b = classify(&f, p.lambda, c).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn unnormalized_input_is_rejected() {
    let c = ico4();
    let p = &c.yano_spectrum().unwrap().pairs[0];
    let scaled: Vec<f64> = p.vector.iter().map(|x| 2.0 * x).collect();
    let f = FieldVector::new(Basis::VertexTangent, MeshShape::of(&c.asm.mesh), scaled).unwrap();
    assert!(classify(&f, p.lambda, c).is_err());
}

#[test]
fn killing_numbers() {
    assert_eq!(killing_number(ico4()).unwrap(), 3);
    assert_eq!(killing_number(torus()).unwrap(), 2);
    assert_eq!(killing_number(genus2()).unwrap(), 0);
}

#[test]
fn lemma_examples() {
    let r = check_lemma(ico4());
    assert_eq!(r.status, Status::Pass);
    let t = check_lemma(torus());
    assert_eq!(t.status, Status::Pass);
    assert!(t.measured["max_gap"].as_f64().unwrap() <= 1e-3);
    assert!(r.measured["sentinel_min_gap"].as_f64().unwrap() > 0.05);
}

#[test]
fn theorem2_examples() {
    let [p1, p2, p3] = check_t2(genus2());
    assert_eq!((p1.status, p2.status, p3.status), (Status::Pass, Status::Pass, Status::Pass));
    let l1 = p1.measured["lambda1"].as_f64().unwrap();
    let r = p1.measured["r"].as_f64().unwrap();
    assert!((l1 - 2.0).abs() < 0.1 && (r - 1.0).abs() < 0.05);

    let [p1, p2, p3] = check_t2(ico4());
    assert_eq!((p1.status, p2.status, p3.status), (Status::Skipped, Status::Pass, Status::Pass));

    let [_, _, p3] = check_t2(torus());
    assert_eq!(p3.status, Status::Pass);
}

#[test]
fn theorem4_branches() {
    let [a, b] = check_t4(ico4());
    assert_eq!((a.status, b.status), (Status::Pass, Status::Skipped));
    assert_eq!(a.measured["yano_kernel_dim"], json!(6));
    assert_eq!(a.measured["hodge_eigenspace_dim"], json!(6));

    let [a, b] = check_t4(genus2());
    assert_eq!((a.status, b.status), (Status::Skipped, Status::Pass));
    assert_eq!(b.measured["cluster_dim"], json!(4));

    let [a, b] = check_t4(torus());
    assert_eq!((a.status, b.status), (Status::Skipped, Status::Skipped));
    assert_eq!(a.measured["kernel_dim"], json!(2));
}

#[test]
fn theorem5_and_corollary() {
    let t5 = check_t5(genus2());
    assert_eq!(t5.status, Status::Pass);
    assert_eq!(t5.measured["equality_case"], json!(true));
    assert_eq!(t5.measured["cluster_dim"], json!(4));
    assert_eq!(check_t5(ico4()).status, Status::Skipped);

    let cor = check_corollary(genus2());
    assert_eq!(cor.status, Status::Pass);
    assert_eq!(cor.measured["multiplicity"], json!(4));
    assert_eq!(check_corollary(ico4()).status, Status::Skipped);

    let coarse = ctx("hyperbolic-genus2:3");
    assert_eq!(coarse.equality_tol(), 0.10);
    assert_eq!(check_corollary(&coarse).status, Status::Pass);
}

#[test]
fn theorem5_on_scaled_metric() {
    let c = ctx(&format!("hyperbolic-genus2:4:{}", 2f64.sqrt()));
    let t5 = check_t5(&c);
    assert_eq!(t5.status, Status::Pass);
    let r = t5.measured["r"].as_f64().unwrap();
    let l1 = t5.measured["lambda1"].as_f64().unwrap();
    assert!((r - 0.5).abs() < 0.025);
    assert!((l1 - 1.0).abs() < 0.05);
    assert_eq!(t5.measured["equality_case"], json!(true));
}

#[test]
fn theorem6_examples() {
    let t6 = check_t6(ico4());
    assert_eq!(t6.status, Status::Pass);
    assert_eq!(t6.measured["multiplicity"], json!(3));
    assert_eq!(t6.measured["killing_number"], json!(3));
    assert!((t6.measured["mu1"].as_f64().unwrap() - 2.0).abs() < 0.04);

    let big = ctx("icosphere:4:2");
    let t6 = check_t6(&big);
    assert_eq!(t6.status, Status::Pass);
    assert!((t6.measured["rho"].as_f64().unwrap() - 0.25).abs() < 0.01);
    assert!((t6.measured["mu1"].as_f64().unwrap() - 0.5).abs() < 0.01);

    assert_eq!(check_t6(genus2()).status, Status::Skipped);
}

#[test]
fn analytic_sign_checks() {
    let [conf, proj] = check_s3_analytic();
    assert_eq!((conf.status, proj.status), (Status::Pass, Status::Pass));
    let values: Vec<f64> = conf.measured["conformal_lambda_n2_to_10"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let expected: Vec<f64> = (2..=10).map(|n| 2.0 - n as f64).collect();
    assert_eq!(values, expected);
}

#[test]
fn scale_covariance_on_genus2() {
    let c = 2f64.sqrt();
    let base = Assembly::new("hyperbolic-genus2:3".parse::<MeshRecipe>().unwrap().build().unwrap()).unwrap();
    let scaled = Assembly::new(base.mesh.scaled(c)).unwrap();
    let opts = SolverOptions {
        ordering: Ordering::Magnitude,
        ..Default::default()
    };
    let a = eig_with(&base.yano, 8, &opts, None).unwrap().eigenvalues();
    let b = eig_with(&scaled.yano, 8, &opts, None).unwrap().eigenvalues();
    for (x, y) in a.iter().zip(&b) {
        assert!((y * c * c - x).abs() <= 1e-8 * x.abs().max(1.0), "{x} vs {y}");
    }
}

#[test]
fn report_edge_cases() {
    let cfg = VerifyConfig::default();
    let empty = full_report(&[], &cfg, json!({}));
    assert!(empty.checks.is_empty() && empty.manifolds.is_empty());

    let torus_only = full_report(&[ManifoldInput::Recipe("torus-grid:16".parse().unwrap())], &cfg, json!({}));
    assert_eq!(torus_only.checks.len(), CHECK_IDS.len());
    for id in ["T5", "T6", "COR"] {
        let c = torus_only.checks.iter().find(|c| c.id == id).unwrap();
        assert_eq!(c.status, Status::Skipped, "{id}");
    }
    assert_eq!(torus_only.overall(), Status::Pass);

    let open = IntrinsicMesh::from_positions(
        vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]],
        vec![[0, 1, 2], [1, 3, 2]],
    )
    .unwrap();
    let broken = full_report(
        &[ManifoldInput::Mesh {
            name: "open".into(),
            mesh: open,
        }],
        &cfg,
        json!({}),
    );
    assert!(broken.checks.iter().all(|c| c.status == Status::Error));
    assert_eq!(broken.overall(), Status::Error);
}

#[test]
fn config_invariants() {
    assert!(VerifyConfig::default().validate().is_ok());
    let bad = VerifyConfig {
        count: 0,
        ..Default::default()
    };
    assert!(bad.validate().is_err());
    let bad = VerifyConfig {
        class_floor: 1e-12,
        ..Default::default()
    };
    assert!(bad.validate().is_err());
    let bad = VerifyConfig {
        tol: -1.0,
        ..Default::default()
    };
    assert!(bad.validate().is_err());
}
