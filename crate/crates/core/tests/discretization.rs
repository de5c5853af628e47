use std::f64::consts::PI;
use std::sync::OnceLock;

use symlap_core::discretization::sampling::{
    height_gradient_field, rotation_field, smooth_random_fields, transported_field,
};
use symlap_core::discretization::connection::wrap_angle;
use symlap_core::discretization::tensor::trace_inequality_margins;
use symlap_core::discretization::{
    build_connection, curvature, quadratic_form_identity, validate_mesh, Assembly, MeshGeometry,
};
use symlap_core::mesh::ViolationKind;
use symlap_core::models::{gen_icosphere, MeshRecipe};
use symlap_core::spectral::hodge::harmonic_basis;
use symlap_core::spectral::{eig_with, Ordering, SolverOptions};
use symlap_core::{pointwise_norms, Basis, FieldVector, IntrinsicMesh, MeshShape};

fn build(recipe: &str) -> Assembly {
    Assembly::new(recipe.parse::<MeshRecipe>().unwrap().build().unwrap()).unwrap()
}

fn ico3() -> &'static Assembly {
    static A: OnceLock<Assembly> = OnceLock::new();
    A.get_or_init(|| build("icosphere:3"))
}

fn ico4() -> &'static Assembly {
    static A: OnceLock<Assembly> = OnceLock::new();
    A.get_or_init(|| build("icosphere:4"))
}

fn genus2() -> &'static Assembly {
    static A: OnceLock<Assembly> = OnceLock::new();
    A.get_or_init(|| build("hyperbolic-genus2:4"))
}

fn torus64() -> &'static Assembly {
    static A: OnceLock<Assembly> = OnceLock::new();
    A.get_or_init(|| build("torus-grid:64"))
}

fn lowest(op: &symlap_core::OperatorPair, k: usize) -> Vec<f64> {
    let opts = SolverOptions {
        ordering: Ordering::Magnitude,
        ..Default::default()
    };
    eig_with(op, k, &opts, None).unwrap().eigenvalues()
}

fn valences(mesh: &IntrinsicMesh) -> Vec<usize> {
    let mut v = vec![0; mesh.n_vertices()];
    for t in mesh.triangles() {
        for &i in t {
            v[i] += 1;
        }
    }
    v
}

#[test]
fn validation_examples() {
    assert!(validate_mesh(&gen_icosphere(2, 1.0).unwrap()).passed());

    let mesh = gen_icosphere(1, 1.0).unwrap();
    let [a, b, c] = mesh.triangles()[0];
    let la = mesh.length_between(a, b).unwrap();
    let lb = mesh.length_between(b, c).unwrap();
    let mut lengths = mesh.lengths().to_vec();
    lengths[mesh.edge_between(c, a).unwrap()] = la + lb;
    let bad = IntrinsicMesh::new(
        mesh.n_vertices(),
        mesh.triangles().to_vec(),
        &mesh
            .edges()
            .iter()
            .zip(&lengths)
            .map(|([i, j], l)| (*i, *j, *l))
            .collect::<Vec<_>>(),
        None,
    )
    .unwrap();
    let d = validate_mesh(&bad);
    assert!(d.has(ViolationKind::TriangleInequality));
    assert!(d.violations.iter().any(|v| v.kind == ViolationKind::TriangleInequality && v.index == 0));

    let open = IntrinsicMesh::from_positions(
        vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]],
        vec![[0, 1, 2], [1, 3, 2]],
    )
    .unwrap();
    assert!(validate_mesh(&open).has(ViolationKind::NonClosed));
}

#[test]
fn flat_torus_curvature_is_exactly_zero() {
    let k = curvature(&torus64().mesh);
    assert!(k.gaussian.iter().all(|&x| x == 0.0));
    assert_eq!(k.r(), 0.0);
    assert_eq!(k.rho(), 0.0);
}

#[test]
fn icosphere_curvature() {
    let a = ico4();
    let val = valences(&a.mesh);
    let regular: Vec<f64> = a.curv.gaussian.iter().zip(&val).filter(|(_, &v)| v == 6).map(|(k, _)| *k).collect();
    assert_eq!(regular.len(), a.mesh.n_vertices() - 12);
    assert!(regular.iter().all(|k| (0.98..=1.02).contains(k)));
    let weighted: f64 = a.curv.gaussian.iter().zip(&a.curv.lumped_area).map(|(k, w)| k * w).sum();
    assert!((weighted - 4.0 * PI).abs() < 1e-9 * 4.0 * PI);
    assert!((a.curv.rho() - 1.0).abs() < 0.01);
}

#[test]
fn hyperbolic_curvature() {
    let a = genus2();
    assert!(a.curv.gaussian.iter().all(|k| (-1.05..=-0.95).contains(k)));
    assert_eq!(a.curv.rho(), 0.0);
    assert!((0.95..=1.05).contains(&a.curv.r()));
}

#[test]
fn gauss_bonnet_on_every_generator() {
    for r in ["icosphere:2", "torus-grid:9", "torus-grid:12:1,0.3,0,1.4", "hyperbolic-genus2:2"] {
        let mesh: IntrinsicMesh = r.parse::<MeshRecipe>().unwrap().build().unwrap();
        let k = curvature(&mesh);
        let chi = mesh.euler_characteristic() as f64;
        let total: f64 = k.gaussian.iter().zip(&k.lumped_area).map(|(k, w)| k * w).sum();
        assert!((total - 2.0 * PI * chi).abs() <= 1e-9 * (2.0 * PI * chi).abs().max(1.0), "{r}: {total}");
    }
}

#[test]
fn exterior_derivative_squares_to_zero() {
    for a in [ico3(), torus64(), genus2()] {
        let dd = a.dec.d1.matmul(&a.dec.d0).unwrap();
        assert!(dd.triplets().all(|(_, _, v)| v == 0.0));
    }
}

#[test]
fn dec_kernel_matches_betti_number() {
    for (a, b1) in [(torus64(), 2usize), (ico3(), 0), (genus2(), 4)] {
        let l = lowest(&a.dec.hodge_l1, 8);
        let first = l.iter().map(|x| x.abs()).find(|x| *x > 1e-6).unwrap();
        let ker = l.iter().filter(|x| x.abs() <= 1e-6 * first).count();
        assert_eq!(ker, b1);
        assert_eq!(ker, a.mesh.betti1());
    }
}

#[test]
fn holonomy_equals_angle_defect() {
    let t = torus64();
    assert!((0..t.mesh.n_vertices()).all(|v| t.conn.vertex_holonomy(&t.geom, v).abs() < 1e-12));

    let m = gen_icosphere(0, 1.0).unwrap();
    let geom = MeshGeometry::new(&m);
    let conn = build_connection(&m).unwrap();
    for v in 0..m.n_vertices() {
        assert!((conn.vertex_holonomy(&geom, v) - PI / 3.0).abs() < 1e-12);
    }

    for a in [ico3(), genus2()] {
        let defects = a.geom.angle_defects();
        for v in 0..a.mesh.n_vertices() {
            let diff = wrap_angle(a.conn.vertex_holonomy(&a.geom, v) - defects[v]);
            assert!(diff.abs() < 1e-10, "vertex {v}: {diff}");
        }
    }
}

#[test]
fn opposite_transports_are_inverse() {
    for a in [ico3(), genus2()] {
        for [i, j] in a.mesh.edges() {
            let fwd = a.conn.transport(&a.mesh, *i, *j).unwrap();
            let back = a.conn.transport(&a.mesh, *j, *i).unwrap();
            assert!(wrap_angle(fwd + back).abs() < 1e-12);
        }
    }
}

#[test]
fn bochner_examples() {
    let l = lowest(&torus64().bochner, 4);
    assert!(l[0].abs() < 1e-8 && l[1].abs() < 1e-8 && l[2] > 1.0);

    let a = ico4();
    let l = lowest(&a.bochner, 3);
    assert!((l[0] - 1.0).abs() < 0.05);

    for a in [ico3(), genus2()] {
        let opts = SolverOptions::default();
        let spec = eig_with(&a.bochner, 6, &opts, None).unwrap();
        assert!(spec.pairs.iter().all(|p| p.lambda >= -1e-10 * spec.norm_estimate));
    }
}

#[test]
fn ricci_examples() {
    let t = torus64();
    assert!(t.ric.stiffness.triplets().all(|(_, _, v)| v == 0.0));

    // Ric acts vertexwise, so each diagonal ratio is the curvature of its vertex
    let ratios = |a: &Assembly| -> Vec<f64> {
        (0..a.ric.dim())
            .map(|i| a.ric.stiffness.get(i, i) / a.ric.mass.get(i, i))
            .collect()
    };
    let ico = ico4();
    let val = valences(&ico.mesh);
    for (i, r) in ratios(ico).iter().enumerate() {
        if val[i / 2] == 6 {
            assert!((0.98..=1.02).contains(r), "{r}");
        }
    }
    assert!(ratios(genus2()).iter().all(|r| (-1.05..=-0.95).contains(r)));
}

#[test]
fn yano_is_bochner_minus_ricci() {
    let t = torus64();
    let diff = t.yano.stiffness.add_scaled(&t.bochner.stiffness, -1.0).unwrap();
    assert!(diff.triplets().all(|(_, _, v)| v == 0.0));
    let l = lowest(&t.yano, 3);
    assert!(l[0].abs() < 1e-8 && l[1].abs() < 1e-8 && l[2] > 1.0);

    let a = ico3();
    let diff = a.bochner.stiffness.add_scaled(&a.ric.stiffness, -1.0).unwrap();
    let err = diff.add_scaled(&a.yano.stiffness, -1.0).unwrap();
    assert!(err.triplets().all(|(_, _, v)| v.abs() < 1e-12));
    for op in [&a.yano, &a.bochner, &a.ric, &a.hodge_vec, &a.dec.hodge_l1] {
        assert!(op.stiffness.asymmetry() < 1e-12);
        assert!(op.mass.asymmetry() < 1e-12);
        op.check_mass().unwrap();
    }

    let l = lowest(&genus2().yano, 1);
    assert!((l[0] - 2.0).abs() < 0.05 * 2.0);
}

#[test]
fn hodge_backends_agree() {
    let four_pi2 = 4.0 * PI * PI;
    let t = torus64();
    for op in [&t.hodge_vec, &t.dec.hodge_l1] {
        let l = lowest(op, 10);
        assert!((l[2] / four_pi2 - 1.0).abs() < 0.02);
    }

    let l = lowest(&ico4().hodge_vec, 1);
    assert!((l[0] - 2.0).abs() < 0.02 * 2.0);

    let dist = |a: &Assembly| -> f64 {
        let v = lowest(&a.hodge_vec, 10);
        let d = lowest(&a.dec.hodge_l1, 10);
        v.iter().zip(&d).map(|(x, y)| ((x - y) / y).abs()).fold(0.0, f64::max)
    };
    let (d3, d4) = (dist(ico3()), dist(ico4()));
    assert!(d4 <= 0.05);
    assert!(d4 < d3, "{d3} -> {d4}");
}

fn max_norm(a: &Assembly, xi: &FieldVector) -> f64 {
    let s = a.sym_grad.apply(xi).unwrap();
    pointwise_norms(&s).unwrap().into_iter().fold(0.0, f64::max)
}

#[test]
fn killing_field_has_small_deformation() {
    let field = |a: &Assembly| rotation_field(&a.mesh, &a.conn, [0.3, -0.5, 0.8]).unwrap();
    let m3 = max_norm(ico3(), &field(ico3()));
    let m4 = max_norm(ico4(), &field(ico4()));
    assert!(m4 <= 0.02, "{m4}");
    assert!(m4 < m3);
    let div = ico4().sym_grad.codifferential(&field(ico4())).unwrap();
    assert!(div.coeffs().iter().all(|d| d.abs() < 0.02));
}

/// Largest traceless part of δ*ω, and largest deviation of the trace part
/// from −2·(height at the face centroid).
fn conformal_errors(a: &Assembly) -> (f64, f64) {
    let axis = [0.0, 0.0, 1.0];
    let xi = height_gradient_field(&a.mesh, &a.conn, axis).unwrap();
    let s = a.sym_grad.apply(&xi).unwrap();
    let pos = a.mesh.positions().unwrap();
    let mut traceless: f64 = 0.0;
    let mut trace_err: f64 = 0.0;
    for (f, t) in a.mesh.triangles().iter().enumerate() {
        let [xx, xy, yy] = [s.coeffs()[3 * f], s.coeffs()[3 * f + 1], s.coeffs()[3 * f + 2]];
        let half_trace = 0.5 * (xx + yy);
        let tl = ((xx - half_trace).powi(2) + 2.0 * xy * xy + (yy - half_trace).powi(2)).sqrt();
        traceless = traceless.max(tl);
        let c: Vec<f64> = (0..3).map(|i| t.iter().map(|&v| pos[v][i]).sum::<f64>() / 3.0).collect();
        let r = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        trace_err = trace_err.max((half_trace + 2.0 * c[2] / r).abs());
    }
    (traceless, trace_err)
}

#[test]
fn conformal_gradient_deformation_is_pure_trace() {
    let (tl3, tr3) = conformal_errors(ico3());
    let (tl4, tr4) = conformal_errors(ico4());
    assert!(tl4 <= 0.05, "{tl4}");
    assert!(tl4 <= 0.6 * tl3, "{tl3} -> {tl4}");
    assert!(tr4 <= 0.05, "{tr4}");
    assert!(tr4 < tr3);
}

#[test]
fn trace_inequality_on_random_fields() {
    let a = ico3();
    let shape = MeshShape::of(&a.mesh);
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    for _ in 0..50 {
        let coeffs: Vec<f64> = (0..a.yano.dim())
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        let xi = FieldVector::new(Basis::VertexTangent, shape, coeffs).unwrap();
        let margins = trace_inequality_margins(&a.sym_grad, &xi).unwrap();
        assert!(margins.iter().all(|m| *m >= -1e-12));
    }
}

#[test]
fn quadratic_identity_for_killing_field() {
    let a = build("icosphere:5");
    let xi = rotation_field(&a.mesh, &a.conn, [0.0, 0.0, 1.0]).unwrap();
    let n2 = a.yano.mass.bilinear(xi.coeffs(), xi.coeffs());
    let q = quadratic_form_identity(&a.yano, &a.sym_grad, &xi, 1.0).unwrap();
    assert!(q.lhs.abs() <= 1e-3 * n2, "{}", q.lhs / n2);
    assert!(q.rhs.abs() <= 1e-3 * n2, "{}", q.rhs / n2);
}

#[test]
fn quadratic_identity_for_harmonic_forms() {
    let a = genus2();
    let res = a.resampler().unwrap();
    let shape = MeshShape::of(&a.mesh);
    for h in harmonic_basis(&a.mesh, &a.dec).unwrap() {
        let xi = res.to_vertex(&FieldVector::new(Basis::WhitneyEdge, shape, h).unwrap()).unwrap();
        let n2 = a.yano.mass.bilinear(xi.coeffs(), xi.coeffs());
        let q = quadratic_form_identity(&a.yano, &a.sym_grad, &xi, 1.0).unwrap();
        assert!((q.lhs / n2 / 2.0 - 1.0).abs() < 0.05);
        assert!((q.rhs / n2 / 2.0 - 1.0).abs() < 0.05);
    }
}

#[test]
fn quadratic_identity_gap_shrinks_under_refinement() {
    let gap = |a: &Assembly| -> f64 {
        smooth_random_fields(&a.mesh, &a.geom, &a.conn, &a.dec, 20, 7)
            .unwrap()
            .iter()
            .map(|xi| quadratic_form_identity(&a.yano, &a.sym_grad, xi, 1.0).unwrap().relative_gap())
            .fold(0.0, f64::max)
    };
    let (g3, g4) = (gap(ico3()), gap(ico4()));
    assert!(g4 <= 0.05);
    assert!(g4 * 2.0 <= g3, "{g3} -> {g4}");
}

#[test]
fn resampling_examples() {
    let a = ico4();
    let res = a.resampler().unwrap();
    let shape = MeshShape::of(&a.mesh);
    let zero = FieldVector::zeros(Basis::VertexTangent, shape);
    assert!(res.to_edge(&zero).unwrap().coeffs().iter().all(|x| *x == 0.0));
    let zero_e = FieldVector::zeros(Basis::WhitneyEdge, shape);
    assert!(res.to_vertex(&zero_e).unwrap().coeffs().iter().all(|x| *x == 0.0));

    for xi in smooth_random_fields(&a.mesh, &a.geom, &a.conn, &a.dec, 5, 3).unwrap() {
        let back = res.to_vertex(&res.to_edge(&xi).unwrap()).unwrap();
        let diff: Vec<f64> = back.coeffs().iter().zip(xi.coeffs()).map(|(x, y)| x - y).collect();
        let rel = (a.yano.mass.bilinear(&diff, &diff) / a.yano.mass.bilinear(xi.coeffs(), xi.coeffs())).sqrt();
        assert!(rel <= 0.05, "{rel}");
    }

    for t in [torus64(), &build("torus-grid:33")] {
        let res = t.resampler().unwrap();
        let p = transported_field(&t.mesh, &t.conn, 0, [0.6, 0.8]);
        let back = res.to_vertex(&res.to_edge(&p).unwrap()).unwrap();
        let err = back.coeffs().iter().zip(p.coeffs()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }
}

#[test]
fn resampled_harmonic_forms_are_near_eigenforms() {
    let a = genus2();
    let res = a.resampler().unwrap();
    let shape = MeshShape::of(&a.mesh);
    for h in harmonic_basis(&a.mesh, &a.dec).unwrap() {
        let xi = res.to_vertex(&FieldVector::new(Basis::WhitneyEdge, shape, h).unwrap()).unwrap();
        let rq = a.yano.rayleigh(xi.coeffs());
        assert!((rq / 2.0 - 1.0).abs() < 0.05, "{rq}");
    }
}
