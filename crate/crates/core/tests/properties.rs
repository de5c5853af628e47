use std::f64::consts::PI;

use proptest::prelude::*;
use symlap_core::discretization::connection::wrap_angle;
use symlap_core::discretization::tensor::trace_inequality_margins;
use symlap_core::discretization::Assembly;
use symlap_core::models::{gen_hyperbolic_genus2, gen_icosphere, gen_torus_grid, MeshRecipe};
use symlap_core::spectral::{cluster, eig_with, hodge_decompose, Ordering, SolverOptions};
use symlap_core::{flat, global_inner, sharp, Basis, FieldVector, InnerProductSpace, IntrinsicMesh, MeshShape};

fn small_mesh() -> impl Strategy<Value = IntrinsicMesh> {
    prop_oneof![
        (0u32..=2, 0.5f64..3.0).prop_map(|(l, r)| gen_icosphere(l, r).unwrap()),
        (3usize..=9, -0.4f64..0.4, 0.6f64..1.8)
            .prop_map(|(m, shear, h)| gen_torus_grid(m, [[1.0, shear], [0.0, h]]).unwrap()),
        Just(gen_hyperbolic_genus2(1).unwrap()),
    ]
}

fn coeffs(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
}

const BASES: [Basis; 6] = [
    Basis::P1Function,
    Basis::WhitneyEdge,
    Basis::VertexTangent,
    Basis::FaceSymTensor,
    Basis::FaceScalar,
    Basis::Face2Form,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inner_products_are_symmetric_bilinear_and_definite(
        mesh in small_mesh(), seed in any::<u64>(), s in -3.0f64..3.0, t in -3.0f64..3.0,
    ) {
        let a = Assembly::new(mesh).unwrap();
        let shape = MeshShape::of(&a.mesh);
        for basis in BASES {
            let space = InnerProductSpace::for_basis(&a.mesh, &a.geom, &a.dec, basis).unwrap();
            let n = basis.dimension(shape);
            let f = |k: u64| FieldVector::new(basis, shape, coeffs(n, seed.wrapping_add(k))).unwrap();
            let (x, y, z) = (f(0), f(1), f(2));
            let ip = |u: &FieldVector, v: &FieldVector| global_inner(u, v, &space).unwrap();
            let combo = x.combine(s, &y, t).unwrap();
            let lhs = ip(&combo, &z);
            let rhs = s * ip(&x, &z) + t * ip(&y, &z);
            let scale = (ip(&x, &x) + ip(&y, &y) + ip(&z, &z)) * (1.0 + s.abs() + t.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
            prop_assert!((ip(&x, &y) - ip(&y, &x)).abs() <= 1e-12 * scale);
            prop_assert!(ip(&x, &x) > 0.0);
            for i in 0..n {
                prop_assert!(space.mass.get(i, i) > 0.0);
            }
        }
    }

    #[test]
    fn musical_round_trip_is_exact(mesh in small_mesh(), seed in any::<u64>()) {
        let shape = MeshShape::of(&mesh);
        let xi = FieldVector::new(Basis::VertexTangent, shape, coeffs(2 * mesh.n_vertices(), seed)).unwrap();
        let back = flat(&sharp(&xi, None).unwrap(), Basis::VertexTangent, None).unwrap();
        prop_assert_eq!(back.coeffs(), xi.coeffs());
    }

    #[test]
    fn exterior_derivative_squares_to_zero(mesh in small_mesh()) {
        let a = Assembly::new(mesh).unwrap();
        let dd = a.dec.d1.matmul(&a.dec.d0).unwrap();
        prop_assert!(dd.triplets().all(|(_, _, v)| v == 0.0));
    }

    #[test]
    fn gauss_bonnet(mesh in small_mesh()) {
        let a = Assembly::new(mesh).unwrap();
        let chi = a.mesh.euler_characteristic() as f64;
        let total: f64 = a.curv.defect.iter().sum();
        prop_assert!((total - 2.0 * PI * chi).abs() <= 1e-9 * (2.0 * PI * chi).abs().max(1.0));
    }

    #[test]
    fn holonomy_and_transport(mesh in small_mesh()) {
        let a = Assembly::new(mesh).unwrap();
        let defects = a.geom.angle_defects();
        for v in 0..a.mesh.n_vertices() {
            prop_assert!(wrap_angle(a.conn.vertex_holonomy(&a.geom, v) - defects[v]).abs() < 1e-10);
        }
        for [i, j] in a.mesh.edges() {
            let round = a.conn.transport(&a.mesh, *i, *j).unwrap() + a.conn.transport(&a.mesh, *j, *i).unwrap();
            prop_assert!(wrap_angle(round).abs() < 1e-12);
        }
    }

    #[test]
    fn pointwise_trace_inequality(mesh in small_mesh(), seed in any::<u64>()) {
        let a = Assembly::new(mesh).unwrap();
        let shape = MeshShape::of(&a.mesh);
        for k in 0..10 {
            let xi = FieldVector::new(Basis::VertexTangent, shape, coeffs(a.yano.dim(), seed ^ k)).unwrap();
            let m = trace_inequality_margins(&a.sym_grad, &xi).unwrap();
            prop_assert!(m.iter().all(|x| *x >= -1e-12));
        }
    }

    #[test]
    fn operators_are_symmetric(mesh in small_mesh()) {
        let a = Assembly::new(mesh).unwrap();
        for op in [&a.yano, &a.bochner, &a.ric, &a.hodge_vec, &a.dec.hodge_l1] {
            prop_assert!(op.stiffness.asymmetry() <= 1e-12);
            prop_assert!(op.check_mass().is_ok());
        }
    }

    #[test]
    fn hodge_decomposition_is_an_orthogonal_projection(mesh in small_mesh(), seed in any::<u64>()) {
        let a = Assembly::new(mesh).unwrap();
        let shape = MeshShape::of(&a.mesh);
        let x = coeffs(a.mesh.n_edges(), seed);
        let omega = FieldVector::new(Basis::WhitneyEdge, shape, x.clone()).unwrap();
        let p = hodge_decompose(&a.mesh, &a.dec, &omega).unwrap();
        let scale = a.dec.m1.bilinear(&x, &x);
        let parts = [&p.exact, &p.coexact, &p.harmonic];
        for i in 0..3 {
            for j in i + 1..3 {
                prop_assert!(a.dec.m1.bilinear(parts[i].coeffs(), parts[j].coeffs()).abs() <= 1e-10 * scale);
            }
        }
        let twice = hodge_decompose(&a.mesh, &a.dec, &p.exact).unwrap();
        let d: Vec<f64> = twice.exact.coeffs().iter().zip(p.exact.coeffs()).map(|(u, v)| u - v).collect();
        prop_assert!(a.dec.m1.bilinear(&d, &d) <= 1e-24 * scale.max(1.0));
    }

    #[test]
    fn clusters_partition_sorted_values(mut values in prop::collection::vec(-10.0f64..10.0, 0..40), gap in 1e-6f64..0.5) {
        values.sort_by(f64::total_cmp);
        let groups = cluster(&values, gap);
        let flat: Vec<usize> = groups.iter().flatten().copied().collect();
        prop_assert_eq!(flat, (0..values.len()).collect::<Vec<_>>());
        for g in &groups {
            for w in g.windows(2) {
                prop_assert!((values[w[1]] - values[w[0]]).abs() <= gap * values[w[0]].abs().max(1.0));
            }
        }
        for w in groups.windows(2) {
            let (a, b) = (*w[0].last().unwrap(), w[1][0]);
            prop_assert!((values[b] - values[a]).abs() > gap * values[a].abs().max(1.0));
        }
    }

    #[test]
    fn eigenvalues_scale_inversely_with_area(c in 0.5f64..2.0) {
        let base: IntrinsicMesh = "icosphere:2".parse::<MeshRecipe>().unwrap().build().unwrap();
        let a = Assembly::new(base.clone()).unwrap();
        let b = Assembly::new(base.scaled(c)).unwrap();
        let opts = SolverOptions { ordering: Ordering::Magnitude, ..Default::default() };
        let la = eig_with(&a.yano, 10, &opts, None).unwrap().eigenvalues();
        let lb = eig_with(&b.yano, 10, &opts, None).unwrap().eigenvalues();
        for (x, y) in la.iter().zip(&lb) {
            prop_assert!((y * c * c - x).abs() <= 1e-8 * x.abs().max(1.0));
        }
    }

    #[test]
    fn solves_are_reproducible(seed in 0usize..3) {
        let recipe = ["icosphere:2", "torus-grid:10", "hyperbolic-genus2:1"][seed];
        let mesh: IntrinsicMesh = recipe.parse::<MeshRecipe>().unwrap().build().unwrap();
        let a = Assembly::new(mesh.clone()).unwrap();
        let b = Assembly::new(mesh).unwrap();
        let opts = SolverOptions { ordering: Ordering::Magnitude, dense_cutoff: 0, ..Default::default() };
        let x = eig_with(&a.yano, 6, &opts, None).unwrap();
        let y = eig_with(&b.yano, 6, &opts, None).unwrap();
        prop_assert_eq!(x.eigenvalues(), y.eigenvalues());
        for (p, q) in x.pairs.iter().zip(&y.pairs) {
            prop_assert_eq!(&p.vector, &q.vector);
        }
    }
}
