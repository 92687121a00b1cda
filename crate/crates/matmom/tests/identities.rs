use std::f64::consts::PI;

use matmom::blockmat::*;
use matmom::debranges::*;
use matmom::identities::*;
use matmom::matpoly::Geometry;
use matmom::solutions::j_p;
use proptest::prelude::*;

fn random(kind: MomentKind, p: usize, n: usize, seed: u64) -> DeBrangesData {
    DeBrangesData::from_moments(&random_moments(kind, ProblemDims::new(p, n).unwrap(), seed)).unwrap()
}

fn identity_data(n: usize, geometry: Geometry) -> DeBrangesData {
    let dims = ProblemDims::new(1, n).unwrap();
    let g = GramPair::factor(dims, None, eye(dims.m())).unwrap();
    DeBrangesData::new(g, geometry)
}

fn all_pass(rs: &[IdentityReport]) -> bool {
    rs.iter().all(|r| r.pass)
}

fn failing(rs: &[IdentityReport]) -> Vec<String> {
    rs.iter().filter(|r| !r.pass).map(|r| format!("{} {:e}", r.name, r.residual)).collect()
}

#[test]
fn identity_gram_passes_both_chains_for_n_one() {
    let d = identity_data(1, Geometry::Disc);
    assert!(all_pass(&check_toeplitz_chain(&d, c64(0.5, 0.0), 1, 10)));
    assert!(all_pass(&check_toeplitz_limits(&d)));
    assert!(check_gohberg_heinig(&d).pass);
    let h = identity_data(1, Geometry::HalfPlane);
    assert!(all_pass(&check_hankel_chain(&h, c64(0.0, 1.0), 1, 10)));
    assert!(all_pass(&check_hankel_gh_type(&h, 1, 10)));
    assert!(check_isometry_criterion(&d.gram, MomentKind::Trigonometric).pass);
    assert!(check_isometry_criterion(&d.gram, MomentKind::Hamburger).pass);
}

#[test]
fn identity_gram_is_not_hankel_beyond_n_one() {
    // I has h₀ = h₂ = 1 on the antidiagonal blocks only when n = 1.
    let d = identity_data(2, Geometry::HalfPlane);
    assert!(check_isometry_criterion(&d.gram, MomentKind::Trigonometric).pass);
    assert!(!check_isometry_criterion(&d.gram, MomentKind::Hamburger).pass);
}

#[test]
fn identity_gram_sandwich_is_diagonal() {
    let d = identity_data(3, Geometry::Disc);
    let a = d.a();
    let s = a * &d.n0 * a.adjoint();
    // N₀ = diag(0,1,1,1), so AN₀A* = diag(1,1,1,0) = N•.
    let want = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(1.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]));
    assert!((s - want).norm() < 1e-15);
}

#[test]
fn random_toeplitz_identities() {
    for (p, n, seed) in [(2, 4, 1), (3, 3, 2), (1, 2, 3)] {
        let d = random(MomentKind::Trigonometric, p, n, seed);
        let mut rs = check_toeplitz_chain(&d, c64(0.5, 0.0), seed, 20);
        rs.extend(check_toeplitz_chain(&d, c64(-0.3, 0.7), seed, 20));
        rs.extend(check_toeplitz_limits(&d));
        rs.push(check_gohberg_heinig(&d));
        rs.push(check_displacement(&d, Geometry::Disc));
        rs.extend(check_n_alpha(&d, c64(0.2, 0.4)));
        rs.push(check_kernel_inverse(&d, seed, 20));
        assert!(all_pass(&rs), "{:?}", failing(&rs));
    }
}

#[test]
fn random_hankel_identities() {
    for (p, n, seed) in [(2, 3, 1), (3, 2, 2), (1, 4, 3)] {
        let d = random(MomentKind::Hamburger, p, n, seed);
        let mut rs = check_hankel_chain(&d, c64(0.0, 1.0), seed, 20);
        rs.extend(check_hankel_chain(&d, c64(1.2, -0.4), seed, 20));
        rs.extend(check_hankel_gh_type(&d, seed, 20));
        rs.push(check_displacement(&d, Geometry::HalfPlane));
        rs.extend(check_n_alpha(&d, c64(-0.5, 1.5)));
        rs.push(check_kernel_inverse(&d, seed, 20));
        let pair = hankel_pair(&d, c64(0.0, 1.0)).unwrap();
        rs.extend(check_hamburger_inverse_identities(&d, &pair, seed, 10).unwrap());
        assert!(all_pass(&rs), "{:?}", failing(&rs));
    }
}

#[test]
fn resolvent_and_fourier_identities() {
    let d = random(MomentKind::Trigonometric, 2, 3, 6);
    let pair = toeplitz_pair(&d).unwrap();
    let rs = check_resolvent_identities(&d, &pair, 6, 10, &Default::default()).unwrap();
    assert!(all_pass(&rs), "{:?}", failing(&rs));
    // At ω = 0 the E₊⁻¹ realization collapses to γ₀₀^{1/2}.
    let e = inverse(&pair.eplus.eval(c64(0.0, 0.0))).unwrap();
    assert!(rel_residual(&e, &herm_inv_sqrt(&d.gram.gamma_block(0, 0))) < 1e-12);
}

#[test]
fn toeplitz_matrix_identity_fails_on_hankel_data() {
    let d = random(MomentKind::Hamburger, 2, 3, 17);
    let h = check_hankel_chain(&d, c64(0.0, 1.0), 17, 10);
    assert!(all_pass(&h));
    let mut t = d.clone();
    t.geometry = Geometry::Disc;
    let rs = check_toeplitz_chain(&t, c64(0.5, 0.0), 17, 10);
    let m = rs.iter().find(|r| r.name == "toeplitz_chain_matrix").unwrap();
    assert!(m.residual > 1e-3);
    let mut hd = random(MomentKind::Trigonometric, 2, 3, 17);
    hd.geometry = Geometry::HalfPlane;
    let rs = check_hankel_chain(&hd, c64(0.0, 1.0), 17, 10);
    let m = rs.iter().find(|r| r.name == "hankel_chain_matrix").unwrap();
    assert!(m.residual > 1e-3);
}

#[test]
fn literal_hankel_gh_sum_fails() {
    // Σ A^j X A^j (both factors A) does not reproduce Γ; A^{j+1} X A^j does.
    let d = random(MomentKind::Hamburger, 2, 3, 5);
    let un = d.u[d.n()].clone();
    let wn = d.w_n().unwrap();
    let x = &un * wn.adjoint() - &wn * un.adjoint();
    let mut lit = &un * un.adjoint();
    let mut pw = eye(d.m());
    for _ in 0..=d.n() {
        lit += &pw * &x * &pw;
        pw = &pw * d.a();
    }
    assert!((d.gamma() - &lit).norm() / d.gamma().norm() > 1e-2);
    let fixed = hankel_gh_sum(&d, &un, &wn);
    assert!((d.gamma() - &fixed).norm() / d.gamma().norm() < 1e-10);
    // The transposed form u_n u_n* − Σ (A*)^j X (A*)^{j+1} gives the same matrix.
    let mut alt = &un * un.adjoint();
    let mut pw = eye(d.m());
    let at = d.a().adjoint();
    for _ in 0..=d.n() {
        alt -= &pw * &x * &pw * &at;
        pw = &pw * &at;
    }
    assert!((fixed - alt).norm() / d.gamma().norm() < 1e-10);
}

#[test]
fn displacement_constants() {
    let t = random(MomentKind::Trigonometric, 2, 3, 7);
    let c = c_matrix(&t);
    let form = c.adjoint() * j_p(2) * &c;
    let lhs = t.g() - t.a().adjoint() * t.g() * t.a();
    assert!(rel_residual(&lhs, &form) < 1e-12);
    assert!(rel_residual(&lhs, &(&form * c64(2.0 * PI, 0.0))) > 0.5);

    let h = random(MomentKind::Hamburger, 2, 3, 7);
    let lhs = h.g() * h.a() - h.a().adjoint() * h.g();
    let c = c_matrix(&h);
    assert!(rel_residual(&lhs, &(c.adjoint() * j_p(2) * &c * c64(0.0, 2.0 * PI))) < 1e-12);
    // C₁ = −e₀*G/(√2πi) without the shift does not work.
    let r2 = c64(2f64.sqrt(), 0.0);
    let e0 = h.e(0).adjoint();
    let mut c_lit = CMat::zeros(4, h.m());
    c_lit.rows_mut(0, 2).copy_from(&(-(&e0 * h.g()) / (r2 * c64(0.0, PI))));
    c_lit.rows_mut(2, 2).copy_from(&(&e0 / r2));
    let lit = c_lit.adjoint() * j_p(2) * &c_lit;
    assert!(rel_residual(&(h.a().adjoint() * h.g() - h.g() * h.a()), &lit) > 1e-2);
    assert!(rel_residual(&lhs, &(&lit * c64(0.0, 2.0 * PI))) > 1e-2);
}

#[test]
fn suite_passes_on_structured_data() {
    let cfg = SuiteConfig::default();
    for kind in [MomentKind::Trigonometric, MomentKind::Hamburger] {
        for seed in 0..4 {
            let d = random(kind, 1 + seed as usize % 3, 1 + seed as usize, seed);
            let rs = identity_suite(&d, seed, &cfg);
            assert!(rs.len() > 10);
            assert!(all_pass(&rs), "{kind:?} seed {seed}: {:?}", failing(&rs));
        }
    }
}

#[test]
fn suite_names_failures_on_perturbed_data() {
    let m = random_moments(MomentKind::Trigonometric, ProblemDims::new(2, 3).unwrap(), 4);
    let g = build_gram(&m).unwrap().perturbed(1e-4, 4).unwrap();
    let d = DeBrangesData::new(g, Geometry::Disc);
    let rs = identity_suite(&d, 4, &SuiteConfig::default());
    let bad = failing(&rs);
    assert!(bad.iter().any(|s| s.starts_with("toeplitz_structure")));
    assert!(bad.iter().any(|s| s.starts_with("gohberg_heinig")));
}

#[test]
fn reports_serialize() {
    let r = IdentityReport::new("x", 1e-12, 1e-10, 3, 9);
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in ["name", "residual", "tolerance", "pass", "samples", "seed"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["pass"], true);
}

fn unstructured(p: usize, n: usize, seed: u64) -> GramPair {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dims = ProblemDims::new(p, n).unwrap();
    let b = gaussian_matrix(&mut rng, dims.m(), dims.m());
    let g = &b * b.adjoint() + eye(dims.m()) * c64(0.1, 0.0);
    GramPair::factor(dims, None, hermitian_part(&g)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn falsification_on_unstructured_matrices(p in 1usize..=3, n in 1usize..=4, seed in 0u64..10_000) {
        let g = unstructured(p, n, seed);
        prop_assume!(g.toeplitz_residual() > 1e-6 && g.hankel_residual() > 1e-6);
        let t = DeBrangesData::new(g.clone(), Geometry::Disc);
        let mut rs = check_toeplitz_chain(&t, c64(0.5, 0.0), seed, 10);
        rs.extend(check_toeplitz_limits(&t));
        rs.push(check_gohberg_heinig(&t));
        rs.push(check_displacement(&t, Geometry::Disc));
        prop_assert!(!all_pass(&rs));
        let h = DeBrangesData::new(g, Geometry::HalfPlane);
        let mut rs = check_hankel_chain(&h, c64(0.0, 1.0), seed, 10);
        rs.extend(check_hankel_gh_type(&h, seed, 10));
        rs.push(check_displacement(&h, Geometry::HalfPlane));
        prop_assert!(!all_pass(&rs));
    }

    #[test]
    fn structure_gate_matches_construction(p in 1usize..=3, n in 2usize..=4, seed in 0u64..10_000) {
        let dims = ProblemDims::new(p, n).unwrap();
        let t = build_gram(&random_moments(MomentKind::Trigonometric, dims, seed)).unwrap();
        let h = build_gram(&random_moments(MomentKind::Hamburger, dims, seed)).unwrap();
        prop_assert!(check_isometry_criterion(&t, MomentKind::Trigonometric).pass);
        prop_assert!(!check_isometry_criterion(&t, MomentKind::Hamburger).pass);
        prop_assert!(check_isometry_criterion(&h, MomentKind::Hamburger).pass);
        prop_assert!(!check_isometry_criterion(&h, MomentKind::Trigonometric).pass);
    }

    #[test]
    fn chains_hold_for_any_alpha(seed in 0u64..1000, ar in -0.9f64..0.9, ai in -0.4f64..0.4, br in -3.0f64..3.0, bi in 0.1f64..3.0) {
        prop_assume!(c64(ar, ai).norm() > 0.05 && c64(ar, ai).norm() < 0.95);
        let t = random(MomentKind::Trigonometric, 2, 3, seed);
        prop_assert!(all_pass(&check_toeplitz_chain(&t, c64(ar, ai), seed, 5)));
        let h = random(MomentKind::Hamburger, 2, 3, seed);
        let rs = check_hankel_chain(&h, c64(br, bi), seed, 5);
        prop_assert!(all_pass(&rs), "{:?}", failing(&rs));
    }
}
