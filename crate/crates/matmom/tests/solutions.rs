use matmom::Error;
use matmom::blockmat::*;
use matmom::debranges::*;
use matmom::matpoly::Geometry;
use matmom::numerics::{CircleQuadrature, LineQuadrature};
use matmom::solutions::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalar_data(kind: MomentKind, v: &[f64]) -> DeBrangesData {
    let n = match kind {
        MomentKind::Trigonometric => v.len() - 1,
        MomentKind::Hamburger => (v.len() - 1) / 2,
    };
    let blocks = v.iter().map(|&x| CMat::from_element(1, 1, c64(x, 0.0))).collect();
    let m = MatrixMoments::new(kind, ProblemDims::new(1, n).unwrap(), blocks).unwrap();
    DeBrangesData::from_moments(&m).unwrap()
}

fn setup(d: &DeBrangesData) -> (DeBrangesPair, ThetaMatrix) {
    let pair = match d.geometry {
        Geometry::Disc => toeplitz_pair(d).unwrap(),
        Geometry::HalfPlane => hankel_pair(d, c64(0.0, 1.0)).unwrap(),
    };
    let sk = second_kind(d, &pair).unwrap();
    let theta = assemble_theta(d, &pair, &sk).unwrap();
    (pair, theta)
}

fn random(kind: MomentKind, p: usize, n: usize, seed: u64) -> (MatrixMoments, DeBrangesData) {
    let m = random_moments(kind, ProblemDims::new(p, n).unwrap(), seed);
    let d = DeBrangesData::from_moments(&m).unwrap();
    (m, d)
}

fn sc(v: f64) -> CMat {
    CMat::from_element(1, 1, c64(v, 0.0))
}

#[test]
fn trivial_theta() {
    let d = scalar_data(MomentKind::Trigonometric, &[1.0, 0.0]);
    let (_, th) = setup(&d);
    let r = 1.0 / 2f64.sqrt();
    for l in [c64(0.3, 0.2), c64(-1.5, 0.7)] {
        let want = CMat::from_row_slice(2, 2, &[-l * l * r, c64(r, 0.0), l * l * r, c64(r, 0.0)]);
        assert!((th.eval(l) - want).norm() < 1e-15);
    }
    assert!(inverse(&th.t22.eval(c64(0.0, 0.0))).is_some());
}

#[test]
fn trivial_lft_examples() {
    let d = scalar_data(MomentKind::Trigonometric, &[1.0, 0.0]);
    let (_, th) = setup(&d);
    let zero = SchurParameter::zero(1, Geometry::Disc);
    let s = 0.4;
    let cs = SchurParameter::constant(sc(s), Geometry::Disc);
    for w in [c64(0.0, 0.0), c64(0.5, -0.2), c64(-0.3, 0.6)] {
        assert!((lft_eval(&th, &zero, w).unwrap()[(0, 0)] - 1.0).norm() < 1e-15);
        let want = (1.0 - s * w * w) / (1.0 + s * w * w);
        assert!((lft_eval(&th, &cs, w).unwrap()[(0, 0)] - want).norm() < 1e-14);
    }
    let sol = SolutionFunction::new(th, cs).unwrap();
    for k in 0..16 {
        let t = 0.4 * k as f64;
        let z = C64::from_polar(1.0, t);
        let e = C64::from_polar(s, 2.0 * t);
        let want = ((1.0 - e) / (1.0 + e)).re;
        assert!((sol.boundary_density(z).unwrap()[(0, 0)].re - want).abs() < 1e-14);
    }
}

#[test]
fn trivial_moment_recovery() {
    let d = scalar_data(MomentKind::Trigonometric, &[1.0, 0.0]);
    let (_, th) = setup(&d);
    for s in [-0.7, 0.0, 0.3, 0.95] {
        let sol = SolutionFunction::new(th.clone(), SchurParameter::constant(sc(s), Geometry::Disc)).unwrap();
        let h = recover_trig_moments(&sol, 2, &CircleQuadrature::default()).unwrap().value;
        assert!((h[0][(0, 0)] - 1.0).norm() < 1e-10);
        assert!(h[1][(0, 0)].norm() < 1e-10);
        // (1−se^{2it})/(1+se^{2it}) has ĥ₂ = −s
        assert!((h[2][(0, 0)] + s).norm() < 1e-10);
    }
    let h = scalar_data(MomentKind::Hamburger, &[1.0, 0.0, 1.0]);
    let (_, th) = setup(&h);
    let line = LineQuadrature::default();
    for s in [0.0, 0.5] {
        let sol = SolutionFunction::new(th.clone(), SchurParameter::constant(sc(s), Geometry::HalfPlane)).unwrap();
        let m = recover_hamburger_moments(&sol, 2, &line).unwrap().value;
        for (k, want) in [(0, 1.0), (1, 0.0), (2, 1.0)] {
            assert!((m[k][(0, 0)] - want).norm() < 1e-8, "s={s} k={k}");
        }
    }
}

#[test]
fn trivial_chi() {
    let d = scalar_data(MomentKind::Hamburger, &[1.0, 0.0, 1.0]);
    let (pair, _) = setup(&d);
    let c = chi_infinity(&pair).unwrap();
    assert!((c.chi_inf[(0, 0)] + 1.0).norm() < 1e-14);
    // χ(iν) + 1 ≈ 4/ν
    assert!((c.crosscheck[0] - 4e-3).abs() < 1e-5 && c.crosscheck[1] < 1e-3);
    let i = c64(0.0, 1.0);
    for l in [c64(0.5, 0.5), c64(-2.0, 1.0)] {
        let want = -((l - i) / (l + i)).powi(2);
        assert!((pair.chi(l).unwrap()[(0, 0)] - want).norm() < 1e-14);
    }
}

#[test]
fn restricted_class_examples() {
    let (_, d) = random(MomentKind::Hamburger, 2, 2, 3);
    let (pair, _) = setup(&d);
    let chi = chi_infinity(&pair).unwrap().chi_inf;
    assert!(check_restricted_class(&SchurParameter::zero(2, Geometry::HalfPlane), &chi).in_class);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s = SchurParameter::constant(random_contraction(&mut rng, 2, 0.9), Geometry::HalfPlane);
    assert!(check_restricted_class(&s, &chi).in_class);
    let bad = SchurParameter::constant(-chi.adjoint(), Geometry::HalfPlane);
    assert!(!check_restricted_class(&bad, &chi).in_class);
    assert!(matches!(require_restricted(&bad, &pair), Err(Error::RestrictedClass(_))));
}

#[test]
fn schur_sampling() {
    let z = sample_schur(&SchurSpec::Zero, 2, Geometry::Disc, 0).unwrap();
    assert_eq!(z.eval(c64(0.3, 0.1)).norm(), 0.0);
    let c = sample_schur(&SchurSpec::Constant { matrix: None, sigma_max: Some(0.8) }, 3, Geometry::Disc, 5).unwrap();
    let cm = c.as_constant().unwrap();
    let sv = cm.clone().svd(false, false).singular_values;
    assert!((sv.max() - 0.8).abs() < 1e-12);
    let b = sample_schur(&SchurSpec::BlaschkeUnitary { alpha: [0.0, 1.0], unitary: None }, 2, Geometry::HalfPlane, 5).unwrap();
    for k in 0..10 {
        let mu = c64(-5.0 + k as f64, 0.0);
        assert!((spectral_norm(&b.eval(mu)) - 1.0).abs() < 1e-12);
    }
    let r = sample_schur(&SchurSpec::Constant { matrix: None, sigma_max: Some(1.5) }, 2, Geometry::Disc, 0);
    assert!(matches!(r, Err(Error::NotContractive(_))));
    let m = vec![vec![[2.0, 0.0]]];
    let r = sample_schur(&SchurSpec::Constant { matrix: Some(m), sigma_max: None }, 1, Geometry::Disc, 0);
    assert!(matches!(r, Err(Error::NotContractive(_))));
    let spec: SchurSpec = serde_json::from_str(r#"{"type":"product","factors":[{"type":"zero"}]}"#).unwrap();
    assert!(matches!(spec, SchurSpec::Product { .. }));
}

#[test]
fn lft_at_zero_is_phi_e() {
    for kind in [MomentKind::Trigonometric, MomentKind::Hamburger] {
        let (_, d) = random(kind, 2, 3, 12);
        let (pair, th) = setup(&d);
        let zero = SchurParameter::zero(2, d.geometry);
        for w in matmom::identities::Sampler::new(3).interior_points(d.geometry, 10) {
            let a = lft_eval(&th, &zero, w).unwrap();
            let b = phi_e(&d, &pair, w).unwrap();
            assert!(rel_residual(&a, &b) < 1e-9);
        }
        // Boundary density for S = 0 is the de Branges density.
        let sol = SolutionFunction::new(th, zero).unwrap();
        for z in matmom::identities::boundary_points(d.geometry, 16) {
            assert!(rel_residual(&sol.boundary_density(z).unwrap(), &density(&pair, z).unwrap()) < 1e-10);
        }
    }
}

#[test]
fn factorized_density_matches_radial_limit() {
    for kind in [MomentKind::Trigonometric, MomentKind::Hamburger] {
        let (_, d) = random(kind, 2, 2, 4);
        let (_, th) = setup(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = SchurParameter::constant(random_contraction(&mut rng, 2, 0.6), d.geometry);
        let sol = SolutionFunction::new(th, s).unwrap();
        for z in matmom::identities::boundary_points(d.geometry, 16) {
            let f = sol.boundary_density(z).unwrap();
            let r = sol.radial_density(z).unwrap();
            assert!(rel_residual(&f, &r) < 1e-7, "{kind:?} at {z}: {:e}", rel_residual(&f, &r));
            assert!(min_hermitian_eig(&f) >= -1e-12);
        }
    }
}

#[test]
fn unit_boundary_norm_blocks_moment_recovery() {
    let (_, d) = random(MomentKind::Trigonometric, 1, 2, 4);
    let (_, th) = setup(&d);
    let s = sample_schur(&SchurSpec::BlaschkeUnitary { alpha: [0.2, 0.1], unitary: None }, 1, Geometry::Disc, 1).unwrap();
    let sol = SolutionFunction::new(th, s).unwrap();
    let r = recover_trig_moments(&sol, 2, &CircleQuadrature::default());
    assert!(matches!(r, Err(Error::BoundaryDegenerate(_))));
}

#[test]
fn non_uniqueness_witness() {
    let (m, d) = random(MomentKind::Trigonometric, 2, 3, 8);
    let (_, th) = setup(&d);
    let q = CircleQuadrature::default();
    let mut next = Vec::new();
    for s in [0.5, -0.5] {
        let sol = SolutionFunction::new(th.clone(), SchurParameter::constant(eye(2) * c64(s, 0.0), Geometry::Disc)).unwrap();
        let h = recover_trig_moments(&sol, 4, &q).unwrap().value;
        for k in 0..=3 {
            assert!(rel_residual(&h[k], &m.blocks[k]) < 1e-9);
        }
        next.push(h[4].clone());
    }
    assert!((&next[0] - &next[1]).norm() > 1e-3);
}

#[test]
fn entropy_trivial_pin() {
    let d = scalar_data(MomentKind::Trigonometric, &[1.0, 0.0]);
    let (pair, th) = setup(&d);
    let r = entropy_check(&pair, &th, &SchurParameter::zero(1, Geometry::Disc), c64(0.0, 0.0), &CircleQuadrature::default()).unwrap();
    assert!((r.lhs - 2f64.ln()).abs() < 1e-13);
    assert!((r.rhs - 2f64.ln()).abs() < 1e-13);
    assert!(r.equality_case);
}

#[test]
fn entropy_gap_shrinks_towards_equality() {
    for (kind, w) in [(MomentKind::Trigonometric, c64(0.3, 0.0)), (MomentKind::Hamburger, c64(0.5, 0.8))] {
        let (_, d) = random(kind, 2, 2, 10);
        let (pair, th) = setup(&d);
        let target = -pair.chi(w).unwrap().adjoint();
        let mut gaps = Vec::new();
        for c in [0.0, 0.5, 1.0] {
            let s = SchurParameter::constant(&target * c64(c, 0.0), d.geometry);
            gaps.push(entropy_check(&pair, &th, &s, w, &CircleQuadrature::default()).unwrap().gap);
        }
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
        assert!(gaps[2].abs() < 1e-6);
    }
}

#[test]
fn shape_and_region_mismatch() {
    let (_, d) = random(MomentKind::Trigonometric, 2, 2, 1);
    let (_, th) = setup(&d);
    assert!(matches!(SolutionFunction::new(th.clone(), SchurParameter::zero(3, Geometry::Disc)), Err(Error::ShapeMismatch(_))));
    assert!(SolutionFunction::new(th, SchurParameter::zero(2, Geometry::HalfPlane)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn caratheodory_and_moments(seed in 0u64..500, sm in 0.0f64..0.95, trig in any::<bool>()) {
        let kind = if trig { MomentKind::Trigonometric } else { MomentKind::Hamburger };
        let (m, d) = random(kind, 1 + (seed % 2) as usize, 1 + (seed % 3) as usize, seed);
        let (pair, th) = setup(&d);
        let s = sample_schur(&SchurSpec::Constant { matrix: None, sigma_max: Some(sm) }, d.p(), d.geometry, seed).unwrap();
        if !trig {
            prop_assume!(require_restricted(&s, &pair).is_ok());
        }
        let sol = SolutionFunction::new(th, s).unwrap();
        prop_assert!(sol.caratheodory_min_eig(&interior_grid(d.geometry)).unwrap() >= -1e-10);
        if trig {
            let h = recover_trig_moments(&sol, d.n(), &CircleQuadrature::default()).unwrap().value;
            for k in 0..=d.n() {
                prop_assert!(rel_residual(&h[k], &m.blocks[k]) <= 1e-8);
            }
        } else {
            let h = recover_hamburger_moments(&sol, 2 * d.n(), &LineQuadrature::default()).unwrap().value;
            for k in 0..=2 * d.n() {
                prop_assert!(rel_residual(&h[k], &m.blocks[k]) <= 1e-6);
            }
        }
    }

    #[test]
    fn entropy_inequality(seed in 0u64..500, sm in 0.05f64..0.95, trig in any::<bool>()) {
        let kind = if trig { MomentKind::Trigonometric } else { MomentKind::Hamburger };
        let (_, d) = random(kind, 2, 2, seed);
        let (pair, th) = setup(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = SchurParameter::constant(random_contraction(&mut rng, 2, sm), d.geometry);
        let w = if trig { c64(0.3, 0.0) } else { c64(0.0, 1.0) };
        let r = entropy_check(&pair, &th, &s, w, &CircleQuadrature::default()).unwrap();
        prop_assert!(r.gap >= -1e-7);
    }

    #[test]
    fn theta_j_contractive_inside(seed in 0u64..500, trig in any::<bool>(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let kind = if trig { MomentKind::Trigonometric } else { MomentKind::Hamburger };
        let (_, d) = random(kind, 2, 2, seed);
        let (_, th) = setup(&d);
        let w = if trig { C64::from_polar(0.95 * a, 6.28 * b) } else { c64(6.0 * a - 3.0, 0.05 + 3.0 * b) };
        let t = th.eval(w);
        let diff = &t * sig_j(2) * t.adjoint() - j_p(2);
        prop_assert!(max_hermitian_eig(&diff) < 0.0);
    }
}
