use std::f64::consts::PI;
use std::path::Path;

use matmom::blockmat::{
    build_gram, c64, mat_to_pairs, random_moments, rel_residual, CMat, MatrixMoments, MomentKind, ProblemDims, C64,
};
use matmom::debranges::{
    density, hankel_pair, second_kind, toeplitz_pair, Construction, DeBrangesData, DeBrangesPair,
    DEFAULT_ALPHA_HALF_PLANE,
};
use matmom::identities::{identity_suite, IdentityReport, SuiteConfig};
use matmom::matpoly::{Geometry, MatrixPolynomial};
use matmom::numerics::{CircleQuadrature, LineQuadrature};
use matmom::solutions::{
    assemble_theta, chi_infinity, check_restricted_class, entropy_check, interior_grid, recover_hamburger_moments,
    recover_trig_moments, require_restricted, sample_schur, EntropyReport, SchurSpec, SolutionFunction, ThetaMatrix,
};
use serde::Serialize;

use crate::output::{emit, ensure_dir, json_string, read_text, write_density_csv, CliError, CliResult};
use crate::{Command, Common, EntropyArgs, RandomArgs, SampleArgs, SolveArgs, VerifyArgs};

const EXIT_OK: u8 = 0;
const EXIT_VERIFY: u8 = 4;
const TOL_TRIG_MOMENT: f64 = 1e-8;
const TOL_HAMBURGER_MOMENT: f64 = 1e-6;
const TOL_CARATHEODORY: f64 = -1e-10;
const TOL_ENTROPY: f64 = -1e-7;

type Blocks = Vec<Vec<Vec<[f64; 2]>>>;

pub fn run(cmd: Command) -> CliResult<u8> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::SampleSolutions(a) => sample_solutions(a),
        Command::RandomInstance(a) => random_instance(a),
        Command::Entropy(a) => entropy(a),
    }
}

fn load(path: &Path) -> CliResult<MatrixMoments> {
    Ok(MatrixMoments::from_json(&read_text(path)?)?)
}

struct Problem {
    moments: MatrixMoments,
    data: DeBrangesData,
    pair: DeBrangesPair,
    theta: ThetaMatrix,
}

fn setup(common: &Common) -> CliResult<Problem> {
    let moments = load(&common.input)?;
    let data = DeBrangesData::from_moments(&moments)?;
    let pair = match data.geometry {
        Geometry::Disc => toeplitz_pair(&data)?,
        Geometry::HalfPlane => hankel_pair(&data, common.alpha.unwrap_or(DEFAULT_ALPHA_HALF_PLANE))?,
    };
    let sk = second_kind(&data, &pair)?;
    let theta = assemble_theta(&data, &pair, &sk)?;
    Ok(Problem { moments, data, pair, theta })
}

fn default_tol(kind: MomentKind) -> f64 {
    match kind {
        MomentKind::Trigonometric => TOL_TRIG_MOMENT,
        MomentKind::Hamburger => TOL_HAMBURGER_MOMENT,
    }
}

/// Boundary sample points: equispaced angles, or `μ = tan θ` over
/// equispaced midpoints of `(−π/2, π/2)`.
fn boundary_grid(geometry: Geometry, k: usize) -> (&'static str, Vec<(f64, C64)>) {
    match geometry {
        Geometry::Disc => (
            "t",
            (0..k)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / k as f64;
                    (t, C64::from_polar(1.0, t))
                })
                .collect(),
        ),
        Geometry::HalfPlane => (
            "mu",
            (0..k)
                .map(|j| {
                    let mu = (PI * (j as f64 + 0.5) / k as f64 - PI / 2.0).tan();
                    (mu, c64(mu, 0.0))
                })
                .collect(),
        ),
    }
}

fn moment_residuals(got: &[CMat], want: &[CMat]) -> Vec<f64> {
    got.iter().zip(want).map(|(g, w)| rel_residual(g, w)).collect()
}

fn poly(f: &MatrixPolynomial) -> Blocks {
    f.to_pairs()
}

#[derive(Serialize)]
struct ThetaOut {
    t11: Blocks,
    t12: Blocks,
    t21: Blocks,
    t22: Blocks,
}

#[derive(Serialize)]
struct SolveOut {
    kind: MomentKind,
    p: usize,
    n: usize,
    min_pivot: f64,
    construction: Construction,
    eplus: Blocks,
    eminus: Blocks,
    eplus_circ: Blocks,
    eminus_circ: Blocks,
    theta: ThetaOut,
    moment_residuals: Vec<f64>,
}

fn solve(a: SolveArgs) -> CliResult<u8> {
    let pb = setup(&a.common)?;
    let kind = pb.moments.kind;
    let tol = a.tol_moment.unwrap_or(default_tol(kind));
    let recovered = match kind {
        MomentKind::Trigonometric => {
            let ks: Vec<i64> = (0..=pb.data.n() as i64).collect();
            CircleQuadrature::default()
                .fourier_coeffs(|t| density(&pb.pair, C64::from_polar(1.0, t)), &ks)?
                .value
        }
        MomentKind::Hamburger => {
            let kmax = 2 * pb.data.n();
            LineQuadrature::default()
                .integrate(|mu| {
                    let d = density(&pb.pair, c64(mu, 0.0))?;
                    Ok((0..=kmax).map(|k| &d * c64(mu.powi(k as i32), 0.0)).collect())
                })?
                .value
        }
    };
    let residuals = moment_residuals(&recovered, &pb.moments.blocks);

    let sk = second_kind(&pb.data, &pb.pair)?;
    let out = SolveOut {
        kind,
        p: pb.data.p(),
        n: pb.data.n(),
        min_pivot: pb.data.gram.min_pivot,
        construction: pb.pair.construction,
        eplus: poly(&pb.pair.eplus),
        eminus: poly(&pb.pair.eminus),
        eplus_circ: poly(&sk.eplus),
        eminus_circ: poly(&sk.eminus),
        theta: ThetaOut {
            t11: poly(&pb.theta.t11),
            t12: poly(&pb.theta.t12),
            t21: poly(&pb.theta.t21),
            t22: poly(&pb.theta.t22),
        },
        moment_residuals: residuals.clone(),
    };
    ensure_dir(&a.output)?;
    emit(Some(&a.output.join("pair.json")), &json_string(&out))?;
    let (coord, grid) = boundary_grid(pb.data.geometry, a.grid);
    let rows = grid
        .iter()
        .map(|&(x, z)| Ok((x, density(&pb.pair, z)?)))
        .collect::<CliResult<Vec<_>>>()?;
    write_density_csv(&a.output.join("density.csv"), coord, &rows)?;

    println!("{:>3}  {:>12}", "k", "residual");
    for (k, r) in residuals.iter().enumerate() {
        println!("{k:>3}  {r:>12.3e}");
    }
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    println!("max moment residual {worst:.3e} (tol {tol:e}), smallest pivot {:.3e}", pb.data.gram.min_pivot);
    Ok(if worst <= tol { EXIT_OK } else { EXIT_VERIFY })
}

#[derive(Serialize)]
struct VerifyOut {
    kind: MomentKind,
    p: usize,
    n: usize,
    min_pivot: f64,
    seed: u64,
    tol_identity: f64,
    perturb: Option<f64>,
    all_pass: bool,
    reports: Vec<IdentityReport>,
}

fn verify(a: VerifyArgs) -> CliResult<u8> {
    let moments = load(&a.common.input)?;
    let mut gram = build_gram(&moments)?;
    if let Some(eps) = a.perturb {
        gram = gram.perturbed(eps, a.common.seed)?;
    }
    let geometry = match moments.kind {
        MomentKind::Trigonometric => Geometry::Disc,
        MomentKind::Hamburger => Geometry::HalfPlane,
    };
    let data = DeBrangesData::new(gram, geometry);
    let cfg = SuiteConfig {
        samples: a.samples,
        alpha: a.common.alpha,
        tol_identity: a.tol_identity,
        ..SuiteConfig::default()
    };
    let reports = identity_suite(&data, a.common.seed, &cfg);
    let all_pass = reports.iter().all(|r| r.pass);
    for r in reports.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {}: residual {:e} > {:e}", r.name, r.residual, r.tolerance);
    }
    let out = VerifyOut {
        kind: moments.kind,
        p: data.p(),
        n: data.n(),
        min_pivot: data.gram.min_pivot,
        seed: a.common.seed,
        tol_identity: a.tol_identity,
        perturb: a.perturb,
        all_pass,
        reports,
    };
    emit(a.output.as_deref(), &json_string(&out))?;
    Ok(if all_pass { EXIT_OK } else { EXIT_VERIFY })
}

fn parse_spec(s: &str) -> CliResult<SchurSpec> {
    serde_json::from_str(s).map_err(|e| CliError::Lib(matmom::Error::Input(format!("Schur spec {s:?}: {e}"))))
}

fn default_omega(geometry: Geometry) -> C64 {
    match geometry {
        Geometry::Disc => c64(0.3, 0.0),
        Geometry::HalfPlane => c64(0.0, 1.0),
    }
}

#[derive(Serialize)]
struct SolutionOut {
    index: usize,
    spec: SchurSpec,
    caratheodory_min_eig: f64,
    restricted_class: Option<[f64; 3]>,
    moments: Option<Blocks>,
    moment_residual: Option<f64>,
    first_free_moment: Option<Vec<Vec<[f64; 2]>>>,
    moment_error: Option<String>,
    entropy: Option<EntropyReport>,
    entropy_error: Option<String>,
    density_file: String,
}

#[derive(Serialize)]
struct SampleOut {
    kind: MomentKind,
    omega: [f64; 2],
    tol_moment: f64,
    solutions: Vec<SolutionOut>,
}

fn sample_solutions(a: SampleArgs) -> CliResult<u8> {
    let pb = setup(&a.common)?;
    let geometry = pb.data.geometry;
    let kind = pb.moments.kind;
    let tol = a.tol_moment.unwrap_or(default_tol(kind));
    let omega = a.omega.unwrap_or(default_omega(geometry));
    geometry.require_inside(omega)?;
    let specs = if a.schur.is_empty() {
        vec![SchurSpec::Zero]
    } else {
        a.schur.iter().map(|s| parse_spec(s)).collect::<CliResult<Vec<_>>>()?
    };
    ensure_dir(&a.output)?;
    let (coord, grid) = boundary_grid(geometry, a.grid);
    let chi_inf = match geometry {
        Geometry::HalfPlane => Some(chi_infinity(&pb.pair)?.chi_inf),
        Geometry::Disc => None,
    };
    let n = pb.data.n();
    let constrained = pb.moments.blocks.len();
    let mut ok = true;
    let mut sols = Vec::new();
    for (index, spec) in specs.into_iter().enumerate() {
        let s = sample_schur(&spec, pb.data.p(), geometry, a.common.seed.wrapping_add(index as u64))?;
        let restricted_class = chi_inf.as_ref().map(|c| check_restricted_class(&s, c).values);
        if geometry == Geometry::HalfPlane {
            require_restricted(&s, &pb.pair)?;
        }
        let sol = SolutionFunction::new(pb.theta.clone(), s.clone())?;
        let car = sol.caratheodory_min_eig(&interior_grid(geometry))?;
        ok &= car >= TOL_CARATHEODORY;

        let rec = match kind {
            MomentKind::Trigonometric => recover_trig_moments(&sol, n + 1, &CircleQuadrature::default()),
            MomentKind::Hamburger => recover_hamburger_moments(&sol, 2 * n + 1, &LineQuadrature::default()),
        };
        let (moments, moment_residual, first_free_moment, moment_error) = match rec {
            Ok(q) => {
                let res = moment_residuals(&q.value[..constrained], &pb.moments.blocks)
                    .into_iter()
                    .fold(0.0, f64::max);
                ok &= res <= tol;
                (
                    Some(q.value[..constrained].iter().map(mat_to_pairs).collect()),
                    Some(res),
                    Some(mat_to_pairs(&q.value[constrained])),
                    None,
                )
            }
            Err(e @ (matmom::Error::BoundaryDegenerate(_) | matmom::Error::Nonconvergence { .. })) => {
                (None, None, None, Some(e.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        let (entropy, entropy_error) = match entropy_check(&pb.pair, &pb.theta, &s, omega, &CircleQuadrature::default()) {
            Ok(r) => {
                ok &= r.gap >= TOL_ENTROPY;
                (Some(r), None)
            }
            Err(e) => (None, Some(e.to_string())),
        };

        let file = format!("density_{index}.csv");
        let rows = grid
            .iter()
            .map(|&(x, z)| Ok((x, sol.boundary_density(z)?)))
            .collect::<CliResult<Vec<_>>>()?;
        write_density_csv(&a.output.join(&file), coord, &rows)?;
        sols.push(SolutionOut {
            index,
            spec,
            caratheodory_min_eig: car,
            restricted_class,
            moments,
            moment_residual,
            first_free_moment,
            moment_error,
            entropy,
            entropy_error,
            density_file: file,
        });
    }
    for s in &sols {
        let res = s.moment_residual.map(|r| format!("{r:.3e}")).unwrap_or_else(|| "-".into());
        let gap = s.entropy.as_ref().map(|e| format!("{:.3e}", e.gap)).unwrap_or_else(|| "-".into());
        println!("S[{}]: min eig Re Phi {:.3e}, moment residual {res}, entropy gap {gap}", s.index, s.caratheodory_min_eig);
    }
    let out = SampleOut { kind, omega: [omega.re, omega.im], tol_moment: tol, solutions: sols };
    emit(Some(&a.output.join("solutions.json")), &json_string(&out))?;
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

fn random_instance(a: RandomArgs) -> CliResult<u8> {
    let kind = match a.kind.as_str() {
        "hamburger" => MomentKind::Hamburger,
        _ => MomentKind::Trigonometric,
    };
    let dims = ProblemDims::new(a.p, a.n)?;
    let mut text = random_moments(kind, dims, a.seed).to_json();
    text.push('\n');
    emit(a.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EntropyOut {
    omega: [f64; 2],
    spec: SchurSpec,
    equality_parameter: Vec<Vec<[f64; 2]>>,
    report: EntropyReport,
}

fn entropy(a: EntropyArgs) -> CliResult<u8> {
    let pb = setup(&a.common)?;
    let geometry = pb.data.geometry;
    let omega = a.omega.unwrap_or(default_omega(geometry));
    let spec = match &a.schur {
        Some(s) => parse_spec(s)?,
        None => SchurSpec::Zero,
    };
    let s = sample_schur(&spec, pb.data.p(), geometry, a.common.seed)?;
    let report = entropy_check(&pb.pair, &pb.theta, &s, omega, &CircleQuadrature::default())?;
    let target = -pb.pair.chi(omega)?.adjoint();
    let pass = report.gap >= TOL_ENTROPY;
    let out = EntropyOut { omega: [omega.re, omega.im], spec, equality_parameter: mat_to_pairs(&target), report };
    emit(a.output.as_deref(), &json_string(&out))?;
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}
