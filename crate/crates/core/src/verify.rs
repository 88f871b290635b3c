//! Claim-by-claim verification suites. Each suite returns report rows; a
//! row passes when its measured value matches the theoretical one within
//! the stated tolerance, or stays below it for bound claims.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constructions::{
    build_fem2d_with, build_hat2d, build_hat2d_unguarded, build_monomial, build_polynomial_with,
    build_psi_ell, build_x2_hat, build_xy_hat, compose_shift, fem_to_placements, net_add,
    net_compose_modified, skip_to_mlp, Monomial, Polynomial, HAT_WIDTH, MONOMIAL_WIDTH,
};
use crate::error::{Error, Result};
use crate::fem2d::{fem_eval, hat_ref, interp_xy, psi_ref, FemFunction2D, UniformMesh2D};
use crate::hb1d::{hierarchical_coeffs, interpolate_1d, sample};
use crate::net::{random_skip_network, ReluNet, SkipNetwork};
use crate::parallel::Execution;
use crate::pwl::{
    extract_pwl_with, grid_vertices, hypotenuse_midpoints, random_points, sup_abs_sampled,
    sup_error_sampled, sup_error_vs_quadratic, tensor_grid, w1inf_error_vs_quadratic, SupReport,
};

/// How a row's measured value is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// `|measured - theoretical| <= tol`.
    Abs(f64),
    /// `measured <= theoretical + tol`.
    Upper(f64),
}

impl Tolerance {
    pub fn accepts(self, theoretical: f64, measured: f64) -> bool {
        match self {
            Tolerance::Abs(t) => (measured - theoretical).abs() <= t,
            Tolerance::Upper(t) => measured <= theoretical + t,
        }
    }
}

/// One verified claim.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub claim_id: String,
    pub anchor: String,
    pub theoretical: f64,
    pub measured: f64,
    pub witness: Vec<f64>,
    pub tolerance: Tolerance,
    pub pass: bool,
    pub runtime_ms: f64,
}

pub const CSV_HEADER: &str =
    "claim_id,paper_anchor,theoretical,measured,witness,tolerance,pass,runtime_ms";

/// Float formatting shared by every emitted table: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ReportRow {
    pub fn to_csv(&self) -> String {
        let witness: Vec<String> = self.witness.iter().map(|&v| fmt_f64(v)).collect();
        let tol = match self.tolerance {
            Tolerance::Abs(t) => format!("abs:{}", fmt_f64(t)),
            Tolerance::Upper(t) => format!("upper:{}", fmt_f64(t)),
        };
        format!(
            "{},{},{},{},{},{},{},{:.3}",
            csv_field(&self.claim_id),
            csv_field(&self.anchor),
            fmt_f64(self.theoretical),
            fmt_f64(self.measured),
            witness.join(";"),
            tol,
            self.pass,
            self.runtime_ms
        )
    }
}

/// Header plus one line per row, LF terminated.
pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.to_csv());
    }
    out
}

/// Available suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    X2,
    Interp,
    Xy,
    Identity,
    Monomial,
    Polynomial,
    Psi,
    Hat2d,
    Fem,
    Convert,
    Algebra,
    All,
}

impl Suite {
    pub const EACH: [Suite; 11] = [
        Suite::X2,
        Suite::Interp,
        Suite::Xy,
        Suite::Identity,
        Suite::Monomial,
        Suite::Polynomial,
        Suite::Psi,
        Suite::Hat2d,
        Suite::Fem,
        Suite::Convert,
        Suite::Algebra,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::X2 => "x2",
            Suite::Interp => "interp",
            Suite::Xy => "xy",
            Suite::Identity => "identity",
            Suite::Monomial => "monomial",
            Suite::Polynomial => "polynomial",
            Suite::Psi => "psi",
            Suite::Hat2d => "hat2d",
            Suite::Fem => "fem",
            Suite::Convert => "convert",
            Suite::Algebra => "algebra",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| Error::arg(format!("unknown suite '{s}'")))
    }
}

/// Knobs shared by all suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyParams {
    /// Highest level checked; `None` uses each suite's default.
    pub max_level: Option<usize>,
    pub seed: u64,
    /// Number of random networks in the conversion suite.
    pub trials: usize,
    /// Random points per sampled sup-norm.
    pub samples: usize,
    pub exec: Execution,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            max_level: None,
            seed: 0,
            trials: 20,
            samples: 100_000,
            exec: Execution::default(),
        }
    }
}

impl VerifyParams {
    fn level(&self, default: usize) -> usize {
        self.max_level.unwrap_or(default)
    }

    /// Independent seed for one sub-task.
    fn seed_for(&self, tag: u64) -> u64 {
        self.seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }
}

/// Run one suite, or every suite for [`Suite::All`].
pub fn run_suite(suite: Suite, params: &VerifyParams) -> Result<Vec<ReportRow>> {
    match suite {
        Suite::X2 => verify_x2(params),
        Suite::Interp => verify_interp(params),
        Suite::Xy => verify_xy(params),
        Suite::Identity => verify_identity(params),
        Suite::Monomial => verify_monomial(params),
        Suite::Polynomial => verify_polynomial(params),
        Suite::Psi => verify_psi(params),
        Suite::Hat2d => verify_hat2d(params),
        Suite::Fem => verify_fem(params),
        Suite::Convert => verify_convert(params),
        Suite::Algebra => verify_algebra(params),
        Suite::All => {
            let mut rows = Vec::new();
            for s in Suite::EACH {
                rows.extend(run_suite(s, params)?);
            }
            Ok(rows)
        }
    }
}

struct Timer(Instant);

impl Timer {
    fn start() -> Self {
        Timer(Instant::now())
    }

    fn row(
        &self,
        claim_id: String,
        anchor: &str,
        theoretical: f64,
        measured: f64,
        witness: Vec<f64>,
        tolerance: Tolerance,
    ) -> ReportRow {
        ReportRow {
            claim_id,
            anchor: anchor.to_string(),
            theoretical,
            measured,
            witness,
            tolerance,
            pass: tolerance.accepts(theoretical, measured),
            runtime_ms: self.0.elapsed().as_secs_f64() * 1e3,
        }
    }

    fn sup_row(&self, id: String, anchor: &str, theoretical: f64, r: SupReport, tol: Tolerance) -> ReportRow {
        self.row(id, anchor, theoretical, r.value, r.witness, tol)
    }
}

fn exp2(e: f64) -> f64 {
    e.exp2()
}

const X2_ANCHOR: &str = "x^2 network: exact sup error 2^(-2L)";

/// Exact sup error of `ŝ_L` against x² on `[-1, 1]`.
pub fn verify_x2(params: &VerifyParams) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for l in 1..=params.level(8) {
        let t = Timer::start();
        let f = extract_pwl_with(&build_x2_hat(l)?, -1.0, 1.0, params.exec)?;
        let r = sup_error_vs_quadratic(&f, -1.0, 1.0)?;
        rows.push(t.sup_row(format!("x2.linf.L{l}"), X2_ANCHOR, exp2(-2.0 * l as f64), r, Tolerance::Abs(1e-12)));
    }
    Ok(rows)
}

/// W^{1,∞} seminorm of `ŝ_L - x²`, 1D interpolation errors and the
/// hierarchical surplus identity.
pub fn verify_interp(params: &VerifyParams) -> Result<Vec<ReportRow>> {
    let max = params.level(8);
    let mut rows = Vec::new();
    for l in 1..=max {
        let t = Timer::start();
        let f = extract_pwl_with(&build_x2_hat(l)?, -1.0, 1.0, params.exec)?;
        let r = w1inf_error_vs_quadratic(&f, -1.0, 1.0)?;
        rows.push(t.sup_row(
            format!("x2.w1inf.L{l}"),
            "x^2 network: W1,inf seminorm <= 2^(-(L-1)), attained",
            exp2(-(l as f64 - 1.0)),
            r,
            Tolerance::Abs(1e-12),
        ));
    }
    for l in 0..=max as u32 {
        let t = Timer::start();
        let f = interpolate_1d(&sample(|x| x * x, l)?, l)?;
        let r = sup_error_vs_quadratic(&f, 0.0, 1.0)?;
        rows.push(t.sup_row(
            format!("interp.linf.L{l}"),
            "1D interpolant of x^2: sup error 2^(-2(L+1))",
            exp2(-2.0 * (l as f64 + 1.0)),
            r,
            Tolerance::Abs(1e-12),
        ));
        let t = Timer::start();
        let r = w1inf_error_vs_quadratic(&f, 0.0, 1.0)?;
        rows.push(t.sup_row(
            format!("interp.w1inf.L{l}"),
            "1D interpolant of x^2: W1,inf seminorm 2^(-L)",
            exp2(-(l as f64)),
            r,
            Tolerance::Abs(1e-12),
        ));
    }
    let levels = params.level(10).max(10) as u32;
    let coeffs = hierarchical_coeffs(|x| x * x, levels)?;
    for (k, level) in coeffs.iter().enumerate() {
        let t = Timer::start();
        let want = -exp2(-2.0 * (k as f64 + 1.0));
        let (mut worst, mut at) = (0.0, 0usize);
        for (j, mu) in level.iter().enumerate() {
            let gap = (mu - want).abs();
            if gap > worst {
                worst = gap;
                at = j;
            }
        }
        let node = (2 * at + 1) as f64 * exp2(-(k as f64 + 1.0));
        rows.push(t.row(
            format!("surplus.L{}", k + 1),
            "hierarchical surplus of x^2 equals -h_l^2",
            0.0,
            worst,
            vec![node],
            Tolerance::Abs(1e-14),
        ));
    }
    Ok(rows)
}

fn scaled(points: Vec<Vec<f64>>, m: f64) -> Vec<Vec<f64>> {
    points
        .into_iter()
        .map(|p| p.into_iter().map(|v| v * m).collect())
        .collect()
}

/// Product network error, range and vanishing on the axes.
pub fn verify_xy(params: &VerifyParams) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for (mi, m) in [1.0, 2.5].into_iter().enumerate() {
        let dom = [(-m, m), (-m, m)];
        for l in 2..=params.level(6) {
            let net = build_xy_hat(l, m)?;
            let f = |p: &[f64]| net.eval(p);
            let mesh = UniformMesh2D::reference(l as u32 - 2)?;
            let mut structured = scaled(hypotenuse_midpoints(&mesh), m);
            structured.extend(scaled(grid_vertices(&mesh), m));
            let seed = params.seed_for(100 + 10 * mi as u64 + l as u64);

            let t = Timer::start();
            let r = sup_error_sampled(f, |p| Ok(p[0] * p[1]), &dom, &structured, params.samples, seed, params.exec)?;
            rows.push(t.sup_row(
                format!("xy.err.M{m}.L{l}"),
                "product network: sup error M^2 2^(-2(L-1))",
                m * m * exp2(-2.0 * (l as f64 - 1.0)),
                r,
                Tolerance::Abs(1e-10),
            ));

            let t = Timer::start();
            let r = sup_abs_sampled(f, &dom, &structured, params.samples, seed, params.exec)?;
            rows.push(t.sup_row(
                format!("xy.range.M{m}.L{l}"),
                "product network: |m_L| <= M^2",
                m * m,
                r,
                Tolerance::Upper(1e-12),
            ));

            let t = Timer::start();
            let axis: Vec<Vec<f64>> = random_points(&[(-m, m)], 1000, seed ^ 1)
                .into_iter()
                .flat_map(|p| [vec![p[0], 0.0], vec![0.0, p[0]]])
                .collect();
            let r = sup_abs_sampled(f, &dom, &axis, 0, seed, params.exec)?;
            rows.push(t.sup_row(
                format!("xy.axes.M{m}.L{l}"),
                "product network vanishes on both axes",
                0.0,
                r,
                Tolerance::Abs(1e-12),
            ));
        }
    }
    Ok(rows)
}

/// `m_(L+2)` equals the mesh interpolant `Π_L m`.
pub fn verify_identity(params: &VerifyParams) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for l in 0..=params.level(5) {
        let t = Timer::start();
        let net = build_xy_hat(l + 2, 1.0)?;
        let structured = grid_vertices(&UniformMesh2D::reference(l as u32 + 1)?);
        let r = sup_error_sampled(
            |p| net.eval(p),
            |p| interp_xy(l as u32, p[0], p[1]),
            &[(-1.0, 1.0), (-1.0, 1.0)],
            &structured,
            params.samples,
            params.seed_for(200 + l as u64),
            params.exec,
        )?;
        rows.push(t.sup_row(
            format!("identity.L{l}"),
            "product network m_(L+2) equals mesh interpolant Pi_L m",
            0.0,
            r,
            Tolerance::Abs(1e-12),
        ));
    }
    Ok(rows)
}

fn spread(d: usize, p: u32) -> Vec<u32> {
    (0..d).map(|i| p / d as u32 + u32::from((i as u32) < p % d as u32)).collect()
}

/// Exponent vectors checked for dimension `d` and degree `p`: a pure power,
/// an evenly spread one, and a seeded random one.
pub fn monomial_cases(d: usize, p: u32, seed: u64) -> Vec<Vec<u32>> {
    let mut pure = vec![0; d];
    pure[0] = p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((d as u64) << 8 | p as u64));
    let mut random = vec![0; d];
    for _ in 0..p {
        random[rng.random_range(0..d)] += 1;
    }
    let mut out = vec![pure];
    for k in [spread(d, p), random] {
        if !out.contains(&k) {
            out.push(k);
        }
    }
    out
}

fn exps_label(k: &[u32]) -> String {
    k.iter().map(u32::to_string).collect::<Vec<_>>().join("-")
}

/// Monomial networks on `[-1, 1]^d` for `d <= 4`, degree 2..5, `L` in {3, 5}.
pub fn verify_monomial(params: &VerifyParams) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for d in 1..=4 {
        let dom = vec![(-1.0, 1.0); d];
        let structured = tensor_grid(&dom, 5);
        for p in 2..=5 {
            for k in monomial_cases(d, p, params.seed) {
                let m = Monomial::new(k.clone())?;
                for l in [3, 5] {
                    let label = format!("k{}.L{l}", exps_label(&k));
                    let t = Timer::start();
                    let net = build_monomial(&m, l)?;
                    let seed = params.seed_for(300 + (d * 100 + p as usize * 10 + l) as u64);
                    let r = sup_error_sampled(
                        |x| net.eval(x),
                        |x| Ok(m.eval(x)),
                        &dom,
                        &structured,
                        params.samples,
                        seed,
                        params.exec,
                    )?;
                    rows.push(t.sup_row(
                        format!("monomial.err.{label}"),
                        "monomial network: error <= (p-1) 2^(-2(L-1))",
                        m.error_bound(l),
                        r,
                        Tolerance::Upper(0.0),
                    ));
                    let t = Timer::start();
                    let r = sup_abs_sampled(|x| net.eval(x), &dom, &structured, params.samples, seed, params.exec)?;
                    rows.push(t.sup_row(
                        format!("monomial.range.{label}"),
                        "monomial network: sup norm <= 1",
                        1.0,
                        r,
                        Tolerance::Upper(1e-12),
                    ));
                    let t = Timer::start();
                    rows.push(t.row(
                        format!("monomial.width.{label}"),
                        "monomial network: width 4",
                        MONOMIAL_WIDTH as f64,
                        net.width() as f64,
                        Vec::new(),
                        Tolerance::Abs(0.0),
                    ));
                    rows.push(t.row(
                        format!("monomial.depth.{label}"),
                        "monomial network: depth 3(p-1)L",
                        (3 * (p as usize - 1) * l) as f64,
                        net.depth() as f64,
                        Vec::new(),
                        Tolerance::Abs(0.0),
                    ));
                }
            }
        }
    }
    Ok(rows)
}

/// Seeded random polynomial in `d` variables with `terms` terms of degree
/// at most `max_degree` and coefficients in `[-2, 2]`.
pub fn random_polynomial(d: usize, max_degree: u32, terms: usize, seed: u64) -> Result<Polynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let list = (0..terms)
        .map(|_| {
            let deg = rng.random_range(0..=max_degree);
            let mut k = vec![0; d];
            for _ in 0..deg {
                k[rng.random_range(0..d)] += 1;
            }
            (k, rng.random_range(-2.0..=2.0))
        })
        .collect();
    Polynomial::new(d, list)
}

/// Polynomial networks: error bound and depth allowance.
pub fn verify_polynomial(params: &VerifyParams) -> Result<Vec<ReportRow>> {
    let mut cases: Vec<(String, Polynomial)> = vec![
        ("square".into(), Polynomial::new(1, vec![(vec![2], 1.0)])?),
        ("constant".into(), Polynomial::new(1, vec![(vec![0], 5.0)])?),
        ("x2y+3xy".into(), Polynomial::new(2, vec![(vec![2, 1], 1.0), (vec![1, 1], 3.0)])?),
    ];
    for d in 1..=4 {
        let seed = params.seed_for(400 + d as u64);
        cases.push((format!("random.d{d}"), random_polynomial(d, 5, 4, seed)?));
    }
    let mut rows = Vec::new();
    for (ci, (name, poly)) in cases.iter().enumerate() {
        let dom = vec![(-1.0, 1.0); poly.dim()];
        let structured = tensor_grid(&dom, 5);
        for l in [3, 5] {
            let t = Timer::start();
            let net = build_polynomial_with(poly, l, params.exec)?;
            let r = sup_error_sampled(
                |x| net.eval(x),
                |x| Ok(poly.eval(x)),
                &dom,
                &structured,
                params.samples,
                params.seed_for(450 + 10 * ci as u64 + l as u64),
                params.exec,
            )?;
            rows.push(t.sup_row(
                format!("polynomial.err.{name}.L{l}"),
                "polynomial network: error <= (p-1) 2^(-2(L-1)) sum|a_k|",
                poly.error_bound(l),
                r,
                Tolerance::Upper(1e-15),
            ));
            rows.push(t.row(
                format!("polynomial.depth.{name}.L{l}"),
                "polynomial network: depth <= 3 C(p+d,d) (p-1) L",
                poly.depth_bound(l) as f64,
                net.depth() as f64,
                Vec::new(),
                Tolerance::Upper(0.0),
            ));
        }
    }
    Ok(rows)
}

/// `ψ_ℓ` networks against the mesh oracle, their shape, and the normalised
/// sup norm.
pub fn verify_psi(params: &VerifyParams) -> Result<Vec<ReportRow>> {
    let dom = [(-1.0, 1.0), (-1.0, 1.0)];
    let mut rows = Vec::new();
    for l in 1..=params.level(4) {
        let t = Timer::start();
        let net = build_psi_ell(l)?;
        let structured = grid_vertices(&UniformMesh2D::reference(l as u32)?);
        let n = params.samples.min(10_000);
        let seed = params.seed_for(500 + l as u64);
        let r = sup_error_sampled(
            |p| net.eval(p),
            |p| psi_ref(l as u32, p[0], p[1]),
            &dom,
            &structured,
            n,
            seed,
            params.exec,
        )?;
        rows.push(t.sup_row(format!("psi.oracle.L{l}"), "psi network equals (Pi_l - Pi_(l-1)) m", 0.0, r, Tolerance::Abs(1e-12)));
        rows.push(t.row(format!("psi.depth.L{l}"), "psi network: depth l+2", (l + 2) as f64, net.depth() as f64, Vec::new(), Tolerance::Abs(0.0)));
        rows.push(t.row(format!("psi.width.L{l}"), "psi network: width <= 9", 9.0, net.width() as f64, Vec::new(), Tolerance::Upper(0.0)));
        let t = Timer::start();
        let h2 = exp2(-2.0 * l as f64);
        let r = sup_abs_sampled(|p| Ok(net.eval(p)? / h2), &dom, &structured, n, seed, params.exec)?;
        rows.push(t.sup_row(format!("psi.norm.L{l}"), "sup |h_l^-2 psi_l| = 1", 1.0, r, Tolerance::Abs(1e-12)));
    }
    Ok(rows)
}

/// The two-layer hat against the reference hat on a grid over `[-2, 2]^2`,
/// and the unguarded formula at `(3/2, 3/2)`.
pub fn verify_hat2d(params: &VerifyParams) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    let t = Timer::start();
    let net = build_hat2d();
    let grid = tensor_grid(&[(-2.0, 2.0), (-2.0, 2.0)], 201);
    let r = sup_error_sampled(
        |p| net.eval(p),
        |p| Ok(hat_ref(p[0], p[1])),
        &[(-2.0, 2.0), (-2.0, 2.0)],
        &grid,
        0,
        params.seed,
        params.exec,
    )?;
    rows.push(t.sup_row("hat2d.grid".into(), "two-layer hat equals the FE basis function on R^2", 0.0, r, Tolerance::Abs(1e-12)));
    rows.push(t.row("hat2d.depth".into(), "hat network: two hidden layers", 2.0, net.depth() as f64, Vec::new(), Tolerance::Abs(0.0)));
    rows.push(t.row("hat2d.width".into(), "hat network: <= 15 neurons per layer", HAT_WIDTH as f64, net.width() as f64, Vec::new(), Tolerance::Upper(0.0)));
    let t = Timer::start();
    let raw = build_hat2d_unguarded();
    let p = [1.5, 1.5];
    let gap = (raw.eval(&p)? - hat_ref(p[0], p[1])).abs();
    rows.push(t.row(
        "hat2d.unguarded".into(),
        "unguarded hat formula at (3/2,3/2) stated as 1/2 (not 0)",
        0.5,
        gap,
        p.to_vec(),
        Tolerance::Abs(1e-14),
    ));
    Ok(rows)
}

/// A seeded random FE function on the level-3 mesh of `[0, 1]^2`
/// reproduced by a sum of placed hats.
pub fn verify_fem(params: &VerifyParams) -> Result<Vec<ReportRow>> {
    let t = Timer::start();
    let f = FemFunction2D::random(UniformMesh2D::unit_square(3)?, params.seed_for(600));
    let placements = fem_to_placements(&f);
    let n = placements.len();
    let net = build_fem2d_with(&placements, params.exec)?;
    let mut interior = random_points(&[(0.0, 1.0), (0.0, 1.0)], params.samples.min(10_000), params.seed_for(601));
    interior.retain(|p| p.iter().all(|&v| v > 0.0 && v < 1.0));
    let r = sup_error_sampled(
        |p| net.eval(p),
        |p| fem_eval(&f, p[0], p[1]),
        &[(0.0, 1.0), (0.0, 1.0)],
        &interior,
        0,
        params.seed,
        params.exec,
    )?;
    let mut rows = vec![t.sup_row("fem.level3".into(), "FE function reproduced by a two-layer network", 0.0, r, Tolerance::Abs(1e-10))];
    rows.push(t.row("fem.depth".into(), "FE network: two hidden layers", 2.0, net.depth() as f64, Vec::new(), Tolerance::Abs(0.0)));
    rows.push(t.row("fem.width".into(), "FE network: <= 15N neurons per layer", (HAT_WIDTH * n) as f64, net.width() as f64, Vec::new(), Tolerance::Upper(0.0)));
    Ok(rows)
}

/// Random skip networks of `trials` shapes plus every constructed skip
/// network, converted to plain networks.
pub fn conversion_cases(params: &VerifyParams) -> Result<Vec<(String, SkipNetwork)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed_for(700));
    let mut cases = Vec::new();
    for t in 0..params.trials {
        let d = rng.random_range(1..=3);
        let depth = rng.random_range(1..=6);
        let widths: Vec<usize> = (0..depth).map(|_| rng.random_range(1..=5)).collect();
        let seed = rng.random();
        cases.push((format!("random{t}"), random_skip_network(seed, d, &widths)?));
    }
    for l in 1..=8 {
        cases.push((format!("x2.L{l}"), build_x2_hat(l)?));
    }
    for l in 2..=6 {
        cases.push((format!("xy.L{l}"), build_xy_hat(l, 1.0)?));
    }
    cases.push(("monomial.k2-1-0.L3".into(), build_monomial(&Monomial::new(vec![2, 1, 0])?, 3)?));
    cases.push(("monomial.k1-1-1-1.L3".into(), build_monomial(&Monomial::new(vec![1, 1, 1, 1])?, 3)?));
    let poly = Polynomial::new(2, vec![(vec![2, 1], 1.0), (vec![1, 1], 3.0), (vec![0, 1], 0.5)])?;
    cases.push(("polynomial.x2y+3xy+y/2.L3".into(), build_polynomial_with(&poly, 3, params.exec)?));
    Ok(cases)
}

/// Plain form of skip networks: pointwise equality and width `N + 2(d+1)`.
pub fn verify_convert(params: &VerifyParams) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for (ci, (name, net)) in conversion_cases(params)?.into_iter().enumerate() {
        let t = Timer::start();
        let plain = skip_to_mlp(&net)?;
        let d = net.input_dim();
        let dom = vec![(-1.0, 1.0); d];
        let r = sup_error_sampled(
            |p| plain.eval(p),
            |p| net.eval(p),
            &dom,
            &[],
            params.samples.min(10_000),
            params.seed_for(800 + ci as u64),
            params.exec,
        )?;
        rows.push(t.sup_row(format!("convert.{name}.value"), "skip network equals its plain form", 0.0, r, Tolerance::Abs(1e-12)));
        rows.push(t.row(
            format!("convert.{name}.width"),
            "plain form width N + 2(d+1)",
            (net.width() + 2 * (d + 1)) as f64,
            plain.width() as f64,
            Vec::new(),
            Tolerance::Abs(0.0),
        ));
        rows.push(t.row(
            format!("convert.{name}.depth"),
            "plain form keeps the depth",
            net.depth() as f64,
            plain.depth() as f64,
            Vec::new(),
            Tolerance::Abs(0.0),
        ));
    }
    Ok(rows)
}

/// Width promised for `f2 ◇ f1` when `f2` has width `N + 1`: `N + 1`, plus
/// one carry neuron when a layer of `f2` after its first reads `x0`.
fn compose_width(f2: &SkipNetwork) -> usize {
    let later_reads_x0 = f2.layers()[1..]
        .iter()
        .any(|layer| (0..layer.width()).any(|r| layer.input_block().row(r)[0] != 0.0));
    f2.width() + usize::from(later_reads_x0)
}

/// Addition and modified composition against their functional definitions.
pub fn verify_algebra(params: &VerifyParams) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    let n = params.samples.min(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed_for(900));
    for t_idx in 0..5 {
        let d = rng.random_range(1..=3);
        let width = rng.random_range(2..=5);
        let (la, lb) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let f = random_skip_network(rng.random(), d, &vec![width; la])?;
        let g = random_skip_network(rng.random(), d, &vec![width; lb])?;
        let dom = vec![(-1.0, 1.0); d];
        let t = Timer::start();
        let h = net_add(&f, &g)?;
        let r = sup_error_sampled(
            |p| h.eval(p),
            |p| Ok(f.eval(p)? + g.eval(p)?),
            &dom,
            &[],
            n,
            params.seed_for(910 + t_idx),
            params.exec,
        )?;
        rows.push(t.sup_row(format!("algebra.add{t_idx}.value"), "sum network equals f + g", 0.0, r, Tolerance::Abs(1e-12)));
        rows.push(t.row(format!("algebra.add{t_idx}.depth"), "sum network depth L1 + L2", (la + lb) as f64, h.depth() as f64, Vec::new(), Tolerance::Abs(0.0)));
        rows.push(t.row(format!("algebra.add{t_idx}.width"), "sum network width N", width as f64, h.width() as f64, Vec::new(), Tolerance::Abs(0.0)));

        let outer = random_skip_network(rng.random(), d + 1, &vec![width + 1; lb])?;
        let t = Timer::start();
        let shift = compose_shift(&f, &dom)?;
        let c = net_compose_modified(&outer, &f, shift)?;
        let r = sup_error_sampled(
            |p| c.eval(p),
            |p| {
                let mut q = vec![f.eval(p)?];
                q.extend_from_slice(p);
                outer.eval(&q)
            },
            &dom,
            &[],
            n,
            params.seed_for(920 + t_idx),
            params.exec,
        )?;
        rows.push(t.sup_row(format!("algebra.compose{t_idx}.value"), "composed network equals f2(f1(x), x)", 0.0, r, Tolerance::Abs(1e-12)));
        rows.push(t.row(format!("algebra.compose{t_idx}.depth"), "composed network depth L1 + L2", (la + lb) as f64, c.depth() as f64, Vec::new(), Tolerance::Abs(0.0)));
        rows.push(t.row(
            format!("algebra.compose{t_idx}.width"),
            "composed network width N + 1 (one more if f2 re-reads x0 after layer 1)",
            compose_width(&outer) as f64,
            c.width() as f64,
            Vec::new(),
            Tolerance::Abs(0.0),
        ));
    }
    Ok(rows)
}
