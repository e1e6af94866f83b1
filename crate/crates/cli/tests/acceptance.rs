//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, details
//! indented beneath. Exits nonzero when any criterion fails.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use viscap::birman_schwinger::{bs_determinant, find_resonances, multiplicity_eps_report, multiplicity_report, DEFAULT_NODES};
use viscap::davies::{exact_spectrum, regression, resolvent_norm, weighted_cap_resolvent_norm};
use viscap::deformation::{
    check_admissible, min_distance, numerical_range_scan, phi_theta, region_mesh, symbol_region_margin, DeformationSpec, Region,
    ScanWindow,
};
use viscap::{
    build_grid, converged_estimates, davies_matrix, eigenvalues, factorize, run_sweep, GridSpec, Potential,
    RectangleOmega, SweepConfig, SweepResult, C64,
};

// Pinned tolerances.
const DAVIES_REL: f64 = 1e-6;
const SCALING_REL: f64 = 1e-8;
const ORACLE_ABS: f64 = 5e-3;
const TRACK_FLOOR: f64 = 1e-3;
const TRACK_END: f64 = 1e-2;
const DELTA: f64 = 0.05;
const WEIGHTED_RATIO: f64 = 10.0;
const GROWTH_CORRELATION: f64 = 0.9;
const NORM_CAP: f64 = 1e12;
const FREE_DET: f64 = 1e-10;

fn oracle() -> C64 {
    C64::new(31f64.sqrt() / 2.0, -0.5)
}

fn omega() -> RectangleOmega {
    RectangleOmega::new(2.0, 3.5, 0.8, 0.5)
}

fn bs_grid() -> GridSpec {
    GridSpec::new(15.0, 600)
}

fn sweep_config(p: Potential) -> SweepConfig {
    SweepConfig {
        potential: p,
        grid: GridSpec::new(60.0, 800),
        omega: omega(),
        eps_start: 1e-1,
        eps_ratio: 10f64.powf(-0.5),
        eps_count: 7,
        track_radius: 0.2,
        cauchy_tol: 1e-2,
    }
}

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, details: Vec::new() }
    }
    fn check(&mut self, ok: bool, msg: String) {
        self.pass &= ok;
        self.details.push(format!("{} {msg}", if ok { "ok  " } else { "FAIL" }));
    }
    fn note(&mut self, msg: String) {
        self.details.push(format!("     {msg}"));
    }
}

fn nearest(vals: &[C64], target: C64) -> C64 {
    *vals.iter().min_by(|a, b| (*a - target).norm().total_cmp(&(*b - target).norm())).unwrap()
}

fn c1_davies_spectrum() -> Outcome {
    let mut o = Outcome::new();
    let g = build_grid(12.0, 512).unwrap();
    for eps in [1.0, 1e-1, 1e-2] {
        let c = C64::new(0.0, -eps);
        let ev = eigenvalues(&davies_matrix(&g, c).unwrap()).unwrap().eigenvalues;
        let exact = exact_spectrum(c, 10).unwrap();
        let worst = exact.iter().map(|&e| (nearest(&ev, e) - e).norm() / e.norm()).fold(0.0, f64::max);
        o.check(worst < DAVIES_REL, format!("eps={eps:e}: worst relative error over k<10 = {worst:.2e} (L=12, N=512)"));
    }
    // Same check on a box that scales with the oscillator length.
    for eps in [1e-2] {
        let g = build_grid(12.0 * f64::powf(eps, -0.25), 512).unwrap();
        let c = C64::new(0.0, -eps);
        let ev = eigenvalues(&davies_matrix(&g, c).unwrap()).unwrap().eigenvalues;
        let worst = exact_spectrum(c, 10).unwrap().iter().map(|&e| (nearest(&ev, e) - e).norm() / e.norm()).fold(0.0, f64::max);
        o.note(format!("eps={eps:e} on L=12*eps^(-1/4), N=512: worst relative error {worst:.2e}"));
    }
    o
}

fn c2_scaling() -> Outcome {
    let mut o = Outcome::new();
    let g1 = build_grid(12.0, 512).unwrap();
    let s1 = eigenvalues(&davies_matrix(&g1, C64::new(0.0, -1.0)).unwrap()).unwrap().eigenvalues;
    let low: Vec<C64> = exact_spectrum(C64::new(0.0, -1.0), 10).unwrap().iter().map(|&e| nearest(&s1, e)).collect();
    for eps in [1e-1, 1e-2] {
        let g = build_grid(12.0 * f64::powf(eps, -0.25), 512).unwrap();
        let se = eigenvalues(&davies_matrix(&g, C64::new(0.0, -eps)).unwrap()).unwrap().eigenvalues;
        let worst = low
            .iter()
            .map(|&l| {
                let t = l * eps.sqrt();
                (nearest(&se, t) - t).norm() / t.norm()
            })
            .fold(0.0, f64::max);
        o.check(worst < SCALING_REL, format!("eps={eps:e}: max relative |sigma(eps) - sqrt(eps) sigma(1)| = {worst:.2e}"));
    }
    o
}

fn c3_oracle() -> Outcome {
    let mut o = Outcome::new();
    let g = bs_grid().build().unwrap();
    let f = factorize(&Potential::sech2(8.0), &g);
    let t = Instant::now();
    let est = find_resonances(&omega(), &g, &f, 1e-10).unwrap();
    let total: usize = est.iter().map(|e| e.multiplicity).sum();
    o.check(total == 1, format!("{} zero(s) found in {:.1}s", total, t.elapsed().as_secs_f64()));
    if let Some(e) = est.first() {
        let d = (e.lambda - oracle()).norm();
        o.check(d < ORACLE_ABS, format!("zero {:.6} distance to sqrt(31)/2 - i/2 = {d:.2e}", e.lambda));
    }
    o
}

fn track_distances(r: &SweepResult) -> Option<Vec<(f64, f64)>> {
    r.tracks
        .iter()
        .filter(|t| t.points.iter().any(|p| (p.1 - oracle()).norm() < 0.1))
        .min_by(|a, b| {
            let da = (a.last().1 - oracle()).norm();
            let db = (b.last().1 - oracle()).norm();
            b.points.len().cmp(&a.points.len()).then(da.total_cmp(&db))
        })
        .map(|t| t.points.iter().map(|&(e, l)| (e, (l - oracle()).norm())).collect())
}

fn c4_convergence(r: &SweepResult) -> Outcome {
    let mut o = Outcome::new();
    let Some(d) = track_distances(r) else {
        o.check(false, "no track comes within 0.1 of the oracle".into());
        return o;
    };
    o.note(format!("track: {}", d.iter().map(|(e, x)| format!("{e:.2e}:{x:.2e}")).collect::<Vec<_>>().join(" ")));
    let mono = d.windows(2).all(|w| w[1].1 < w[0].1 || w[0].1.max(w[1].1) < TRACK_FLOOR);
    o.check(mono, "distance decreases monotonically (floor 1e-3)".into());
    let last_eps = *r.schedule.last().unwrap();
    let (e_end, d_end) = *d.last().unwrap();
    o.check(e_end == last_eps, format!("track reaches the last eps {last_eps:e} (ends at {e_end:e})"));
    o.check(d_end < TRACK_END, format!("final distance {d_end:.2e} < 1e-2"));
    o
}

fn c5_count(r: &SweepResult) -> Outcome {
    let mut o = Outcome::new();
    let eps = r.final_epsilon.unwrap_or(f64::NAN);
    let n = r.final_lambdas.iter().filter(|l| (*l - oracle()).norm() < DELTA).count();
    o.check(
        (eps - 1e-4).abs() < 1e-12 && n == 1,
        format!("CAP eigenvalues within {DELTA} of the oracle at eps={eps:e}: {n}"),
    );
    let g = bs_grid().build().unwrap();
    let f = factorize(&Potential::sech2(8.0), &g);
    match multiplicity_report(oracle(), DELTA, &g, &f, DEFAULT_NODES) {
        Ok(m) => {
            o.check(m.trace_count == 1, format!("trace route m = {} (value {:.3e})", m.trace_count, m.trace_value));
            o.check(m.winding_count == m.trace_count, format!("winding route m = {}", m.winding_count));
        }
        Err(e) => o.check(false, format!("multiplicity: {e}")),
    }
    o
}

fn c6_regularized() -> Outcome {
    let mut o = Outcome::new();
    let g = build_grid(40.0, 400).unwrap();
    let f = factorize(&Potential::sech2(8.0), &g);
    for eps in [1e-2, 1e-3] {
        let t = Instant::now();
        match multiplicity_eps_report(oracle(), DELTA, eps, &g, &f, DEFAULT_NODES) {
            Ok(r) => {
                let m = r.contour.trace_count;
                o.check(
                    m == r.contour.winding_count && m == r.eigen_count && m == 1,
                    format!(
                        "eps={eps:e}: contour m = {m} (winding {}), eigenvalue count {} ({:.0}s)",
                        r.contour.winding_count,
                        r.eigen_count,
                        t.elapsed().as_secs_f64()
                    ),
                );
            }
            Err(e) => o.check(false, format!("eps={eps:e}: {e}")),
        }
    }
    o
}

fn c7_resolvents() -> Outcome {
    let mut o = Outcome::new();
    let g = build_grid(12.0, 512).unwrap();
    let lambda = C64::new(1.5, 0.2);
    let w: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5].iter().map(|&e| weighted_cap_resolvent_norm(e, lambda, 1.0, &g).unwrap()).collect();
    let ratio = w.iter().cloned().fold(0.0, f64::max) / w.iter().cloned().fold(f64::INFINITY, f64::min);
    o.check(ratio < WEIGHTED_RATIO, format!("weighted norms {w:.4?}: max/min = {ratio:.4}"));

    let g = build_grid(20.0, 512).unwrap();
    let z = C64::from_polar(1.0, -FRAC_PI_8);
    let eps = [4e-2, 2e-2, 1e-2, 5e-3];
    let n: Vec<f64> = eps.iter().map(|&e| resolvent_norm(e, z, &g).map(|v| v.min(NORM_CAP)).unwrap_or(NORM_CAP)).collect();
    o.check(n.windows(2).all(|w| w[1] > w[0]), format!("unweighted norms at e^(-i pi/8) {:?} strictly increasing", n.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>()));
    let x: Vec<f64> = eps.iter().map(|e| e.powf(-0.5)).collect();
    let y: Vec<f64> = n.iter().map(|v| v.ln()).collect();
    let (slope, corr) = regression(&x, &y);
    o.check(slope > 0.0 && corr > GROWTH_CORRELATION, format!("log-norm vs eps^(-1/2): slope {slope:.4}, correlation {corr:.4}"));
    o
}

fn c8_symbol() -> Outcome {
    let mut o = Outcome::new();
    let win = ScanWindow::default();
    let tanh = DeformationSpec::scaled_tanh(0.4, 1.0);
    let theta = C64::new(0.0, -0.4);
    let om = RectangleOmega::new(6.0, 8.0, 0.1, 1.0);
    let adm = check_admissible(&om, 0.4, &tanh).unwrap();
    o.check(adm.pass, format!("omega (6,8)+i(-0.1,1) admissible at beta=0.4, margin {:.4}", adm.margin));
    let scan = numerical_range_scan(theta, &tanh, &win).unwrap();
    let mesh = region_mesh(&Region::Omega { omega: om, beta: 0.4 }, &win);
    let d = min_distance(&scan, &mesh);
    o.check(d > 0.0, format!("rho=0.4 tanh, theta=-0.4i: scan distance to lambda^2 mesh = {d:.4}"));
    let args_ok = win.axis().iter().filter(|&&x| x != 0.0).all(|&x| {
        let p = phi_theta(x, theta, &tanh);
        (p * p).arg().abs() < FRAC_PI_4
    });
    o.check(args_ok, "|arg phi^2| < pi/4 on the scan".into());
    for (name, spec) in [("plateau", DeformationSpec::plateau(1.0)), ("0.4 tanh", tanh)] {
        let g = spec.gamma;
        let mut ms = Vec::new();
        for th in [C64::new(0.5 * g, 0.0), C64::new(-0.5 * g, 0.0), C64::new(0.0, 0.5 * g), C64::new(0.0, -0.5 * g)] {
            ms.push(symbol_region_margin(th, &Region::BadSector, 0.0, &spec, &win).unwrap());
        }
        o.check(ms.iter().all(|&m| m > 0.0), format!("{name}: bad-sector margins at +-0.5g, +-0.5ig = {ms:.4?}"));
    }
    o
}

fn c9_free() -> Outcome {
    let mut o = Outcome::new();
    let g = bs_grid().build().unwrap();
    let f = factorize(&Potential::zero(), &g);
    let om = omega();
    let mut worst: f64 = 0.0;
    for a in 0..10 {
        for b in 0..10 {
            let l = C64::new(
                om.a_lo + (om.a_hi - om.a_lo) * (a as f64 + 0.5) / 10.0,
                -om.gamma_lo + (om.b_hi + om.gamma_lo) * (b as f64 + 0.5) / 10.0,
            );
            worst = worst.max((bs_determinant(l, &g, &f).unwrap().det_value - 1.0).norm());
        }
    }
    o.check(worst < FREE_DET, format!("max |D - 1| on a 10x10 sample = {worst:.1e}"));
    let bs = find_resonances(&om, &g, &f, 1e-10).unwrap();
    o.check(bs.is_empty(), format!("BS zeros: {}", bs.len()));
    let r = run_sweep(&sweep_config(Potential::zero())).unwrap();
    let cap = converged_estimates(&r, 1e-2);
    o.check(cap.is_empty(), format!("CAP converged estimates: {} ({} raw tracks)", cap.len(), r.tracks.len()));
    o
}

fn run_compare(bin: &Path, cfg: &Path, out: &Path) -> i32 {
    let _ = std::fs::remove_dir_all(out);
    Command::new(bin).args(["compare", "--config"]).arg(cfg).arg("--out").arg(out).status().map(|s| s.code().unwrap_or(-1)).unwrap_or(-1)
}

fn c10_determinism() -> Outcome {
    let mut o = Outcome::new();
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_viscap"));
    let root = std::env::temp_dir().join(format!("viscap-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&root).unwrap();
    let cfg = root.join("config.json");
    std::fs::write(&cfg, "{}\n").unwrap();
    let (a, b) = (root.join("a"), root.join("b"));
    let ca = run_compare(&bin, &cfg, &a);
    let cb = run_compare(&bin, &cfg, &b);
    o.note(format!("exit codes {ca} and {cb}"));
    let mut names: Vec<String> = std::fs::read_dir(&a)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv") || n.ends_with(".json"))
        .collect();
    names.sort();
    o.check(names.iter().any(|n| n == "compare_report.json"), format!("artifacts: {}", names.join(", ")));
    for n in &names {
        let same = std::fs::read(a.join(n)).ok() == std::fs::read(b.join(n)).ok();
        o.check(same, format!("{n} byte-identical"));
    }
    o.check(ca == cb, "same exit code".into());
    let _ = std::fs::remove_dir_all(&root);
    o
}

fn main() {
    let t0 = Instant::now();
    let sweep = run_sweep(&sweep_config(Potential::sech2(8.0))).expect("sech2 sweep");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 Davies spectrum on L=12, N=512", Box::new(c1_davies_spectrum)),
        ("2 exact sqrt(eps) scaling", Box::new(c2_scaling)),
        ("3 BS zero of 8 sech^2 matches the transmission pole", Box::new(c3_oracle)),
        ("4 CAP track converges to the resonance", Box::new(|| c4_convergence(&sweep))),
        ("5 CAP count equals BS multiplicity at eps=1e-4", Box::new(|| c5_count(&sweep))),
        ("6 regularized contour count equals eigenvalue count", Box::new(c6_regularized)),
        ("7 weighted resolvent bounded, unweighted grows", Box::new(c7_resolvents)),
        ("8 deformed symbol avoids the bad regions", Box::new(c8_symbol)),
        ("9 zero potential: D = 1, no resonances", Box::new(c9_free)),
        ("10 compare pipeline is deterministic", Box::new(c10_determinism)),
    ];
    let mut failed = 0;
    for (name, f) in &criteria {
        let t = Instant::now();
        let r = f();
        println!("[{}] {name} ({:.1}s)", if r.pass { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64());
        for d in &r.details {
            println!("    {d}");
        }
        failed += usize::from(!r.pass);
    }
    println!("acceptance: {} passed, {failed} failed ({:.0}s)", criteria.len() - failed, t0.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
