//! Acceptance criteria 1–7, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always shown; exits nonzero if any criterion
//! fails.
//!
//! Tolerances are pinned here rather than read from the scenario files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::sync::OnceLock;
use std::time::Instant;

use mimofade::scenario::Scenario;
use mimofade::tables::table1;
use mimofade::validation::{run_validation, Entry, ValidationReport};
use mimofade_core::channel::{MimoConfig, ScatteringCluster, ScatteringModel};
use mimofade_core::eigenstats::{eigen_corr, eigen_moments, laguerre_integral_i1, laguerre_integral_i2, EigenPdfContext};
use mimofade_core::imistats::{
    gaussian_lcr, high_snr_coeff, imi_exceed_exact, ostbc_high_snr_coeff, McSettings, SnrConfig,
};
use mimofade_core::specfun::{gaussian_q, integrate, laguerre, log2_moment_integral, log_moment_integral, Tolerance};

const SCENARIOS: [&str; 4] = ["iso-4x4", "noniso-4x4", "iso-12x3", "noniso-12x3"];

/// IMI thresholds spanning `[μ − 2σ, μ + 2σ]`.
const IMI_SIGMAS: [f64; 9] = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];

struct Run {
    report: ValidationReport,
    secs: f64,
    n_tx: u32,
    symbol_time: f64,
}

fn runs() -> &'static [Run] {
    static RUNS: OnceLock<Vec<Run>> = OnceLock::new();
    RUNS.get_or_init(|| {
        SCENARIOS
            .iter()
            .map(|name| {
                let mut s = Scenario::bundled(name).expect("bundled scenario");
                assert_eq!(s.samples, 1 << 20);
                assert_eq!(s.max_lag, 60);
                s.imi_thresholds_sigma = IMI_SIGMAS.to_vec();
                let (report, secs) = run_validation(&s).expect("simulation runs");
                eprintln!("  simulated {name}: {} entries in {secs:.1} s", report.entries.len());
                Run { report, secs, n_tx: s.mimo.n_tx, symbol_time: s.symbol_time() }
            })
            .collect()
    })
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

/// Counts comparisons and remembers the worst, relative to its tolerance.
#[derive(Default)]
struct Tally {
    checked: usize,
    failed: Vec<String>,
    worst: (f64, String),
}

impl Tally {
    fn check(&mut self, id: &str, analytic: f64, empirical: f64, tol: f64) {
        self.checked += 1;
        let ratio = (analytic - empirical).abs() / tol;
        if !(ratio <= 1.0) {
            self.failed.push(format!("{id} ({analytic:.5} vs {empirical:.5}, tol {tol:.5})"));
        }
        if !(ratio <= self.worst.0) {
            self.worst = (ratio, id.to_string());
        }
    }

    fn outcome(self, what: &str) -> Outcome {
        let mut d = format!("{} {what}; worst {} at {:.2} of tolerance", self.checked, self.worst.1, self.worst.0);
        if !self.failed.is_empty() {
            d += &format!("; {} outside: {}", self.failed.len(), self.failed.join(", "));
        }
        Outcome::new(self.failed.is_empty() && self.checked > 0, d)
    }
}

fn entries<'a>(run: &'a Run, prefix: &'a str) -> impl Iterator<Item = &'a Entry> + 'a {
    run.report.entries.iter().filter(move |e| e.id.starts_with(prefix))
}

fn lag_of(id: &str) -> u32 {
    id.rsplit("lag").next().and_then(|s| s.parse().ok()).expect("lag suffix")
}

fn criterion_1() -> Outcome {
    let want = [
        (0.608, 0.152, 0.160),
        (0.437, 0.218, 0.230),
        (0.372, 0.186, 0.274),
        (0.337, 0.168, 0.304),
        (0.725, 0.178, 0.085),
        (0.824, 0.135, 0.050),
        (0.870, 0.107, 0.036),
    ];
    let start = Instant::now();
    let rows = match table1() {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let mut t = Tally::default();
    for (r, w) in rows.iter().zip(want) {
        let id = format!("({},{})", r.m, r.n);
        t.check(&format!("{id} rho2"), w.0, r.taylor_rho2, 0.001);
        t.check(&format!("{id} rho4"), w.1, r.taylor_rho4, 0.001);
        t.check(&format!("{id} gap"), w.2, r.max_gap, 0.005);
    }
    let mut o = t.outcome("coefficient-table values");
    o.pass &= secs < 10.0 && rows.len() == 7;
    o.detail += &format!("; {secs:.3} s");
    o
}

fn criterion_2() -> Outcome {
    let mut t = Tally::default();
    let mut slow = Vec::new();
    for run in runs() {
        for e in entries(run, "eigen_corr_lag") {
            let lag = lag_of(&e.id);
            assert!((1..=60).contains(&lag));
            let tol = (3.0 * e.std_error).min(0.02);
            t.check(&format!("{}/{}", run.report.scenario, e.id), e.analytic, e.empirical, tol);
        }
        if run.secs >= 300.0 {
            slow.push(run.report.scenario.clone());
        }
    }
    let mut o = t.outcome("lag correlations");
    if !slow.is_empty() {
        o.pass = false;
        o.detail += &format!("; over 5 min: {}", slow.join(", "));
    }
    o
}

fn criterion_3() -> Outcome {
    let mut t = Tally::default();
    for run in runs() {
        let floor = 0.05 / run.symbol_time * 1e-3;
        for e in entries(run, "eigen_lcr_th") {
            assert!(e.analytic >= floor);
            t.check(&format!("{}/{}", run.report.scenario, e.id), e.analytic, e.empirical, 0.05 * e.analytic);
            let afd_id = e.id.replace("lcr", "afd");
            match run.report.get(&afd_id) {
                Some(a) => t.check(&format!("{}/{afd_id}", run.report.scenario), a.analytic, a.empirical, 0.05 * a.analytic),
                None => t.check(&afd_id, 0.0, f64::NAN, 1.0),
            }
        }
    }
    t.outcome("crossing rates and fade durations")
}

fn criterion_4() -> Outcome {
    let mut t = Tally::default();
    for run in runs() {
        let sc = &run.report.scenario;
        let high_tol = if run.n_tx == 4 { 0.05 } else { 0.03 };
        for (prefix, tol) in [
            ("imi_corr_low_-20dB_lag", 0.02),
            ("imi_corr_high_30dB_lag", high_tol),
            ("imi_corr_exact_-20dB_lag", 0.02),
            ("imi_corr_exact_30dB_lag", 0.02),
        ] {
            let mut n = 0;
            for e in entries(run, prefix) {
                n += 1;
                t.check(&format!("{sc}/{}", e.id), e.analytic, e.empirical, tol);
            }
            if n != 60 {
                t.check(&format!("{sc}/{prefix}* count"), 60.0, n as f64, 0.0);
            }
        }
    }
    t.outcome("IMI correlations")
}

fn criterion_5() -> Outcome {
    let mut t = Tally::default();
    let mut documented = Vec::new();
    for run in runs() {
        let sc = &run.report.scenario;
        let asserted = run.n_tx == 3;
        for db in ["-20", "30"] {
            let mut n = 0;
            for e in entries(run, &format!("imi_lcr_{db}dB_z")) {
                n += 1;
                if asserted {
                    t.check(&format!("{sc}/{}", e.id), e.analytic, e.empirical, 0.10 * e.analytic);
                } else if db == "30" {
                    documented.push(format!("{sc}/{}: {:+.0}%", e.id, 100.0 * (e.empirical / e.analytic - 1.0)));
                }
            }
            if asserted && n != IMI_SIGMAS.len() {
                t.check(&format!("{sc}/imi_lcr_{db}dB count"), IMI_SIGMAS.len() as f64, n as f64, 0.0);
            }
        }
    }
    let mut o = t.outcome("12x3 Gaussian IMI crossing rates");
    o.detail += &format!("; 4x4 at 30 dB (not asserted): {}", documented.join(", "));
    o
}

fn quad(f: impl FnMut(f64) -> f64, scale: f64) -> f64 {
    let breaks = [0.0, scale, 3.0 * scale, 8.0 * scale, 40.0 * scale];
    integrate(f, &breaks, Tolerance::new(1e-13, 1e-11), 2_000_000).expect("quadrature").value
}

fn criterion_6() -> Outcome {
    let mut t = Tally::default();
    // Density normalization.
    for (m, n) in [(1, 1), (2, 2), (3, 12), (4, 4)] {
        let c = EigenPdfContext::new(MimoConfig::from_mn(m, n).unwrap());
        let s = (m + n) as f64;
        t.check(&format!("marginal ({m},{n})"), 1.0, quad(|x| c.marginal_pdf(x), s), 1e-6);
        let (mean, second) = eigen_moments(c.mimo());
        t.check(&format!("mean ({m},{n})"), mean, quad(|x| x * c.marginal_pdf(x), s), 1e-5 * mean);
        t.check(&format!("second ({m},{n})"), second, quad(|x| x * x * c.marginal_pdf(x), s), 1e-5 * second);
    }
    let c = EigenPdfContext::new(MimoConfig::from_mn(2, 2).unwrap());
    for rho in [0.3, 0.7] {
        let joint = |x: f64, y: f64| c.joint_pdf(x, y, rho).unwrap();
        t.check(&format!("joint rho={rho}"), 1.0, quad(|x| quad(|y| joint(x, y), 4.0), 4.0), 1e-6);
        let want = eigen_corr(c.mimo(), 1, rho, true).normalized_corr * 8.0;
        let got = quad(|x| quad(|y| x * y * joint(x, y), 4.0), 4.0);
        t.check(&format!("lag moment rho={rho}"), want, got, 1e-5 * want);
    }
    let pair = |x: f64, y: f64| c.unordered_pair_pdf(x, y).unwrap();
    t.check("pair (2,2)", 1.0, quad(|x| quad(|y| pair(x, y), 4.0), 4.0), 1e-6);
    let want = eigen_corr(c.mimo(), 0, 1.0, false).normalized_corr * 8.0;
    t.check("cross moment (2,2)", want, quad(|x| quad(|y| x * y * pair(x, y), 4.0), 4.0), 1e-5 * want);
    // Laguerre brackets.
    for (j, k, nu) in [(3, 3, 2), (4, 3, 1), (5, 2, 0), (6, 6, 0), (2, 1, 3)] {
        let q = quad(|x| x.powi(nu as i32 + 1) * (-x).exp() * laguerre(j, nu, x) * laguerre(k, nu, x), 10.0);
        t.check(&format!("I1({j},{k},{nu})"), laguerre_integral_i1(j, k, nu), q, 1e-7 * q.abs().max(1.0));
    }
    for (j, k, nu) in [(2, 0, 1), (0, 3, 0), (4, 1, 2), (5, 3, 1)] {
        let q = quad(|x| x.ln() * x.powi(nu as i32) * (-x).exp() * laguerre(j, nu, x) * laguerre(k, nu, x), 10.0);
        t.check(&format!("I2({j},{k},{nu})"), laguerre_integral_i2(j, k, nu).unwrap(), q, 1e-7 * q.abs().max(1.0));
    }
    // Logarithmic moment identities.
    for (k, w) in [(0, 1.0), (3, 0.01), (7, 50.0), (12, 1000.0)] {
        let q1 = quad(|x| x.powi(k as i32) * (-x).exp() * (w * x).ln_1p(), k as f64 + 5.0);
        let q2 = quad(|x| x.powi(k as i32) * (-x).exp() * (w * x).ln_1p().powi(2), k as f64 + 5.0);
        t.check(&format!("log k={k}"), log_moment_integral(k, w).unwrap(), q1, 1e-8 * q1);
        t.check(&format!("log2 k={k}"), log2_moment_integral(k, w).unwrap(), q2, 1e-8 * q2);
    }
    // Single-mode high-SNR form against the hypergeometric one.
    for n in [1, 2, 4, 12] {
        for rho in [0.1, 0.5, 0.9, 0.99] {
            let a = high_snr_coeff(MimoConfig::from_mn(1, n).unwrap(), rho).unwrap();
            t.check(&format!("high-SNR N={n} rho={rho}"), ostbc_high_snr_coeff(n, rho).unwrap(), a, 1e-10);
        }
    }
    t.outcome("identities")
}

fn criterion_7() -> Outcome {
    let mut t = Tally::default();
    for (m, n) in [(1, 2), (2, 2), (4, 4)] {
        let c = EigenPdfContext::new(MimoConfig::from_mn(m, n).unwrap());
        for (x, y) in [(0.3, 1.2), (2.0, 5.0), (6.0, 0.5)] {
            let want = c.marginal_pdf(x) * c.marginal_pdf(y);
            t.check(&format!("factorization ({m},{n})"), want, c.joint_pdf(x, y, 0.0).unwrap(), 1e-9 * want);
        }
        for th in [0.5, 3.0] {
            let phi = c.phi_lambda(th);
            t.check(&format!("phiphi ({m},{n})"), phi * phi, c.varphi_lambda(th, 0.0).unwrap().value, 1e-14);
        }
    }
    let clusters = vec![
        ScatteringCluster::new(0.4, 0.0, 1.0).unwrap(),
        ScatteringCluster::new(0.6, 0.0, -2.5).unwrap(),
    ];
    let model = ScatteringModel::new(clusters, 10.0, 0.005).unwrap();
    for lag in [1i64, 5, 60, 1000] {
        let want = libm::j0(2.0 * std::f64::consts::PI * 0.05 * lag as f64);
        t.check(&format!("Clarke lag {lag}"), want, model.corr_coeff_h(lag).re, 1e-12);
    }
    for x in [-1.0, 0.0, 1.5] {
        let q = gaussian_q(x);
        t.check(&format!("LCR rho=0 x={x}"), q * (1.0 - q) / 0.005, gaussian_lcr(x, 0.0, 0.005).unwrap(), 1e-8);
        t.check(&format!("LCR rho=1 x={x}"), 0.0, gaussian_lcr(x, 1.0, 0.005).unwrap(), 1e-12);
    }
    let mc = McSettings::default();
    for n in [1u32, 3, 8] {
        let snr = SnrConfig::new(10.0, MimoConfig::from_mn(1, n).unwrap()).unwrap();
        for i_th in [0.5f64, 2.0, 4.0] {
            let z = i_th.exp_m1() / 10.0;
            let mut term = 1.0;
            let mut tail = 0.0;
            for k in 0..n {
                if k > 0 {
                    term *= z / k as f64;
                }
                tail += term;
            }
            tail *= (-z).exp();
            let got = imi_exceed_exact(&snr, i_th, &mc).unwrap().value;
            t.check(&format!("M=1 tail N={n} I={i_th}"), tail, got, 1e-12);
        }
    }
    t.outcome("limits")
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("high-SNR coefficient table", criterion_1),
        ("eigen-channel correlation", criterion_2),
        ("eigen-channel LCR/AFD", criterion_3),
        ("IMI correlation regimes", criterion_4),
        ("IMI LCR, Gaussian approximation", criterion_5),
        ("oracle equivalences", criterion_6),
        ("degenerate and limit cases", criterion_7),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {verdict}: {name} — {}", k + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of 7 criteria passed", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
