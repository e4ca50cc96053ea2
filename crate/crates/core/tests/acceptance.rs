//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits nonzero if any fail.

use std::f64::consts::PI;
use std::time::Instant;

use cesaro_core::carleson::{self, ClassifyConfig, Variant};
use cesaro_core::catalog;
use cesaro_core::norms;
use cesaro_core::series::{self, cesaro_like, EvalPoint, PowerSeries};
use cesaro_core::verify::{self, VerifyConfig};
use cesaro_core::RadialMeasure;
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_series(rng: &mut StdRng, degree: usize) -> PowerSeries {
    let coeffs = (0..=degree)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    PowerSeries::new(coeffs).unwrap()
}

fn moment_exactness() -> Outcome {
    let start = Instant::now();
    let mu = RadialMeasure::lebesgue().moments(1 << 14).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let err = mu
        .values()
        .iter()
        .enumerate()
        .map(|(n, v)| (v - 1.0 / (n as f64 + 1.0)).abs())
        .fold(0.0, f64::max);
    outcome(
        err <= 1e-12 && elapsed < 60.0,
        format!("max |mu_n - 1/(n+1)| = {err:.2e} (tol 1e-12) over n <= 16384 in {elapsed:.2}s (limit 60s)"),
    )
}

fn distribution_function_oracle() -> Outcome {
    let mut worst = (0.0f64, "", 0usize);
    for (name, m) in catalog::measures() {
        for n in [4usize, 64, 1024, 8192] {
            let a = m.moment(n).unwrap();
            let b = m.moment_via_tail(n).unwrap();
            let d = (a - b).abs();
            if d > worst.0 {
                worst = (d, name, n);
            }
        }
    }
    outcome(
        worst.0 <= 1e-9,
        format!(
            "max |moment - moment_via_tail| = {:.2e} (tol 1e-9) at {} n={} over 7 measures x 4 orders",
            worst.0, worst.1, worst.2
        ),
    )
}

fn power_law() -> Outcome {
    let ns: Vec<f64> = (6..=13).map(|k| 2f64.powi(k)).collect();
    let mut details = Vec::new();
    let mut pass = true;
    for s in [0.5, 1.0, 2.0] {
        let m = RadialMeasure::power_log(1.0, s, 0.0);
        let mu: Vec<f64> = ns.iter().map(|n| m.moment(*n as usize).unwrap()).collect();
        let fit = cesaro_core::fit::power_fit(&ns, &mu).unwrap();
        pass &= (fit.exponent + s).abs() <= 0.05;
        details.push(format!("s={s}: {:.4}", fit.exponent));
    }
    outcome(
        pass,
        format!(
            "fitted exponents over n in [64, 8192] (want -s +- 0.05): {}",
            details.join(", ")
        ),
    )
}

fn log_factor() -> Outcome {
    let m = catalog::measure("log_weighted").unwrap();
    let mu = m.moments(1 << 14).unwrap();
    let ys: Vec<f64> = (256..=16384usize)
        .map(|n| {
            let n1 = n as f64 + 1.0;
            mu.values()[n] * n1 * n1.ln()
        })
        .collect();
    let (lo, hi) = ys
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), y| (lo.min(*y), hi.max(*y)));
    outcome(
        hi / lo < 2.0,
        format!(
            "mu_n (n+1) log(n+1) in [{lo:.4}, {hi:.4}] over n in [256, 16384], ratio {:.4} (want < 2)",
            hi / lo
        ),
    )
}

fn representation_agreement() -> Outcome {
    let degree = 4096;
    let functions = [
        ("1", PowerSeries::constant(Complex64::new(1.0, 0.0))),
        ("z", PowerSeries::monomial(1)),
        ("log", PowerSeries::log_one_over_one_minus_z(degree)),
        ("f_0.9", series::test_function(0.9, 2.0, degree).unwrap()),
    ];
    let mut worst = (0.0f64, String::new());
    let mut count = 0;
    for (mname, m) in catalog::measures() {
        let mu = m.moments(degree).unwrap();
        for (fname, f) in &functions {
            let g = cesaro_like(&mu, &f.with_degree(degree)).unwrap();
            for r in [0.5, 0.9] {
                for k in 0..8 {
                    let z = EvalPoint::polar(r, 2.0 * PI * k as f64 / 8.0).unwrap();
                    let a = g.eval(z);
                    let b = series::cesaro_like_integral_eval(&m, f, z).unwrap();
                    let d = (a - b).norm();
                    count += 1;
                    if d > worst.0 {
                        worst = (d, format!("{mname}/{fname} at |z|={r}, k={k}"));
                    }
                }
            }
        }
    }
    outcome(
        worst.0 <= 1e-8,
        format!(
            "max |series - integral| = {:.2e} (tol 1e-8) over {count} points; worst {}",
            worst.0, worst.1
        ),
    )
}

fn classical_cesaro() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mu = RadialMeasure::lebesgue().moments(256).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let f = random_series(&mut rng, 256);
        let g = cesaro_like(&mu, &f).unwrap();
        for (n, (b, s)) in g.coeffs().iter().zip(f.partial_sums()).enumerate() {
            worst = worst.max((b - s / (n as f64 + 1.0)).norm());
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max |b_n - s_n/(n+1)| = {worst:.2e} (tol 1e-12) over 20 random degree-256 inputs"),
    )
}

fn parseval() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let f = random_series(&mut rng, 1024);
        for r in [0.5, 1.0 - 2f64.powi(-10)] {
            let m2 = norms::integral_mean(&f, r, 2.0, true).unwrap();
            let oracle: f64 = f
                .coeffs()
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, a)| (n * n) as f64 * a.norm_sqr() * r.powi(2 * n as i32 - 2))
                .sum();
            worst = worst.max((m2 * m2 - oracle).abs() / oracle);
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max relative |M_2(r,f')^2 - sum n^2|a_n|^2 r^(2n-2)| = {worst:.2e} (tol 1e-10) over 10 random degree-1024 series x 2 radii"),
    )
}

fn integral_ordering() -> Outcome {
    // slack equal to the requested relative quadrature accuracy
    let slack = 1e-10;
    let mut samples = 0;
    let mut violations = Vec::new();
    for (name, m) in catalog::measures() {
        for base in catalog::parameter_grid() {
            for probe in base.default_probes() {
                for rho in [0.3, 0.9, 0.99, 1.0 - 2f64.powi(-10)] {
                    for phi in [PI / 3.0, 2.5] {
                        let a = Complex64::from_polar(rho, phi);
                        let ii =
                            carleson::carleson_integral(&m, Complex64::new(rho, 0.0), &probe, Variant::Ii).unwrap();
                        let iii = carleson::carleson_integral(&m, a, &probe, Variant::Iii).unwrap();
                        let iv = carleson::carleson_integral(&m, a, &probe, Variant::Iv).unwrap();
                        samples += 1;
                        let ok = iv <= iii * (1.0 + slack) && iii <= ii * (1.0 + slack)
                            || (ii.is_infinite() && iii.is_infinite());
                        if !ok {
                            violations.push(format!("{name} {probe:?} a={a}: iv={iv:e} iii={iii:e} ii={ii:e}"));
                        }
                    }
                }
            }
        }
    }
    outcome(
        violations.is_empty() && samples >= 500,
        format!(
            "{} violations of iv <= iii <= ii(|a|) over {samples} samples (need >= 500){}",
            violations.len(),
            violations.first().map_or(String::new(), |v| format!("; first: {v}"))
        ),
    )
}

fn criterion_agreement() -> Outcome {
    let mut cells = 0;
    let mut disagreements = Vec::new();
    let mut conclusive = 0;
    for (name, m) in catalog::measures() {
        for params in catalog::parameter_grid() {
            let v = carleson::classify(&m, &params, &ClassifyConfig::default()).unwrap();
            cells += 1;
            if v.per_criterion.values().any(|l| l.is_conclusive()) {
                conclusive += 1;
            }
            if !v.agreement {
                disagreements.push(format!("{name} (s={}, alpha={})", params.s, params.alpha));
            }
        }
    }
    outcome(
        disagreements.is_empty() && cells >= 24,
        format!(
            "{cells} cells ({conclusive} with conclusive labels), 11 criteria each; disagreements: {}",
            if disagreements.is_empty() {
                "none".to_string()
            } else {
                disagreements.join(", ")
            }
        ),
    )
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn boundedness_dichotomy() -> Outcome {
    let config = VerifyConfig::default();
    let mut pass = true;
    let mut details = Vec::new();

    let start = Instant::now();
    let leb = verify::boundedness_experiment(&RadialMeasure::lebesgue(), 2.0, 2.0, &config).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let ratios: Vec<f64> = leb.ladder.iter().map(|r| r.ratio).collect();
    let grows = ratios.windows(2).all(|w| w[1] > w[0]) && leb.fits["ratio"].label == cesaro_core::fit::Label::Diverging;
    let l_n = leb
        .lower_bound
        .iter()
        .find(|b| b.n == 1 << 14)
        .map_or(f64::NAN, |b| b.value);
    let ok = grows && l_n > 3.0 && leb.verdict == "not bounded" && secs < 600.0;
    pass &= ok;
    details.push(format!(
        "lebesgue: R {:.3}->{:.3} ({}), L_16384={l_n:.4}, verdict \"{}\", {secs:.0}s",
        ratios[0],
        ratios[ratios.len() - 1],
        leb.fits["ratio"].label,
        leb.verdict
    ));

    for name in ["atom09", "log_weighted"] {
        let start = Instant::now();
        let rep = verify::boundedness_experiment(&catalog::measure(name).unwrap(), 2.0, 2.0, &config).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let ratios: Vec<f64> = rep.ladder.iter().map(|r| r.ratio).collect();
        let med = median(&ratios);
        let spread = ratios.iter().map(|r| (r / med).max(med / r)).fold(0.0, f64::max);
        let ok = spread <= 3.0 && rep.verdict == "bounded" && secs < 600.0;
        pass &= ok;
        details.push(format!(
            "{name}: max factor from median {spread:.3}, verdict \"{}\", {secs:.0}s",
            rep.verdict
        ));
    }
    outcome(pass, details.join("; "))
}

fn compactness_signal() -> Outcome {
    let config = VerifyConfig::default();
    let atom = verify::compactness_experiment(&catalog::measure("atom09").unwrap(), 2.0, 2.0, &config).unwrap();
    let leb = verify::compactness_experiment(&RadialMeasure::lebesgue(), 2.0, 2.0, &config).unwrap();
    let pass = atom.final_to_peak < 0.1 && leb.final_to_peak >= 0.1;
    outcome(
        pass,
        format!(
            "final/peak of ||C_mu f_t||: atom09 {:.4} (want < 0.1, trend {}), lebesgue {:.4} (want >= 0.1)",
            atom.final_to_peak, atom.fits["norm"].label, leb.final_to_peak
        ),
    )
}

fn norm_sanity() -> Outcome {
    let z = PowerSeries::monomial(1);
    let b_z = norms::bloch_norm(&z).value;
    let besov_z = norms::besov_norm(&z, 2.0).unwrap().value;
    let b_log = norms::bloch_norm(&PowerSeries::log_one_over_one_minus_z(4096)).value;
    let pass = (b_z - 1.0).abs() <= 1e-6 && (besov_z - 1.0).abs() <= 1e-6 && (b_log - 2.0).abs() <= 1e-3;
    outcome(
        pass,
        format!(
            "bloch(z)={b_z:.9} (1 +- 1e-6), besov(z,2)={besov_z:.9} (1 +- 1e-6), bloch(log, N=4096)={b_log:.6} (2 +- 1e-3)"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("moment exactness", moment_exactness),
        ("distribution-function oracle", distribution_function_oracle),
        ("moment power law", power_law),
        ("moment log factor", log_factor),
        ("representation agreement", representation_agreement),
        ("classical Cesaro specialization", classical_cesaro),
        ("Parseval oracle", parseval),
        ("integral ordering", integral_ordering),
        ("criterion agreement", criterion_agreement),
        ("boundedness dichotomy", boundedness_dichotomy),
        ("compactness signal", compactness_signal),
        ("norm sanity", norm_sanity),
    ];
    let mut passed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {:02} {name}: {} [{:.1}s]",
            k + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if o.pass {
            passed += 1;
        }
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
