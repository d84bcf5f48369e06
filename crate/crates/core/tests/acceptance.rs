//! Acceptance criteria 1-11. Runs without the libtest harness so that every
//! criterion prints one line; exits non-zero if any fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{linear_r2, max_abs_diff, max_deviation, FockOracle};
use fhtunnel::evolution::{evolve_dense, evolve_to, evolve_trajectory, uniform_grid, DensePropagator, Method};
use fhtunnel::hamiltonian::{barrier_potential, build_fk_hamiltonian, build_hamiltonian, BarrierOrientation};
use fhtunnel::observables::{time_average, ObservableSpec};
use fhtunnel::scenarios::{preset, run_scenario, run_sweep, Job, ScenarioConfig, SweepConfig, PRESETS};
use fhtunnel::verification::{
    fk_equivalence_residual, MirrorCase, SINGLET_GAP_FLOOR, SINGLET_GAP_MEASURED,
};
use fhtunnel::{HubbardParams, ProductBasis, PropagatorConfig, StateVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SYMMETRY_TOL: f64 = 1e-9;
const MIRROR_TOL: f64 = 1e-10;
const S2_TOL: f64 = 1e-10;
const NORM_DRIFT: f64 = 1e-10;
const ENERGY_DRIFT: f64 = 1e-9;
const NUMBER_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-8;
const ASYMMETRY_RATIO: f64 = 10.0;
const R2_MIN: f64 = 0.9;
const FK_TOL: f64 = 1e-10;
const FOCK_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = fn() -> Outcome;

fn scenario(name: &str) -> ScenarioConfig {
    match preset(name).unwrap() {
        Job::Scenario(c) => c,
        Job::Sweep(_) => panic!("{name} is a sweep"),
    }
}

fn sweep(name: &str) -> SweepConfig {
    match preset(name).unwrap() {
        Job::Sweep(s) => s,
        Job::Scenario(_) => panic!("{name} is not a sweep"),
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn column_index(c: &ScenarioConfig, name: &str) -> usize {
    c.observables.iter().position(|o| o == name).unwrap()
}

fn orientation_gap(c: &ScenarioConfig, name: &str) -> (f64, fhtunnel::scenarios::ScenarioResult) {
    let r = run_scenario(c).unwrap();
    let i = column_index(c, name);
    let g = max_gap(
        r.series(i, BarrierOrientation::A).unwrap(),
        r.series(i, BarrierOrientation::B).unwrap(),
    );
    (g, r)
}

fn criterion_1() -> Outcome {
    let c = scenario("fig2");
    let (gap, _) = orientation_gap(&c, "n_L");
    Outcome {
        pass: gap <= SYMMETRY_TOL,
        detail: format!("L=4 U=0 h=10 t<=30: max |n_L(A) - n_L(B)| = {gap:.2e} (<= {SYMMETRY_TOL:.0e})"),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let residuals: Vec<f64> = (0..100).map(|_| MirrorCase::random(&mut rng).residual().unwrap()).collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    let failing = residuals.iter().filter(|&&r| r > MIRROR_TOL).count();
    Outcome {
        pass: failing == 0,
        detail: format!("100 random barrier blocks, L<=12, t<=50: worst residual {worst:.2e} (<= {MIRROR_TOL:.0e})"),
    }
}

fn criterion_3() -> Outcome {
    let c = scenario("fig3b");
    let (gap, r) = orientation_gap(&c, "n_after");
    let s2 = column_index(&c, "s2");
    let dev = BarrierOrientation::BOTH
        .iter()
        .map(|&o| max_deviation(r.series(s2, o).unwrap(), 2.0))
        .fold(0.0, f64::max);
    Outcome {
        pass: gap <= SYMMETRY_TOL && dev <= S2_TOL,
        detail: format!(
            "triplet L=6 U=0.5 h=10 t<=50: gap {gap:.2e} (<= {SYMMETRY_TOL:.0e}), max |S2 - 2| {dev:.2e} (<= {S2_TOL:.0e})"
        ),
    }
}

fn criterion_4() -> Outcome {
    let c = scenario("fig3a");
    let (gap, _) = orientation_gap(&c, "n_after");
    let regression = (gap - SINGLET_GAP_MEASURED).abs();
    Outcome {
        pass: gap > SINGLET_GAP_FLOOR && regression <= 1e-8,
        detail: format!(
            "singlet L=6 U=0.5 h=10 t<=50: gap {gap:.6e} > {SINGLET_GAP_FLOOR} (frozen oracle value {SINGLET_GAP_MEASURED:.6e}, diff {regression:.1e})"
        ),
    }
}

/// Every run of every preset, at the preset's own t_max.
fn preset_runs() -> Vec<(String, fhtunnel::scenarios::RunPlan)> {
    let mut out = Vec::new();
    for (name, _) in PRESETS {
        let configs: Vec<(String, ScenarioConfig)> = match preset(name).unwrap() {
            Job::Scenario(c) => vec![(name.to_string(), c)],
            Job::Sweep(s) => s
                .values
                .iter()
                .map(|&v| (format!("{name}[{}={v}]", s.parameter.label()), s.config_for(v)))
                .collect(),
        };
        for (label, c) in configs {
            for plan in c.plan().unwrap() {
                out.push((format!("{label}/{}", plan.orientation.label()), plan));
            }
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let specs = [ObservableSpec::Norm, ObservableSpec::Energy, ObservableSpec::Total, ObservableSpec::SpinSquared];
    let runs = preset_runs();
    let mut worst = [0.0f64; 4];
    let mut offenders = Vec::new();
    for (label, plan) in &runs {
        let tr = plan.run_with(&specs).unwrap();
        let particles = (plan.initial.basis().n_up() + plan.initial.basis().n_down()) as f64;
        let drift = [
            max_deviation(tr.column_at(0), tr.column_at(0)[0]),
            max_deviation(tr.column_at(1), tr.column_at(1)[0]),
            max_deviation(tr.column_at(2), particles),
            max_deviation(tr.column_at(3), tr.column_at(3)[0]),
        ];
        let bounds = [NORM_DRIFT, ENERGY_DRIFT, NUMBER_TOL, S2_TOL];
        for (w, d) in worst.iter_mut().zip(&drift) {
            *w = w.max(*d);
        }
        if drift.iter().zip(&bounds).any(|(d, b)| d > b) {
            offenders.push(label.clone());
        }
    }
    Outcome {
        pass: offenders.is_empty(),
        detail: format!(
            "{} preset runs: norm {:.1e} (<= {NORM_DRIFT:.0e}), energy {:.1e} (<= {ENERGY_DRIFT:.0e}), N {:.1e} (<= {NUMBER_TOL:.0e}), S2 {:.1e} (<= {S2_TOL:.0e}){}",
            runs.len(),
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            if offenders.is_empty() { String::new() } else { format!("; failing: {offenders:?}") }
        ),
    }
}

fn oracle_sectors() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for sites in [4usize, 6, 8, 20] {
        for n_up in 0..=sites {
            for n_down in 0..=sites {
                let dim = ProductBasis::new(sites, n_up, n_down).unwrap().dim();
                if dim <= 1000 && dim > 1 {
                    out.push((sites, n_up, n_down));
                }
            }
        }
    }
    out
}

fn criterion_6() -> Outcome {
    let sectors = oracle_sectors();
    let mut worst = (0.0f64, 0.0f64);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut largest = 0;
    for &(sites, n_up, n_down) in &sectors {
        let basis = Arc::new(ProductBasis::new(sites, n_up, n_down).unwrap());
        largest = largest.max(basis.dim());
        let v = barrier_potential(sites, 20.0, BarrierOrientation::A).unwrap();
        let h = build_hamiltonian(&HubbardParams::new(sites, 1.0, 10.0, v).unwrap(), basis.clone()).unwrap();
        let psi = StateVector::random(basis, &mut rng);
        let exact = evolve_dense(&h, &psi, 100.0, 4096).unwrap();
        let k = evolve_to(&h, &psi, 100.0, &PropagatorConfig::default().with_method(Method::Krylov)).unwrap();
        let t = evolve_to(&h, &psi, 100.0, &PropagatorConfig::default().with_method(Method::Taylor)).unwrap();
        worst.0 = worst.0.max(k.distance(&exact));
        worst.1 = worst.1.max(t.distance(&exact));
    }
    Outcome {
        pass: worst.0 <= ORACLE_TOL && worst.1 <= ORACLE_TOL,
        detail: format!(
            "{} sectors (L in 4,6,8,20; dim <= 1000, largest {largest}) at t=100: Krylov {:.1e}, Taylor {:.1e} (<= {ORACLE_TOL:.0e})",
            sectors.len(),
            worst.0,
            worst.1
        ),
    }
}

fn criterion_7() -> Outcome {
    let s = sweep("fig4");
    let r = run_sweep(&s, None).unwrap();
    let at = |label: &str, u: f64| {
        let i = s.values.iter().position(|&v| v == u).unwrap();
        r.column(label).unwrap()[i].unwrap()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for o in ["A", "B"] {
        let label = format!("n_h2_{o}");
        let (lo, mid, hi) = (at(&label, 6.0), at(&label, 10.0), at(&label, 14.0));
        pass &= mid > lo && mid > hi;
        parts.push(format!("{o}: {lo:.3e} < {mid:.3e} > {hi:.3e}"));
    }
    Outcome {
        pass,
        detail: format!("L=4 h=20 T=100, time-averaged n_h2 at U=6,10,14: {}", parts.join("; ")),
    }
}

fn criterion_8() -> Outcome {
    let c = scenario("fig6");
    let r = run_scenario(&c).unwrap();
    let i = column_index(&c, "n_L_dn");
    let avg = |o| time_average(r.times(), r.series(i, o).unwrap(), 100.0).unwrap();
    let (steep, angled) = (avg(BarrierOrientation::A), avg(BarrierOrientation::B));
    let ratio = steep / angled;
    Outcome {
        pass: ratio >= ASYMMETRY_RATIO,
        detail: format!(
            "L=4 h=20 U=10 (2,1): steep {steep:.3e} / angled {angled:.3e} = {ratio:.1} (>= {ASYMMETRY_RATIO})"
        ),
    }
}

fn criterion_9() -> Outcome {
    let mut s = sweep("supp3");
    s.values.retain(|&l| l >= 6.0);
    let r = run_sweep(&s, None).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for o in ["A", "B"] {
        let times: Vec<Option<f64>> = r.column(&format!("n_h2_{o}")).unwrap();
        if times.iter().any(Option::is_none) {
            pass = false;
            parts.push(format!("{o}: threshold not reached within t_max"));
            continue;
        }
        let t: Vec<f64> = times.into_iter().flatten().collect();
        let increasing = t.windows(2).all(|w| w[1] > w[0]);
        let r2 = linear_r2(&s.values, &t);
        pass &= increasing && r2 >= R2_MIN;
        parts.push(format!("{o}: increasing={increasing}, R2={r2:.4}"));
    }
    Outcome {
        pass,
        detail: format!("U=10 h=20 threshold 0.01, L=6..20: {} (R2 >= {R2_MIN})", parts.join("; ")),
    }
}

fn criterion_10() -> Outcome {
    let mut worst = 0.0f64;
    let times = uniform_grid(20.0, 0.1).unwrap();
    let basis = Arc::new(ProductBasis::new(4, 1, 1).unwrap());
    for o in BarrierOrientation::BOTH {
        for &t in &times {
            worst = worst.max(fk_equivalence_residual(4, 1.0, 3.0, 20.0, o, t).unwrap());
        }
        // production path: frozen-down Krylov trajectory against the FK chain
        let v = barrier_potential(4, 20.0, o).unwrap();
        let params = HubbardParams::new(4, 1.0, 3.0, v).unwrap().with_frozen_down();
        let h = build_hamiltonian(&params, basis.clone()).unwrap();
        let psi = fhtunnel::states::doublon_at(basis.clone(), 1).unwrap();
        let specs: Vec<ObservableSpec> = (1..=4)
            .map(|site| ObservableSpec::SiteSpin { site, spin: fhtunnel::Spin::Up })
            .collect();
        let tr = evolve_trajectory(&h, &psi, &times, &PropagatorConfig::default(), &specs).unwrap();
        let fk = DensePropagator::from_matrix(build_fk_hamiltonian(4, 1.0, 3.0, 20.0, o).unwrap());
        let mut phi0 = vec![Complex64::new(0.0, 0.0); 4];
        phi0[0] = Complex64::new(1.0, 0.0);
        for (k, &t) in times.iter().enumerate() {
            let phi = fk.evolve_amplitudes(&phi0, t);
            for (j, p) in phi.iter().enumerate() {
                worst = worst.max((tr.column_at(j)[k] - p.norm_sqr()).abs());
            }
        }
    }
    Outcome {
        pass: worst <= FK_TOL,
        detail: format!("L=4 U=3 h=20 t<=20, both orientations, dense and Krylov: {worst:.2e} (<= {FK_TOL:.0e})"),
    }
}

fn criterion_11() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for sites in 1..=4 {
        let oracle = FockOracle::new(sites);
        let mut param_sets = vec![HubbardParams {
            sites,
            hopping_up: 1.0,
            hopping_down: 0.7,
            interaction: 3.0,
            potential: (0..sites).map(|j| 1.5 * j as f64 - 0.5).collect(),
        }];
        if sites == 4 {
            for o in BarrierOrientation::BOTH {
                param_sets.push(HubbardParams::new(4, 1.0, 10.0, barrier_potential(4, 20.0, o).unwrap()).unwrap());
            }
        }
        for p in &param_sets {
            let full = oracle.hamiltonian(p);
            for n_up in 0..=sites {
                for n_down in 0..=sites {
                    let basis = Arc::new(ProductBasis::new(sites, n_up, n_down).unwrap());
                    let h = build_hamiltonian(p, basis.clone()).unwrap().to_dense();
                    worst = worst.max(max_abs_diff(&h, &oracle.restrict(&full, &basis)));
                    count += 1;
                }
            }
        }
    }
    Outcome {
        pass: worst <= FOCK_TOL,
        detail: format!("{count} sector Hamiltonians, L<=4, against 2^(2L) Jordan-Wigner oracle: {worst:.1e} (<= {FOCK_TOL:.0e})"),
    }
}

fn main() {
    let criteria: [(&str, Criterion, Option<Duration>); 11] = [
        ("noninteracting symmetry", criterion_1, Some(Duration::from_secs(1))),
        ("propagator mirror identity", criterion_2, Some(Duration::from_secs(10))),
        ("triplet symmetry", criterion_3, Some(Duration::from_secs(5))),
        ("singlet asymmetry", criterion_4, Some(Duration::from_secs(5))),
        ("conservation suite", criterion_5, None),
        ("oracle equivalence", criterion_6, None),
        ("underbarrier resonant trapping", criterion_7, Some(Duration::from_secs(60))),
        ("resonant-tunneling asymmetry", criterion_8, Some(Duration::from_secs(10))),
        ("trap-time scaling", criterion_9, Some(Duration::from_secs(300))),
        ("FK reduction", criterion_10, Some(Duration::from_secs(1))),
        ("full-Fock equivalence", criterion_11, None),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = outcome.pass && in_time;
        failures += usize::from(!pass);
        let budget = budget.map_or(String::new(), |b| format!(", budget {}s", b.as_secs()));
        println!(
            "{} {:>2} {name}: {} [{:.2}s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
