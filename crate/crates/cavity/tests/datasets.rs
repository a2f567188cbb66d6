use cavity::harness::emit::{write_csv, write_csv_file};
use cavity::harness::{
    convergence_study, figure1_dataset, run_sweep, simulate_dataset, Cell, ConvergenceQuantity, SweepParam,
    SweepQuantity, SweepSpec,
};
use cavity::model::{CavityParams, InitialStateSpec};

fn col(d: &cavity::harness::Dataset, name: &str) -> Vec<f64> {
    d.values(name).unwrap().into_iter().map(|v| v.unwrap()).collect()
}

#[test]
fn figure1_rows_and_asymptote() {
    let d = figure1_dataset(64, 60).unwrap();
    assert_eq!(d.rows.len(), 61);
    assert_eq!(d.columns, ["n", "t", "N_ideal", "N_open_analytic", "N_open_numeric", "asymptote"]);
    for c in ["N_ideal", "N_open_analytic", "N_open_numeric"] {
        assert_eq!(col(&d, c)[0], 0.0);
    }
    let asym = col(&d, "asymptote");
    assert!(asym.iter().all(|&a| a == asym[0]));
    assert!((asym[0] - 10.61).abs() < 5e-3, "{}", asym[0]);
    let (ana, num) = (col(&d, "N_open_analytic"), col(&d, "N_open_numeric"));
    for (a, n) in ana.iter().zip(&num).skip(1) {
        assert!((a - n).abs() / a < 1e-6);
    }
}

#[test]
fn open_cavity_flattens_below_the_ideal_growth() {
    // Past n ≈ 2/((σ−−σ+)τ) the open number settles near the asymptote while the ideal one keeps growing.
    use cavity::analytic::{mean_photons_ideal, mean_photons_open, mean_photons_open_limit};
    let open = CavityParams::figure1();
    let ideal = open.with_rates(0.0, 0.0).unwrap();
    let asym = mean_photons_open_limit(&open).unwrap();
    let n_open = |n: u64| mean_photons_open(&open, 0.0, n as f64 * open.tau).unwrap();
    let n_ideal = |n: u64| mean_photons_ideal(&ideal, 0.0, n).unwrap();
    assert!(n_ideal(3000) > 4.0 * asym);
    assert!(n_ideal(3000) - n_ideal(2000) > 0.9 * (n_ideal(2000) - n_ideal(1000)));
    assert!((n_open(3000) - asym).abs() / asym < 0.05);
    assert!((n_open(3000) - n_open(2000)).abs() < 0.1 * (n_open(1000) - n_open(0)));
    let d = figure1_dataset(64, 60).unwrap();
    let (ideal_col, open_col) = (col(&d, "N_ideal"), col(&d, "N_open_numeric"));
    assert!(open_col.iter().zip(&ideal_col).skip(1).all(|(o, i)| o < i));
}

#[test]
fn substeps_leave_step_boundaries_unchanged() {
    let params = CavityParams::ideal(1.0, 0.4, 1.3, 0.6).unwrap();
    let init = InitialStateSpec::Gibbs { beta: 2.0 };
    let coarse = simulate_dataset(&params, &init, 30, 5, 1).unwrap();
    let fine = simulate_dataset(&params, &init, 30, 5, 4).unwrap();
    assert_eq!(fine.rows.len(), 1 + 5 * 4);
    let boundary: Vec<&Vec<Cell>> = fine.rows.iter().filter(|r| r[1] == Cell::Int(4)).collect();
    for (c, f) in coarse.rows.iter().skip(1).zip(boundary) {
        assert_eq!(c[3], f[3]);
    }
    // Energy is conserved during each flight.
    let e = col(&fine, "energy");
    for n in 0..5 {
        let flight = &e[1 + 4 * n..1 + 4 * (n + 1)];
        assert!(flight.iter().all(|v| (v - flight[0]).abs() < 1e-9));
    }
}

#[test]
fn vacuum_convergence_is_exact_once_supported() {
    let params = CavityParams::ideal(1.0, 0.5, 1.0, 0.5).unwrap();
    let out = convergence_study(
        &params,
        &InitialStateSpec::Vacuum,
        ConvergenceQuantity::PhotonNumber,
        &[8, 12, 16, 24, 32, 48],
        6,
    )
    .unwrap();
    assert!(out.monotone);
    for r in out.reports.iter().filter(|r| r.tail_mass < 1e-12) {
        assert!(r.abs_err < 1e-10, "M={} err={:.2e}", r.step, r.abs_err);
    }
    assert!(out.reports[0].tail_mass > 1e-12);
}

#[test]
fn broader_start_needs_a_larger_cutoff() {
    let params = CavityParams::ideal(1.0, 0.5, 1.0, 0.5).unwrap();
    let ms = [10, 20, 30, 40, 60, 80];
    let first_good = |init: InitialStateSpec| {
        let out = convergence_study(&params, &init, ConvergenceQuantity::PhotonNumber, &ms, 3).unwrap();
        out.reports.iter().find(|r| r.tail_mass < 1e-12).map(|r| r.step).unwrap()
    };
    assert!(first_good(InitialStateSpec::Gibbs { beta: 0.5 }) > first_good(InitialStateSpec::Vacuum));
}

#[test]
fn figure1_run_converges_in_the_cutoff() {
    let out = convergence_study(
        &CavityParams::figure1(),
        &InitialStateSpec::Vacuum,
        ConvergenceQuantity::FirstMoment,
        &[16, 32, 64],
        40,
    )
    .unwrap();
    assert!(out.monotone);
    let err = |m: u64| out.reports.iter().find(|r| r.step == m).unwrap().abs_err;
    assert!(err(64) <= err(32).max(1e-11));
    assert!(err(16) > err(64));
}

#[test]
fn convergence_rejects_unordered_cutoffs() {
    let p = CavityParams::canonical_ideal();
    let q = ConvergenceQuantity::PhotonNumber;
    assert!(convergence_study(&p, &InitialStateSpec::Vacuum, q, &[16, 8], 2).is_err());
    assert!(convergence_study(&p, &InitialStateSpec::Vacuum, q, &[], 2).is_err());
}

fn sweep(parameter: SweepParam, grid: Vec<f64>, base: CavityParams, q: SweepQuantity) -> cavity::harness::Dataset {
    run_sweep(&SweepSpec {
        parameter,
        grid,
        base,
        quantities: vec![q],
        steps: 10,
        n0: 0.0,
        output: None,
    })
    .unwrap()
}

#[test]
fn growth_is_symmetric_in_p() {
    let d = sweep(
        SweepParam::P,
        vec![0.0, 0.25, 0.5, 0.75, 1.0],
        CavityParams::canonical_ideal(),
        SweepQuantity::GrowthIdeal,
    );
    let g = col(&d, "growth_ideal");
    assert_eq!(g[0], 0.0);
    assert_eq!(g[4], 0.0);
    assert!((g[1] - g[3]).abs() < 1e-15 && g[2] > g[1]);
}

#[test]
fn step_energy_vanishes_at_resonances() {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = sweep(
        SweepParam::Tau,
        vec![two_pi, 2.0 * two_pi, 3.0 * two_pi],
        CavityParams::canonical_ideal(),
        SweepQuantity::EnergyStepIdeal,
    );
    assert!(col(&d, "energy_step_ideal").iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn limit_diverges_as_pumping_meets_leaking() {
    let base = CavityParams::figure1().with_rates(0.01, 0.0).unwrap();
    let grid = vec![0.0, 0.005, 0.008, 0.009, 0.0099, 0.01];
    let d = sweep(SweepParam::SigmaPlus, grid, base, SweepQuantity::LimitOpen);
    let vals = d.values("limit_open").unwrap();
    let finite: Vec<f64> = vals[..5].iter().map(|v| v.unwrap()).collect();
    assert!(finite.windows(2).all(|w| w[1] > w[0]));
    assert!(vals[5].is_none());
    assert_eq!(d.rows[5][2], Cell::Bool(true));
    assert_eq!(d.rows[0][2], Cell::Bool(false));
}

#[test]
fn sweep_rejects_bad_grids() {
    let mut spec = SweepSpec {
        parameter: SweepParam::P,
        grid: vec![0.1, 0.3, 0.2],
        base: CavityParams::canonical_ideal(),
        quantities: SweepQuantity::ALL.to_vec(),
        steps: 3,
        n0: 0.0,
        output: None,
    };
    assert!(run_sweep(&spec).is_err());
    spec.grid.clear();
    assert!(run_sweep(&spec).is_err());
    spec.grid = vec![0.5, 1.5];
    assert!(run_sweep(&spec).is_err());
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = |path| SweepSpec {
        parameter: SweepParam::Lambda,
        grid: (1..=16).map(|k| 0.05 * k as f64).collect(),
        base: CavityParams::figure1(),
        quantities: SweepQuantity::ALL.to_vec(),
        steps: 25,
        n0: 0.5,
        output: Some(path),
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run_sweep(&spec(a.clone())).unwrap();
    run_sweep(&spec(b.clone())).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let f = figure1_dataset(32, 20).unwrap();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    write_csv(&f, &mut x).unwrap();
    write_csv(&figure1_dataset(32, 20).unwrap(), &mut y).unwrap();
    assert_eq!(x, y);
    let path = dir.path().join("f.csv");
    write_csv_file(&f, &path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 22);
    assert!(text.starts_with("n,t,N_ideal,N_open_analytic,N_open_numeric,asymptote\r\n0,0.0000000000000000e0,"));
}
