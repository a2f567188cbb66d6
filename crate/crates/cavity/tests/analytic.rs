mod common;

use std::f64::consts::PI;

use cavity::analytic::*;
use cavity::channels::{dual_moments_open, ObservablePoly, OpenChannel};
use cavity::linalg::{Mat, C64, ZERO};
use cavity::model::{initial_state, CavityParams, DensityMatrix, InitialStateSpec};
use cavity::CavityError;
use rand::Rng;

fn canonical() -> CavityParams {
    CavityParams::canonical_ideal()
}

fn open() -> CavityParams {
    CavityParams::new(1.0, 0.3, 1.0, 0.5, 0.2, 0.02).unwrap()
}

/// Independent evaluation of the two-term ideal photon formula.
fn ideal_oracle(eps: f64, lam: f64, tau: f64, p: f64, n0: f64, n: f64) -> f64 {
    let k = 2.0 * lam * lam / (eps * eps);
    n0 + n * p * (1.0 - p) * k * (1.0 - (eps * tau).cos()) + p * p * k * (1.0 - (n * eps * tau).cos())
}

#[test]
fn ideal_photons_examples() {
    let zero_p = canonical().with_p(0.0).unwrap();
    for n in [0, 1, 7, 100] {
        assert_eq!(mean_photons_ideal(&zero_p, 5.0, n).unwrap(), 5.0);
    }
    assert!((mean_photons_ideal(&canonical(), 0.0, 4).unwrap() - 4.0).abs() < 1e-12);
    let resonant = CavityParams::ideal(1.0, 0.7, 2.0 * PI, 0.3).unwrap();
    for n in [1, 5, 33] {
        assert!((mean_photons_ideal(&resonant, 1.5, n).unwrap() - 1.5).abs() < 1e-12);
    }
    let q = CavityParams::ideal(0.8, 0.45, 1.3, 0.35).unwrap();
    for n in 0..50 {
        let v = mean_photons_ideal(&q, 0.2, n).unwrap();
        assert!((v - ideal_oracle(0.8, 0.45, 1.3, 0.35, 0.2, n as f64)).abs() < 1e-12);
    }
}

#[test]
fn nongauge_photons() {
    let q = canonical();
    for n in [0, 1, 9] {
        let a = mean_photons_ideal_nongauge(&q, 0.7, 0.0, 0.4, n).unwrap();
        assert_eq!(a, mean_photons_ideal(&q, 0.7, n).unwrap());
    }
    let p1 = canonical().with_p(1.0).unwrap();
    assert!((mean_photons_ideal_nongauge(&p1, 0.25, 0.5, 0.0, 1).unwrap() - 6.25).abs() < 1e-12);
    assert!(matches!(
        mean_photons_ideal_nongauge(&q, 0.1, 0.5, 0.0, 1),
        Err(CavityError::InvalidParameter(_))
    ));
    let mut rng = common::rng(5);
    for _ in 0..200 {
        let params = CavityParams::ideal(rng.gen_range(0.2..2.0), rng.gen_range(0.0..2.0), rng.gen_range(0.1..4.0), rng.gen_range(0.0..=1.0)).unwrap();
        let r: f64 = rng.gen_range(0.0..2.0);
        let n0 = r * r + rng.gen_range(0.0..1.0);
        let phi = rng.gen_range(-PI..PI);
        for n in (0..=200).step_by(7) {
            assert!(mean_photons_ideal_nongauge(&params, n0, r, phi, n).unwrap() >= -1e-12);
        }
    }
}

#[test]
fn nongauge_matches_coherent_simulation() {
    let params = CavityParams::ideal(1.0, 0.4, 1.1, 0.6).unwrap();
    let (r, phi) = (0.9, 0.7);
    let m = 40;
    let ch = cavity::channels::IdealShift::new(&params, m).unwrap();
    let mut rho = initial_state(&InitialStateSpec::Coherent { r, phi }, &params, m).unwrap();
    for n in 1..=6 {
        rho = ch.step(&rho).unwrap();
        let pred = mean_photons_ideal_nongauge(&params, r * r, r, phi, n).unwrap();
        assert!((rho.mean_photons() - pred).abs() < 1e-8, "n={n}");
    }
}

#[test]
fn first_moment_examples() {
    assert_eq!(first_moment_ideal(&canonical(), 0), ZERO);
    let q = CavityParams::ideal(1.0, 1.0, PI, 1.0).unwrap();
    assert!((first_moment_ideal(&q, 1) - C64::new(-2.0, 0.0)).norm() < 1e-12);
    // Zero rates: the open form reduces to the ideal one.
    for n in 0..10 {
        assert!((first_moment_open(&canonical(), n) - first_moment_ideal(&canonical(), n)).norm() < 1e-12);
    }
}

#[test]
fn open_photons_at_zero_time_and_figure_one_limit() {
    let f = CavityParams::figure1();
    assert!((coupling_ratio(&f) - 1.0).abs() < 1e-15);
    assert_eq!(mean_photons_open(&f, 0.0, 0.0).unwrap(), 0.0);
    assert_eq!(mean_photons_open(&open(), 2.5, 0.0).unwrap(), 2.5);
    let lim = mean_photons_open_limit(&f).unwrap();
    assert!((lim - 10.61).abs() < 5e-3, "limit {lim}");
    let far = mean_photons_open(&f, 0.0, 2e5 * f.tau).unwrap();
    assert!((far - lim).abs() < 1e-9 * lim);
}

#[test]
fn open_photons_refuse_net_pumping() {
    let bad = open().with_rates(0.1, 0.2).unwrap();
    let err = mean_photons_open(&bad, 0.0, 1.0).unwrap_err();
    assert!(err.to_string().contains("requires sigma_minus > sigma_plus"));
    assert!(mean_photons_open_limit(&open().with_rates(0.1, 0.1).unwrap()).is_err());
}

#[test]
fn open_photons_match_dual_pairing() {
    for params in [open(), CavityParams::figure1(), open().with_rates(0.05, 0.05).unwrap()] {
        for n in 0..=200u64 {
            let n0 = 0.75;
            let formula = mean_photons_open(&params, n0, n as f64 * params.tau).unwrap();
            let dual = dual_moments_open(&ObservablePoly::number(), &params, n).pair(n0, ZERO).re;
            assert!((formula - dual).abs() < 1e-10 * (1.0 + dual.abs()), "n={n}: {formula} vs {dual}");
            let steps = mean_photons_open_steps(&params, n0, n).unwrap();
            assert!((formula - steps).abs() < 1e-10 * (1.0 + dual.abs()));
        }
    }
}

#[test]
fn open_photons_intra_step_exact_form() {
    let params = open();
    let m = 40;
    let ch = OpenChannel::new(&params, m).unwrap();
    let mut rho = initial_state(&InitialStateSpec::Gibbs { beta: 2.0 }, &params, m).unwrap();
    let n0 = rho.mean_photons();
    for k in 0..3 {
        let mid = ch.step_dt(&rho, 0.37 * params.tau).unwrap();
        let t = (k as f64 + 0.37) * params.tau;
        assert!((mean_photons_open_exact(&params, n0, t).unwrap() - mid.mean_photons()).abs() < 1e-8);
        rho = ch.step(&rho).unwrap();
        let t = (k + 1) as f64 * params.tau;
        assert!((mean_photons_open_exact(&params, n0, t).unwrap() - mean_photons_open(&params, n0, t).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn open_photons_limit_consistency() {
    let ideal = canonical();
    let tiny = ideal.with_rates(1e-10, 0.0).unwrap();
    for n in 0..=40u64 {
        let a = mean_photons_open(&tiny, 0.3, n as f64 * ideal.tau).unwrap();
        let b = mean_photons_ideal(&ideal, 0.3, n).unwrap();
        assert!((a - b).abs() < 1e-6, "n={n}");
    }
    // σ− = σ+ > 0 gives the ideal value plus linear pumping nτσ+.
    for s in [0.02, 0.3] {
        let eq = ideal.with_rates(s, s).unwrap();
        let near = ideal.with_rates(s + 1e-9, s).unwrap();
        for n in 0..=30u64 {
            let target = mean_photons_ideal(&ideal, 0.3, n).unwrap() + n as f64 * ideal.tau * s;
            let t = n as f64 * ideal.tau;
            assert!((mean_photons_open(&eq, 0.3, t).unwrap() - target).abs() < 1e-9 * (1.0 + target));
            assert!((mean_photons_open(&near, 0.3, t).unwrap() - target).abs() < 1e-5);
        }
    }
}

#[test]
fn limit_special_cases_and_bounds() {
    let base = open();
    let p0 = base.with_p(0.0).unwrap();
    let drift = base.sigma_plus / base.damping();
    assert!((mean_photons_open_limit(&p0).unwrap() - drift).abs() < 1e-14);
    let (lo, hi) = limit_bounds(&p0).unwrap();
    assert!((lo - drift).abs() < 1e-14 && (hi - drift).abs() < 1e-14);
    let p1 = base.with_p(1.0).unwrap();
    assert!((mean_photons_open_limit(&p1).unwrap() - (coupling_ratio(&p1) + drift)).abs() < 1e-12);

    let f = CavityParams::figure1();
    let (lo, hi) = limit_bounds(&f).unwrap();
    let lim = mean_photons_open_limit(&f).unwrap();
    assert!(lo <= lim && lim <= hi, "{lo} {lim} {hi}");

    let mut rng = common::rng(17);
    for _ in 0..1000 {
        let sm: f64 = rng.gen_range(1e-3..2.0);
        let params = CavityParams::new(
            rng.gen_range(0.05..3.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.05..5.0),
            rng.gen_range(0.0..=1.0),
            sm,
            rng.gen_range(0.0..0.99) * sm,
        )
        .unwrap();
        let lim = mean_photons_open_limit(&params).unwrap();
        let (lo, hi) = limit_bounds(&params).unwrap();
        let slack = 1e-12 * (1.0 + lim.abs());
        assert!(lo <= lim + slack && lim <= hi + slack, "{params:?}: {lo} {lim} {hi}");
    }
}

#[test]
fn printed_upper_estimate_fails_for_negative_cosine() {
    // ετ = 3 has cos ετ < 0; the estimate with numerator one sits below the limit.
    let params = CavityParams::new(1.0, 1.0, 3.0, 0.5, 0.5, 0.0).unwrap();
    let a = coupling_ratio(&params);
    let x = params.damping();
    let printed = 2.0 * a * 0.25 / (1.0 - (-x * 3.0).exp());
    let lim = mean_photons_open_limit(&params).unwrap();
    assert!(printed < lim);
    assert!(limit_bounds(&params).unwrap().1 >= lim);
}

#[test]
fn limit_regimes() {
    let vac = open().with_p(0.0).unwrap().with_rates(0.2, 0.0).unwrap();
    assert_eq!(limit_regime(&vac, LimitRegime::PZero).unwrap().value, LimitValue::Finite(0.0));
    let mid = canonical().with_p(0.4).unwrap();
    assert_eq!(
        limit_regime(&mid, LimitRegime::SigmaPlusZeroSigmaMinusToZero).unwrap().value,
        LimitValue::Infinite
    );
    let pumped = open().with_rates(0.1, 0.1).unwrap();
    assert_eq!(limit_regime(&pumped, LimitRegime::SigmaMinusToSigmaPlus).unwrap().value, LimitValue::Infinite);
    let rabi = open().with_p(1.0).unwrap();
    let v = limit_regime(&rabi, LimitRegime::POne).unwrap().value.finite().unwrap();
    assert!((v - mean_photons_open_limit(&rabi).unwrap()).abs() < 1e-12);
    // Resonant beam: the ideal-limit value is finite and equals the σ− → 0 limit of the formula.
    let res = CavityParams::ideal(1.0, 0.5, 2.0 * PI, 0.4).unwrap();
    let v = limit_regime(&res, LimitRegime::SigmaPlusZeroSigmaMinusToZero).unwrap().value.finite().unwrap();
    let approach = mean_photons_open_limit(&res.with_rates(1e-7, 0.0).unwrap()).unwrap();
    assert!((v - approach).abs() < 1e-6, "{v} vs {approach}");
}

#[test]
fn weyl_limit_examples() {
    let f = CavityParams::figure1();
    assert!((weyl_char_limit(ZERO, &f, WEYL_LIMIT_TOL).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-14);
    let p0 = open().with_p(0.0).unwrap();
    let z = C64::new(0.6, -0.2);
    let gibbs = (-z.norm_sqr() * (p0.sigma_minus + p0.sigma_plus) / (4.0 * p0.damping())).exp();
    assert!((weyl_char_limit(z, &p0, WEYL_LIMIT_TOL).unwrap() - C64::new(gibbs, 0.0)).norm() < 1e-14);
    let mut rng = common::rng(9);
    for _ in 0..100 {
        let z = C64::from_polar(rng.gen_range(0.0..3.0), rng.gen_range(-PI..PI));
        assert!(weyl_char_limit(z, &open(), WEYL_LIMIT_TOL).unwrap().norm() <= 1.0 + 1e-12);
    }
    assert!(weyl_char_limit(z, &open().with_rates(0.1, 0.1).unwrap(), 1e-10).is_err());
}

#[test]
fn weyl_limit_truncation_is_certified() {
    for params in [open(), CavityParams::figure1()] {
        for z in [C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(0.3, 0.4)] {
            let lim = weyl_char_limit_detailed(z, &params, 1e-10).unwrap();
            assert!(lim.tail_bound <= 0.5e-10);
            let doubled = cavity::channels::weyl_product(&params, z, 2 * lim.terms)
                * cavity::channels::weyl_gaussian_exponent(&params, z, f64::INFINITY).exp();
            assert!((doubled - lim.value).norm() <= lim.tail_bound * lim.value.norm() + 1e-15);
        }
    }
}

#[test]
fn araki_segal_examples() {
    let mut rng = common::rng(4);
    let pts: Vec<C64> = (0..8).map(|_| C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))).collect();
    let vac = araki_segal_check(|z| C64::new((-z.norm_sqr() / 4.0).exp(), 0.0), &pts).unwrap();
    assert!(vac.passed, "{vac:?}");
    let f = CavityParams::figure1();
    let lim = araki_segal_check(|z| weyl_char_limit(z, &f, 1e-10).unwrap(), &pts).unwrap();
    assert!(lim.passed, "{lim:?}");
    let bad = araki_segal_check(|z| C64::new((z.norm_sqr() / 4.0).exp(), 0.0), &pts).unwrap();
    assert!(!bad.passed);
    assert!(araki_segal_check(|_| C64::new(1.0, 0.0), &vec![ZERO; 65]).is_err());
}

#[test]
fn ideal_energy_examples() {
    for p in [0.0, 1.0] {
        assert_eq!(energy_step_ideal(&canonical().with_p(p).unwrap()), 0.0);
    }
    assert!((energy_step_ideal(&canonical()) - 1.0).abs() < 1e-12);
    let res = CavityParams::ideal(1.0, 1.0, 2.0 * PI, 0.5).unwrap();
    assert!(energy_step_ideal(&res).abs() < 1e-12);
    assert_eq!(energy_total_ideal(&canonical(), 0), 0.0);
    assert!((energy_total_ideal(&canonical(), 5) - 4.0).abs() < 1e-12);
}

#[test]
fn open_energy_breakdown_is_additive() {
    for params in [open(), CavityParams::figure1(), open().with_rates(0.07, 0.07).unwrap()] {
        let n0 = 0.4;
        let mut acc = 0.0;
        for n in 1..=80u64 {
            let s = energy_open_step(&params, n0, n).unwrap();
            acc += s.in_flight + s.jump;
            let b = energy_open(&params, n0, n).unwrap();
            assert!((b.photon_part + b.interaction_part + b.jump_part - b.total).abs() < 1e-12);
            assert!((b.total - acc).abs() < 1e-10, "n={n}");
            if n >= 2 {
                assert!((s.jump - energy_jump_open(&params)).abs() < 1e-12);
            } else {
                assert!(s.jump.abs() < 1e-15);
            }
        }
    }
}

#[test]
fn open_energy_reduces_to_ideal() {
    let ideal = canonical();
    let tiny = ideal.with_rates(1e-12, 0.0).unwrap();
    assert!((energy_jump_open(&tiny) - energy_step_ideal(&ideal)).abs() < 1e-9);
    for n in 1..=12u64 {
        let s = energy_open_step(&tiny, 0.0, n).unwrap();
        assert!(s.in_flight.abs() < 1e-9);
        let total = energy_open(&tiny, 0.0, n).unwrap().total;
        assert!((total - energy_total_ideal(&ideal, n)).abs() < 1e-9);
    }
}

#[test]
fn open_energy_long_time_and_bound() {
    let params = open();
    let lim = energy_open_limit(&params, 0.5).unwrap();
    let far = energy_open(&params, 0.5, 2000).unwrap().total;
    assert!((far - lim).abs() < 1e-10);
    let mut rng = common::rng(23);
    for _ in 0..300 {
        let sm: f64 = rng.gen_range(1e-3..1.0);
        let q = CavityParams::new(
            rng.gen_range(0.1..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.1..4.0),
            rng.gen_range(0.0..=1.0),
            sm,
            rng.gen_range(0.0..0.95) * sm,
        )
        .unwrap();
        let bound = energy_open_upper_bound(&q).unwrap();
        for n in [1u64, 2, 5, 20, 100, 1000] {
            let v = energy_open(&q, 0.0, n).unwrap().total;
            assert!(v <= bound + 1e-12 * (1.0 + bound.abs()), "{q:?} n={n}: {v} > {bound}");
        }
    }
}

#[test]
fn printed_energy_total_differs_by_one_jump_and_photon_offset() {
    let params = open();
    let a = coupling_ratio(&params);
    for n in 1..=30u64 {
        let printed = energy_total_open_printed(&params, 0.2, n).unwrap();
        let total = energy_open(&params, 0.2, n).unwrap().total;
        let offset = energy_jump_open(&params)
            + params.eps * params.p * a * (1.0 - (-(n as f64) * params.damping() * params.tau).exp());
        assert!((printed - total - offset).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn energy_regimes() {
    let eq = canonical().with_rates(0.05, 0.05).unwrap();
    let n = 7;
    let expected = n as f64 * eq.tau * eq.eps * 0.05 + n as f64 * energy_step_ideal(&eq);
    assert!((energy_open_regimes(&eq, 0.0, EnergyRegime::EqualRates, n).unwrap() - expected).abs() < 1e-12);
    let printed_far = energy_total_open_printed(&eq.with_rates(0.05 + 1e-9, 0.05).unwrap(), 0.0, n).unwrap();
    assert!((printed_far - expected).abs() < 1e-6);

    let q = open().with_rates(0.2, 0.0).unwrap();
    let a = coupling_ratio(&q);
    let s = q.sigma_minus;
    let oracle = 0.25 * 2.0 * a * q.eps * (1.0 - (-s * q.tau / 2.0).exp() * (q.eps * q.tau).cos()) / (1.0 - (-s * q.tau).exp());
    assert!((energy_open_regimes(&q, 0.0, EnergyRegime::LongTime, 0).unwrap() - oracle).abs() < 1e-12);

    // The short-time form is linear in n.
    let sh = |n| energy_open_regimes(&q, 0.1, EnergyRegime::ShortTime, n).unwrap();
    assert!((sh(4) - 2.0 * sh(2)).abs() < 1e-12 && sh(0) == 0.0);
}

#[test]
fn entropy_examples() {
    let q = canonical();
    assert_eq!(entropy_production_ideal(&q, 1.0, 0.0, 0).unwrap(), 0.0);
    assert!((entropy_production_ideal(&q, 1.0, 0.0, 4).unwrap() - 4.0).abs() < 1e-12);
    let p0 = q.with_p(0.0).unwrap();
    for n in 0..20 {
        assert_eq!(entropy_production_ideal(&p0, 0.7, 1.0, n).unwrap(), 0.0);
    }
    assert!(entropy_production_ideal(&q, 0.0, 0.0, 1).is_err());
}

#[test]
fn relative_entropy_properties() {
    let q = canonical();
    let g = initial_state(&InitialStateSpec::Gibbs { beta: 1.0 }, &q, 48).unwrap();
    assert!(relative_entropy(&g, &g).unwrap().abs() < 1e-10);
    let mut rng = common::rng(31);
    for _ in 0..10 {
        let a = common::random_state(&mut rng, 12, 12);
        let b = common::random_state(&mut rng, 12, 12);
        assert!(relative_entropy(&a, &b).unwrap() >= -1e-10);
    }
    let vac = initial_state(&InitialStateSpec::Vacuum, &q, 4).unwrap();
    let mixed = DensityMatrix::cavity(Mat::eye(5).mapv(|z: C64| z / 5.0)).unwrap();
    assert!(matches!(relative_entropy(&mixed, &vac), Err(CavityError::Support(_))));
    assert!(relative_entropy(&vac, &mixed).unwrap() > 0.0);
}

#[test]
fn nobeam_examples() {
    let q = open().with_p(0.0).unwrap().with_rates(0.003, 0.001).unwrap();
    let r = nobeam_relaxation(&q, 0.0, 10.0, C64::new(0.5, 0.0)).unwrap();
    let st = r.steady.unwrap();
    assert!((st.n_bar - 0.5).abs() < 1e-12);
    assert!((st.beta_cav.unwrap() - 3f64.ln() / q.eps).abs() < 1e-12);
    let vac = q.with_rates(0.003, 0.0).unwrap();
    let st = nobeam_relaxation(&vac, 1.0, 1.0, ZERO).unwrap().steady.unwrap();
    assert_eq!(st.n_bar, 0.0);
    assert!(st.beta_cav.is_none());
    let eq = q.with_rates(0.01, 0.01).unwrap();
    let r = nobeam_relaxation(&eq, 2.0, 100.0, ZERO).unwrap();
    assert!((r.mean_photons - 3.0).abs() < 1e-12);
    assert!(r.steady.is_none());
}

#[test]
fn growth_rate_examples() {
    let q = canonical();
    let rate = 2.0 * q.p * (1.0 - q.p) * q.lambda * q.lambda / (q.tau * q.eps * q.eps) * (1.0 - (q.eps * q.tau).cos());
    let (ideal, _) = growth_rates(&q, 0.0, 10_000).unwrap();
    assert!((ideal - rate).abs() < 1e-3 * rate);
    // Short times: the leaky rate follows the ideal one; the gap closes linearly in nxτ.
    let leaky = q.with_rates(1e-4, 0.0).unwrap();
    let gap = |n| {
        let (i, o) = growth_rates(&leaky, 0.0, n).unwrap();
        (i - o).abs() / i
    };
    assert!(gap(20) < 1e-2);
    assert!(gap(40) / gap(20) > 1.5);
    let f = CavityParams::figure1();
    let (_, far) = growth_rates(&f, 0.0, 1_000_000).unwrap();
    assert!(far < 2.0 * mean_photons_open_limit(&f).unwrap() / (1e6 * f.tau));
    assert!(growth_rates(&q, 0.0, 0).is_err());
}
